#pragma once

#include <string>
#include <vector>

#include "qtransport/cli/output.hpp"
#include "qtransport/ensembles/ensembles.hpp"
#include "qtransport/exact/exact_rmt.hpp"
#include "qtransport/semiclassical/expand.hpp"

namespace qtransport::cli {

/// One reference value with the route that produced it.
struct ReportRow {
  std::string quantity;
  std::string parameters;
  std::string value;
  std::string decimal;
  std::string provenance;
};

namespace detail {

inline ReportRow exact_row(std::string quantity, std::string parameters, const RationalFunction& v, std::string provenance) {
  return {std::move(quantity), std::move(parameters), v.to_string(), decimal(v), std::move(provenance)};
}

inline int count_classes(const semiclassical::WickModel& model, int k, const std::vector<int>& qs, int steps,
                         const RationalFunction& value, bool keep_loops) {
  const auto c = semiclassical::find_configuration(semiclassical::configurations(model, k), qs, steps);
  if (!c) return 0;
  int found = 0;
  for (const auto& cl : semiclassical::diagram_classes(model, *c, keep_loops))
    if (cl.value == value) ++found;
  return found;
}

}  // namespace detail

/// Reference sheet of closed-form, series and sampled values.
inline std::vector<ReportRow> report_tables(std::uint64_t seed = 0, std::size_t samples = 20000) {
  using algebra::parse_rational_function;
  using algebra::Symbol;
  using symfun::Partition;
  namespace sc = semiclassical;
  std::vector<ReportRow> rows;

  rows.push_back(detail::exact_row("<Tr T>", "symbolic", exact::schur_moment_T(Partition{1}), "closed form"));
  rows.push_back(detail::exact_row("<Tr T>", "N1=2, N2=3", exact::schur_moment_T(Partition{1}, exact::Channels::numeric(2, 3)),
                                   "closed form"));
  rows.push_back(detail::exact_row("var(Tr T)", "symbolic", exact::conductance_variance().closed_form, "closed form"));
  rows.push_back(detail::exact_row("var(Tr T)", "N1=N2=5", exact::conductance_variance(exact::Channels::numeric(5, 5)).closed_form,
                                   "closed form (625/9900)"));
  rows.push_back(detail::exact_row("<Tr T^2>", "symbolic", exact::trace_moment_T(2).value, "closed form (character route)"));
  {
    sc::ExpandOptions o;
    const auto s = sc::expand(sc::model_ideal_transmission(Partition{2}), 2, o);
    rows.push_back({"<Tr T^2>", "series in 1/M", s.to_string(), "", "semiclassical, order 2"});
  }
  {
    ensembles::SamplingOptions o;
    o.seed = seed;
    o.count = samples;
    const auto st = ensembles::estimate_T_moment(ensembles::NamedStatistic::Conductance, 1, 1, o);
    rows.push_back({"<Tr T>", "N1=N2=1", decimal(st.mean) + " +- " + decimal(st.standard_error), decimal(st.mean),
                    "sampled, " + std::to_string(samples) + " samples, seed " + std::to_string(seed)});
  }
  rows.push_back(detail::exact_row("<Tr Q>", "symbolic", exact::trace_moment_Q(1).value, "closed form"));
  rows.push_back(detail::exact_row("<Tr Q^2>", "symbolic", exact::trace_moment_Q(2).value, "closed form (character route)"));
  for (const char* r : {"0", "1/4", "1/2", "3/4"})
    rows.push_back(detail::exact_row("<tau_W^2>/tau_D^2", std::string("M=3, R=") + r,
                                     exact::tau_w2_barrier(3, parse_rational_function(r)).value, "closed form"));
  rows.push_back(detail::exact_row("<tau_W^2>/tau_D^2", "symbolic M", exact::tau_w2_barrier(std::nullopt).value,
                                   "closed form without the R^(M+1) term"));

  const auto target = parse_rational_function("N1^2*N2^2/M^5");
  rows.push_back({"classes of value N1^2*N2^2/M^5", "<(Tr T)^2>, vertices q=2,3",
                  std::to_string(detail::count_classes(sc::model_ideal_transmission(Partition{1, 1}), 3, {2, 3}, 0, target, false)), "",
                  "diagram enumeration, order 3 (face count is odd)"});
  rows.push_back({"classes of value N1^2*N2^2/M^5", "<Tr T^2>, vertices q=2,3",
                  std::to_string(detail::count_classes(sc::model_ideal_transmission(Partition{2}), 3, {2, 3}, 0, target, false)), "",
                  "diagram enumeration, order 3"});
  {
    const auto model = sc::model_time_delay(Partition{1});
    const auto loop_value = parse_rational_function("-N/M");
    const int n = detail::count_classes(model, 1, {2}, 0, loop_value, true);
    const auto at_one = loop_value.substitute(Symbol::N, RationalFunction(1));
    rows.push_back({"single-encounter time-delay class", "<Tr Q>, one q=2 vertex, loop weight N=1", at_one.to_string(), decimal(at_one),
                    "diagram enumeration, order 1, " + std::to_string(n) + " classes of value -N/M"});
  }
  return rows;
}

inline Table report_table(const std::vector<ReportRow>& rows) {
  Table t{{"quantity", "parameters", "value", "decimal", "provenance"}, {}};
  for (const auto& r : rows) t.rows.push_back({r.quantity, r.parameters, r.value, r.decimal, r.provenance});
  return t;
}

}  // namespace qtransport::cli
