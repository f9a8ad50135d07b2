#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qtransport/cli/compute.hpp"
#include "qtransport/cli/config.hpp"
#include "qtransport/cli/output.hpp"
#include "qtransport/cli/report.hpp"

namespace qtransport::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfig = 2, kResource = 3, kMismatch = 4 };

/// A finished result in its three renderings.
struct Document {
  nlohmann::json json;
  Table table;
  std::string pretty;
  /// Data for --plot; the table when empty.
  std::string plot_csv;
  bool mismatch = false;
};

inline std::string exact_digits(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline nlohmann::json describe(const RunConfig& c) {
  nlohmann::json j = {{"subcommand", c.subcommand}, {"ensemble", c.ensemble}, {"variant", c.variant}};
  if (c.named)
    j["named"] = *c.named;
  else
    j["moment"] = {{"basis", c.basis}, {"partition", parse_partition_field("moment", c.moment)}};
  return j;
}

inline std::string histogram_csv(const std::vector<double>& raw, int bins = 50) {
  const auto [lo_it, hi_it] = std::minmax_element(raw.begin(), raw.end());
  const double lo = *lo_it, hi = *hi_it > *lo_it ? *hi_it : *lo_it + 1;
  std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
  for (double v : raw) {
    auto b = static_cast<std::size_t>((v - lo) / (hi - lo) * bins);
    ++counts[std::min(b, counts.size() - 1)];
  }
  Table t{{"bin_low", "bin_high", "count"}, {}};
  for (int b = 0; b < bins; ++b)
    t.rows.push_back({exact_digits(lo + (hi - lo) * b / bins), exact_digits(lo + (hi - lo) * (b + 1) / bins),
                      std::to_string(counts[static_cast<std::size_t>(b)])});
  return t.csv();
}

inline void write_file(const std::string& path, const std::string& text, const char* field) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError(field, "cannot write " + path);
  f << text;
}

}  // namespace detail

inline Document run_exact(const RunConfig& c) {
  const RationalFunction v = exact_value(c);
  Document d;
  d.json = detail::describe(c);
  if (c.n1) d.json["channels"] = {{"n1", *c.n1}, {"n2", *c.n2}};
  if (c.m) d.json["m"] = *c.m;
  if (c.tau_d) d.json["tau_d"] = *c.tau_d;
  if (c.r) d.json["r"] = *c.r;
  d.json["result"] = encode(v);
  d.table = {{"quantity", "value", "numerator", "denominator"},
             {{c.named ? *c.named : c.basis + c.moment, v.to_string(), d.json["result"]["numerator"].get<std::string>(),
               d.json["result"]["denominator"].get<std::string>()}}};
  d.pretty = "exact " + c.ensemble + " " + (c.named ? *c.named : c.basis + " " + c.moment) + "\n  value   = " + v.to_string() + "\n";
  if (const auto x = decimal(v); !x.empty()) d.pretty += "  decimal = " + x + "\n";
  return d;
}

inline Document run_sample(const RunConfig& c) {
  std::vector<double> raw;
  const bool keep = c.raw || c.plot;
  const auto st = sample_moment(c, keep ? &raw : nullptr);
  Document d;
  d.json = st;
  d.table = {{"mean", "se", "n", "seed", "estimator"},
             {{exact_digits(st.mean), exact_digits(st.standard_error), std::to_string(st.n_samples), std::to_string(st.seed),
               st.estimator_name}}};
  d.pretty = st.estimator_name + "\n  mean = " + decimal(st.mean) + " +- " + decimal(st.standard_error) + "\n  n    = " +
             std::to_string(st.n_samples) + ", seed " + std::to_string(st.seed) + "\n";
  if (c.raw) {
    Table t{{"index", "value"}, {}};
    for (std::size_t i = 0; i < raw.size(); ++i) t.rows.push_back({std::to_string(i), exact_digits(raw[i])});
    detail::write_file(*c.raw, t.csv(), "raw");
  }
  if (c.plot) d.plot_csv = detail::histogram_csv(raw);
  return d;
}

inline Document run_semiclassical(const RunConfig& c) {
  const auto r = semiclassical_series(c);
  Document d;
  d.json = detail::describe(c);
  d.json["order"] = c.order;
  d.json["order_r"] = c.variant == "barrier" ? nlohmann::json(c.order_r) : nlohmann::json(nullptr);
  d.json["normalization"] = encode(r.normalization);
  nlohmann::json series = nlohmann::json::array();
  d.table = {{"m_power", "coefficient"}, {}};
  d.pretty = "semiclassical " + c.ensemble + " (" + c.variant + "), order " + std::to_string(c.order) + "\n  moment = (" +
             r.normalization.to_string() + ") * [\n";
  const auto& coeffs = r.series.coefficients();
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    series.push_back({{"m_power", it->first}, {"coefficient", it->second.to_string()}});
    d.table.rows.push_back({std::to_string(it->first), it->second.to_string()});
    d.pretty += "    M^" + std::to_string(it->first) + " : " + it->second.to_string() + "\n";
  }
  d.pretty += "    + O(M^" + std::to_string(r.series.lowest() - 1) + ") ]\n";
  d.json["series"] = series;
  return d;
}

inline Document run_compare(const RunConfig& c) {
  const auto cmp = compare(c);
  Document d;
  d.json = detail::describe(c);
  d.json["order"] = c.order;
  d.json["order_r"] = c.variant == "barrier" ? nlohmann::json(c.order_r) : nlohmann::json(nullptr);
  d.json["normalization"] = encode(cmp.series.normalization);
  nlohmann::json rows = nlohmann::json::array();
  d.table = {{"m_power", "semiclassical", "exact", "agree"}, {}};
  d.pretty = "compare " + c.ensemble + " (" + c.variant + "), order " + std::to_string(c.order) + "\n";
  for (const auto& r : cmp.rows) {
    rows.push_back({{"m_power", r.m_power}, {"semiclassical", r.semiclassical.to_string()}, {"exact", r.exact.to_string()}, {"agree", r.agree}});
    d.table.rows.push_back({std::to_string(r.m_power), r.semiclassical.to_string(), r.exact.to_string(), r.agree ? "true" : "false"});
    d.pretty += "  M^" + std::to_string(r.m_power) + "  " + (r.agree ? "ok      " : "MISMATCH") + "  " + r.semiclassical.to_string() +
                "  vs  " + r.exact.to_string() + "\n";
  }
  d.json["rows"] = rows;
  if (cmp.sampled) {
    const auto& s = *cmp.sampled;
    d.json["sampled"] = {{"estimate", s.stats}, {"exact", encode(s.exact)}, {"z", s.z}, {"agree", s.agree}};
    d.pretty += "  sampled " + decimal(s.stats.mean) + " +- " + decimal(s.stats.standard_error) + " vs exact " + s.exact.to_string() +
                " (" + decimal(s.exact) + "), z = " + decimal(s.z) + (s.agree ? "  ok" : "  MISMATCH") + "\n";
  } else {
    d.json["sampled"] = nullptr;
  }
  d.json["mismatches"] = cmp.mismatches;
  d.pretty += "  mismatches: " + std::to_string(cmp.mismatches) + "\n";
  d.mismatch = cmp.mismatches > 0;
  return d;
}

inline Document run_conjecture(const RunConfig& c) {
  const auto rep = conjecture(c);
  Document d;
  d.json = rep;
  d.table = {{"m_power", "lhs", "rhs", "equal"}, {}};
  d.pretty = conjectures::to_string(rep.id) + " for lambda " + rep.lambda.to_string() + " through order " + std::to_string(rep.order) +
             (rep.r_order ? " (R^" + std::to_string(*rep.r_order) + ")" : std::string()) + ": " + conjectures::to_string(rep.verdict) + "\n";
  for (const auto& w : rep.compared) {
    const bool eq = w.lhs == w.rhs;
    d.table.rows.push_back({std::to_string(w.m_power), w.lhs.to_string(), w.rhs.to_string(), eq ? "true" : "false"});
    d.pretty += "  M^" + std::to_string(w.m_power) + "  " + (eq ? "=" : "!=") + "  " + w.lhs.to_string() + "  |  " + w.rhs.to_string() + "\n";
  }
  d.mismatch = rep.verdict == conjectures::Verdict::Violated;
  return d;
}

inline Document run_report(const RunConfig& c) {
  const auto rows = report_tables(c.seed, static_cast<std::size_t>(std::min<std::int64_t>(c.samples, 20000)));
  Document d;
  d.table = report_table(rows);
  d.json = nlohmann::json::array();
  for (const auto& r : rows)
    d.json.push_back({{"quantity", r.quantity}, {"parameters", r.parameters}, {"value", r.value}, {"decimal", r.decimal}, {"provenance", r.provenance}});
  d.pretty = d.table.markdown();
  return d;
}

inline Document execute(const RunConfig& c) {
  validate(c);
  if (c.subcommand == "exact") return run_exact(c);
  if (c.subcommand == "sample") return run_sample(c);
  if (c.subcommand == "semiclassical") return run_semiclassical(c);
  if (c.subcommand == "compare") return run_compare(c);
  if (c.subcommand == "conjecture") return run_conjecture(c);
  return run_report(c);
}

inline std::string render(const Document& d, const std::string& format) {
  if (format == "csv") return d.table.csv();
  if (format == "pretty") return d.pretty;
  return d.json.dump(2) + "\n";
}

/// Runs one configuration, writes the result and its manifest, and returns
/// the process exit code.  The manifest goes next to --output, or to
/// `manifest_path` when given.
inline int run(const RunConfig& c, std::ostream& out, std::ostream& err, const std::optional<std::string>& manifest_path = {}) {
  try {
    const Document d = execute(c);
    const std::string text = render(d, c.format);
    if (c.output)
      detail::write_file(*c.output, text, "output");
    else
      out << text;
    if (c.plot) detail::write_file(*c.plot, d.plot_csv.empty() ? d.table.csv() : d.plot_csv, "plot");
    const auto mpath = manifest_path ? manifest_path : (c.output ? std::optional<std::string>(*c.output + ".manifest.json") : std::nullopt);
    if (mpath) detail::write_file(*mpath, manifest(c).dump(2) + "\n", "manifest");
    if (d.mismatch && c.strict && (c.subcommand == "compare" || c.subcommand == "conjecture")) {
      err << "error: " << c.subcommand << " found a mismatch\n";
      return kMismatch;
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const ResourceError& e) {
    err << "resource budget exceeded: " << e.what() << "\n";
    return kResource;
  } catch (const UnsupportedError& e) {
    err << "unsupported: " << e.what() << "\n";
    return kConfig;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return kConfig;
  } catch (const std::domain_error& e) {
    err << "invalid input: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

/// Re-executes the configuration stored in a manifest file.
inline int replay(const std::string& manifest_file, std::ostream& out, std::ostream& err) {
  try {
    std::ifstream f(manifest_file);
    if (!f) throw ConfigError("replay", "cannot read " + manifest_file);
    const auto j = nlohmann::json::parse(f);
    return run(config_from_manifest(j), out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const nlohmann::json::exception& e) {
    err << "config error [replay]: " << e.what() << "\n";
    return kConfig;
  }
}

}  // namespace qtransport::cli
