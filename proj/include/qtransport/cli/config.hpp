#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "qtransport/errors.hpp"
#include "qtransport/symfun/partition.hpp"

#ifndef QTRANSPORT_VERSION
#define QTRANSPORT_VERSION "0.0.0"
#endif

namespace qtransport::cli {

inline constexpr const char* kVersion = QTRANSPORT_VERSION;

/// Everything needed to reproduce one invocation.  Defaults are written
/// into the manifest so a replay does not depend on them.
struct RunConfig {
  std::string subcommand;
  std::string ensemble;
  std::string variant = "ideal";
  /// Partition as a JSON array, e.g. "[2,1]".
  std::string moment = "[1]";
  std::string basis = "powersum";
  std::optional<std::string> named;
  std::optional<int> n1;
  std::optional<int> n2;
  std::optional<int> m;
  /// Exact rational text such as "1" or "3/2"; symbolic when absent.
  std::optional<std::string> tau_d;
  std::optional<std::string> r;
  int order = 2;
  int order_r = 2;
  std::int64_t samples = 100000;
  std::uint64_t seed = 0;
  int threads = 1;
  bool with_samples = false;
  std::string id;
  std::string lambda;
  std::string format = "json";
  std::optional<std::string> output;
  std::optional<std::string> plot;
  std::optional<std::string> raw;
  bool strict = false;
};

inline nlohmann::json to_json_value(const std::optional<std::string>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }
inline nlohmann::json to_json_value(const std::optional<int>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

inline void to_json(nlohmann::json& j, const RunConfig& c) {
  j = {{"subcommand", c.subcommand},
       {"ensemble", c.ensemble},
       {"variant", c.variant},
       {"moment", c.moment},
       {"basis", c.basis},
       {"named", to_json_value(c.named)},
       {"n1", to_json_value(c.n1)},
       {"n2", to_json_value(c.n2)},
       {"m", to_json_value(c.m)},
       {"tau_d", to_json_value(c.tau_d)},
       {"r", to_json_value(c.r)},
       {"order", c.order},
       {"order_r", c.order_r},
       {"samples", c.samples},
       {"seed", c.seed},
       {"threads", c.threads},
       {"with_samples", c.with_samples},
       {"id", c.id},
       {"lambda", c.lambda},
       {"format", c.format},
       {"output", to_json_value(c.output)},
       {"plot", to_json_value(c.plot)},
       {"raw", to_json_value(c.raw)},
       {"strict", c.strict}};
}

namespace detail {

template <class T>
void read_optional(const nlohmann::json& j, const char* key, std::optional<T>& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}
template <class T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

inline void from_json(const nlohmann::json& j, RunConfig& c) {
  using detail::read;
  using detail::read_optional;
  try {
    read(j, "subcommand", c.subcommand);
    read(j, "ensemble", c.ensemble);
    read(j, "variant", c.variant);
    read(j, "moment", c.moment);
    read(j, "basis", c.basis);
    read_optional(j, "named", c.named);
    read_optional(j, "n1", c.n1);
    read_optional(j, "n2", c.n2);
    read_optional(j, "m", c.m);
    read_optional(j, "tau_d", c.tau_d);
    read_optional(j, "r", c.r);
    read(j, "order", c.order);
    read(j, "order_r", c.order_r);
    read(j, "samples", c.samples);
    read(j, "seed", c.seed);
    read(j, "threads", c.threads);
    read(j, "with_samples", c.with_samples);
    read(j, "id", c.id);
    read(j, "lambda", c.lambda);
    read(j, "format", c.format);
    read_optional(j, "output", c.output);
    read_optional(j, "plot", c.plot);
    read_optional(j, "raw", c.raw);
    read(j, "strict", c.strict);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest", e.what());
  }
}

/// Manifest written next to every result.
inline nlohmann::json manifest(const RunConfig& c) {
  return {{"tool", "qtransport"}, {"version", kVersion}, {"config", c}};
}

inline RunConfig config_from_manifest(const nlohmann::json& j) {
  if (!j.contains("config")) throw ConfigError("manifest", "missing 'config'");
  return j.at("config").get<RunConfig>();
}

inline symfun::Partition parse_partition_field(const std::string& field, const std::string& text) {
  try {
    return symfun::parse_partition(text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field, e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(field, e.what());
  }
}

/// Checks ranges and combinations that do not depend on the subcommand's
/// computation.
inline void validate(const RunConfig& c) {
  static const char* subs[] = {"exact", "sample", "semiclassical", "compare", "conjecture", "report"};
  if (std::find(std::begin(subs), std::end(subs), c.subcommand) == std::end(subs))
    throw ConfigError("subcommand", "unknown subcommand '" + c.subcommand + "'");
  if (c.format != "json" && c.format != "csv" && c.format != "pretty")
    throw ConfigError("format", "must be json, csv or pretty");
  if (c.variant != "ideal" && c.variant != "barrier" && c.variant != "energy")
    throw ConfigError("variant", "must be ideal, barrier or energy");
  if (c.basis != "powersum" && c.basis != "schur") throw ConfigError("basis", "must be powersum or schur");
  if (c.order < 0 || c.order > 12) throw ConfigError("order", "must lie in 0..12");
  if (c.order_r < 0) throw ConfigError("order-r", "must be nonnegative");
  if (c.samples < 2) throw ConfigError("samples", "at least two samples are required");
  if (c.threads < 1) throw ConfigError("threads", "must be positive");
  if (c.n1 && *c.n1 < 1) throw ConfigError("n1", "must be positive");
  if (c.n2 && *c.n2 < 1) throw ConfigError("n2", "must be positive");
  if (c.m && *c.m < 1) throw ConfigError("m", "must be positive");
  if (c.n1.has_value() != c.n2.has_value()) throw ConfigError(c.n1 ? "n2" : "n1", "give both channel numbers or neither");
  if (c.subcommand != "conjecture" && c.subcommand != "report") {
    const auto mu = parse_partition_field("moment", c.moment);
    if (mu.empty() && !c.named) throw ConfigError("moment", "must be a nonempty partition");
  }
}

}  // namespace qtransport::cli
