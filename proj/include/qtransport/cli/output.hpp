#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qtransport/algebra/parse.hpp"
#include "qtransport/algebra/rational_function.hpp"
#include "qtransport/errors.hpp"

namespace qtransport::cli {

using algebra::RationalFunction;

/// Lossless encoding of an exact value: the canonical string plus the
/// numerator and denominator polynomials.
inline nlohmann::json encode(const RationalFunction& f) {
  if (f.is_constant() && f.is_real()) {
    const mpq_class q = f.constant_value().re();
    return {{"value", f.to_string()}, {"numerator", q.get_num().get_str()}, {"denominator", q.get_den().get_str()}};
  }
  return {{"value", f.to_string()}, {"numerator", f.numerator().to_string()}, {"denominator", f.denominator().to_string()}};
}

inline RationalFunction decode(const nlohmann::json& j) {
  return algebra::parse_rational_function(j.at("value").get<std::string>());
}

/// Decimal rendering of a real constant; empty for anything else.
inline std::string decimal(const RationalFunction& f) {
  if (!f.is_constant() || !f.is_real()) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", f.constant_value().to_complex().real());
  return buf;
}

inline std::string decimal(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

/// Plain CSV table; every row must have the header's width.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_field(r[i]);
      os << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return os.str();
  }

  std::string markdown() const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& r) {
      os << '|';
      for (const auto& c : r) os << ' ' << c << " |";
      os << '\n';
    };
    line(header);
    os << '|';
    for (std::size_t i = 0; i < header.size(); ++i) os << " --- |";
    os << '\n';
    for (const auto& r : rows) line(r);
    return os.str();
  }
};

/// Splits one CSV line, honoring quoted fields.
inline std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

inline RationalFunction parse_field(const std::string& field, const std::string& text) {
  try {
    return algebra::parse_rational_function(text);
  } catch (const std::exception& e) {
    throw ConfigError(field, "cannot parse '" + text + "': " + e.what());
  }
}

}  // namespace qtransport::cli
