#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "qtransport/cli/run.hpp"

using namespace qtransport;
using namespace qtransport::cli;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome invoke(const RunConfig& c) {
  std::ostringstream out, err;
  const int code = run(c, out, err);
  return {code, out.str(), err.str()};
}

RunConfig cfg(const std::string& sub, const std::string& ensemble, const std::string& moment = "[1]") {
  RunConfig c;
  c.subcommand = sub;
  c.ensemble = ensemble;
  c.moment = moment;
  return c;
}

/// Runs the installed binary and captures stdout and the exit status.
Outcome shell(const std::string& args) {
  const std::string cmd = std::string(QTRANSPORT_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int status = pclose(p);
  return {WEXITSTATUS(status), out, ""};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("qtransport-cli-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Examples, ExactConductance) {
  auto c = cfg("exact", "transmission");
  c.n1 = 2;
  c.n2 = 3;
  const auto r = invoke(c);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["result"]["value"], "6/5");
  EXPECT_EQ(j["result"]["numerator"], "6");
  EXPECT_EQ(j["result"]["denominator"], "5");
}

TEST(Examples, CompareSecondMoment) {
  auto c = cfg("compare", "transmission", "[2]");
  c.order = 2;
  const auto r = invoke(c);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["mismatches"], 0);
  EXPECT_EQ(j["rows"].size(), 3u);
  for (const auto& row : j["rows"]) EXPECT_TRUE(row["agree"].get<bool>());
}

TEST(Examples, SampleUniformMean) {
  auto c = cfg("sample", "cue");
  c.n1 = c.n2 = 1;
  c.seed = 7;
  const auto r = invoke(c);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["n"], 100000);
  EXPECT_EQ(j["seed"], 7);
  EXPECT_LT(std::abs(j["mean"].get<double>() - 0.5), 4 * j["se"].get<double>());
}

TEST(Examples, BinaryMatchesLibrary) {
  const auto r = shell("exact --ensemble transmission --moment \"[1]\" --n1 2 --n2 3");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["result"]["value"], "6/5");
}

TEST(ExitCodes, ConfigErrorsNameTheField) {
  auto c = cfg("exact", "transmission", "[2,3]");
  auto r = invoke(c);
  EXPECT_EQ(r.code, kConfig);
  EXPECT_NE(r.err.find("moment"), std::string::npos);

  c = cfg("sample", "cue");
  c.n1 = c.n2 = 1;
  c.samples = 1;
  r = invoke(c);
  EXPECT_EQ(r.code, kConfig);
  EXPECT_NE(r.err.find("samples"), std::string::npos);

  c = cfg("exact", "transmission");
  c.n1 = 1;
  r = invoke(c);
  EXPECT_EQ(r.code, kConfig);
  EXPECT_NE(r.err.find("n2"), std::string::npos);

  c = cfg("exact", "bogus");
  r = invoke(c);
  EXPECT_EQ(r.code, kConfig);
  EXPECT_NE(r.err.find("ensemble"), std::string::npos);

  EXPECT_EQ(shell("sample --ensemble cue --n1 0 --n2 1").code, kConfig);
  EXPECT_EQ(shell("exact --moment \"[1]\"").code, kConfig);
}

TEST(ExitCodes, UnsupportedRequests) {
  auto c = cfg("sample", "cue");
  c.variant = "barrier";
  c.n1 = c.n2 = 1;
  EXPECT_EQ(invoke(c).code, kConfig);
}

TEST(ExitCodes, ResourceBudget) {
  auto c = cfg("semiclassical", "transmission", "[2]");
  c.order = 12;
  const auto r = invoke(c);
  EXPECT_EQ(r.code, kResource);
  EXPECT_NE(r.err.find("attempted bound 12"), std::string::npos);
}

TEST(ExitCodes, StrictMismatch) {
  auto c = cfg("conjecture", "");
  c.id = "reciprocity-signed";
  c.lambda = "[2]";
  c.strict = true;
  EXPECT_EQ(invoke(c).code, kOk);

  auto cmp = cfg("compare", "transmission", "[1]");
  cmp.n1 = 1;
  cmp.n2 = 1;
  cmp.with_samples = true;
  cmp.samples = 2;
  cmp.seed = 3;
  cmp.strict = true;
  // Find a seed whose two samples sit more than 4 SE from 1/2.
  int code = kOk;
  for (std::uint64_t seed = 0; seed < 200 && code == kOk; ++seed) {
    cmp.seed = seed;
    code = invoke(cmp).code;
  }
  EXPECT_EQ(code, kMismatch);
  cmp.strict = false;
  EXPECT_EQ(invoke(cmp).code, kOk);
}

TEST(Manifest, ReplayIsByteIdentical) {
  for (const char* sub : {"exact", "semiclassical", "conjecture", "sample"}) {
    RunConfig c = cfg(sub, std::string(sub) == "sample" ? "cue" : "time-delay", "[2]");
    c.id = "self-conjugate-independence";
    c.lambda = "[2,1]";
    c.n1 = c.n2 = 2;
    if (std::string(sub) == "exact" || std::string(sub) == "semiclassical") c.n1 = c.n2 = std::nullopt;
    c.samples = 2000;
    c.output = scratch(std::string(sub) + ".json").string();
    ASSERT_EQ(invoke(c).code, 0) << sub;
    const std::string first = slurp(*c.output);
    const auto man = nlohmann::json::parse(slurp(*c.output + ".manifest.json"));
    EXPECT_EQ(man["tool"], "qtransport");
    EXPECT_EQ(man["config"]["samples"], 2000);
    EXPECT_EQ(man["config"]["order_r"], 2);
    std::filesystem::remove(*c.output);
    std::ostringstream out, err;
    ASSERT_EQ(replay(*c.output + ".manifest.json", out, err), 0) << err.str();
    EXPECT_EQ(slurp(*c.output), first) << sub;
  }
}

TEST(Manifest, BinaryReplay) {
  const auto out = scratch("bin.json");
  ASSERT_EQ(shell("semiclassical --ensemble transmission --moment \"[1,1]\" --order 2 -o " + out.string()).code, 0);
  const std::string first = slurp(out);
  ASSERT_EQ(shell("--replay " + out.string() + ".manifest.json").code, 0);
  EXPECT_EQ(slurp(out), first);
}

TEST(Manifest, ConfigRoundTrip) {
  RunConfig c = cfg("compare", "time-delay", "[2,1]");
  c.basis = "schur";
  c.m = 4;
  c.tau_d = "3/2";
  c.r = "1/3";
  c.seed = 99;
  c.plot = "p.csv";
  const auto back = config_from_manifest(manifest(c));
  EXPECT_EQ(nlohmann::json(back).dump(), nlohmann::json(c).dump());
  EXPECT_THROW(config_from_manifest(nlohmann::json{{"tool", "qtransport"}}), ConfigError);
}

TEST(Encodings, CsvAndJsonAgree) {
  auto c = cfg("semiclassical", "time-delay", "[2]");
  c.variant = "barrier";
  const auto j = nlohmann::json::parse(invoke(c).out);
  c.format = "csv";
  std::istringstream csv(invoke(c).out);
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "m_power,coefficient");
  std::size_t i = 0;
  while (std::getline(csv, line)) {
    const auto f = parse_csv_line(line);
    ASSERT_LT(i, j["series"].size());
    EXPECT_EQ(std::stoi(f[0]), j["series"][i]["m_power"].get<int>());
    EXPECT_EQ(algebra::parse_rational_function(f[1]), algebra::parse_rational_function(j["series"][i]["coefficient"].get<std::string>()));
    ++i;
  }
  EXPECT_EQ(i, j["series"].size());

  auto s = cfg("sample", "cue", "[2,1]");
  s.n1 = 2;
  s.n2 = 3;
  s.samples = 500;
  const auto sj = nlohmann::json::parse(invoke(s).out);
  s.format = "csv";
  std::istringstream scsv(invoke(s).out);
  std::getline(scsv, line);
  std::getline(scsv, line);
  const auto f = parse_csv_line(line);
  EXPECT_EQ(std::stod(f[0]), sj["mean"].get<double>());
  EXPECT_EQ(std::stod(f[1]), sj["se"].get<double>());
  EXPECT_EQ(f[4], sj["estimator"]);

  auto e = cfg("exact", "time-delay", "[2]");
  const auto ej = nlohmann::json::parse(invoke(e).out);
  e.format = "csv";
  std::istringstream ecsv(invoke(e).out);
  std::getline(ecsv, line);
  std::getline(ecsv, line);
  const auto ef = parse_csv_line(line);
  EXPECT_EQ(ef[0], "powersum[2]");
  EXPECT_EQ(decode(ej["result"]), algebra::parse_rational_function(ef[1]));
}

TEST(Encodings, CsvQuoting) {
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(parse_csv_line("\"[2,1]\",x,\"q\"\"\""), (std::vector<std::string>{"[2,1]", "x", "q\""}));
}

TEST(Outputs, RawSamplesAndPlot) {
  auto c = cfg("sample", "inverse-laguerre", "[1]");
  c.m = 2;
  c.samples = 100;
  c.raw = scratch("raw.csv").string();
  c.plot = scratch("hist.csv").string();
  ASSERT_EQ(invoke(c).code, 0);
  std::istringstream raw(slurp(*c.raw));
  std::string line;
  int lines = 0;
  while (std::getline(raw, line)) ++lines;
  EXPECT_EQ(lines, 101);
  std::istringstream hist(slurp(*c.plot));
  std::getline(hist, line);
  EXPECT_EQ(line, "bin_low,bin_high,count");
  long total = 0;
  while (std::getline(hist, line)) total += std::stol(parse_csv_line(line)[2]);
  EXPECT_EQ(total, 100);
}

TEST(Outputs, ExactVariants) {
  auto c = cfg("exact", "transmission");
  c.named = "conductance-variance";
  c.n1 = c.n2 = 5;
  EXPECT_EQ(nlohmann::json::parse(invoke(c).out)["result"]["value"], "25/396");

  c = cfg("exact", "time-delay", "[1,1]");
  c.variant = "barrier";
  c.m = 3;
  c.r = "1/2";
  c.tau_d = "1";
  EXPECT_EQ(nlohmann::json::parse(invoke(c).out)["result"]["value"], "279/16");  // 9 * 31/16

  c = cfg("exact", "time-delay", "[2,1]");
  c.basis = "schur";
  c.m = 4;
  c.tau_d = "1";
  EXPECT_EQ(nlohmann::json::parse(invoke(c).out)["result"]["value"], "64/3");

  c = cfg("exact", "transmission", "[1,1,1]");
  c.basis = "schur";
  c.n1 = c.n2 = 1;
  EXPECT_EQ(nlohmann::json::parse(invoke(c).out)["result"]["value"], "0");

  c = cfg("exact", "transmission", "[1]");
  c.format = "pretty";
  c.n1 = 2;
  c.n2 = 3;
  const auto p = invoke(c).out;
  EXPECT_NE(p.find("6/5"), std::string::npos);
  EXPECT_NE(p.find("1.2"), std::string::npos);
}

TEST(Outputs, CompareBarrierTimeDelay) {
  auto c = cfg("compare", "time-delay", "[1,1]");
  c.variant = "barrier";
  const auto j = nlohmann::json::parse(invoke(c).out);
  EXPECT_EQ(j["mismatches"], 0);
  EXPECT_EQ(j["order_r"], 2);
}

TEST(Outputs, CompareWithSamples) {
  auto c = cfg("compare", "transmission", "[2]");
  c.n1 = 2;
  c.n2 = 3;
  c.with_samples = true;
  c.samples = 20000;
  const auto j = nlohmann::json::parse(invoke(c).out);
  EXPECT_EQ(j["mismatches"], 0);
  EXPECT_TRUE(j["sampled"]["agree"].get<bool>());
  EXPECT_EQ(j["sampled"]["estimate"]["n"], 20000);
}

TEST(Report, RowsCarryProvenance) {
  const auto rows = report_tables();
  auto find = [&](const std::string& q, const std::string& p) -> const ReportRow* {
    for (const auto& r : rows)
      if (r.quantity == q && r.parameters == p) return &r;
    return nullptr;
  };
  const auto* var = find("var(Tr T)", "N1=N2=5");
  ASSERT_NE(var, nullptr);
  EXPECT_EQ(var->value, "25/396");
  const auto* tw = find("<tau_W^2>/tau_D^2", "M=3, R=1/2");
  ASSERT_NE(tw, nullptr);
  EXPECT_EQ(tw->value, "31/16");
  const auto* fig2 = find("single-encounter time-delay class", "<Tr Q>, one q=2 vertex, loop weight N=1");
  ASSERT_NE(fig2, nullptr);
  EXPECT_EQ(fig2->value, "-1/M");
  const auto* mean = find("<Tr T>", "symbolic");
  ASSERT_NE(mean, nullptr);
  EXPECT_EQ(mean->value, "N1*N2/M");
  for (const auto& r : rows) EXPECT_FALSE(r.provenance.empty()) << r.quantity;

  auto c = cfg("report", "");
  c.format = "csv";
  const auto out = invoke(c).out;
  EXPECT_EQ(out.substr(0, out.find('\n')), "quantity,parameters,value,decimal,provenance");
}
