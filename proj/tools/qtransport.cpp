// Command-line front end: qtransport <subcommand> [options]
#include <iostream>

#include <CLI11.hpp>

#include "qtransport/cli/run.hpp"

using qtransport::cli::RunConfig;

namespace {

void add_common(CLI::App* app, RunConfig& c, std::optional<std::string>& manifest_path) {
  app->add_option("--output,-o", c.output, "Write the result here instead of stdout");
  app->add_option("--format", c.format, "json, csv or pretty")->capture_default_str();
  app->add_option("--threads", c.threads, "Worker threads")->capture_default_str();
  app->add_option("--manifest", manifest_path, "Write the run manifest to this file");
  app->add_option("--plot", c.plot, "Dump histogram or series data as CSV");
}

void add_moment(CLI::App* app, RunConfig& c) {
  app->add_option("--ensemble", c.ensemble, "Ensemble")->required();
  app->add_option("--moment", c.moment, "Partition as a JSON array, e.g. \"[2,1]\"")->capture_default_str();
  app->add_option("--basis", c.basis, "powersum or schur")->capture_default_str();
  app->add_option("--named", c.named, "conductance, conductance-variance or shot-noise");
  app->add_option("--variant", c.variant, "ideal, barrier or energy")->capture_default_str();
}

void add_channels(CLI::App* app, RunConfig& c) {
  app->add_option("--n1", c.n1, "Channels in lead 1");
  app->add_option("--n2", c.n2, "Channels in lead 2");
  app->add_option("--m", c.m, "Total channels");
  app->add_option("--tau-d", c.tau_d, "Dwell time, exact rational");
  app->add_option("--r", c.r, "Barrier reflection probability, exact rational");
}

void add_orders(CLI::App* app, RunConfig& c) {
  app->add_option("--order", c.order, "Orders in 1/M beyond the leading term")->capture_default_str();
  app->add_option("--order-r", c.order_r, "Orders in R kept with a barrier")->capture_default_str();
}

void add_sampling(CLI::App* app, RunConfig& c) {
  app->add_option("--samples", c.samples, "Number of samples")->capture_default_str();
  app->add_option("--seed", c.seed, "Random seed")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transport moments of chaotic cavities, computed by independent routes"};
  app.set_version_flag("--version", std::string(qtransport::cli::kVersion));
  app.require_subcommand(0, 1);
  RunConfig c;
  std::optional<std::string> manifest_path;
  std::string replay_file;
  app.add_option("--replay", replay_file, "Re-run the configuration stored in a manifest");

  auto* exact = app.add_subcommand("exact", "Closed-form moments");
  add_moment(exact, c);
  add_channels(exact, c);
  add_common(exact, c, manifest_path);

  auto* sample = app.add_subcommand("sample", "Monte Carlo estimates");
  add_moment(sample, c);
  add_channels(sample, c);
  add_sampling(sample, c);
  sample->add_option("--raw", c.raw, "Write per-sample values as CSV");
  add_common(sample, c, manifest_path);

  auto* semi = app.add_subcommand("semiclassical", "Series in 1/M from the matrix model");
  add_moment(semi, c);
  add_orders(semi, c);
  add_common(semi, c, manifest_path);

  auto* cmp = app.add_subcommand("compare", "Closed form against the semiclassical series, optionally with sampling");
  add_moment(cmp, c);
  add_channels(cmp, c);
  add_orders(cmp, c);
  add_sampling(cmp, c);
  cmp->add_flag("--with-samples", c.with_samples, "Add a sampled check at numeric parameters");
  cmp->add_flag("--strict", c.strict, "Exit with status 4 on any mismatch");
  add_common(cmp, c, manifest_path);

  auto* conj = app.add_subcommand("conjecture", "Series-level tests of the open conjectures");
  conj->add_option("--id", c.id, "self-conjugate-independence, reciprocity-signed or reciprocity-barrier-inverse")->required();
  conj->add_option("--lambda", c.lambda, "Partition as a JSON array")->required();
  add_orders(conj, c);
  conj->add_flag("--strict", c.strict, "Exit with status 4 when the relation is violated");
  add_common(conj, c, manifest_path);

  auto* report = app.add_subcommand("report", "Reference sheet of known values with their provenance");
  add_sampling(report, c);
  add_common(report, c, manifest_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qtransport::cli::kConfig;
  }

  if (!replay_file.empty()) return qtransport::cli::replay(replay_file, std::cout, std::cerr);
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return qtransport::cli::kConfig;
  }
  c.subcommand = app.get_subcommands().front()->get_name();
  if (c.subcommand == "report" && c.format == "json" && !app.get_subcommands().front()->count("--format")) c.format = "pretty";
  return qtransport::cli::run(c, std::cout, std::cerr, manifest_path);
}
