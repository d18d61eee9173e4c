// maxreg: batch front-end for the local maximal operators.
//
//   maxreg gen     --config run.json [--out dir]   sample the configured fields
//   maxreg compute --config run.json [--out dir]   fields plus maximal functions and argmax sets
//   maxreg verify  --config run.json [--out dir]   everything plus reports.json and summary.txt
//   maxreg report  --out dir                       print the summary table of dir/reports.json
//
// Exit status: 0 all checks pass, 1 a check failed, 2 hypotheses unmet, 3 bad config or I/O.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "maxreg/maxreg.hpp"

namespace {

int run_stage(maxreg::Stage stage, const std::string& config, const std::string& out, const std::string& threads,
              bool quiet) {
  const maxreg::RunConfig cfg = maxreg::load_config(config);
  const auto outcome = maxreg::run_config(cfg, stage, out, threads);
  if (!quiet && stage == maxreg::Stage::verify) std::cout << outcome.summary;
  return outcome.exit_code;
}

int report(const std::string& out) {
  const std::string path = (out.empty() ? std::string("out") : out) + "/reports.json";
  std::ifstream is(path);
  if (!is) throw maxreg::error("cannot open " + path);
  maxreg::json j;
  try {
    j = maxreg::json::parse(is);
  } catch (const maxreg::json::parse_error& e) {
    throw maxreg::config_error("", std::string("invalid reports.json: ") + e.what());
  }
  const auto reports = maxreg::reports_from_json(j);
  std::cout << maxreg::emit_report(reports);
  for (const auto& r : reports)
    if (!r.pass) return maxreg::exit_check_failed;
  return maxreg::exit_pass;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local multilinear fractional maximal operators on lattices"};
  app.require_subcommand(1);
  std::string config, out, threads;
  bool quiet = false;
  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* opt = cmd->add_option("--config", config, "JSON run configuration");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", out, "output directory (overrides output_dir)");
    cmd->add_option("--threads", threads, "worker threads: an integer or auto");
    cmd->add_flag("--quiet", quiet, "suppress the summary table");
  };
  auto* gen = app.add_subcommand("gen", "sample the configured fields");
  auto* compute = app.add_subcommand("compute", "compute maximal functions and argmax sets");
  auto* verify = app.add_subcommand("verify", "run the configured checks");
  auto* rep = app.add_subcommand("report", "print the summary table of an output directory");
  add_common(gen, true);
  add_common(compute, true);
  add_common(verify, true);
  add_common(rep, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : maxreg::exit_config;
  }

  try {
    if (*gen) return run_stage(maxreg::Stage::gen, config, out, threads, quiet);
    if (*compute) return run_stage(maxreg::Stage::compute, config, out, threads, quiet);
    if (*verify) return run_stage(maxreg::Stage::verify, config, out, threads, quiet);
    return report(out);
  } catch (const maxreg::hypothesis_error& e) {
    std::cerr << "maxreg: " << e.what() << '\n';
    return maxreg::exit_hypothesis;
  } catch (const std::exception& e) {
    std::cerr << "maxreg: " << e.what() << '\n';
    return maxreg::exit_config;
  }
}
