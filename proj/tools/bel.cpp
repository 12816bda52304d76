#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "bel/bel.hpp"

namespace {

int run(const std::string& command, bel::RunConfig cfg) {
  cfg.command = command;
  if (command == "simulate") {
    const auto m = bel::cmd_simulate(cfg);
    std::cout << "wrote " << m["files"].size() << " datasets to " << cfg.output_dir << '\n';
  } else if (command == "fit") {
    const auto r = bel::cmd_fit(cfg);
    std::cout << r.report_json.dump(2) << '\n';
  } else if (command == "bench") {
    bel::cmd_bench(cfg, &std::cout);
  } else if (command == "summarize") {
    std::cout << bel::cmd_summarize(cfg).dump(2) << '\n';
  } else if (command == "diagnose") {
    std::cout << bel::cmd_diagnose(cfg).dump(2) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian empirical likelihood variable selection"};
  app.require_subcommand(1, 1);

  std::string config_path;
  unsigned jobs = 0;
  bool full = false;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string input;

  for (const char* name : {"simulate", "fit", "bench", "summarize", "diagnose"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "key = value config file")->required();
    sub->add_option("--jobs", jobs, "worker threads (default: all cores)");
    sub->add_flag("--full", full, "use 100 replicates");
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("input", input, "dataset (fit) or chain file (summarize, diagnose)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(bel::ExitCode::usage);
  }

  try {
    bel::RunConfig cfg = bel::load_config(config_path);
    const CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--jobs")) cfg.jobs = jobs;
    if (full) cfg.full = true;
    if (sub->count("--seed")) cfg.master_seed = seed;
    if (sub->count("--out")) cfg.output_dir = out_dir;
    if (sub->count("input")) cfg.input = input;
    return run(sub->get_name(), cfg);
  } catch (const bel::Error& e) {
    std::cerr << "bel: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "bel: " << e.what() << '\n';
    return static_cast<int>(bel::ExitCode::numerical);
  }
}
