#include "lcq/experiments.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Q-tensor energy experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool print_config = false;

  for (const char* name : {"verify", "minimize", "sweep-L", "falsify", "convert"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "INI experiment config")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides [run] output_dir)");
    sub->add_option("--seed", seed, "RNG seed (overrides [run] seed)");
    sub->add_flag("--print-config", print_config, "print the effective config and exit");
  }
  CLI11_PARSE(app, argc, argv);

  try {
    lcq::ExperimentConfig cfg = config_path.empty() ? lcq::ExperimentConfig{} : lcq::load_config(config_path);
    cfg.command = lcq::parse_command(app.get_subcommands().front()->get_name());
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (app.get_subcommands().front()->count("--seed")) {
      cfg.seed = seed;
      cfg.solve.seed = seed;
      cfg.init.seed = seed;
    }
    if (print_config) {
      std::cout << lcq::to_ini(cfg);
      return 0;
    }
    const lcq::ExperimentResult res = lcq::run_experiment(cfg);
    std::cout << res.summary << (res.ok ? "status: all assertions passed\n" : "status: assertion failures\n");
    return res.ok ? 0 : 1;
  } catch (const lcq::precondition_error& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
