#include "cli.hpp"

#include "config.hpp"
#include "output.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace afckf::cli {

namespace {

struct RunFlags {
  std::string config_path;
  std::vector<std::string> cases;
  std::vector<std::string> variants;
  std::optional<int> runs;
  std::optional<int> steps;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out_dir = "afckf_out";
  std::string format = "table";
};

RunConfig resolve(const RunFlags& flags) {
  RunConfig config = flags.config_path.empty() ? RunConfig{} : load_config(flags.config_path);
  if (!flags.cases.empty()) {
    config.cases.clear();
    for (const auto& text : flags.cases) {
      const auto id = parse_case(text);
      if (!id) throw ValidationError("--case: expected A or B, got '" + text + "'");
      config.cases.push_back(*id);
    }
  }
  if (!flags.variants.empty()) {
    config.variants.clear();
    for (const auto& text : flags.variants) {
      const auto v = parse_variant(text);
      if (!v) throw ValidationError("--variants: unknown variant '" + text + "'");
      config.variants.push_back(*v);
    }
  }
  if (flags.runs) config.runs = *flags.runs;
  if (flags.steps) config.steps = *flags.steps;
  if (flags.seed) config.seed = *flags.seed;
  if (flags.threads) config.threads = *flags.threads;
  try {
    validate(config);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  return config;
}

int execute_run(const RunFlags& flags, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = resolve(flags);
  } catch (const ParseError& e) {
    err << "config parse error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ValidationError& e) {
    err << "config validation error: " << e.what() << '\n';
    return kExitConfigError;
  }

  try {
    const RunReport report = monte_carlo(config);
    for (const CaseReport& c : report.cases) {
      for (const VariantReport& v : c.variants) {
        if (v.aborted_runs == config.runs) {
          err << "runtime error: every run of " << to_string(v.variant) << " in case "
              << to_string(c.id) << " aborted\n";
          return kExitRuntimeError;
        }
        if (v.aborted_runs > 0) {
          err << "warning: " << v.aborted_runs << " run(s) of " << to_string(v.variant)
              << " in case " << to_string(c.id) << " aborted (>10% failed epochs)\n";
        }
      }
    }
    write_bundle(report, config, flags.out_dir);
    out << (flags.format == "csv" ? summary_csv(report) : summary_table(report));
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cubature Kalman filter benchmark: CKF and adaptive fading variants"};
  app.require_subcommand(1);

  RunFlags flags;
  CLI::App* run = app.add_subcommand("run", "Run the Monte Carlo tracking benchmark");
  run->add_option("--config", flags.config_path, "YAML run configuration")
      ->check(CLI::ExistingFile);
  run->add_option("--case", flags.cases, "Noise case(s) to run: A, B or A,B")->delimiter(',');
  run->add_option("--variants", flags.variants,
                  "Comma-separated variants: CKF,ACKF,AFCKF_single,AFCKF_P,AFCKF_R")
      ->delimiter(',');
  run->add_option("--runs", flags.runs, "Monte Carlo runs per case");
  run->add_option("--steps", flags.steps, "Epochs per run");
  run->add_option("--seed", flags.seed, "Master seed");
  run->add_option("--threads", flags.threads, "Worker threads (0 = all cores)");
  run->add_option("--out", flags.out_dir, "Output directory")->capture_default_str();
  run->add_option("--format", flags.format, "Summary printed to stdout")
      ->check(CLI::IsMember({"csv", "table"}))
      ->capture_default_str();

  CLI::App* defaults = app.add_subcommand("defaults", "Print the resolved default configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  if (defaults->parsed()) {
    out << dump_config(RunConfig{});
    return kExitOk;
  }
  return execute_run(flags, out, err);
}

}  // namespace afckf::cli
