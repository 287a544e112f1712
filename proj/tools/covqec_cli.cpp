#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "covqec/experiments.hpp"
#include "covqec/tensor_core.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed_override = 0;
  bool seed_given = false;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "experiment config file")->required();
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--seed", flags.seed_override, "override the config seed")
      ->each([&flags](const std::string&) { flags.seed_given = true; });
  cmd->add_option("--threads", flags.threads, "worker thread count")
      ->check(CLI::PositiveNumber);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw covqec::ConfigError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int run_kind(const CommonFlags& flags, covqec::ExperimentKind expected) {
  std::string text = read_file(flags.config_path);
  covqec::ExperimentConfig config = covqec::parse_config(text);
  if (config.kind != expected) {
    throw covqec::ConfigError(std::string("config kind '") + covqec::kind_name(config.kind) +
                              "' does not match the subcommand (expected '" +
                              covqec::kind_name(expected) + "')");
  }
  if (flags.seed_given) config.seed = flags.seed_override;
  std::filesystem::create_directories(flags.out_dir);
  std::vector<covqec::ResultRow> rows = covqec::run_experiment(config, flags.threads);
  std::string base = flags.out_dir + "/" + covqec::kind_name(config.kind);
  covqec::write_csv(rows, base + ".csv");
  covqec::write_summary(rows, config, text, base + ".summary.json");
  std::printf("wrote %zu rows to %s.csv\n", rows.size(), base.c_str());
  return 0;
}

int run_verify(const CommonFlags& flags) {
  std::string text = read_file(flags.config_path);
  covqec::ExperimentConfig config = covqec::parse_config(text);
  if (flags.seed_given) config.seed = flags.seed_override;
  std::vector<covqec::BoundCheck> checks = covqec::verify_bounds(config, flags.threads);
  std::fputs(covqec::render_checks(checks).c_str(), stdout);
  for (const covqec::BoundCheck& check : checks) {
    if (!check.pass) throw covqec::VerificationFailure("bound check failed: " + check.tag);
  }
  std::printf("%zu checks passed\n", checks.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"covariant-code error scaling experiments"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    covqec::ExperimentKind kind;
  };
  const Sub subs[] = {
      {"scaling", covqec::ExperimentKind::scaling},
      {"mc-u1", covqec::ExperimentKind::mc_u1},
      {"mc-sud", covqec::ExperimentKind::mc_sud},
      {"decoupling", covqec::ExperimentKind::decoupling},
      {"minentropy", covqec::ExperimentKind::minentropy_verify},
      {"sud-average", covqec::ExperimentKind::sud_average},
      {"worst-input", covqec::ExperimentKind::worst_input},
  };

  CommonFlags flags;
  covqec::ExperimentKind selected{};
  bool verify = false;
  for (const Sub& sub : subs) {
    CLI::App* cmd = app.add_subcommand(sub.name, "run the experiment and write CSV + summary");
    add_common(cmd, flags);
    cmd->callback([&selected, &sub] { selected = sub.kind; });
  }
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "check theorem bounds for the config; exit 4 on failure");
  add_common(verify_cmd, flags);
  verify_cmd->callback([&verify] { verify = true; });

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify) return run_verify(flags);
    return run_kind(flags, selected);
  } catch (const covqec::ConfigError& err) {
    std::fprintf(stderr, "config error: %s\n", err.what());
    return 2;
  } catch (const covqec::DimensionCapError& err) {
    std::fprintf(stderr, "cap exceeded: %s\n", err.what());
    return 3;
  } catch (const covqec::VerificationFailure& err) {
    std::fprintf(stderr, "verification failure: %s\n", err.what());
    return 4;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
}
