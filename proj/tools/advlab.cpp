#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "advlab/cli.hpp"
#include "advlab/errors.hpp"

namespace cli = advlab::cli;

int main(int argc, char** argv) {
  CLI::App app{"advlab: exact constructions, attacks and Monte Carlo checks for ReLU classifiers"};
  std::string command, config_path, out, preset;
  std::int64_t seed = -1;
  int threads = 0;
  std::vector<std::string> sets;
  bool show_schema = false;
  app.add_option("command", command, "construct | attack | train | montecarlo | adversary | full-report");
  app.add_option("--config", config_path, "INI experiment file");
  app.add_option("--seed", seed, "master seed (experiment.seed)");
  app.add_option("--out", out, "output directory (experiment.out)");
  app.add_option("--threads", threads, "worker threads (experiment.threads; default ADVLAB_THREADS or all cores)");
  app.add_option("--preset", preset, "parameter preset (experiment.preset)");
  app.add_option("--set", sets, "override one key, section.key=value");
  app.add_flag("--schema", show_schema, "print the config schema and exit");
  CLI11_PARSE(app, argc, argv);

  if (show_schema) {
    std::cout << cli::schema_text();
    return 0;
  }
  try {
    cli::ExperimentConfig config = config_path.empty() ? cli::parse_config("") : cli::load_config(config_path);
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw cli::SchemaError("--set expects section.key=value, got '" + kv + "'");
      cli::set_value(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!command.empty()) cli::set_value(config, "command", command);
    if (seed >= 0) cli::set_value(config, "seed", std::to_string(seed));
    if (!out.empty()) cli::set_value(config, "out", out);
    if (threads > 0) cli::set_value(config, "threads", std::to_string(threads));
    if (!preset.empty()) cli::set_value(config, "preset", preset);

    const auto result = cli::run(config);
    for (const auto& c : result.claims) {
      std::cout << c.status << "  " << c.id << "  " << c.detail << '\n';
    }
    for (const auto& c : result.claims) {
      if (c.status == "fail") std::cerr << "invariant failed: " << c.id << ": " << c.detail << '\n';
    }
    std::cout << "artifacts in " << config.out_dir().string() << '\n';
    return result.exit_code;
  } catch (const cli::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return 2;
  } catch (const advlab::PreconditionError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return 2;
  } catch (const advlab::DomainError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return 2;
  } catch (const advlab::ShapeError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "invariant failed: " << e.what() << '\n';
    return 1;
  }
}
