#ifndef ADVLAB_CLI_HPP_
#define ADVLAB_CLI_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

namespace advlab::cli {

inline constexpr int kSchemaVersion = 1;

/// Unknown section or key, a value that does not parse, or a bad schema version.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An INI document: [experiment] holds command, seed, out, threads, preset
/// and schema; every other section holds one command's parameters. Keys that
/// are absent take the preset value, then the schema default.
struct ExperimentConfig {
  boost::property_tree::ptree tree;

  std::string command() const;
  std::uint64_t seed() const;
  std::filesystem::path out_dir() const;
  int threads() const;
  std::string preset() const;
};

const std::vector<std::string>& command_names();
const std::vector<std::string>& preset_names();

/// Parses INI text and validates it. Throws SchemaError.
ExperimentConfig parse_config(const std::string& ini_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Sets "section.key" (or a bare [experiment] key) and revalidates.
void set_value(ExperimentConfig& config, const std::string& dotted_key, const std::string& value);

void validate(const ExperimentConfig& config);

/// Every key of every section, defaults filled in, in schema order. Leaves
/// out [experiment] out and threads, which do not affect results.
std::string effective_config_ini(const ExperimentConfig& config);

/// Published schema: one line per key with its default.
std::string schema_text();

struct Claim {
  std::string id;
  std::string status;  // pass, fail, infeasible, observed, vacuous
  std::string source;  // command that produced it
  std::string detail;
};

struct RunResult {
  int exit_code = 0;  // 0 ok, 1 an asserted invariant failed
  std::vector<Claim> claims;
  std::map<std::string, std::string> artifacts;  // file name -> contents, manifest excluded
};

/// Runs the configured command and writes its artifacts, claims.tsv and
/// manifest.json into out_dir. full-report runs every command into
/// out_dir/<command>/ and writes summary.txt.
RunResult run(const ExperimentConfig& config);

/// The same without touching the file system.
RunResult execute(const ExperimentConfig& config);

/// One row per known claim with its status from the claims.tsv files under
/// dir, "not run" where none was recorded.
std::string emit_report(const std::filesystem::path& dir);

}  // namespace advlab::cli

#endif  // ADVLAB_CLI_HPP_
