#ifndef KTLAB_EXPERIMENTS_HPP
#define KTLAB_EXPERIMENTS_HPP

// The four canonical experiments behind the CLI. Each command reads a JSON
// config, writes CSV artifacts plus one manifest.json into the output
// directory, and returns the process exit code:
//   0 all assertions pass, 1 an assertion failed, 2 bad config,
//   3 numerical failure.

#include <cstdint>
#include <string>

namespace ktlab {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr int kExitPass = 0;
inline constexpr int kExitAssertion = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

int cmd_simulate(const std::string& config_path, const std::string& out_dir);
int cmd_sweep(const std::string& config_path, const std::string& out_dir);
int cmd_picard(const std::string& config_path, const std::string& out_dir);
int cmd_compare(const std::string& config_path, const std::string& out_dir, std::uint64_t seed);

}  // namespace ktlab

#endif
