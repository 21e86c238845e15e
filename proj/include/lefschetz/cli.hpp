#pragma once

// Batch front end: `flow`, `family` and `signature` subcommands.
//
// Exit codes: 0 success, 1 error (parse, validation, degeneration),
// 2 flow stopped at the time cap, 3 word is not an identity factorization.

#include "lefschetz/fibered.hpp"
#include "lefschetz/flow.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace lefschetz {

inline constexpr const char* kVersion = "0.1.0";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters read from an INI-style `key = value` file with sections
/// [flow], [init] and [family]. Unknown sections or keys are rejected.
struct RunConfig {
  FlowConfig flow;
  // [init]: initial conformal factor for `flow`
  double init_amplitude = 0.0;
  std::uint64_t init_seed = 1;
  int init_modes = 6;
  // [family]
  BaseKind base = BaseKind::loop;
  int base_size = 32;  // loop: samples; disk-grid: points per side; sphere-mesh: subdivisions
  double family_amplitude = 0.2;
  std::uint64_t family_seed = 1;
  int fingerprint_modes = 12;
};

RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(std::istream& in);

/// Worker count from LEFSCHETZ_THREADS (unset or 0 = hardware concurrency).
unsigned thread_count_from_env();

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lefschetz
