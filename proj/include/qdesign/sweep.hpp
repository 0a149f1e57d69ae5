#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qdesign/designs.hpp"
#include "qdesign/quadratic_family.hpp"
#include "qdesign/report.hpp"

namespace qdesign {

enum class SweepOp { bluher, image, design, stabilizer, curves, homogeneity, equality };

std::string to_string(SweepOp op);

// auto: exact within the increment budget, otherwise sampled.
enum class DesignMode { automatic, exact, sampled };

struct SweepEntry {
  FamilySpec spec;
  std::vector<SweepOp> ops;
  DesignMode mode = DesignMode::automatic;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  bool force = false;
};

struct SweepConfig {
  std::string name = "sweep";
  std::vector<SweepEntry> entries;
  std::optional<std::string> output_dir;
  std::optional<unsigned> threads;
  std::uint64_t increment_budget = kExactIncrementBudget;
  std::uint64_t member_budget = BuildOptions{}.member_budget;
  std::uint64_t group_order_budget = 10'000'000;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// TOML. Every [[entry]] may give p, m and l as a value or an array; l may
// also be "all" or "coprime". Entries expand to the cross product and are
// all validated before anything runs. Throws ConfigError.
SweepConfig parse_sweep_config(std::string_view toml_text);
SweepConfig load_sweep_config(const std::filesystem::path& path);

struct SweepResult {
  json report;        // RunReport; every timing lives under "timings"
  std::string table;  // one row per entry
  bool hard_failure = false;
};

SweepResult run_sweep(const SweepConfig& config, unsigned threads);

}  // namespace qdesign
