#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fraclap {

// Exit codes of run_command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitPartialFailure = 2;

struct RunOptions {
  std::string command;  // constants|lemma31|eigen|groundstate|scurve|lambdastar|sweep
  std::filesystem::path config_path;
  int workers = 1;
  std::optional<std::filesystem::path> resume;
};

// Parses and validates the JSON config, executes the command, writes results
// atomically under output_dir (overridable via FRACLAP_OUTPUT_DIR). Errors
// are reported on stderr naming the violated invariant.
int run_command(const RunOptions& opts);

// One sweep cell and its result, as stored in the JSONL checkpoint.
struct SweepOutcome {
  std::string key;
  std::string status;  // done | failed
  nlohmann::json payload;
};

// Expands the cartesian (m, s, lambda) ranges of config["sweep"], skips keys
// already done in the resume checkpoint, dispatches cells to a worker pool,
// and appends each completion to checkpoint_out. Returned outcomes are sorted
// by key regardless of completion order.
std::vector<SweepOutcome> run_sweep(
    const nlohmann::json& config, int workers,
    const std::optional<std::filesystem::path>& resume_checkpoint,
    const std::filesystem::path& checkpoint_out);

// Deterministic merged CSV for a sweep (schema depends on the sweep task).
std::string sweep_csv(const std::string& task,
                      const std::vector<SweepOutcome>& outcomes);

}  // namespace fraclap
