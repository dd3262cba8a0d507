#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rpmcts {

/// Outcome of one episode of one (env, strategy, budget, seed) cell.
struct EpisodeRecord {
  std::string env;
  std::string strategy;
  int trial_budget = 0;
  long long seed = 0;
  int steps = 0;
  bool success = false;
  double final_return = 0.0;
  double inference_seconds = 0.0;
  double total_seconds = 0.0;
  std::optional<int> delta_trials;  // time-equalized runs only
};

/// Results file columns, in order:
///   env,strategy,trial_budget,seed,steps,success,final_return,
///   inference_seconds,total_seconds
/// Time-equalized runs append a delta_trials column. success is 0/1.
inline constexpr const char* kCsvHeader =
    "env,strategy,trial_budget,seed,steps,success,final_return,inference_seconds,total_seconds";

void write_csv_header(std::ostream& out, bool with_delta = false);
void write_csv_row(std::ostream& out, const EpisodeRecord& record, bool with_delta = false);

/// Reads either schema. Throws std::runtime_error on malformed input.
std::vector<EpisodeRecord> read_csv(std::istream& in);
std::vector<EpisodeRecord> read_csv_file(const std::string& path);

/// The deterministic columns (everything but timing) of a record, joined.
std::string metric_columns(const EpisodeRecord& record);

}  // namespace rpmcts
