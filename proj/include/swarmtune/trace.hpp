#pragma once

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmtune/search_space.hpp"

namespace swarmtune {

/// One objective evaluation in a run. iteration 0 is the initialization
/// sweep; best_so_far is the running minimum including this record.
struct TraceRecord {
  std::size_t evaluation = 0;
  std::size_t iteration = 0;
  HyperParams candidate;
  double fitness = 0.0;
  double best_so_far = 0.0;
  bool diverged = false;  // in-memory flag only, not a CSV column
};

struct OptimizationResult {
  Position best_position;
  HyperParams best_hyperparams;
  double best_fitness = std::numeric_limits<double>::infinity();
  std::vector<TraceRecord> trace;
  std::size_t evaluations = 0;
};

/// An objective evaluation failed mid-run. Carries the trace collected up
/// to the failure so callers can persist partial artifacts.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, std::vector<TraceRecord> partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}

  const std::vector<TraceRecord>& partial_trace() const { return partial_; }

 private:
  std::vector<TraceRecord> partial_;
};

/// Shortest round-trippable decimal form (17 significant digits).
std::string format_real(double v);

inline constexpr const char* kTraceHeader =
    "evaluation,iteration,num_filters,dense_units,dropout_rate,learning_rate,fitness,best_so_far";

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace);
void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRecord>& trace);

/// Parses a trace written by write_trace_csv. Throws ParseError with the
/// offending line number on malformed input.
std::vector<TraceRecord> read_trace_csv(const std::filesystem::path& path);

}  // namespace swarmtune
