#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evcast/aging.hpp"
#include "evcast/correlation.hpp"
#include "evcast/detection.hpp"
#include "evcast/evaluation.hpp"
#include "evcast/prediction.hpp"
#include "evcast/ptl.hpp"

namespace evcast {

/// Everything one run needs: detector settings, model orders, threshold,
/// aging and memory window, constraints, scoring granularity, seed.
struct PipelineConfig {
  DetectorSpec detector;  // applied to every stream (numeric input only)
  std::optional<std::string> detector_config;  // per-stream overrides file
  ForestParams forest;
  double p_thr = 0.5;
  AgingPolicy aging;
  int delta_mem = 100;
  std::vector<Constraint> constraints;
  Granularity granularity = Granularity::per_event;
  std::uint64_t seed = 0;
  bool fill_forward = false;
};

/// A prediction that survived pruning and the pool filter, scheduled for
/// scoring when its horizon arrives.
struct IssuedForecast {
  std::int64_t issued_at = 0;
  int horizon = 1;
  EventSymbol symbol;
  double merged_p = 0.0;
};

/// Per-step pipeline result.
struct StepOutcome {
  std::vector<ProbTemporalRule> rules;      // extracted this step
  std::vector<IssuedForecast> issued;       // retained after the pool filter
};

/// The online chain over an event-vector stream, strictly in step order:
/// score due forecasts, update the forest, predict, prune, merge into the
/// aging pool, filter by merged probability.
class Pipeline {
 public:
  Pipeline(int n, NameTable names, PipelineConfig config);

  StepOutcome step(const EventVector& ev);

  const PatternForest& forest() const { return forest_; }
  const RulePool& pool() const { return pool_; }
  const PrecisionReport& report() const { return report_; }
  const NameTable& names() const { return names_; }
  const std::vector<EventVector>& history() const { return history_; }

 private:
  NameTable names_;
  PipelineConfig config_;
  PatternForest forest_;
  RulePool pool_;
  PrecisionReport report_;
  std::vector<EventVector> history_;
  std::map<std::int64_t, std::vector<IssuedForecast>> pending_;  // keyed by due step
};

struct PipelineOutputPaths {
  std::filesystem::path events;  // event CSV (written for numeric input)
  std::filesystem::path rules;   // rule JSON records, one per line
  std::filesystem::path pool;    // final pool snapshot
  std::filesystem::path report;  // precision report JSON
};

/// Batch front end: numeric CSV input runs detection first, event CSV
/// input feeds correlation directly (detected by the header's e<i>
/// column names). All four outputs are always written.
PrecisionReport run_pipeline(const PipelineConfig& config,
                             const std::filesystem::path& input,
                             const PipelineOutputPaths& out);

std::string report_to_json(const PrecisionReport& report);

}  // namespace evcast
