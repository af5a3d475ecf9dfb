#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evcast/aging.hpp"
#include "evcast/types.hpp"

namespace evcast {

/// What makes an issued prediction "valid": each predicted event realized
/// (per_event) or the exact symbol active (per_symbol).
enum class Granularity { per_event, per_symbol };

Granularity granularity_from_string(const std::string& s);
std::string to_string(Granularity g);

struct PrecisionReport {
  std::int64_t steps = 0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;  // per-event mode only
  std::int64_t predictions_issued = 0;

  /// TP/(TP+FP); absent when nothing was predicted.
  std::optional<double> precision() const {
    if (tp + fp == 0) return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(tp + fp);
  }
  /// TP/(TP+FN); artifact extension, absent when undefined.
  std::optional<double> recall() const {
    if (tp + fn == 0) return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(tp + fn);
  }
};

/// Score the symbols predicted for this step against the realized vector.
void score_step(PrecisionReport& report, std::span<const EventSymbol> predicted,
                const EventVector& actual, Granularity g);

/// A planted dependency: when the cause symbol is fully active at step t,
/// the effect event fires at t + delay with probability q.
struct PlantedRule {
  EventSymbol cause;
  int effect = 0;
  int delay = 1;
  double q = 1.0;
};

struct SynthConfig {
  int n = 2;
  std::int64_t steps = 1000;
  std::vector<double> base_rates;  // per-event spontaneous probability
  std::vector<PlantedRule> planted;
  bool numeric_mode = false;  // also render numeric streams for detection
  double noise_sigma = 1.0;
  double shift = 8.0;  // additive level shift at event steps, in sigmas
  std::uint64_t seed = 1;
};

struct PlantedFiring {
  std::int64_t cause_step = 0;
  std::size_t rule_index = 0;
  bool fired = false;
};

struct SynthResult {
  NameTable names;
  std::vector<EventVector> events;
  std::vector<ContextVector> numeric;  // empty unless numeric_mode
  std::vector<PlantedFiring> firings;  // ground truth audit log
};

/// Deterministic given the seed.
SynthResult generate_synthetic(const SynthConfig& cfg);

/// Ground-truth dump (planted rules + realized firing log) for audit.
void write_ground_truth(const std::filesystem::path& path, const SynthConfig& cfg,
                        const SynthResult& result);

struct SweepGrid {
  std::vector<double> p_thr = {0.5};
  std::vector<int> k_max = {1};
  std::vector<int> m = {1};
  std::vector<int> l = {1};
  std::vector<std::string> detector = {"events"};  // "events" = input already binary
  std::vector<AgingPolicy> aging = {{}};
};

struct SweepRow {
  double p_thr = 0.5;
  int k_max = 1;
  int m = 1;
  int l = 1;
  std::string detector = "events";
  AgingPolicy aging;
  PrecisionReport report;
  std::string error;  // non-empty when this configuration failed
};

struct SweepInput {
  std::vector<EventVector> events;    // used when detector == "events"
  std::vector<ContextVector> numeric; // used by cusum/shewhart rows
  int delta_mem = 100;
  Granularity granularity = Granularity::per_event;
};

/// One full pipeline run per grid point; per-configuration failures are
/// recorded in the row and the sweep continues.
std::vector<SweepRow> run_sweep(const SweepGrid& grid, const SweepInput& input);

/// Result table CSV: one row per configuration, all grid keys + metrics.
void write_sweep_table(const std::filesystem::path& path,
                       std::span<const SweepRow> rows);
std::vector<SweepRow> read_sweep_table(const std::filesystem::path& path);

/// One CSV per figure family: precision vs p_thr per detector,
/// precision vs k_max per (m,l), precision vs aging k per kind.
void emit_plot_data(std::span<const SweepRow> rows,
                    const std::filesystem::path& out_dir);

}  // namespace evcast
