#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "evcast/types.hpp"

namespace evcast {

/// Per-step detector outcome. direction is +1 for an above-detection,
/// -1 for a below-detection, 0 otherwise; the event flag itself is binary.
struct DetectorSignal {
  bool flag = false;
  int direction = 0;
};

class Detector {
 public:
  virtual ~Detector() = default;
  /// Consume one sample, advance the state, return the signal.
  /// Non-finite input throws without touching the state.
  virtual DetectorSignal step(double x) = 0;
};

struct CusumParams {
  std::optional<double> mu;  // unset: estimated from a warm-up window
  double k_pos = 0.5;
  double k_neg = 0.5;
  double thresh_pos = 4.0;
  double thresh_neg = 4.0;
  int warmup = 50;  // mu-estimation window when mu is unset
};

/// One-sided cumulative sums against a target value. The triggering sum
/// is reset to zero on detection.
class CusumDetector final : public Detector {
 public:
  explicit CusumDetector(CusumParams params);

  DetectorSignal step(double x) override;

  double pos_sum() const { return pos_; }
  double neg_sum() const { return neg_; }
  std::optional<double> target() const { return mu_; }

 private:
  CusumParams params_;
  std::optional<double> mu_;
  double warm_sum_ = 0.0;
  int warm_count_ = 0;
  double pos_ = 0.0;  // >= 0
  double neg_ = 0.0;  // <= 0
};

struct ShewhartParams {
  double limit = 3.0;  // control-limit multiplier L
  int warmup = 50;     // minimum samples before any flag
  double sigma_floor = 1e-9;
};

/// Control chart on cumulative mean/sigma: flag when a sample exceeds
/// mean +/- L*sigma computed from all samples seen so far (before the
/// current one). Flagged samples still enter the statistics.
class ShewhartDetector final : public Detector {
 public:
  explicit ShewhartDetector(ShewhartParams params);

  DetectorSignal step(double x) override;

  std::int64_t count() const { return count_; }
  double mean() const { return mean_; }
  double sigma() const;
  double ucl() const;
  double lcl() const;

 private:
  ShewhartParams params_;
  std::int64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;  // Welford
};

/// Per-stream detector configuration (mirrors the detector config file).
struct DetectorSpec {
  std::string kind = "shewhart";  // "cusum" | "shewhart"
  CusumParams cusum;
  ShewhartParams shewhart;
};

std::unique_ptr<Detector> make_detector(const DetectorSpec& spec);

/// One detector per stream, advanced in lockstep. Detector i only ever
/// consumes values of stream i.
class DetectorBank {
 public:
  DetectorBank() = default;
  DetectorBank(std::size_t n, const DetectorSpec& spec);
  explicit DetectorBank(std::vector<std::unique_ptr<Detector>> detectors);

  std::size_t size() const { return detectors_.size(); }

  /// Transform one context vector into an event vector; stream errors are
  /// rethrown with the stream index attached.
  EventVector detect(const ContextVector& cv);

  /// Last step's signed annotations (parallel to the last EventVector).
  const std::vector<DetectorSignal>& last_signals() const { return signals_; }

 private:
  std::vector<std::unique_ptr<Detector>> detectors_;
  std::vector<DetectorSignal> signals_;
};

/// Detector config file: flat key=value lines with optional
/// [stream <i>] sections overriding the defaults. '#' starts a comment.
std::vector<DetectorSpec> parse_detector_config(std::istream& in, std::size_t n);
std::vector<DetectorSpec> parse_detector_config(const std::filesystem::path& path,
                                                std::size_t n);

DetectorBank make_bank(std::size_t n, const std::vector<DetectorSpec>& specs);

}  // namespace evcast
