#include "evcast/detection.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace evcast {

CusumDetector::CusumDetector(CusumParams params) : params_(params), mu_(params.mu) {
  if (!(params_.thresh_pos > 0) || !(params_.thresh_neg > 0))
    throw std::invalid_argument("cusum: thresholds must be positive");
  if (params_.k_pos < 0 || params_.k_neg < 0)
    throw std::invalid_argument("cusum: tolerances must be non-negative");
  if (!mu_ && params_.warmup < 1)
    throw std::invalid_argument("cusum: warmup must be positive when mu is estimated");
}

DetectorSignal CusumDetector::step(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("cusum: non-finite sample");
  if (!mu_) {
    // target estimation: no flags until the warm-up window is full
    warm_sum_ += x;
    if (++warm_count_ >= params_.warmup) mu_ = warm_sum_ / warm_count_;
    return {};
  }
  pos_ = std::max(0.0, pos_ + (x - *mu_ - params_.k_pos));
  neg_ = std::min(0.0, neg_ + (x - *mu_ + params_.k_neg));
  bool above = pos_ > params_.thresh_pos;
  bool below = neg_ < -params_.thresh_neg;
  if (above) pos_ = 0.0;
  if (below) neg_ = 0.0;
  DetectorSignal sig;
  sig.flag = above || below;
  sig.direction = above == below ? 0 : (above ? +1 : -1);
  return sig;
}

ShewhartDetector::ShewhartDetector(ShewhartParams params) : params_(params) {
  if (!(params_.limit > 0)) throw std::invalid_argument("shewhart: L must be positive");
  if (params_.warmup < 2) throw std::invalid_argument("shewhart: warmup must be >= 2");
  if (!(params_.sigma_floor > 0))
    throw std::invalid_argument("shewhart: sigma_floor must be positive");
}

double ShewhartDetector::sigma() const {
  if (count_ < 2) return 0.0;
  return std::sqrt(m2_ / static_cast<double>(count_ - 1));
}

double ShewhartDetector::ucl() const {
  return mean_ + params_.limit * std::max(sigma(), params_.sigma_floor);
}

double ShewhartDetector::lcl() const {
  return mean_ - params_.limit * std::max(sigma(), params_.sigma_floor);
}

DetectorSignal ShewhartDetector::step(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("shewhart: non-finite sample");
  DetectorSignal sig;
  // decide on the statistics of x_1..x_{t-1} only
  if (count_ >= params_.warmup) {
    if (x > ucl())
      sig = {true, +1};
    else if (x < lcl())
      sig = {true, -1};
  }
  ++count_;
  double delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (x - mean_);
  return sig;
}

std::unique_ptr<Detector> make_detector(const DetectorSpec& spec) {
  if (spec.kind == "cusum") return std::make_unique<CusumDetector>(spec.cusum);
  if (spec.kind == "shewhart") return std::make_unique<ShewhartDetector>(spec.shewhart);
  throw std::invalid_argument("unknown detector kind: " + spec.kind);
}

DetectorBank::DetectorBank(std::size_t n, const DetectorSpec& spec) {
  detectors_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) detectors_.push_back(make_detector(spec));
}

DetectorBank::DetectorBank(std::vector<std::unique_ptr<Detector>> detectors)
    : detectors_(std::move(detectors)) {}

EventVector DetectorBank::detect(const ContextVector& cv) {
  if (cv.values.size() != detectors_.size())
    throw std::invalid_argument("detector bank size " +
                                std::to_string(detectors_.size()) +
                                " != vector length " + std::to_string(cv.values.size()));
  EventVector ev;
  ev.t = cv.t;
  ev.flags.resize(detectors_.size());
  signals_.assign(detectors_.size(), {});
  for (std::size_t i = 0; i < detectors_.size(); ++i) {
    try {
      signals_[i] = detectors_[i]->step(cv.values[i]);
    } catch (const std::exception& e) {
      throw std::runtime_error("stream " + std::to_string(i + 1) + " at step " +
                               std::to_string(cv.t) + ": " + e.what());
    }
    ev.flags[i] = signals_[i].flag ? 1 : 0;
  }
  return ev;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double to_double(const std::string& v, const std::string& key) {
  double out = 0.0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw std::runtime_error("detector config: bad value for " + key + ": '" + v + "'");
  return out;
}

void apply_kv(DetectorSpec& spec, const std::string& key, const std::string& value) {
  if (key == "detector") {
    if (value != "cusum" && value != "shewhart")
      throw std::runtime_error("detector config: unknown detector '" + value + "'");
    spec.kind = value;
  } else if (key == "mu") {
    spec.cusum.mu = to_double(value, key);
  } else if (key == "k_pos") {
    spec.cusum.k_pos = to_double(value, key);
  } else if (key == "k_neg") {
    spec.cusum.k_neg = to_double(value, key);
  } else if (key == "thresh_pos") {
    spec.cusum.thresh_pos = to_double(value, key);
  } else if (key == "thresh_neg") {
    spec.cusum.thresh_neg = to_double(value, key);
  } else if (key == "L") {
    spec.shewhart.limit = to_double(value, key);
  } else if (key == "warmup") {
    int w = static_cast<int>(to_double(value, key));
    spec.cusum.warmup = w;
    spec.shewhart.warmup = w;
  } else if (key == "sigma_floor") {
    spec.shewhart.sigma_floor = to_double(value, key);
  } else {
    throw std::runtime_error("detector config: unknown key '" + key + "'");
  }
}

}  // namespace

std::vector<DetectorSpec> parse_detector_config(std::istream& in, std::size_t n) {
  DetectorSpec defaults;
  std::vector<std::pair<std::size_t, std::vector<std::pair<std::string, std::string>>>>
      sections;  // per-stream overrides, applied after defaults
  std::size_t current = 0;  // 0 = defaults section
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error("detector config line " + std::to_string(lineno) +
                                 ": unterminated section");
      std::string name = trim(line.substr(1, line.size() - 2));
      if (name.rfind("stream", 0) != 0)
        throw std::runtime_error("detector config line " + std::to_string(lineno) +
                                 ": expected [stream <i>]");
      std::size_t idx = std::stoul(trim(name.substr(6)));
      if (idx < 1 || idx > n)
        throw std::runtime_error("detector config line " + std::to_string(lineno) +
                                 ": stream index out of range");
      current = idx;
      sections.push_back({idx, {}});
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("detector config line " + std::to_string(lineno) +
                               ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (current == 0)
      apply_kv(defaults, key, value);
    else
      sections.back().second.push_back({key, value});
  }
  std::vector<DetectorSpec> specs(n, defaults);
  for (const auto& [idx, kvs] : sections)
    for (const auto& [key, value] : kvs) apply_kv(specs[idx - 1], key, value);
  return specs;
}

std::vector<DetectorSpec> parse_detector_config(const std::filesystem::path& path,
                                                std::size_t n) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_detector_config(in, n);
}

DetectorBank make_bank(std::size_t n, const std::vector<DetectorSpec>& specs) {
  if (specs.size() != n)
    throw std::invalid_argument("detector spec count != stream count");
  std::vector<std::unique_ptr<Detector>> ds;
  ds.reserve(n);
  for (const auto& s : specs) ds.push_back(make_detector(s));
  return DetectorBank(std::move(ds));
}

}  // namespace evcast
