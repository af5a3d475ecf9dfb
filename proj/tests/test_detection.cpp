#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "evcast/detection.hpp"

using namespace evcast;

namespace {

// one-shot reference recurrence for the positive side
std::vector<int> cusum_flags_reference(const std::vector<double>& xs, double mu,
                                       double k_pos, double k_neg, double thresh_pos,
                                       double thresh_neg) {
  std::vector<int> flags;
  double pos = 0.0, neg = 0.0;
  for (double x : xs) {
    pos = std::max(0.0, pos + (x - mu - k_pos));
    neg = std::min(0.0, neg + (x - mu + k_neg));
    bool above = pos > thresh_pos;
    bool below = neg < -thresh_neg;
    if (above) pos = 0.0;
    if (below) neg = 0.0;
    flags.push_back(above || below ? 1 : 0);
  }
  return flags;
}

CusumParams plain_cusum(double mu) {
  CusumParams p;
  p.mu = mu;
  return p;
}

}  // namespace

TEST_CASE("cusum: on-target value accumulates nothing") {
  CusumDetector det(plain_cusum(0.0));
  auto sig = det.step(0.0);
  CHECK_FALSE(sig.flag);
  CHECK(det.pos_sum() == 0.0);
}

TEST_CASE("cusum: constant drift x=1.5 flags first at step 5 with reset") {
  // P grows by 1.0 per step (1,2,3,4,5); 5 > 4 triggers, then P = 0
  CusumDetector det(plain_cusum(0.0));
  for (int step = 1; step <= 4; ++step) {
    auto sig = det.step(1.5);
    CHECK_FALSE(sig.flag);
    CHECK(det.pos_sum() == doctest::Approx(step).epsilon(1e-12));
  }
  auto sig = det.step(1.5);
  CHECK(sig.flag);
  CHECK(sig.direction == 1);
  CHECK(det.pos_sum() == 0.0);
}

TEST_CASE("cusum matches the one-shot reference recurrence on random streams") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> xs;
    for (int t = 0; t < 200; ++t) xs.push_back(gauss(rng));
    auto expected = cusum_flags_reference(xs, 0.0, 0.5, 0.5, 4.0, 4.0);
    CusumDetector det(plain_cusum(0.0));
    for (std::size_t t = 0; t < xs.size(); ++t)
      CHECK(det.step(xs[t]).flag == (expected[t] == 1));
  }
}

TEST_CASE("cusum mirror symmetry: negated input with swapped parameters") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> gauss(0.3, 1.5);
  for (int trial = 0; trial < 100; ++trial) {
    CusumParams fwd;
    fwd.mu = 0.0;
    fwd.k_pos = 0.4;
    fwd.k_neg = 0.7;
    fwd.thresh_pos = 3.0;
    fwd.thresh_neg = 5.0;
    CusumParams mir;
    mir.mu = 0.0;
    mir.k_pos = fwd.k_neg;
    mir.k_neg = fwd.k_pos;
    mir.thresh_pos = fwd.thresh_neg;
    mir.thresh_neg = fwd.thresh_pos;
    CusumDetector a(fwd), b(mir);
    for (int t = 0; t < 150; ++t) {
      double x = gauss(rng);
      auto sa = a.step(x);
      auto sb = b.step(-x);
      CHECK(sa.flag == sb.flag);
      CHECK(sa.direction == -sb.direction);
    }
  }
}

TEST_CASE("cusum ignores slow drift below the tolerance") {
  CusumDetector det(plain_cusum(0.0));
  for (int t = 0; t < 10000; ++t) {
    auto sig = det.step(0.49);  // increment after tolerance is negative
    CHECK_FALSE(sig.flag);
    CHECK(det.pos_sum() == 0.0);
  }
}

TEST_CASE("cusum: non-finite sample errors and leaves the state unchanged") {
  CusumDetector det(plain_cusum(0.0));
  det.step(1.0);
  double pos = det.pos_sum();
  CHECK_THROWS_AS(det.step(std::numeric_limits<double>::quiet_NaN()),
                  std::invalid_argument);
  CHECK(det.pos_sum() == pos);
}

TEST_CASE("cusum estimates mu from the warm-up window when unset") {
  CusumParams p;
  p.warmup = 10;
  CusumDetector det(p);
  for (int t = 0; t < 10; ++t) CHECK_FALSE(det.step(5.0).flag);
  CHECK(det.target() == 5.0);
  // a large excursion now accumulates against the estimated target
  CHECK_FALSE(det.step(7.0).flag);
  CHECK(det.pos_sum() == doctest::Approx(1.5));
}

TEST_CASE("shewhart never flags during warm-up") {
  ShewhartDetector det(ShewhartParams{3.0, 50, 1e-9});
  std::mt19937_64 rng(13);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int t = 0; t < 49; ++t) CHECK_FALSE(det.step(gauss(rng) * 100).flag);
}

TEST_CASE("shewhart flags a far excursion after warm-up, at the exact UCL") {
  ShewhartDetector det(ShewhartParams{3.0, 50, 1e-9});
  std::mt19937_64 rng(14);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double sum = 0.0;
  std::vector<double> xs;
  for (int t = 0; t < 50; ++t) {
    double x = gauss(rng);
    xs.push_back(x);
    sum += x;
    det.step(x);
  }
  // exact control limit from the concrete warm-up sample
  double mean = sum / 50.0;
  double m2 = 0.0;
  for (double x : xs) m2 += (x - mean) * (x - mean);
  double ucl = mean + 3.0 * std::sqrt(m2 / 49.0);
  CHECK(det.ucl() == doctest::Approx(ucl).epsilon(1e-12));
  CHECK(det.step(10.0).flag);
  CHECK_FALSE(ShewhartDetector(ShewhartParams{3.0, 2, 1e-9}).step(10.0).flag);
}

TEST_CASE("shewhart constant stream never flags (sigma_floor limits)") {
  ShewhartDetector det(ShewhartParams{3.0, 5, 1e-9});
  for (int t = 0; t < 1000; ++t) CHECK_FALSE(det.step(2.5).flag);
}

TEST_CASE("shewhart flag decision is causal: the sample itself is excluded") {
  // 10 warm-up samples at 0, then a jump; the jump must be judged against
  // the pre-jump statistics even though it enters them afterwards
  ShewhartDetector det(ShewhartParams{3.0, 10, 1e-9});
  for (int t = 0; t < 10; ++t) det.step(t % 2 == 0 ? -1.0 : 1.0);
  double ucl_before = det.ucl();
  auto sig = det.step(50.0);
  CHECK(sig.flag);
  CHECK(50.0 > ucl_before);
  CHECK(det.mean() > 0.0);  // the flagged point entered the statistics
}

TEST_CASE("detect_vector: planted shift in stream 2 of 3 only") {
  // find the detection step with an independent single-stream run first
  std::mt19937_64 rng(15);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::vector<double>> columns(3);
  for (int t = 0; t < 80; ++t)
    for (int i = 0; i < 3; ++i) columns[static_cast<std::size_t>(i)].push_back(gauss(rng));
  columns[1][60] += 20.0;

  ShewhartParams params{3.0, 50, 1e-9};
  int detect_step = -1;
  {
    ShewhartDetector solo(params);
    for (int t = 0; t < 80; ++t)
      if (solo.step(columns[1][static_cast<std::size_t>(t)]).flag && detect_step < 0)
        detect_step = t;
  }
  REQUIRE(detect_step == 60);

  DetectorSpec spec;
  spec.kind = "shewhart";
  spec.shewhart = params;
  DetectorBank bank(3, spec);
  for (int t = 0; t < 80; ++t) {
    ContextVector cv;
    cv.t = t;
    for (int i = 0; i < 3; ++i)
      cv.values.push_back(columns[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)]);
    EventVector ev = bank.detect(cv);
    CHECK(ev.flags.size() == 3);
    if (t == detect_step) {
      CHECK(ev.flags[0] == 0);
      CHECK(ev.flags[1] == 1);
      CHECK(ev.flags[2] == 0);
    }
  }
}

TEST_CASE("detect_vector attaches the stream index to errors") {
  DetectorSpec spec;
  DetectorBank bank(3, spec);
  ContextVector cv;
  cv.t = 0;
  cv.values = {0.0, std::numeric_limits<double>::infinity(), 0.0};
  CHECK_THROWS_WITH_AS(bank.detect(cv), doctest::Contains("stream 2"),
                       std::runtime_error);
}

TEST_CASE("identical parameters and input yield identical flag sequences") {
  std::mt19937_64 rng(16);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> xs;
  for (int t = 0; t < 300; ++t) xs.push_back(gauss(rng));
  ShewhartDetector a(ShewhartParams{}), b(ShewhartParams{});
  for (double x : xs) CHECK(a.step(x).flag == b.step(x).flag);
}

TEST_CASE("detector config file: defaults plus per-stream overrides") {
  std::istringstream in(
      "# defaults\n"
      "detector = cusum\n"
      "mu = 1.5\n"
      "k_pos = 0.25\n"
      "\n"
      "[stream 2]\n"
      "detector = shewhart\n"
      "L = 2.5\n"
      "warmup = 20\n");
  auto specs = parse_detector_config(in, 3);
  REQUIRE(specs.size() == 3);
  CHECK(specs[0].kind == "cusum");
  CHECK(specs[0].cusum.mu == 1.5);
  CHECK(specs[0].cusum.k_pos == 0.25);
  CHECK(specs[1].kind == "shewhart");
  CHECK(specs[1].shewhart.limit == 2.5);
  CHECK(specs[1].shewhart.warmup == 20);
  CHECK(specs[2].kind == "cusum");

  std::istringstream bad("detector = arima\n");
  CHECK_THROWS_AS(parse_detector_config(bad, 1), std::runtime_error);
}
