#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "evcast/aging.hpp"
#include "oracles.hpp"

using namespace evcast;

namespace {

AgingPolicy linear(double k, int n) { return AgingPolicy{AgingKind::linear, k, n}; }
AgingPolicy exponential(double k) { return AgingPolicy{AgingKind::exponential, k, 0}; }

ProbTemporalRule simple_rule(int body_event, int head_event, double p) {
  ProbTemporalRule rule;
  rule.body.push_back(BodyAtom{0, EventSymbol({body_event})});
  rule.head = EventSymbol({head_event});
  rule.horizon = 1;
  rule.p = p;
  return rule;
}

}  // namespace

TEST_CASE("linear weight endpoints and midpoint") {
  AgingPolicy p = linear(0.8, 5);
  CHECK(linear_weight(1, p) == doctest::Approx(1.8).epsilon(1e-12));
  CHECK(linear_weight(3, p) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(linear_weight(5, p) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("linear weight endpoint identity: newest plus oldest is 2") {
  for (double k : {0.0, 0.3, 0.5, 0.8, 1.0})
    for (int n : {2, 5, 9, 50}) {
      AgingPolicy p = linear(k, n);
      CHECK(linear_weight(1, p) + linear_weight(n, p) ==
            doctest::Approx(2.0).epsilon(1e-12));
    }
}

TEST_CASE("linear weights decrease with age and stay non-negative for k<=1") {
  AgingPolicy p = linear(1.0, 7);
  double prev = linear_weight(1, p);
  CHECK(prev == doctest::Approx(2.0));
  for (int i = 2; i <= 7; ++i) {
    double w = linear_weight(i, p);
    CHECK(w < prev);
    CHECK(w >= -1e-12);
    prev = w;
  }
}

TEST_CASE("exponential weight values") {
  CHECK(exponential_weight(1, exponential(0.0)) == doctest::Approx(1.0));
  CHECK(exponential_weight(37, exponential(0.0)) == doctest::Approx(1.0));
  CHECK(exponential_weight(10, exponential(0.1)) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
  double prev = exponential_weight(1, exponential(0.5));
  for (int i = 2; i <= 8; ++i) {
    double w = exponential_weight(i, exponential(0.5));
    CHECK(w < prev);
    CHECK(w > 0.0);
    prev = w;
  }
}

TEST_CASE("policy validation rejects out-of-range parameters") {
  CHECK_THROWS_AS(linear(1.5, 5).validate(), std::invalid_argument);
  CHECK_THROWS_AS(linear(-0.1, 5).validate(), std::invalid_argument);
  CHECK_THROWS_AS(exponential(-0.2).validate(), std::invalid_argument);
  CHECK_NOTHROW(linear(1.0, 5).validate());
  CHECK_NOTHROW(AgingPolicy{}.validate());
}

TEST_CASE("merge: two linear-weighted extractions, k=0.8 n=5") {
  // weights 1.8 (current step) and 1.0 (two steps back):
  // (1.8*0.3 + 1.0*0.8) / 2.8 = 1.34/2.8
  std::vector<Extraction> history{{3, 0.8}, {5, 0.3}};
  double merged = merge_probability(history, linear(0.8, 5), 5);
  CHECK(merged == doctest::Approx(1.34 / 2.8).epsilon(1e-9));
}

TEST_CASE("merge: single extraction returns its own probability") {
  std::vector<Extraction> history{{9, 0.42}};
  CHECK(merge_probability(history, linear(0.8, 5), 9) == doctest::Approx(0.42));
  CHECK(merge_probability(history, exponential(0.7), 12) == doctest::Approx(0.42));
  CHECK(merge_probability(history, AgingPolicy{}, 12) == doctest::Approx(0.42));
}

TEST_CASE("merge with exponential k=0 equals the arithmetic mean") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Extraction> history;
    double sum = 0.0;
    int count = 1 + static_cast<int>(rng() % 10);
    std::int64_t t = 0;
    for (int i = 0; i < count; ++i) {
      t += 1 + static_cast<std::int64_t>(rng() % 3);
      double p = unif(rng);
      history.push_back({t, p});
      sum += p;
    }
    double merged = merge_probability(history, exponential(0.0), t);
    CHECK(merged == doctest::Approx(sum / count).epsilon(1e-12));
  }
}

TEST_CASE("merged probability is a convex combination of the extractions") {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Extraction> history;
    double lo = 1.0, hi = 0.0;
    std::int64_t t = 0;
    for (int i = 0; i < 6; ++i) {
      t += 1;
      double p = unif(rng);
      history.push_back({t, p});
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
    for (const AgingPolicy& policy :
         {AgingPolicy{}, linear(0.6, 10), exponential(0.4)}) {
      double merged = merge_probability(history, policy, t);
      CHECK(merged >= lo - 1e-12);
      CHECK(merged <= hi + 1e-12);
    }
  }
}

TEST_CASE("recent extractions dominate under decay") {
  // old evidence says 0.1, the newest says 0.9; decay pulls toward 0.9
  std::vector<Extraction> history{{1, 0.1}, {2, 0.1}, {3, 0.1}, {10, 0.9}};
  double flat = merge_probability(history, AgingPolicy{}, 10);
  double decayed = merge_probability(history, exponential(0.8), 10);
  CHECK(decayed > flat);
  CHECK(decayed > 0.8);
}

TEST_CASE("merge rejects an empty history and a zero weight sum") {
  CHECK_THROWS_AS(merge_probability({}, AgingPolicy{}, 5), std::invalid_argument);
}

TEST_CASE("pool expiry: extractions fall out after the memory window") {
  RulePool pool(3, AgingPolicy{});
  ProbTemporalRule rule = simple_rule(0, 1, 0.5);
  pool.update(std::vector<ProbTemporalRule>{rule}, 0);
  RuleKey key = rule_key(rule);
  CHECK(pool.merged_probability(key) == doctest::Approx(0.5));
  pool.update({}, 1);
  pool.update({}, 2);
  CHECK(pool.merged_probability(key) == doctest::Approx(0.5));
  pool.update({}, 3);
  CHECK(pool.merged_probability(key) == -1.0);
  CHECK(pool.entries().empty());
}

TEST_CASE("pool keeps rule identities separate and re-merges every step") {
  RulePool pool(10, linear(0.8, 10));
  ProbTemporalRule ab = simple_rule(0, 1, 0.8);
  ProbTemporalRule ac = simple_rule(0, 2, 0.4);
  pool.update(std::vector<ProbTemporalRule>{ab, ac}, 0);
  ab.p = 0.3;
  pool.update(std::vector<ProbTemporalRule>{ab}, 2);
  REQUIRE(pool.entries().size() == 2);
  // ab: weights lambda(1)=1.8 on 0.3 and lambda(3) on 0.8
  double w_old = linear_weight(3, pool.policy());
  double expect = (1.8 * 0.3 + w_old * 0.8) / (1.8 + w_old);
  CHECK(pool.merged_probability(rule_key(ab)) == doctest::Approx(expect).epsilon(1e-12));
  // ac was extracted once; its merged value is just 0.4 regardless of age
  CHECK(pool.merged_probability(rule_key(ac)) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("pool replay equals a from-scratch merge on random streams") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    AgingPolicy policy;
    switch (trial % 3) {
      case 0: policy = AgingPolicy{}; break;
      case 1: policy = linear(unif(rng), 20); break;
      default: policy = exponential(unif(rng)); break;
    }
    int mem = 2 + static_cast<int>(rng() % 8);
    RulePool pool(mem, policy);
    // shadow log of every extraction ever made, per rule identity
    std::map<RuleKey, std::vector<Extraction>> full_log;
    for (std::int64_t t = 0; t < 40; ++t) {
      std::vector<ProbTemporalRule> extracted;
      for (int head = 0; head < 3; ++head)
        if (rng() % 2) {
          ProbTemporalRule rule = simple_rule(0, head, unif(rng));
          full_log[rule_key(rule)].push_back({t, rule.p});
          extracted.push_back(std::move(rule));
        }
      pool.update(extracted, t);
      for (const auto& [key, log] : full_log) {
        std::vector<Extraction> live;
        for (const auto& ex : log)
          if (ex.extracted_at > t - mem) live.push_back(ex);
        if (live.empty()) {
          CHECK(pool.merged_probability(key) == -1.0);
        } else {
          double expect = merge_probability(live, policy, t);
          CHECK(pool.merged_probability(key) ==
                doctest::Approx(expect).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("pool update rejects a decreasing step") {
  RulePool pool(5, AgingPolicy{});
  pool.update({}, 3);
  CHECK_THROWS_AS(pool.update({}, 2), std::invalid_argument);
}

TEST_CASE("linear policy window defaults to the memory window") {
  RulePool pool(8, linear(0.5, 0));
  CHECK(pool.policy().n_window == 8);
  // a memory window of 1 still leaves a usable two-point ramp
  RulePool tiny(1, linear(0.5, 0));
  CHECK(tiny.policy().n_window == 2);
  CHECK_THROWS_AS(RulePool(10, linear(0.5, 4)), std::invalid_argument);
}

TEST_CASE("pool dump carries the merged probability per line") {
  NameTable names(std::vector<std::string>{"A", "B"});
  RulePool pool(5, AgingPolicy{});
  pool.update(std::vector<ProbTemporalRule>{simple_rule(0, 1, 0.75)}, 0);
  std::ostringstream out;
  pool.dump(out, names);
  std::string text = out.str();
  CHECK(text.find("\"merged_p\":") != std::string::npos);
  CHECK(text.find("\"extraction_count\":1") != std::string::npos);
  CHECK(text.find("0.75") != std::string::npos);
}
