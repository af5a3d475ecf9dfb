#include <doctest.h>

#include <random>
#include <sstream>

#include "evcast/prediction.hpp"
#include "evcast/ptl.hpp"
#include "oracles.hpp"

using namespace evcast;

namespace {

EventVector ev_of(std::int64_t t, std::vector<int> flags) {
  EventVector ev;
  ev.t = t;
  ev.flags.assign(flags.begin(), flags.end());
  return ev;
}

EventSymbol sym(std::vector<int> ids) { return EventSymbol(std::move(ids)); }

const NameTable kNames(std::vector<std::string>{"A", "B", "C", "D"});

ProbTemporalRule random_rule(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  ProbTemporalRule rule;
  int body_len = 1 + static_cast<int>(rng() % 3);
  for (int i = 0; i < body_len; ++i) {
    std::vector<int> ids;
    for (int e = 0; e < 4; ++e)
      if (rng() % 3 == 0) ids.push_back(e);
    rule.body.push_back(BodyAtom{i - (body_len - 1), EventSymbol(std::move(ids))});
  }
  std::vector<int> head{static_cast<int>(rng() % 4)};
  if (rng() % 2) head.push_back(static_cast<int>(rng() % 4));
  rule.head = EventSymbol(std::move(head));
  rule.horizon = 1 + static_cast<int>(rng() % 4);
  rule.p = unif(rng);
  return rule;
}

}  // namespace

TEST_CASE("parse_rule: the simple single-atom form") {
  ProbTemporalRule rule = parse_rule("A -> B : [1, 0.9]", kNames);
  REQUIRE(rule.body.size() == 1);
  CHECK(rule.body[0].offset == 0);
  CHECK(rule.body[0].symbol == sym({0}));
  CHECK(rule.head == sym({1}));
  CHECK(rule.horizon == 1);
  CHECK(rule.p == 0.9);
}

TEST_CASE("parse_rule: braced symbols, offsets, the empty symbol") {
  ProbTemporalRule rule = parse_rule("{A,C}@-2 & {}@0 -> {B,D} : [3, 0.25]", kNames);
  REQUIRE(rule.body.size() == 2);
  CHECK(rule.body[0].offset == -2);
  CHECK(rule.body[0].symbol == sym({0, 2}));
  CHECK(rule.body[1].symbol == EventSymbol{});
  CHECK(rule.head == sym({1, 3}));
  CHECK(rule.horizon == 3);
}

TEST_CASE("parse_rule: omitted offsets become consecutive, ending at 0") {
  ProbTemporalRule rule = parse_rule("A & B & C -> D : [1, 0.5]", kNames);
  REQUIRE(rule.body.size() == 3);
  CHECK(rule.body[0].offset == -2);
  CHECK(rule.body[1].offset == -1);
  CHECK(rule.body[2].offset == 0);
}

TEST_CASE("parse_rule error cases") {
  CHECK_THROWS_WITH_AS(parse_rule("A -> B : [1, 1.7]", kNames),
                       doctest::Contains("out of range"), std::runtime_error);
  CHECK_THROWS_AS(parse_rule("A -> B : [0, 0.5]", kNames), std::runtime_error);
  CHECK_THROWS_AS(parse_rule("A B : [1, 0.5]", kNames), std::runtime_error);
  CHECK_THROWS_AS(parse_rule("A@-1 & B -> C : [1, 0.5]", kNames), std::runtime_error);
  CHECK_THROWS_AS(parse_rule("A@0 & B@-1 -> C : [1, 0.5]", kNames),
                  std::runtime_error);
  CHECK_THROWS_AS(parse_rule("Z -> B : [1, 0.5]", kNames), std::invalid_argument);
  CHECK_THROWS_AS(parse_rule("A -> B : [1, 0.5] junk", kNames), std::runtime_error);
}

TEST_CASE("random rules round-trip through format and parse") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    ProbTemporalRule rule = random_rule(rng);
    std::string text = format_rule(rule, kNames);
    ProbTemporalRule back = parse_rule(text, kNames);
    CHECK(back.body == rule.body);
    CHECK(back.head == rule.head);
    CHECK(back.horizon == rule.horizon);
    CHECK(back.p == rule.p);
    // format of the parse is canonical: a second pass is a fixed point
    CHECK(format_rule(back, kNames) == text);
  }
}

TEST_CASE("check_blk: four consecutive active steps violate BLK < 4") {
  std::vector<EventVector> history;
  for (int t = 0; t < 6; ++t)
    history.push_back(ev_of(t, {t >= 1 && t <= 4 ? 1 : 0, 0}));
  CHECK_FALSE(check_blk(history, BlkConstraint{sym({0}), 4}));
}

TEST_CASE("check_blk: empty history and shorter runs satisfy") {
  CHECK(check_blk({}, BlkConstraint{sym({0}), 4}));
  std::vector<EventVector> history;
  for (int t = 0; t < 3; ++t) history.push_back(ev_of(t, {1, 0}));
  CHECK(check_blk(history, BlkConstraint{sym({0}), 4}));
  history.push_back(ev_of(3, {1, 0}));
  CHECK_FALSE(check_blk(history, BlkConstraint{sym({0}), 4}));
}

TEST_CASE("check_occ: occurrence count against [min,max]") {
  std::vector<EventVector> twice{ev_of(0, {1}), ev_of(1, {0}), ev_of(2, {1})};
  CHECK_FALSE(check_occ(twice, OccConstraint{sym({0}), 0, 1}));
  std::vector<EventVector> never{ev_of(0, {0}), ev_of(1, {0})};
  CHECK(check_occ(never, OccConstraint{sym({0}), 0, 1}));
  std::vector<EventVector> once{ev_of(0, {0}), ev_of(1, {1})};
  CHECK(check_occ(once, OccConstraint{sym({0}), 0, 1}));
}

TEST_CASE("check_occ with a window only scans the tail") {
  std::vector<EventVector> history{ev_of(0, {1}), ev_of(1, {1}), ev_of(2, {0}),
                                   ev_of(3, {0})};
  CHECK_FALSE(check_occ(history, OccConstraint{sym({0}), 0, 1}));
  CHECK(check_occ(history, OccConstraint{sym({0}), 0, 1, 2}));
}

TEST_CASE("blk and occ agree with a naive full-scan on random histories") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    auto history = oracle::random_events(rng, 3, 40, 0.5);
    for (int e = 0; e < 3; ++e) {
      EventSymbol s = sym({e});
      for (int limit = 1; limit <= 4; ++limit)
        CHECK(check_blk(history, BlkConstraint{s, limit}) ==
              oracle::naive_blk_ok(history, s, limit));
      for (int hi = 0; hi <= 12; hi += 4)
        CHECK(check_occ(history, OccConstraint{s, 0, hi}) ==
              oracle::naive_occ_ok(history, s, 0, hi));
    }
    EventSymbol empty;
    CHECK(check_blk(history, BlkConstraint{empty, 2}) ==
          oracle::naive_blk_ok(history, empty, 2));
  }
}

TEST_CASE("constraint file parsing") {
  std::istringstream in(
      "# ceilings asserted by the operator\n"
      "BLK(A) < 4\n"
      "BLK(A,B,C,D) < 1\n"
      "OCC(B) [0, 1]\n");
  auto constraints = parse_constraints(in, kNames);
  REQUIRE(constraints.size() == 3);
  const auto* blk = std::get_if<BlkConstraint>(&constraints[0]);
  REQUIRE(blk);
  CHECK(blk->symbol == sym({0}));
  CHECK(blk->limit == 4);
  const auto* blk4 = std::get_if<BlkConstraint>(&constraints[1]);
  REQUIRE(blk4);
  CHECK(blk4->symbol == sym({0, 1, 2, 3}));
  const auto* occ = std::get_if<OccConstraint>(&constraints[2]);
  REQUIRE(occ);
  CHECK(occ->symbol == sym({1}));
  CHECK(occ->min_occ == 0);
  CHECK(occ->max_occ == 1);

  std::istringstream bad("FOO(A) < 2\n");
  CHECK_THROWS_AS(parse_constraints(bad, kNames), std::runtime_error);
}

TEST_CASE("prune: BLK(ABCD) < 1 removes any prediction of that exact symbol") {
  std::vector<Constraint> constraints{BlkConstraint{sym({0, 1, 2, 3}), 1}};
  std::vector<Prediction> preds{{1, sym({0, 1, 2, 3}), 0.9, {}},
                                {1, sym({0}), 0.9, {}}};
  std::vector<EventVector> history{ev_of(0, {0, 0, 0, 0})};
  auto kept = prune_predictions(preds, constraints, history);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].symbol == sym({0}));
}

TEST_CASE("prune: no constraints leaves the input untouched") {
  std::vector<Prediction> preds{{1, sym({0}), 0.9, {}}};
  auto kept = prune_predictions(preds, {}, {});
  CHECK(kept == preds);
}

TEST_CASE("prune: a prediction extending a run to the BLK limit is dropped") {
  // A active the last 3 steps; predicting A at horizon 1 makes a run of 4
  std::vector<EventVector> history{ev_of(0, {0, 0}), ev_of(1, {1, 0}),
                                   ev_of(2, {1, 0}), ev_of(3, {1, 0})};
  std::vector<Constraint> constraints{BlkConstraint{sym({0}), 4}};
  std::vector<Prediction> preds{{1, sym({0}), 0.9, {}}, {1, sym({1}), 0.9, {}}};
  auto kept = prune_predictions(preds, constraints, history);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].symbol == sym({1}));

  // at horizon 2 the intermediate step breaks the run: not pruned
  std::vector<Prediction> far{{2, sym({0}), 0.9, {}}};
  CHECK(prune_predictions(far, constraints, history).size() == 1);
}

TEST_CASE("prune: occurrence ceiling prunes, the floor never does") {
  std::vector<EventVector> history{ev_of(0, {1, 0}), ev_of(1, {0, 0})};
  std::vector<Constraint> ceiling{OccConstraint{sym({0}), 0, 1}};
  std::vector<Prediction> preds{{1, sym({0}), 0.9, {}}, {1, sym({1}), 0.9, {}}};
  auto kept = prune_predictions(preds, ceiling, history);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].symbol == sym({1}));

  // an unmet floor does not condemn unrelated predictions
  std::vector<Constraint> floor{OccConstraint{sym({1}), 5, 100}};
  CHECK(prune_predictions(preds, floor, history).size() == 2);
}

TEST_CASE("pruning is idempotent and output is a subset of input") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    auto history = oracle::random_events(rng, 4, 20, 0.4);
    std::vector<Prediction> preds;
    for (int i = 0; i < 8; ++i) {
      std::vector<int> ids;
      for (int e = 0; e < 4; ++e)
        if (rng() % 2) ids.push_back(e);
      preds.push_back(Prediction{1 + static_cast<int>(rng() % 2),
                                 EventSymbol(std::move(ids)), unif(rng), {}});
    }
    std::vector<Constraint> constraints{
        BlkConstraint{sym({0}), 1 + static_cast<int>(rng() % 3)},
        OccConstraint{sym({1}), 0, static_cast<int>(rng() % 6)}};
    auto once = prune_predictions(preds, constraints, history);
    auto twice = prune_predictions(once, constraints, history);
    CHECK(once == twice);
    for (const auto& p : once)
      CHECK(std::find(preds.begin(), preds.end(), p) != preds.end());
  }
}
