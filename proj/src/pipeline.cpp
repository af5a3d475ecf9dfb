#include "evcast/pipeline.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "evcast/ingest.hpp"

namespace evcast {

Pipeline::Pipeline(int n, NameTable names, PipelineConfig config)
    : names_(std::move(names)),
      config_(std::move(config)),
      forest_(n, config_.forest),
      pool_(config_.delta_mem, config_.aging) {
  if (config_.p_thr < 0.0 || config_.p_thr > 1.0)
    throw std::invalid_argument("pipeline: p_thr must lie in [0,1]");
}

StepOutcome Pipeline::step(const EventVector& ev) {
  // 1. score forecasts whose horizon arrives now
  if (auto it = pending_.find(ev.t); it != pending_.end()) {
    std::vector<EventSymbol> symbols;
    symbols.reserve(it->second.size());
    for (const IssuedForecast& f : it->second) symbols.push_back(f.symbol);
    score_step(report_, symbols, ev, config_.granularity);
    pending_.erase(it);
  }
  ++report_.steps;

  // 2. advance the correlation model
  forest_.update(ev);
  history_.push_back(ev);

  // 3. predict from the recent window, prune against constraints
  std::vector<Prediction> preds = predict(forest_, config_.p_thr);
  preds = prune_predictions(std::move(preds), config_.constraints, history_);

  // 4. re-represent as rules, merge into the aging pool
  StepOutcome outcome;
  outcome.rules = emit_rules(preds, ev.t);
  pool_.update(outcome.rules, ev.t);

  // 5. forecasts retained after the merged-probability filter
  for (const ProbTemporalRule& rule : outcome.rules) {
    double merged = pool_.merged_probability(rule_key(rule));
    if (merged < config_.p_thr) continue;
    IssuedForecast f{ev.t, rule.horizon, rule.head, merged};
    pending_[ev.t + rule.horizon].push_back(f);
    outcome.issued.push_back(std::move(f));
    ++report_.predictions_issued;
  }
  return outcome;
}

std::string report_to_json(const PrecisionReport& report) {
  nlohmann::json j{{"steps", report.steps},
                   {"predictions_issued", report.predictions_issued},
                   {"tp", report.tp},
                   {"fp", report.fp},
                   {"fn", report.fn}};
  if (auto p = report.precision()) j["precision"] = *p;
  if (auto r = report.recall()) j["recall"] = *r;
  return j.dump(2);
}

PrecisionReport run_pipeline(const PipelineConfig& config,
                             const std::filesystem::path& input,
                             const PipelineOutputPaths& out) {
  NameTable names;
  std::vector<EventVector> events;
  if (looks_like_event_csv(input)) {
    EventTable table = read_event_csv(input);
    names = table.names;
    events = std::move(table.rows);
  } else {
    // detection stage: numeric CSV through the detector bank
    std::ifstream probe(input);
    std::string header;
    std::getline(probe, header);
    std::size_t n = static_cast<std::size_t>(
        std::count(header.begin(), header.end(), ','));
    probe.close();
    StreamTable table(input, n, StreamTableOptions{config.fill_forward});
    names = table.names();
    std::vector<DetectorSpec> specs;
    if (config.detector_config)
      specs = parse_detector_config(std::filesystem::path(*config.detector_config), n);
    else
      specs.assign(n, config.detector);
    DetectorBank bank = make_bank(n, specs);
    std::int64_t step = 0;
    while (auto cv = table.next()) {
      try {
        events.push_back(bank.detect(*cv));
      } catch (const std::exception& e) {
        throw std::runtime_error("detect stage failed at step " +
                                 std::to_string(step) + ": " + e.what());
      }
      ++step;
    }
  }

  const int n = static_cast<int>(names.size());
  Pipeline pipe(n, names, config);
  std::ofstream rules_out(out.rules);
  if (!rules_out) throw std::runtime_error("cannot write " + out.rules.string());
  for (const EventVector& ev : events) {
    StepOutcome outcome;
    try {
      outcome = pipe.step(ev);
    } catch (const std::exception& e) {
      throw std::runtime_error("correlate stage failed at step " +
                               std::to_string(ev.t) + ": " + e.what());
    }
    for (const ProbTemporalRule& rule : outcome.rules)
      rules_out << rule_to_json(rule, names) << '\n';
  }

  write_event_csv(out.events, events, names);
  std::ofstream pool_out(out.pool);
  if (!pool_out) throw std::runtime_error("cannot write " + out.pool.string());
  pipe.pool().dump(pool_out, names);
  std::ofstream report_out(out.report);
  if (!report_out) throw std::runtime_error("cannot write " + out.report.string());
  report_out << report_to_json(pipe.report()) << '\n';
  return pipe.report();
}

}  // namespace evcast
