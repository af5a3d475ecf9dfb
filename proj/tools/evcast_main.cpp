// evcast command line: detect / correlate / predict / run / eval / synth /
// plotdata subcommands composing through CSV and JSON-record files.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "evcast/aging.hpp"
#include "evcast/correlation.hpp"
#include "evcast/detection.hpp"
#include "evcast/evaluation.hpp"
#include "evcast/ingest.hpp"
#include "evcast/pipeline.hpp"
#include "evcast/prediction.hpp"
#include "evcast/ptl.hpp"

namespace {

using namespace evcast;

struct CommonOpts {
  std::string detector = "shewhart";
  std::string detector_config;
  int m = 1;
  int l = 1;
  int k_max = 1;
  double p_thr = 0.5;
  std::string aging = "none";
  double aging_k = 0.0;
  int aging_n = 0;
  int mem = 100;
  std::string constraints;
  std::string granularity = "event";
  std::uint64_t seed = 1;
  bool fill_forward = false;
};

void add_common_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--detector", o.detector, "cusum | shewhart")
      ->envname("EVCAST_DETECTOR");
  cmd->add_option("--detector-config", o.detector_config,
                  "per-stream detector config file")
      ->envname("EVCAST_DETECTOR_CONFIG");
  cmd->add_option("--m", o.m, "maximum context order")->envname("EVCAST_M");
  cmd->add_option("--l", o.l, "prediction horizon")->envname("EVCAST_L");
  cmd->add_option("--kmax", o.k_max, "maximum events per symbol")
      ->envname("EVCAST_KMAX");
  cmd->add_option("--pthr", o.p_thr, "rule probability cut-off")
      ->envname("EVCAST_PTHR");
  cmd->add_option("--aging", o.aging, "none | linear | exponential")
      ->envname("EVCAST_AGING");
  cmd->add_option("--aging-k", o.aging_k, "aging decay parameter")
      ->envname("EVCAST_AGING_K");
  cmd->add_option("--aging-n", o.aging_n, "linear aging span (0 = memory window)")
      ->envname("EVCAST_AGING_N");
  cmd->add_option("--mem", o.mem, "rule memory window (steps)")->envname("EVCAST_MEM");
  cmd->add_option("--constraints", o.constraints, "constraint file")
      ->envname("EVCAST_CONSTRAINTS");
  cmd->add_option("--granularity", o.granularity, "event | symbol")
      ->envname("EVCAST_GRANULARITY");
  cmd->add_option("--seed", o.seed, "random seed")->envname("EVCAST_SEED");
  cmd->add_flag("--fill-forward", o.fill_forward,
                "replace blank numeric cells with the previous value")
      ->envname("EVCAST_FILL_FORWARD");
  cmd->set_config("--config", "", "flat key = value config file; flags win");
}

PipelineConfig to_pipeline_config(const CommonOpts& o, const NameTable& names) {
  PipelineConfig cfg;
  cfg.detector.kind = o.detector;
  if (!o.detector_config.empty()) cfg.detector_config = o.detector_config;
  cfg.forest = ForestParams{o.m, o.l, o.k_max};
  cfg.p_thr = o.p_thr;
  cfg.aging.kind = aging_kind_from_string(o.aging);
  cfg.aging.k = o.aging_k;
  cfg.aging.n_window = o.aging_n;
  cfg.delta_mem = o.mem;
  if (!o.constraints.empty())
    cfg.constraints = parse_constraints(std::filesystem::path(o.constraints), names);
  cfg.granularity = granularity_from_string(o.granularity);
  cfg.seed = o.seed;
  cfg.fill_forward = o.fill_forward;
  return cfg;
}

std::size_t column_count(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error(path + ": empty file");
  return static_cast<std::size_t>(std::count(header.begin(), header.end(), ','));
}

std::vector<EventVector> load_events(const std::string& path, NameTable& names,
                                     const CommonOpts& o) {
  if (looks_like_event_csv(path)) {
    EventTable table = read_event_csv(std::filesystem::path(path));
    names = table.names;
    return std::move(table.rows);
  }
  std::size_t n = column_count(path);
  StreamTable table(path, n, StreamTableOptions{o.fill_forward});
  names = table.names();
  std::vector<DetectorSpec> specs;
  if (!o.detector_config.empty())
    specs = parse_detector_config(std::filesystem::path(o.detector_config), n);
  else {
    DetectorSpec spec;
    spec.kind = o.detector;
    specs.assign(n, spec);
  }
  DetectorBank bank = make_bank(n, specs);
  std::vector<EventVector> events;
  while (auto cv = table.next()) events.push_back(bank.detect(*cv));
  return events;
}

int cmd_detect(const CommonOpts& o, const std::string& input,
               const std::string& output) {
  NameTable names;
  auto events = load_events(input, names, o);
  write_event_csv(std::filesystem::path(output), events, names);
  return 0;
}

int cmd_correlate(const CommonOpts& o, const std::string& input,
                  const std::string& output) {
  NameTable names;
  auto events = load_events(input, names, o);
  PatternForest forest(static_cast<int>(names.size()),
                       ForestParams{o.m, o.l, o.k_max});
  for (const auto& ev : events) forest.update(ev);
  std::ofstream out(output);
  if (!out) throw std::runtime_error("cannot write " + output);
  forest.dump(out, names);
  return 0;
}

int cmd_predict(const CommonOpts& o, const std::string& input,
                const std::string& output) {
  NameTable names;
  auto events = load_events(input, names, o);
  PatternForest forest(static_cast<int>(names.size()),
                       ForestParams{o.m, o.l, o.k_max});
  std::vector<Constraint> constraints;
  if (!o.constraints.empty())
    constraints = parse_constraints(std::filesystem::path(o.constraints), names);
  std::ofstream out(output);
  if (!out) throw std::runtime_error("cannot write " + output);
  std::vector<EventVector> history;
  for (const auto& ev : events) {
    forest.update(ev);
    history.push_back(ev);
    auto preds = predict(forest, o.p_thr);
    preds = prune_predictions(std::move(preds), constraints, history);
    for (const auto& rule : emit_rules(preds, ev.t))
      out << rule_to_json(rule, names) << '\n';
  }
  return 0;
}

int cmd_run(const CommonOpts& o, const std::string& input,
            const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  NameTable names;
  if (looks_like_event_csv(input)) {
    names = read_event_csv(std::filesystem::path(input)).names;
  } else {
    std::size_t n = column_count(input);
    StreamTable probe(input, n);
    names = probe.names();
  }
  PipelineConfig cfg = to_pipeline_config(o, names);
  std::filesystem::path dir(out_dir);
  PipelineOutputPaths paths{dir / "events.csv", dir / "rules.jsonl",
                            dir / "pool.jsonl", dir / "report.json"};
  PrecisionReport report = run_pipeline(cfg, input, paths);
  std::cout << report_to_json(report) << '\n';
  return 0;
}

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> out;
  std::string cur;
  for (char c : csv + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(std::stod(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

std::vector<int> parse_ints(const std::string& csv) {
  std::vector<int> out;
  for (double v : parse_doubles(csv)) out.push_back(static_cast<int>(v));
  return out;
}

int cmd_eval(const CommonOpts& o, const std::string& input, const std::string& output,
             const std::string& pthr_list, const std::string& kmax_list,
             const std::string& m_list, const std::string& l_list,
             const std::string& detector_list, const std::string& aging_list) {
  SweepInput sweep_input;
  sweep_input.delta_mem = o.mem;
  sweep_input.granularity = granularity_from_string(o.granularity);
  if (looks_like_event_csv(input)) {
    sweep_input.events = read_event_csv(std::filesystem::path(input)).rows;
  } else {
    std::size_t n = column_count(input);
    StreamTable table(input, n, StreamTableOptions{o.fill_forward});
    sweep_input.numeric = table.read_all();
  }
  SweepGrid grid;
  if (!pthr_list.empty()) grid.p_thr = parse_doubles(pthr_list);
  else grid.p_thr = {o.p_thr};
  if (!kmax_list.empty()) grid.k_max = parse_ints(kmax_list);
  else grid.k_max = {o.k_max};
  if (!m_list.empty()) grid.m = parse_ints(m_list);
  else grid.m = {o.m};
  if (!l_list.empty()) grid.l = parse_ints(l_list);
  else grid.l = {o.l};
  if (!detector_list.empty()) {
    grid.detector.clear();
    std::string cur;
    for (char c : detector_list + ",") {
      if (c == ',') {
        if (!cur.empty()) grid.detector.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
  } else {
    grid.detector = {sweep_input.events.empty() ? o.detector : std::string("events")};
  }
  if (!aging_list.empty()) {
    grid.aging.clear();
    for (double k : parse_doubles(aging_list)) {
      AgingPolicy p;
      p.kind = aging_kind_from_string(o.aging);
      p.k = k;
      p.n_window = o.aging_n;
      grid.aging.push_back(p);
    }
  } else {
    AgingPolicy p;
    p.kind = aging_kind_from_string(o.aging);
    p.k = o.aging_k;
    p.n_window = o.aging_n;
    grid.aging = {p};
  }
  auto rows = run_sweep(grid, sweep_input);
  write_sweep_table(std::filesystem::path(output), rows);
  return 0;
}

int cmd_synth(const CommonOpts& o, int n, std::int64_t steps, const std::string& rates,
              const std::string& planted, bool numeric, const std::string& out_dir) {
  SynthConfig cfg;
  cfg.n = n;
  cfg.steps = steps;
  cfg.seed = o.seed;
  cfg.numeric_mode = numeric;
  if (!rates.empty()) cfg.base_rates = parse_doubles(rates);
  // planted rule syntax: cause>effect:delay:q with cause events '+'-joined,
  // indices 1-based; e.g. "1>2:1:0.9" or "1+3>2:2:0.8"; ';' separates rules
  std::string cur;
  for (char c : planted + ";") {
    if (c == ';') {
      if (!cur.empty()) {
        auto gt = cur.find('>');
        auto c1 = cur.find(':', gt);
        auto c2 = cur.find(':', c1 + 1);
        if (gt == std::string::npos || c1 == std::string::npos ||
            c2 == std::string::npos)
          throw std::runtime_error("bad planted rule: " + cur);
        std::vector<int> cause;
        std::string id;
        for (char cc : cur.substr(0, gt) + "+") {
          if (cc == '+') {
            if (!id.empty()) cause.push_back(std::stoi(id) - 1);
            id.clear();
          } else {
            id += cc;
          }
        }
        PlantedRule pr;
        pr.cause = EventSymbol(std::move(cause));
        pr.effect = std::stoi(cur.substr(gt + 1, c1 - gt - 1)) - 1;
        pr.delay = std::stoi(cur.substr(c1 + 1, c2 - c1 - 1));
        pr.q = std::stod(cur.substr(c2 + 1));
        cfg.planted.push_back(std::move(pr));
      }
      cur.clear();
    } else {
      cur += c;
    }
  }
  SynthResult result = generate_synthetic(cfg);
  std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  write_event_csv(dir / "events.csv", result.events, result.names);
  if (numeric) write_context_csv(dir / "streams.csv", result.numeric, result.names);
  write_ground_truth(dir / "ground_truth.json", cfg, result);
  return 0;
}

int cmd_plotdata(const std::string& input, const std::string& out_dir) {
  auto rows = read_sweep_table(std::filesystem::path(input));
  emit_plot_data(rows, std::filesystem::path(out_dir));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online event correlation and forecasting over sensor streams"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string input, output, out_dir = "out";
  std::string pthr_list, kmax_list, m_list, l_list, detector_list, aging_list;
  int synth_n = 2;
  std::int64_t synth_steps = 1000;
  std::string synth_rates, synth_planted;
  bool synth_numeric = false;

  auto* detect = app.add_subcommand("detect", "numeric CSV -> event CSV");
  detect->add_option("input", input)->required();
  detect->add_option("output", output)->required();
  add_common_flags(detect, opts);

  auto* correlate = app.add_subcommand("correlate", "event CSV -> forest snapshot");
  correlate->add_option("input", input)->required();
  correlate->add_option("output", output)->required();
  add_common_flags(correlate, opts);

  auto* predict_cmd =
      app.add_subcommand("predict", "event CSV -> rule records (one per step)");
  predict_cmd->add_option("input", input)->required();
  predict_cmd->add_option("output", output)->required();
  add_common_flags(predict_cmd, opts);

  auto* run = app.add_subcommand("run", "full pipeline; writes events/rules/pool/report");
  run->add_option("input", input)->required();
  run->add_option("--out", out_dir, "output directory");
  add_common_flags(run, opts);

  auto* eval = app.add_subcommand("eval", "parameter sweep -> result table CSV");
  eval->add_option("input", input)->required();
  eval->add_option("output", output)->required();
  eval->add_option("--sweep-pthr", pthr_list, "comma-separated p_thr values");
  eval->add_option("--sweep-kmax", kmax_list, "comma-separated k_max values");
  eval->add_option("--sweep-m", m_list, "comma-separated m values");
  eval->add_option("--sweep-l", l_list, "comma-separated l values");
  eval->add_option("--sweep-detector", detector_list,
                   "comma-separated detectors (events|cusum|shewhart)");
  eval->add_option("--sweep-aging-k", aging_list, "comma-separated aging k values");
  add_common_flags(eval, opts);

  auto* synth = app.add_subcommand("synth", "generate a planted-dependency dataset");
  synth->add_option("--n", synth_n, "stream count");
  synth->add_option("--steps", synth_steps, "total steps");
  synth->add_option("--rates", synth_rates, "per-event base rates, comma-separated");
  synth->add_option("--planted", synth_planted,
                    "planted rules 'cause>effect:delay:q' (1-based, ';'-separated)");
  synth->add_flag("--numeric", synth_numeric, "also render numeric streams");
  synth->add_option("--out", out_dir, "output directory");
  add_common_flags(synth, opts);

  auto* plotdata = app.add_subcommand("plotdata", "result table -> figure CSVs");
  plotdata->add_option("input", input)->required();
  plotdata->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (detect->parsed()) return cmd_detect(opts, input, output);
    if (correlate->parsed()) return cmd_correlate(opts, input, output);
    if (predict_cmd->parsed()) return cmd_predict(opts, input, output);
    if (run->parsed()) return cmd_run(opts, input, out_dir);
    if (eval->parsed())
      return cmd_eval(opts, input, output, pthr_list, kmax_list, m_list, l_list,
                      detector_list, aging_list);
    if (synth->parsed())
      return cmd_synth(opts, synth_n, synth_steps, synth_rates, synth_planted,
                       synth_numeric, out_dir);
    if (plotdata->parsed()) return cmd_plotdata(input, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
