#include "evcast/evaluation.hpp"

#include <charconv>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "evcast/pipeline.hpp"

namespace evcast {

Granularity granularity_from_string(const std::string& s) {
  if (s == "event" || s == "per_event") return Granularity::per_event;
  if (s == "symbol" || s == "per_symbol") return Granularity::per_symbol;
  throw std::invalid_argument("unknown granularity: " + s);
}

std::string to_string(Granularity g) {
  return g == Granularity::per_event ? "event" : "symbol";
}

void score_step(PrecisionReport& report, std::span<const EventSymbol> predicted,
                const EventVector& actual, Granularity g) {
  if (g == Granularity::per_symbol) {
    for (const EventSymbol& sym : predicted) {
      if (sym.active_in(actual))
        ++report.tp;
      else
        ++report.fp;
    }
    return;
  }
  // per-event: the union of predicted events, each checked against the flags
  std::set<int> events;
  for (const EventSymbol& sym : predicted)
    for (int id : sym.ids()) events.insert(id);
  for (int id : events) {
    if (id < static_cast<int>(actual.flags.size()) && actual.flags[static_cast<std::size_t>(id)])
      ++report.tp;
    else
      ++report.fp;
  }
  for (std::size_t i = 0; i < actual.flags.size(); ++i)
    if (actual.flags[i] && !events.count(static_cast<int>(i))) ++report.fn;
}

SynthResult generate_synthetic(const SynthConfig& cfg) {
  if (cfg.n < 1) throw std::invalid_argument("synth: n must be >= 1");
  if (cfg.steps < 0) throw std::invalid_argument("synth: negative step count");
  std::vector<double> rates = cfg.base_rates;
  rates.resize(static_cast<std::size_t>(cfg.n), 0.0);
  for (double r : rates)
    if (r < 0.0 || r > 1.0) throw std::invalid_argument("synth: base rate outside [0,1]");
  for (const PlantedRule& pr : cfg.planted) {
    if (pr.delay < 1) throw std::invalid_argument("synth: planted delay must be >= 1");
    if (pr.q < 0.0 || pr.q > 1.0)
      throw std::invalid_argument("synth: planted probability outside [0,1]");
    if (pr.effect < 0 || pr.effect >= cfg.n)
      throw std::invalid_argument("synth: planted effect index out of range");
  }

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, cfg.noise_sigma);

  SynthResult result;
  result.names = NameTable::numbered(static_cast<std::size_t>(cfg.n));
  // effects scheduled for future steps, keyed by due step
  std::vector<std::vector<int>> due(static_cast<std::size_t>(cfg.steps));
  for (std::int64_t t = 0; t < cfg.steps; ++t) {
    EventVector ev;
    ev.t = t;
    ev.flags.resize(static_cast<std::size_t>(cfg.n), 0);
    for (int i = 0; i < cfg.n; ++i)
      if (unif(rng) < rates[static_cast<std::size_t>(i)])
        ev.flags[static_cast<std::size_t>(i)] = 1;
    for (int effect : due[static_cast<std::size_t>(t)])
      ev.flags[static_cast<std::size_t>(effect)] = 1;
    // causes are judged on the finalized flags of this step
    for (std::size_t r = 0; r < cfg.planted.size(); ++r) {
      const PlantedRule& pr = cfg.planted[r];
      if (!pr.cause.active_in(ev)) continue;
      bool fired = unif(rng) < pr.q;
      result.firings.push_back(PlantedFiring{t, r, fired});
      if (fired && t + pr.delay < cfg.steps)
        due[static_cast<std::size_t>(t + pr.delay)].push_back(pr.effect);
    }
    if (cfg.numeric_mode) {
      ContextVector cv;
      cv.t = t;
      cv.values.resize(static_cast<std::size_t>(cfg.n));
      for (int i = 0; i < cfg.n; ++i) {
        double v = gauss(rng);
        if (ev.flags[static_cast<std::size_t>(i)]) v += cfg.shift * cfg.noise_sigma;
        cv.values[static_cast<std::size_t>(i)] = v;
      }
      result.numeric.push_back(std::move(cv));
    }
    result.events.push_back(std::move(ev));
  }
  return result;
}

void write_ground_truth(const std::filesystem::path& path, const SynthConfig& cfg,
                        const SynthResult& result) {
  nlohmann::json planted = nlohmann::json::array();
  for (const PlantedRule& pr : cfg.planted) {
    nlohmann::json cause = nlohmann::json::array();
    for (int id : pr.cause.ids()) cause.push_back(result.names.name(id));
    planted.push_back({{"cause", std::move(cause)},
                       {"effect", result.names.name(pr.effect)},
                       {"delay", pr.delay},
                       {"q", pr.q}});
  }
  nlohmann::json firings = nlohmann::json::array();
  for (const PlantedFiring& f : result.firings)
    firings.push_back({{"cause_step", f.cause_step},
                       {"rule_index", f.rule_index},
                       {"fired", f.fired}});
  nlohmann::json j{{"seed", cfg.seed},
                   {"n", cfg.n},
                   {"steps", cfg.steps},
                   {"planted_rules", std::move(planted)},
                   {"firings", std::move(firings)}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::vector<SweepRow> run_sweep(const SweepGrid& grid, const SweepInput& input) {
  if (grid.p_thr.empty() || grid.k_max.empty() || grid.m.empty() || grid.l.empty() ||
      grid.detector.empty() || grid.aging.empty())
    throw std::invalid_argument("sweep: empty grid dimension");
  std::vector<SweepRow> rows;
  for (const std::string& detector : grid.detector)
    for (int m : grid.m)
      for (int l : grid.l)
        for (int k_max : grid.k_max)
          for (double p_thr : grid.p_thr)
            for (const AgingPolicy& aging : grid.aging) {
              SweepRow row;
              row.detector = detector;
              row.m = m;
              row.l = l;
              row.k_max = k_max;
              row.p_thr = p_thr;
              row.aging = aging;
              try {
                std::vector<EventVector> events;
                int n = 0;
                if (detector == "events") {
                  if (input.events.empty())
                    throw std::runtime_error("no event stream supplied");
                  events = input.events;
                  n = static_cast<int>(events.front().flags.size());
                } else {
                  if (input.numeric.empty())
                    throw std::runtime_error("no numeric stream supplied");
                  n = static_cast<int>(input.numeric.front().values.size());
                  DetectorSpec spec;
                  spec.kind = detector;
                  DetectorBank bank(static_cast<std::size_t>(n), spec);
                  for (const ContextVector& cv : input.numeric)
                    events.push_back(bank.detect(cv));
                }
                PipelineConfig config;
                config.forest = ForestParams{m, l, k_max};
                config.p_thr = p_thr;
                config.aging = aging;
                config.delta_mem = input.delta_mem;
                config.granularity = input.granularity;
                Pipeline pipe(n, NameTable::numbered(static_cast<std::size_t>(n)),
                              config);
                for (const EventVector& ev : events) pipe.step(ev);
                row.report = pipe.report();
              } catch (const std::exception& e) {
                row.error = e.what();
              }
              rows.push_back(std::move(row));
            }
  return rows;
}

namespace {

std::string opt_str(const std::optional<double>& v) {
  return v ? format_double(*v) : "";
}

std::vector<std::string> split_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

const char* kTableHeader =
    "detector,m,l,k_max,p_thr,aging,aging_k,aging_n,steps,predictions,tp,fp,fn,"
    "precision,recall,error";

}  // namespace

void write_sweep_table(const std::filesystem::path& path,
                       std::span<const SweepRow> rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << kTableHeader << '\n';
  for (const SweepRow& r : rows) {
    out << r.detector << ',' << r.m << ',' << r.l << ',' << r.k_max << ','
        << format_double(r.p_thr) << ',' << to_string(r.aging.kind) << ','
        << format_double(r.aging.k) << ',' << r.aging.n_window << ','
        << r.report.steps << ',' << r.report.predictions_issued << ',' << r.report.tp
        << ',' << r.report.fp << ',' << r.report.fn << ','
        << opt_str(r.report.precision()) << ',' << opt_str(r.report.recall()) << ','
        << r.error << '\n';
  }
}

std::vector<SweepRow> read_sweep_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string header;
  if (!std::getline(in, header) || split_line(header) != split_line(kTableHeader))
    throw std::runtime_error(path.string() + ": unexpected table header");
  std::vector<SweepRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != 16)
      throw std::runtime_error(path.string() + ": bad row: " + line);
    SweepRow r;
    r.detector = cells[0];
    r.m = std::stoi(cells[1]);
    r.l = std::stoi(cells[2]);
    r.k_max = std::stoi(cells[3]);
    r.p_thr = std::stod(cells[4]);
    r.aging.kind = aging_kind_from_string(cells[5]);
    r.aging.k = std::stod(cells[6]);
    r.aging.n_window = std::stoi(cells[7]);
    r.report.steps = std::stoll(cells[8]);
    r.report.predictions_issued = std::stoll(cells[9]);
    r.report.tp = std::stoll(cells[10]);
    r.report.fp = std::stoll(cells[11]);
    r.report.fn = std::stoll(cells[12]);
    r.error = cells[15];
    rows.push_back(std::move(r));
  }
  return rows;
}

void emit_plot_data(std::span<const SweepRow> rows,
                    const std::filesystem::path& out_dir) {
  if (rows.empty()) throw std::invalid_argument("emit_plot_data: empty table");
  std::filesystem::create_directories(out_dir);

  // precision vs p_thr, one column per detector
  {
    std::set<std::string> detectors;
    std::set<double> thresholds;
    for (const SweepRow& r : rows) {
      detectors.insert(r.detector);
      thresholds.insert(r.p_thr);
    }
    std::ofstream out(out_dir / "precision_vs_pthr.csv");
    out << "p_thr";
    for (const auto& d : detectors) out << ',' << d;
    out << '\n';
    for (double thr : thresholds) {
      out << format_double(thr);
      for (const auto& d : detectors) {
        std::optional<double> p;
        for (const SweepRow& r : rows)
          if (r.detector == d && r.p_thr == thr && r.error.empty()) {
            p = r.report.precision();
            break;
          }
        out << ',' << opt_str(p);
      }
      out << '\n';
    }
  }

  // precision vs k_max, one column per (m,l)
  {
    std::set<std::pair<int, int>> orders;
    std::set<int> ks;
    for (const SweepRow& r : rows) {
      orders.insert({r.m, r.l});
      ks.insert(r.k_max);
    }
    std::ofstream out(out_dir / "precision_vs_k.csv");
    out << "k_max";
    for (const auto& [m, l] : orders) out << ",m" << m << "_l" << l;
    out << '\n';
    for (int k : ks) {
      out << k;
      for (const auto& [m, l] : orders) {
        std::optional<double> p;
        for (const SweepRow& r : rows)
          if (r.m == m && r.l == l && r.k_max == k && r.error.empty()) {
            p = r.report.precision();
            break;
          }
        out << ',' << opt_str(p);
      }
      out << '\n';
    }
  }

  // precision vs aging k, one column per aging kind
  {
    std::set<std::string> kinds;
    std::set<double> ks;
    for (const SweepRow& r : rows) {
      kinds.insert(to_string(r.aging.kind));
      ks.insert(r.aging.k);
    }
    std::ofstream out(out_dir / "precision_vs_aging.csv");
    out << "aging_k";
    for (const auto& kind : kinds) out << ',' << kind;
    out << '\n';
    for (double k : ks) {
      out << format_double(k);
      for (const auto& kind : kinds) {
        std::optional<double> p;
        for (const SweepRow& r : rows)
          if (to_string(r.aging.kind) == kind && r.aging.k == k && r.error.empty()) {
            p = r.report.precision();
            break;
          }
        out << ',' << opt_str(p);
      }
      out << '\n';
    }
  }
}

}  // namespace evcast
