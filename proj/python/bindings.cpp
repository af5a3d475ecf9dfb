#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "evcast/aging.hpp"
#include "evcast/correlation.hpp"
#include "evcast/detection.hpp"
#include "evcast/evaluation.hpp"
#include "evcast/pipeline.hpp"
#include "evcast/prediction.hpp"
#include "evcast/ptl.hpp"

namespace py = pybind11;
using namespace evcast;

namespace {

EventVector make_event_vector(std::int64_t t, const std::vector<int>& flags) {
  EventVector ev;
  ev.t = t;
  ev.flags.assign(flags.begin(), flags.end());
  return ev;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "online event correlation and forecasting over sensor streams";

  py::class_<EventSymbol>(m, "EventSymbol")
      .def(py::init<>())
      .def(py::init<std::vector<int>>())
      .def_property_readonly("ids", &EventSymbol::ids)
      .def("__len__", &EventSymbol::size)
      .def("__eq__", [](const EventSymbol& a, const EventSymbol& b) { return a == b; })
      .def("__repr__", [](const EventSymbol& s) {
        std::string out = "EventSymbol([";
        for (std::size_t i = 0; i < s.ids().size(); ++i) {
          if (i) out += ", ";
          out += std::to_string(s.ids()[i]);
        }
        return out + "])";
      });

  py::class_<EventVector>(m, "EventVector")
      .def(py::init(&make_event_vector), py::arg("t"), py::arg("flags"))
      .def_readonly("t", &EventVector::t)
      .def_property_readonly("flags", [](const EventVector& ev) {
        return std::vector<int>(ev.flags.begin(), ev.flags.end());
      });

  py::class_<DetectorSignal>(m, "DetectorSignal")
      .def_readonly("flag", &DetectorSignal::flag)
      .def_readonly("direction", &DetectorSignal::direction);

  py::class_<CusumDetector>(m, "CusumDetector")
      .def(py::init([](std::optional<double> mu, double k_pos, double k_neg,
                       double thresh_pos, double thresh_neg, int warmup) {
             return CusumDetector(
                 CusumParams{mu, k_pos, k_neg, thresh_pos, thresh_neg, warmup});
           }),
           py::arg("mu") = std::nullopt, py::arg("k_pos") = 0.5,
           py::arg("k_neg") = 0.5, py::arg("thresh_pos") = 4.0,
           py::arg("thresh_neg") = 4.0, py::arg("warmup") = 50)
      .def("step", &CusumDetector::step)
      .def_property_readonly("pos_sum", &CusumDetector::pos_sum)
      .def_property_readonly("neg_sum", &CusumDetector::neg_sum);

  py::class_<ShewhartDetector>(m, "ShewhartDetector")
      .def(py::init([](double limit, int warmup, double sigma_floor) {
             return ShewhartDetector(ShewhartParams{limit, warmup, sigma_floor});
           }),
           py::arg("limit") = 3.0, py::arg("warmup") = 50,
           py::arg("sigma_floor") = 1e-9)
      .def("step", &ShewhartDetector::step)
      .def_property_readonly("mean", &ShewhartDetector::mean)
      .def_property_readonly("sigma", &ShewhartDetector::sigma)
      .def_property_readonly("ucl", &ShewhartDetector::ucl)
      .def_property_readonly("lcl", &ShewhartDetector::lcl);

  m.def("symbols_for_step", &symbols_for_step, py::arg("ev"), py::arg("k_max"));
  m.def("node_budget", &node_budget, py::arg("n"), py::arg("k_max"));

  py::class_<ForestParams>(m, "ForestParams")
      .def(py::init([](int m_, int l_, int k_max) {
             return ForestParams{m_, l_, k_max};
           }),
           py::arg("m") = 1, py::arg("l") = 1, py::arg("k_max") = 1)
      .def_readwrite("m", &ForestParams::m)
      .def_readwrite("l", &ForestParams::l)
      .def_readwrite("k_max", &ForestParams::k_max);

  py::class_<PatternForest>(m, "PatternForest")
      .def(py::init([](int n, int m_, int l_, int k_max) {
             return PatternForest(n, ForestParams{m_, l_, k_max});
           }),
           py::arg("n"), py::arg("m") = 1, py::arg("l") = 1, py::arg("k_max") = 1)
      .def(py::init<int, ForestParams>(), py::arg("n"), py::arg("params"))
      .def("update", &PatternForest::update)
      .def_property_readonly("steps", &PatternForest::steps)
      .def_property_readonly("tree_count", &PatternForest::tree_count)
      .def("prior_probability", &PatternForest::prior_probability)
      .def("path_probability",
           [](const PatternForest& f, const std::vector<EventSymbol>& path) {
             return f.path_probability(path);
           })
      .def("node_count",
           [](const PatternForest& f, const std::vector<EventSymbol>& path) {
             const PatternNode* node = f.find(path);
             return node ? node->count : 0;
           });

  py::class_<Prediction>(m, "Prediction")
      .def_readonly("horizon", &Prediction::horizon)
      .def_readonly("symbol", &Prediction::symbol)
      .def_readonly("p", &Prediction::p)
      .def_readonly("context", &Prediction::context);

  m.def(
      "predict",
      [](const PatternForest& forest, double p_thr) { return predict(forest, p_thr); },
      py::arg("forest"), py::arg("p_thr"));

  py::class_<NameTable>(m, "NameTable")
      .def(py::init<std::vector<std::string>>())
      .def_static("numbered", &NameTable::numbered, py::arg("n"),
                  py::arg("prefix") = "s")
      .def_property_readonly("names", &NameTable::names);

  py::class_<ProbTemporalRule>(m, "ProbTemporalRule")
      .def_readonly("head", &ProbTemporalRule::head)
      .def_readonly("horizon", &ProbTemporalRule::horizon)
      .def_readonly("p", &ProbTemporalRule::p)
      .def_readonly("extracted_at", &ProbTemporalRule::extracted_at);

  m.def("parse_rule", &parse_rule, py::arg("text"), py::arg("names"));
  m.def("format_rule", &format_rule, py::arg("rule"), py::arg("names"));

  py::class_<AgingPolicy>(m, "AgingPolicy")
      .def(py::init([](const std::string& kind, double k, int n_window) {
             AgingPolicy p{aging_kind_from_string(kind), k, n_window};
             p.validate();
             return p;
           }),
           py::arg("kind") = "none", py::arg("k") = 0.0, py::arg("n_window") = 0);

  m.def("linear_weight", &linear_weight, py::arg("i"), py::arg("policy"));
  m.def("exponential_weight", &exponential_weight, py::arg("i"), py::arg("policy"));
  m.def(
      "merge_probability",
      [](const std::vector<std::pair<std::int64_t, double>>& extractions,
         const AgingPolicy& policy, std::int64_t t) {
        std::vector<Extraction> exts;
        for (auto& [step, p] : extractions) exts.push_back(Extraction{step, p});
        return merge_probability(exts, policy, t);
      },
      py::arg("extractions"), py::arg("policy"), py::arg("t"));
}
