#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "noah/fit.hpp"
#include "noah/generator.hpp"
#include "noah/hypercl.hpp"
#include "noah/hypergraph.hpp"
#include "noah/metrics.hpp"
#include "noah/partition.hpp"
#include "noah/rng.hpp"

namespace py = pybind11;
using namespace noah;

namespace {

AttributedHypergraph make_hypergraph(const std::vector<std::vector<int>>& edges,
                                     const std::vector<std::vector<int>>& attrs) {
    AttributedHypergraph h;
    h.node_count = static_cast<int>(attrs.size());
    h.attributes = BinaryMatrix(h.node_count, attrs.empty() ? 0 : static_cast<int>(attrs[0].size()));
    for (int v = 0; v < h.node_count; ++v) {
        if (static_cast<int>(attrs[v].size()) != h.attributes.cols) {
            throw std::invalid_argument("ragged attribute rows");
        }
        for (int c = 0; c < h.attributes.cols; ++c) {
            h.attributes.at(v, c) = static_cast<uint8_t>(attrs[v][c]);
        }
    }
    for (const auto& e : edges) {
        auto edge = e;
        std::sort(edge.begin(), edge.end());
        edge.erase(std::unique(edge.begin(), edge.end()), edge.end());
        h.hyperedges.push_back(std::move(edge));
    }
    h.validate();
    return h;
}

std::vector<std::vector<int>> attributes_list(const AttributedHypergraph& h) {
    std::vector<std::vector<int>> out(h.node_count, std::vector<int>(h.attributes.cols));
    for (int v = 0; v < h.node_count; ++v) {
        for (int c = 0; c < h.attributes.cols; ++c) out[v][c] = h.attributes.at(v, c);
    }
    return out;
}

GenMode parse_mode(const std::string& mode) {
    if (mode == "noah") return GenMode::noah;
    if (mode == "noah-cf" || mode == "noah_cf") return GenMode::noah_cf;
    throw std::invalid_argument("mode must be 'noah' or 'noah-cf'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Attributed-hypergraph generation, fitting, and interplay metrics";

    py::class_<AttributedHypergraph>(m, "AttributedHypergraph")
        .def(py::init(&make_hypergraph), py::arg("edges"), py::arg("attributes"))
        .def_readonly("node_count", &AttributedHypergraph::node_count)
        .def_readonly("hyperedges", &AttributedHypergraph::hyperedges)
        .def_property_readonly("attributes", &attributes_list)
        .def_property_readonly("edge_count", &AttributedHypergraph::edge_count)
        .def_property_readonly("attr_count", &AttributedHypergraph::attr_count);

    py::class_<CoreFringePartition>(m, "CoreFringePartition")
        .def_readonly("core", &CoreFringePartition::core)
        .def_readonly("fringe", &CoreFringePartition::fringe)
        .def_readonly("rounds_used", &CoreFringePartition::rounds_used);

    py::class_<NoahParams>(m, "NoahParams")
        .def(py::init<>())
        .def_readwrite("p_seed", &NoahParams::p_seed)
        .def_readwrite("theta_core", &NoahParams::theta_core)
        .def_readwrite("theta_fringe", &NoahParams::theta_fringe);

    py::class_<FitConfig>(m, "FitConfig")
        .def(py::init<>())
        .def_readwrite("epochs", &FitConfig::epochs)
        .def_readwrite("learning_rate", &FitConfig::learning_rate)
        .def_readwrite("w_deg", &FitConfig::w_deg)
        .def_readwrite("w_card", &FitConfig::w_card)
        .def_readwrite("seed_decay", &FitConfig::seed_decay)
        .def_readwrite("prob_floor", &FitConfig::prob_floor)
        .def_readwrite("grad_check", &FitConfig::grad_check)
        .def_readwrite("normalize_core", &FitConfig::normalize_core);

    py::class_<EpochRecord>(m, "EpochRecord")
        .def_readonly("edge", &EpochRecord::edge)
        .def_readonly("deg", &EpochRecord::deg)
        .def_readonly("card", &EpochRecord::card)
        .def_readonly("total", &EpochRecord::total);

    py::class_<FitTrace>(m, "FitTrace")
        .def_readonly("epochs", &FitTrace::epochs)
        .def_readonly("skipped_edges", &FitTrace::skipped_edges)
        .def_readonly("grad_check_max_rel_error", &FitTrace::grad_check_max_rel_error);

    py::class_<MetricReport>(m, "MetricReport")
        .def_readonly("s_list", &MetricReport::s_list)
        .def_readonly("ts", &MetricReport::ts)
        .def_readonly("he", &MetricReport::he)
        .def_readonly("hohe", &MetricReport::hohe)
        .def_readonly("nhs", &MetricReport::nhs)
        .def_readonly("skipped_ratio_terms", &MetricReport::skipped_ratio_terms)
        .def_readonly("skipped_distance_terms", &MetricReport::skipped_distance_terms);

    py::class_<StructuralReport>(m, "StructuralReport")
        .def_readonly("degrees", &StructuralReport::degrees)
        .def_readonly("sizes", &StructuralReport::sizes)
        .def_readonly("singular_values", &StructuralReport::singular_values);

    m.def("load_hypergraph",
          [](const std::string& edges, const std::string& attrs) {
              return load_hypergraph(edges, attrs);
          },
          py::arg("edge_path"), py::arg("attr_path"));
    m.def("save_edges",
          [](const AttributedHypergraph& h, const std::string& p) { save_edges(h, p); });
    m.def("save_attributes",
          [](const AttributedHypergraph& h, const std::string& p) { save_attributes(h, p); });
    m.def("degree_vector", &degree_vector);
    m.def("size_vector", &size_vector);

    m.def("minimal_hitting_set",
          [](const AttributedHypergraph& h, uint64_t seed) {
              Rng rng(seed);
              return minimal_hitting_set(h, rng);
          },
          py::arg("h"), py::arg("seed"));
    m.def("umhs_partition",
          [](const AttributedHypergraph& h, int rounds, uint64_t seed) {
              Rng rng(seed);
              return umhs_partition(h, rounds, rng);
          },
          py::arg("h"), py::arg("rounds") = 10, py::arg("seed") = 42);
    m.def("all_core_partition", &all_core_partition);

    m.def("fit",
          [](const AttributedHypergraph& h, const CoreFringePartition& part,
             const FitConfig& config, uint64_t seed) {
              Rng rng(seed);
              return fit(h, part, config, rng);
          },
          py::arg("h"), py::arg("partition"), py::arg("config") = FitConfig{},
          py::arg("seed") = 42);
    m.def("total_loss",
          [](const AttributedHypergraph& h, const CoreFringePartition& part,
             const NoahParams& params, const FitConfig& config) {
              const auto loss = total_loss(h, part, params, config);
              return py::make_tuple(loss.total, loss.edge, loss.deg, loss.card);
          },
          py::arg("h"), py::arg("partition"), py::arg("params"), py::arg("config") = FitConfig{});

    m.def("generate",
          [](const NoahParams& params, const CoreFringePartition& part,
             const AttributedHypergraph& h, int m_edges, uint64_t seed, const std::string& mode,
             bool shared_mix) {
              GenOptions opts;
              opts.mode = parse_mode(mode);
              opts.shared_mix = shared_mix;
              return generate(params, part, h.attributes, m_edges, seed, opts);
          },
          py::arg("params"), py::arg("partition"), py::arg("h"), py::arg("num_edges"),
          py::arg("seed") = 42, py::arg("mode") = "noah", py::arg("shared_mix") = false);
    m.def("hypercl_generate", &hypercl_generate, py::arg("h"), py::arg("seed") = 42);

    m.def("save_params",
          [](const NoahParams& p, const std::string& path) { save_params(p, path); });
    m.def("load_params", [](const std::string& path) { return load_params(path); });

    m.def("affinity_score", &affinity_score, py::arg("h"), py::arg("attr"), py::arg("label"),
          py::arg("s"), py::arg("t"));
    m.def("baseline_score", &baseline_score, py::arg("n"), py::arg("n_labeled"), py::arg("s"),
          py::arg("t"));
    m.def("affinity_ratio", &affinity_ratio, py::arg("h"), py::arg("attr"), py::arg("label"),
          py::arg("s"), py::arg("t"));
    m.def("hyperedge_entropy", &hyperedge_entropy, py::arg("h"), py::arg("attr"));
    m.def("higher_order_hyperedge_entropy", &higher_order_hyperedge_entropy, py::arg("h"),
          py::arg("attr"), py::arg("rounds") = 1);
    m.def("node_homophily", &node_homophily, py::arg("h"), py::arg("attr"));
    m.def("wasserstein1", &wasserstein1);
    m.def("interplay_discrepancy",
          [](const AttributedHypergraph& real, const AttributedHypergraph& gen,
             const std::vector<int>& s_list, int hohe_rounds) {
              InterplayOptions opts;
              opts.s_list = s_list;
              opts.hohe_rounds = hohe_rounds;
              return interplay_discrepancy(real, gen, opts);
          },
          py::arg("real"), py::arg("gen"), py::arg("s_list") = std::vector<int>{2, 3, 4},
          py::arg("hohe_rounds") = 1);
    m.def("structural_report", &structural_report, py::arg("h"), py::arg("top_k_singular"));
}
