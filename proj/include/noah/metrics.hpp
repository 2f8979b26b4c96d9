#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include "noah/hypergraph.hpp"

namespace noah {

// Fraction of degree mass of Y-labeled nodes (attribute l) that falls in
// size-s hyperedges containing exactly t nodes with that label. Undefined
// (nullopt) when no Y-labeled node has positive degree.
std::optional<double> affinity_score(const AttributedHypergraph& h, int l, int y, int s, int t);

// Probability that a Y-labeled node joins a size-s hyperedge with exactly t
// Y-labeled members when the s-1 partners are drawn uniformly at random.
double baseline_score(int n, int n_y, int s, int t);

// affinity_score / baseline_score; undefined when either is.
std::optional<double> affinity_ratio(const AttributedHypergraph& h, int l, int y, int s, int t);

// Per-hyperedge binary entropy (natural log) of attribute l over members.
std::vector<double> hyperedge_entropy(const AttributedHypergraph& h, int l);

// Same, after `rounds` rounds of mean-propagation: hyperedge distributions
// become the mean of member node distributions, node distributions the mean
// of incident hyperedge distributions. Degree-0 nodes keep their start value.
std::vector<double> higher_order_hyperedge_entropy(const AttributedHypergraph& h, int l,
                                                   int rounds);

// Fraction of co-members sharing the node's value of attribute l; nodes with
// no non-singleton incident edge are excluded.
std::vector<double> node_homophily(const AttributedHypergraph& h, int l);

// 1-D Wasserstein distance between empirical distributions (quantile-function
// integral; reduces to the mean absolute sorted difference for equal sizes).
double wasserstein1(const std::vector<double>& a, const std::vector<double>& b);

struct InterplayOptions {
    std::vector<int> s_list{2, 3, 4};
    int hohe_rounds = 1;
    double log_eps = 1e-8;  // additive floor inside the log-scaled difference
};

// Single-hypergraph interplay measurements. Undefined ratios are NaN.
struct InterplayProfile {
    std::vector<int> s_list;
    int hohe_rounds = 1;
    std::vector<std::vector<double>> he;    // [attr][edge]
    std::vector<std::vector<double>> hohe;  // [attr][edge]
    std::vector<std::vector<double>> nhs;   // [attr][qualifying node]
    // ratios[s index][attr][label][t-1]
    std::vector<std::vector<std::array<std::vector<double>, 2>>> ratios;
};

InterplayProfile interplay_profile(const AttributedHypergraph& h,
                                   const InterplayOptions& opts = {});

struct MetricReport {
    std::vector<int> s_list;
    int hohe_rounds = 1;
    std::map<int, double> ts;  // s -> sum of log-scaled ratio differences
    double he = 0.0;
    double hohe = 0.0;
    double nhs = 0.0;
    std::vector<double> he_per_attr;
    std::vector<double> hohe_per_attr;
    std::vector<double> nhs_per_attr;
    int skipped_ratio_terms = 0;
    int skipped_distance_terms = 0;
    InterplayProfile real;
    InterplayProfile gen;
};

// All six discrepancies between a reference hypergraph and a generated one
// over the same node set and attribute matrix (throws on mismatch).
MetricReport interplay_discrepancy(const AttributedHypergraph& real,
                                   const AttributedHypergraph& gen,
                                   const InterplayOptions& opts = {});

std::string metric_report_to_json(const MetricReport& report);
MetricReport metric_report_from_json(const std::string& text);  // summary fields only

struct StructuralReport {
    std::vector<int> degrees;  // descending
    std::vector<int> sizes;    // descending
    std::vector<double> singular_values;  // top-k, descending
};

// Degree and size distributions plus the top singular values of the node-by-
// hyperedge incidence matrix, computed by block subspace iteration on the
// sparse incidence operator.
StructuralReport structural_report(const AttributedHypergraph& h, int top_k_singular);

}  // namespace noah
