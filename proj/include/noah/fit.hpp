#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "noah/hypergraph.hpp"
#include "noah/params.hpp"
#include "noah/partition.hpp"
#include "noah/rng.hpp"

namespace noah {

struct FitConfig {
    int epochs = 2000;
    double learning_rate = 0.01;
    // Small weights keep the distribution-matching terms from chasing
    // sampling noise in the observed degrees; raising them tightens the
    // degree/size match at the cost of likelihood.
    double w_deg = 0.01;
    double w_card = 0.01;
    // Decoupled weight decay on the seed logits, shrinking the seed
    // distribution toward uniform. The per-hyperedge seed is a latent
    // mixture component, so its logits carry far less signal per epoch
    // than the affinity entries and drift without this.
    double seed_decay = 0.02;
    double prob_floor = kDefaultProbFloor;
    bool grad_check = false;
    // Divide the core-group likelihood by the total seed probability over
    // the observed core group. Off by default: the logit parameterization
    // already keeps training stable, and the normalized objective biases
    // the recovered seed distribution.
    bool normalize_core = false;

    void validate() const;
};

struct EpochRecord {
    double edge = 0.0;
    double deg = 0.0;
    double card = 0.0;
    double total = 0.0;
};

struct FitTrace {
    std::vector<EpochRecord> epochs;
    int skipped_edges = 0;  // hyperedges without a core member, excluded from all losses
    double grad_check_max_rel_error = -1.0;  // filled when FitConfig::grad_check
};

// Unconstrained optimization variables: p_seed via normalized exponentials of
// the seed logits, every affinity entry via the logistic function.
struct ParamLogits {
    std::vector<double> seed;          // |C| (|V| in core-free mode)
    std::vector<double> theta_core;    // k*4, layout [l*4 + x1*2 + x2]
    std::vector<double> theta_fringe;  // k*4

    size_t size() const { return seed.size() + theta_core.size() + theta_fringe.size(); }
    double& flat(size_t i);
    double flat(size_t i) const;
};

NoahParams params_from_logits(const ParamLogits& logits);
ParamLogits logits_from_params(const NoahParams& params);

// Preprocessed, parameter-independent view of (hypergraph, partition).
// Distinct attribute rows and distinct core-group compositions are
// deduplicated so per-epoch cost is nearly independent of the attribute
// count (the k-proportional work happens once per epoch over the
// deduplicated tables, not per hyperedge).
struct FitData {
    int k = 0;
    int core_count = 0;
    int fringe_count = 0;

    std::vector<std::vector<uint8_t>> core_rows;  // distinct core attribute rows
    std::vector<int> core_row_of;                 // per core index
    std::vector<int> core_row_count;
    std::vector<std::vector<uint8_t>> fringe_rows;
    std::vector<int> fringe_row_of;
    std::vector<int> fringe_row_count;

    struct EdgeView {
        int original_index = 0;
        std::vector<int> core_members;                    // core indices
        std::vector<std::pair<int, int>> core_row_rle;    // (row, count) over C_e
        std::vector<std::pair<int, int>> fringe_row_rle;  // (row, count) over F_e
        int sig = 0;
    };
    std::vector<EdgeView> edges;  // hyperedges with nonempty core subset
    std::vector<int> skipped;     // original indices of core-free hyperedges

    // Distinct core-group compositions; sig_p[s][l] is the mean of attribute
    // l over the group (the Bernoulli mean of the mixed attribute vector).
    std::vector<std::vector<double>> sig_p;
    std::vector<int> sig_edge_count;

    std::vector<double> obs_core_deg;    // per core index, over usable edges
    std::vector<double> obs_fringe_deg;  // per fringe index
    std::vector<double> obs_core_card;   // per usable edge: |C_e|
    std::vector<double> obs_fringe_card; // per usable edge: |F_e|

    FitData(const AttributedHypergraph& h, const CoreFringePartition& partition);
};

struct LossParts {
    double total = 0.0;
    double edge = 0.0;
    double deg = 0.0;
    double card = 0.0;
};

struct ExpectedStats {
    std::vector<double> core_deg;     // per core index
    std::vector<double> fringe_deg;   // per fringe index
    std::vector<double> core_card;    // per usable edge
    std::vector<double> fringe_card;  // per usable edge
};

// log of the (optionally normalized) core-group construction likelihood of
// one hyperedge: sum over candidate seeds of the seed probability times the
// inclusion/exclusion products over the core set, via log-sum-exp.
// Throws std::invalid_argument when the edge has no core member.
double core_log_likelihood(const std::vector<int>& edge, const CoreFringePartition& partition,
                           const BinaryMatrix& x, const NoahParams& params, bool normalize = true,
                           double prob_floor = kDefaultProbFloor);

// log of the fringe attachment likelihood, with the mixed attribute vector
// marginalized out exactly per attribute.
double fringe_log_likelihood(const std::vector<int>& edge, const CoreFringePartition& partition,
                             const BinaryMatrix& x, const NoahParams& params,
                             double prob_floor = kDefaultProbFloor);

// Mean attribute vector of a core group (the Bernoulli means p_e).
std::vector<double> core_mean_attributes(const BinaryMatrix& x, const std::vector<int>& core_group);

// Marginal attachment probability of fringe node v_f given those means.
double fringe_marginal_attach_prob(const NoahParams& params, const std::vector<double>& p_e,
                                   int v_f, const BinaryMatrix& x,
                                   double prob_floor = kDefaultProbFloor);

// MSE between descending-sorted copies of the two vectors. Throws on length
// mismatch; two empty vectors give 0.
double sorted_mse(const std::vector<double>& observed, const std::vector<double>& expected);

// Expected node degrees and per-edge core/fringe cardinalities under the
// model, conditioned on the observed core groups with the seed marginalized
// by p_seed renormalized over each group.
ExpectedStats expected_stats(const FitData& data, const NoahParams& params,
                             double prob_floor = kDefaultProbFloor);
std::pair<std::vector<double>, std::vector<double>> expected_degrees(
    const FitData& data, const NoahParams& params, double prob_floor = kDefaultProbFloor);
std::pair<std::vector<double>, std::vector<double>> expected_cardinalities(
    const FitData& data, const NoahParams& params, double prob_floor = kDefaultProbFloor);

// Full loss: edge negative log-likelihood plus weighted sorted-MSE degree and
// cardinality terms. Throws std::runtime_error (with the offending hyperedge
// index) if a per-edge likelihood is non-finite.
LossParts total_loss(const FitData& data, const NoahParams& params, const FitConfig& config);
LossParts total_loss(const AttributedHypergraph& h, const CoreFringePartition& partition,
                     const NoahParams& params, const FitConfig& config);

// Loss plus analytic gradients with respect to every logit.
LossParts loss_and_gradients(const FitData& data, const ParamLogits& logits,
                             const FitConfig& config, ParamLogits& grad);

// Max relative deviation between analytic gradients and central finite
// differences at the given point (used by the CLI's --grad-check).
double max_gradient_rel_error(const FitData& data, const ParamLogits& logits,
                              const FitConfig& config, double step = 1e-5);

// Full-batch adaptive-moment gradient descent over the logits for
// config.epochs steps. The rng seeds the affinity initialization noise.
std::pair<NoahParams, FitTrace> fit(const AttributedHypergraph& h,
                                    const CoreFringePartition& partition, const FitConfig& config,
                                    Rng& rng);

}  // namespace noah
