#pragma once

#include <cstdint>
#include <vector>

#include "noah/hypergraph.hpp"
#include "noah/params.hpp"
#include "noah/partition.hpp"
#include "noah/rng.hpp"

namespace noah {

enum class GenMode {
    noah,     // seed from core, core attachment, then fringe attachment
    noah_cf,  // core-free ablation: seed from all nodes, pairwise attachment only
};

struct GenOptions {
    GenMode mode = GenMode::noah;
    // Draw one mixed attribute vector per hyperedge instead of redrawing it
    // for every fringe candidate. Default matches the per-candidate redraw.
    bool shared_mix = false;
    double prob_floor = kDefaultProbFloor;
};

// Probability that core node v_c joins a group seeded by v_s: the product of
// per-attribute core affinities, evaluated in log space and exponentiated.
double core_attach_prob(const NoahParams& params, const BinaryMatrix& x, int v_s, int v_c,
                        double prob_floor = kDefaultProbFloor);

// One Bernoulli sample per attribute with mean equal to the attribute's
// average over the group members.
std::vector<uint8_t> mix_core_attributes(const BinaryMatrix& x, const std::vector<int>& core_group,
                                         Rng& rng);

// Probability that fringe node v_f attaches to a group summarized by x_mix.
double fringe_attach_prob(const NoahParams& params, const std::vector<uint8_t>& x_mix, int v_f,
                          const BinaryMatrix& x, double prob_floor = kDefaultProbFloor);

// Samples one hyperedge. The rng stream is consumed in a fixed order (seed
// draw, core candidates ascending by id, then per fringe candidate ascending
// by id: the k mix draws followed by the inclusion draw), so a fixed seed
// reproduces the edge bit-for-bit. Mode noah_cf requires the all-core
// partition and p_seed over the whole node set; theta_fringe is unused.
std::vector<int> generate_hyperedge(const NoahParams& params, const CoreFringePartition& partition,
                                    const BinaryMatrix& x, Rng& rng,
                                    const GenOptions& opts = {});

// Generates m hyperedges over the original node set, keeping node identities
// and the attribute matrix. Hyperedge i uses the sub-stream derived from
// (seed, i), so output is identical regardless of evaluation order.
AttributedHypergraph generate(const NoahParams& params, const CoreFringePartition& partition,
                              const BinaryMatrix& x, int m, uint64_t seed,
                              const GenOptions& opts = {});

}  // namespace noah
