#pragma once

#include <vector>

#include "noah/hypergraph.hpp"
#include "noah/rng.hpp"

namespace noah {

// Disjoint core/fringe split of the node set. `core` intersects every
// hyperedge whenever it was produced by umhs_partition.
struct CoreFringePartition {
    std::vector<int> core;    // sorted node ids
    std::vector<int> fringe;  // sorted node ids
    int rounds_used = 0;

    // position of node id in `core`, or -1 for fringe nodes
    std::vector<int> core_pos;
    // position of node id in `fringe`, or -1 for core nodes
    std::vector<int> fringe_pos;

    int core_size() const { return static_cast<int>(core.size()); }
    int fringe_size() const { return static_cast<int>(fringe.size()); }

    static CoreFringePartition from_core_set(int node_count, std::vector<int> core_ids,
                                             int rounds_used = 0);
};

// One round of the randomized minimal-hitting-set procedure: traverse a
// random permutation of the hyperedges, adding every node of an edge that is
// not yet hit; then traverse a random permutation of the set, dropping any
// node whose removal keeps it a hitting set. The result is a minimal hitting
// set (removing any single member uncovers some hyperedge).
std::vector<int> minimal_hitting_set(const AttributedHypergraph& h, Rng& rng);

// Union of `rounds` minimal hitting sets; fringe is the complement. Each
// round draws its own sub-stream from `rng` up front, so a run with R+1
// rounds reuses the first R rounds of a run with R.
CoreFringePartition umhs_partition(const AttributedHypergraph& h, int rounds, Rng& rng);

// Trivial partition with every node in the core (used by the core-free
// ablation mode, where seeds range over the whole node set).
CoreFringePartition all_core_partition(const AttributedHypergraph& h);

}  // namespace noah
