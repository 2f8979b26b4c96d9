#include "noah/partition.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace noah {

CoreFringePartition CoreFringePartition::from_core_set(int node_count, std::vector<int> core_ids,
                                                       int rounds) {
    std::sort(core_ids.begin(), core_ids.end());
    core_ids.erase(std::unique(core_ids.begin(), core_ids.end()), core_ids.end());
    if (!core_ids.empty() && (core_ids.front() < 0 || core_ids.back() >= node_count)) {
        throw std::invalid_argument("core id out of range");
    }

    CoreFringePartition p;
    p.core = std::move(core_ids);
    p.rounds_used = rounds;
    p.core_pos.assign(node_count, -1);
    p.fringe_pos.assign(node_count, -1);
    for (size_t i = 0; i < p.core.size(); ++i) p.core_pos[p.core[i]] = static_cast<int>(i);
    for (int v = 0; v < node_count; ++v) {
        if (p.core_pos[v] < 0) {
            p.fringe_pos[v] = static_cast<int>(p.fringe.size());
            p.fringe.push_back(v);
        }
    }
    return p;
}

std::vector<int> minimal_hitting_set(const AttributedHypergraph& h, Rng& rng) {
    const int m = h.edge_count();

    // Step 1: greedy cover over a random edge permutation.
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    std::vector<char> in_set(h.node_count, 0);
    std::vector<int> members;
    for (int j : order) {
        const auto& e = h.hyperedges[j];
        bool hit = std::any_of(e.begin(), e.end(), [&](int v) { return in_set[v]; });
        if (!hit) {
            for (int v : e) {
                if (!in_set[v]) {
                    in_set[v] = 1;
                    members.push_back(v);
                }
            }
        }
    }

    // Step 2: prune over a random member permutation. A member is removable
    // iff every edge containing it keeps at least one other member.
    std::vector<int> hit_count(m, 0);
    std::vector<std::vector<int>> incident(h.node_count);
    for (int j = 0; j < m; ++j) {
        for (int v : h.hyperedges[j]) {
            if (in_set[v]) hit_count[j]++;
            incident[v].push_back(j);
        }
    }
    rng.shuffle(members);
    std::vector<int> result;
    for (int v : members) {
        bool removable = std::all_of(incident[v].begin(), incident[v].end(),
                                     [&](int j) { return hit_count[j] >= 2; });
        if (removable) {
            in_set[v] = 0;
            for (int j : incident[v]) hit_count[j]--;
        } else {
            result.push_back(v);
        }
    }
    std::sort(result.begin(), result.end());
    return result;
}

CoreFringePartition umhs_partition(const AttributedHypergraph& h, int rounds, Rng& rng) {
    if (rounds < 1) {
        throw std::invalid_argument("umhs rounds must be >= 1");
    }
    std::vector<uint64_t> round_seeds(rounds);
    for (int r = 0; r < rounds; ++r) round_seeds[r] = rng.next_u64();

    std::vector<char> in_core(h.node_count, 0);
    for (int r = 0; r < rounds; ++r) {
        Rng round_rng(round_seeds[r]);
        for (int v : minimal_hitting_set(h, round_rng)) in_core[v] = 1;
    }
    std::vector<int> core;
    for (int v = 0; v < h.node_count; ++v) {
        if (in_core[v]) core.push_back(v);
    }
    return CoreFringePartition::from_core_set(h.node_count, std::move(core), rounds);
}

CoreFringePartition all_core_partition(const AttributedHypergraph& h) {
    std::vector<int> core(h.node_count);
    std::iota(core.begin(), core.end(), 0);
    return CoreFringePartition::from_core_set(h.node_count, std::move(core), 0);
}

}  // namespace noah
