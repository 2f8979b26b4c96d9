#include "noah/hypercl.hpp"

#include <algorithm>
#include <stdexcept>

#include "noah/rng.hpp"

namespace noah {

namespace {

// Sequential weighted draws without replacement; a drawn node's weight is
// removed before the next draw.
std::vector<int> weighted_sample_without_replacement(const std::vector<double>& weights, int count,
                                                     Rng& rng) {
    std::vector<double> w = weights;
    double total = 0.0;
    for (double x : w) total += x;

    std::vector<int> picked;
    picked.reserve(count);
    for (int t = 0; t < count; ++t) {
        double u = rng.next_double() * total;
        double cum = 0.0;
        int chosen = -1;
        for (size_t v = 0; v < w.size(); ++v) {
            if (w[v] <= 0.0) continue;
            cum += w[v];
            if (u < cum) {
                chosen = static_cast<int>(v);
                break;
            }
        }
        if (chosen < 0) {  // numerical edge: take the last positive-weight node
            for (size_t v = w.size(); v-- > 0;) {
                if (w[v] > 0.0) {
                    chosen = static_cast<int>(v);
                    break;
                }
            }
        }
        picked.push_back(chosen);
        total -= w[chosen];
        w[chosen] = 0.0;
    }
    return picked;
}

}  // namespace

AttributedHypergraph hypercl_generate(const AttributedHypergraph& h, uint64_t seed) {
    h.validate();
    const auto degrees = degree_vector(h);
    std::vector<double> weights(degrees.begin(), degrees.end());
    const int positive = static_cast<int>(std::count_if(
        degrees.begin(), degrees.end(), [](int d) { return d > 0; }));

    AttributedHypergraph out;
    out.node_count = h.node_count;
    out.attributes = h.attributes;
    out.hyperedges.reserve(h.hyperedges.size());

    for (size_t j = 0; j < h.hyperedges.size(); ++j) {
        const int size = static_cast<int>(h.hyperedges[j].size());
        Rng rng(derive_stream(seed, static_cast<uint64_t>(j)));
        std::vector<int> edge;
        if (size <= positive) {
            edge = weighted_sample_without_replacement(weights, size, rng);
        } else {
            if (size > h.node_count) {
                throw std::invalid_argument("hyperedge larger than node set");
            }
            std::vector<double> uniform(h.node_count, 1.0);
            edge = weighted_sample_without_replacement(uniform, size, rng);
        }
        std::sort(edge.begin(), edge.end());
        out.hyperedges.push_back(std::move(edge));
    }
    return out;
}

}  // namespace noah
