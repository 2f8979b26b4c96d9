#pragma once

#include <cstdint>

#include "noah/hypergraph.hpp"

namespace noah {

// Degree-preserving null model: for each observed hyperedge, sample the same
// number of distinct nodes with probability proportional to degree (sequential
// weighted draws without replacement). Node identities and attributes are
// preserved. Edges larger than the number of positive-degree nodes fall back
// to uniform sampling over the whole node set.
AttributedHypergraph hypercl_generate(const AttributedHypergraph& h, uint64_t seed);

}  // namespace noah
