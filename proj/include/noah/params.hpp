#pragma once

#include <array>
#include <filesystem>
#include <vector>

namespace noah {

// 2x2 affinity table indexed by binary attribute values [x1][x2].
using AffinityMatrix = std::array<std::array<double, 2>, 2>;

// Generator parameters: seed distribution over the core set plus one core
// and one fringe affinity matrix per attribute. In core-free mode p_seed
// ranges over the whole node set and only theta_core is used.
struct NoahParams {
    std::vector<double> p_seed;
    std::vector<AffinityMatrix> theta_core;
    std::vector<AffinityMatrix> theta_fringe;

    int attr_count() const { return static_cast<int>(theta_core.size()); }

    // p_seed sums to 1 within 1e-9, entries in [0,1]; affinity entries
    // strictly inside (0,1). Throws std::invalid_argument otherwise.
    void validate(int expected_seed_len, int expected_k) const;
};

// JSON document {"p_seed": [...], "theta_core": [[[...]]], "theta_fringe": [[[...]]]}
void save_params(const NoahParams& params, const std::filesystem::path& path);
NoahParams load_params(const std::filesystem::path& path);

// Affinity entries are clamped into [floor, 1-floor] wherever they enter a
// probability computation, keeping log-space math finite.
inline double clamp_prob(double p, double floor_eps) {
    if (p < floor_eps) return floor_eps;
    if (p > 1.0 - floor_eps) return 1.0 - floor_eps;
    return p;
}

constexpr double kDefaultProbFloor = 1e-6;

}  // namespace noah
