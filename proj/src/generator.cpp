#include "noah/generator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "noah/hypergraph.hpp"

namespace noah {

void NoahParams::validate(int expected_seed_len, int expected_k) const {
    if (static_cast<int>(p_seed.size()) != expected_seed_len) {
        throw std::invalid_argument("p_seed length " + std::to_string(p_seed.size()) +
                                    " does not match expected " +
                                    std::to_string(expected_seed_len));
    }
    double sum = 0.0;
    for (double p : p_seed) {
        if (p < 0.0 || p > 1.0) {
            throw std::invalid_argument("p_seed entries must lie in [0,1]");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("p_seed must sum to 1 (got " + std::to_string(sum) + ")");
    }
    if (static_cast<int>(theta_core.size()) != expected_k ||
        static_cast<int>(theta_fringe.size()) != expected_k) {
        throw std::invalid_argument("affinity matrix count does not match attribute count");
    }
    auto check = [](const std::vector<AffinityMatrix>& thetas, const char* name) {
        for (const auto& t : thetas) {
            for (const auto& row : t) {
                for (double v : row) {
                    if (!(v > 0.0 && v < 1.0)) {
                        throw std::invalid_argument(std::string(name) +
                                                    " entries must lie strictly inside (0,1)");
                    }
                }
            }
        }
    };
    check(theta_core, "theta_core");
    check(theta_fringe, "theta_fringe");
}

namespace {

nlohmann::json theta_to_json(const std::vector<AffinityMatrix>& thetas) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : thetas) {
        arr.push_back({{t[0][0], t[0][1]}, {t[1][0], t[1][1]}});
    }
    return arr;
}

std::vector<AffinityMatrix> theta_from_json(const nlohmann::json& arr) {
    std::vector<AffinityMatrix> thetas;
    for (const auto& t : arr) {
        AffinityMatrix m;
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) m[a][b] = t.at(a).at(b).get<double>();
        }
        thetas.push_back(m);
    }
    return thetas;
}

}  // namespace

void save_params(const NoahParams& params, const std::filesystem::path& path) {
    nlohmann::json j;
    j["p_seed"] = params.p_seed;
    j["theta_core"] = theta_to_json(params.theta_core);
    j["theta_fringe"] = theta_to_json(params.theta_fringe);
    atomic_write(path, j.dump(2) + "\n");
}

NoahParams load_params(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open params file: " + path.string());
    }
    nlohmann::json j = nlohmann::json::parse(in);
    NoahParams p;
    p.p_seed = j.at("p_seed").get<std::vector<double>>();
    p.theta_core = theta_from_json(j.at("theta_core"));
    p.theta_fringe = theta_from_json(j.at("theta_fringe"));
    return p;
}

double core_attach_prob(const NoahParams& params, const BinaryMatrix& x, int v_s, int v_c,
                        double prob_floor) {
    const uint8_t* xs = x.row(v_s);
    const uint8_t* xc = x.row(v_c);
    double log_p = 0.0;
    for (int l = 0; l < x.cols; ++l) {
        log_p += std::log(clamp_prob(params.theta_core[l][xs[l]][xc[l]], prob_floor));
    }
    return std::exp(log_p);
}

std::vector<uint8_t> mix_core_attributes(const BinaryMatrix& x, const std::vector<int>& core_group,
                                         Rng& rng) {
    if (core_group.empty()) {
        throw std::invalid_argument("core group must be nonempty");
    }
    std::vector<uint8_t> mixed(x.cols);
    for (int l = 0; l < x.cols; ++l) {
        int ones = 0;
        for (int v : core_group) ones += x.at(v, l);
        mixed[l] = rng.bernoulli(static_cast<double>(ones) / core_group.size()) ? 1 : 0;
    }
    return mixed;
}

double fringe_attach_prob(const NoahParams& params, const std::vector<uint8_t>& x_mix, int v_f,
                          const BinaryMatrix& x, double prob_floor) {
    const uint8_t* xf = x.row(v_f);
    double log_p = 0.0;
    for (int l = 0; l < x.cols; ++l) {
        log_p += std::log(clamp_prob(params.theta_fringe[l][x_mix[l]][xf[l]], prob_floor));
    }
    return std::exp(log_p);
}

std::vector<int> generate_hyperedge(const NoahParams& params, const CoreFringePartition& partition,
                                    const BinaryMatrix& x, Rng& rng, const GenOptions& opts) {
    if (opts.mode == GenMode::noah_cf && !partition.fringe.empty()) {
        throw std::invalid_argument("noah_cf mode requires the all-core partition");
    }

    // Seed draw by inverse CDF over p_seed.
    const double u = rng.next_double();
    double cum = 0.0;
    int seed_idx = static_cast<int>(params.p_seed.size()) - 1;
    for (size_t i = 0; i < params.p_seed.size(); ++i) {
        cum += params.p_seed[i];
        if (u < cum) {
            seed_idx = static_cast<int>(i);
            break;
        }
    }
    const int v_s = partition.core[seed_idx];

    std::vector<int> core_group{v_s};
    for (int v_c : partition.core) {
        if (v_c == v_s) continue;
        double p = core_attach_prob(params, x, v_s, v_c, opts.prob_floor);
        if (rng.bernoulli(p)) core_group.push_back(v_c);
    }

    std::vector<int> edge = core_group;
    if (!partition.fringe.empty()) {
        std::vector<uint8_t> x_mix;
        if (opts.shared_mix) x_mix = mix_core_attributes(x, core_group, rng);
        for (int v_f : partition.fringe) {
            if (!opts.shared_mix) x_mix = mix_core_attributes(x, core_group, rng);
            double q = fringe_attach_prob(params, x_mix, v_f, x, opts.prob_floor);
            if (rng.bernoulli(q)) edge.push_back(v_f);
        }
    }
    std::sort(edge.begin(), edge.end());
    return edge;
}

AttributedHypergraph generate(const NoahParams& params, const CoreFringePartition& partition,
                              const BinaryMatrix& x, int m, uint64_t seed,
                              const GenOptions& opts) {
    if (m < 1) {
        throw std::invalid_argument("number of hyperedges must be >= 1");
    }
    const int seed_len =
        opts.mode == GenMode::noah_cf ? x.rows : static_cast<int>(partition.core.size());
    params.validate(seed_len, x.cols);

    AttributedHypergraph out;
    out.node_count = x.rows;
    out.attributes = x;
    out.hyperedges.reserve(m);
    for (int i = 0; i < m; ++i) {
        Rng edge_rng(derive_stream(seed, static_cast<uint64_t>(i)));
        out.hyperedges.push_back(generate_hyperedge(params, partition, x, edge_rng, opts));
    }
    return out;
}

}  // namespace noah
