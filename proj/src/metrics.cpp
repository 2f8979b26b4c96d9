#include "noah/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "noah/rng.hpp"

namespace noah {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double binary_entropy(double q) {
    double ent = 0.0;
    if (q > 0.0) ent -= q * std::log(q);
    if (q < 1.0) ent -= (1.0 - q) * std::log(1.0 - q);
    return ent;
}

void check_attr_index(const AttributedHypergraph& h, int l) {
    if (l < 0 || l >= h.attr_count()) {
        throw std::invalid_argument("attribute index out of range");
    }
}

std::vector<std::vector<int>> incident_edges(const AttributedHypergraph& h) {
    std::vector<std::vector<int>> inc(h.node_count);
    for (int j = 0; j < h.edge_count(); ++j) {
        for (int v : h.hyperedges[j]) inc[v].push_back(j);
    }
    return inc;
}

}  // namespace

std::optional<double> affinity_score(const AttributedHypergraph& h, int l, int y, int s, int t) {
    check_attr_index(h, l);
    if (y != 0 && y != 1) throw std::invalid_argument("label must be 0 or 1");
    if (t < 1 || t > s) throw std::invalid_argument("require 1 <= t <= s");

    long long numerator = 0;
    long long denominator = 0;
    for (const auto& e : h.hyperedges) {
        int labeled = 0;
        for (int v : e) {
            if (h.attributes.at(v, l) == y) labeled++;
        }
        denominator += labeled;
        if (static_cast<int>(e.size()) == s && labeled == t) numerator += labeled;
    }
    if (denominator == 0) return std::nullopt;
    return static_cast<double>(numerator) / static_cast<double>(denominator);
}

namespace {

// C(a, b) via log-gamma, 0 when b < 0 or b > a.
double log_choose_or_zero(long long a, long long b, bool& zero) {
    if (b < 0 || b > a) {
        zero = true;
        return 0.0;
    }
    return std::lgamma(static_cast<double>(a) + 1.0) - std::lgamma(static_cast<double>(b) + 1.0) -
           std::lgamma(static_cast<double>(a - b) + 1.0);
}

}  // namespace

double baseline_score(int n, int n_y, int s, int t) {
    if (t < 1 || t > s || s > n) throw std::invalid_argument("require 1 <= t <= s <= n");
    bool zero = false;
    const double log_num =
        log_choose_or_zero(n_y - 1, t - 1, zero) + log_choose_or_zero(n - n_y, s - t, zero);
    const double log_den = log_choose_or_zero(n - 1, s - 1, zero);
    if (zero) return 0.0;
    return std::exp(log_num - log_den);
}

std::optional<double> affinity_ratio(const AttributedHypergraph& h, int l, int y, int s, int t) {
    const auto score = affinity_score(h, l, y, s, t);
    if (!score) return std::nullopt;
    int n_y = 0;
    for (int v = 0; v < h.node_count; ++v) {
        if (h.attributes.at(v, l) == y) n_y++;
    }
    const double base = baseline_score(h.node_count, n_y, s, t);
    if (base <= 0.0) return std::nullopt;
    return *score / base;
}

std::vector<double> hyperedge_entropy(const AttributedHypergraph& h, int l) {
    check_attr_index(h, l);
    std::vector<double> out;
    out.reserve(h.hyperedges.size());
    for (const auto& e : h.hyperedges) {
        int ones = 0;
        for (int v : e) ones += h.attributes.at(v, l);
        out.push_back(binary_entropy(static_cast<double>(ones) / e.size()));
    }
    return out;
}

std::vector<double> higher_order_hyperedge_entropy(const AttributedHypergraph& h, int l,
                                                   int rounds) {
    check_attr_index(h, l);
    if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");

    const auto inc = incident_edges(h);
    // Distributions over {0,1} are tracked by their probability of value 1.
    std::vector<double> node_p(h.node_count);
    for (int v = 0; v < h.node_count; ++v) node_p[v] = h.attributes.at(v, l);

    std::vector<double> edge_p(h.edge_count());
    for (int round = 0; round < rounds; ++round) {
        for (int j = 0; j < h.edge_count(); ++j) {
            double sum = 0.0;
            for (int v : h.hyperedges[j]) sum += node_p[v];
            edge_p[j] = sum / h.hyperedges[j].size();
        }
        for (int v = 0; v < h.node_count; ++v) {
            if (inc[v].empty()) continue;  // isolated nodes keep their value
            double sum = 0.0;
            for (int j : inc[v]) sum += edge_p[j];
            node_p[v] = sum / inc[v].size();
        }
    }

    std::vector<double> out(h.edge_count());
    for (int j = 0; j < h.edge_count(); ++j) {
        double sum = 0.0;
        for (int v : h.hyperedges[j]) sum += node_p[v];
        out[j] = binary_entropy(sum / h.hyperedges[j].size());
    }
    return out;
}

std::vector<double> node_homophily(const AttributedHypergraph& h, int l) {
    check_attr_index(h, l);
    std::vector<long long> same(h.node_count, 0), partners(h.node_count, 0);
    for (const auto& e : h.hyperedges) {
        int ones = 0;
        for (int v : e) ones += h.attributes.at(v, l);
        const int sz = static_cast<int>(e.size());
        for (int v : e) {
            partners[v] += sz - 1;
            const int same_labeled = h.attributes.at(v, l) == 1 ? ones : sz - ones;
            same[v] += same_labeled - 1;  // excluding v itself
        }
    }
    std::vector<double> out;
    for (int v = 0; v < h.node_count; ++v) {
        if (partners[v] > 0) {
            out.push_back(static_cast<double>(same[v]) / static_cast<double>(partners[v]));
        }
    }
    return out;
}

double wasserstein1(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("wasserstein1 requires nonempty samples");
    }
    std::vector<double> sa = a, sb = b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());

    if (sa.size() == sb.size()) {
        double sum = 0.0;
        for (size_t i = 0; i < sa.size(); ++i) sum += std::abs(sa[i] - sb[i]);
        return sum / static_cast<double>(sa.size());
    }

    // piecewise-constant inverse CDFs integrated over [0,1]
    const double wa = 1.0 / static_cast<double>(sa.size());
    const double wb = 1.0 / static_cast<double>(sb.size());
    size_t i = 0, j = 0;
    double ra = wa, rb = wb, total = 0.0;
    while (i < sa.size() && j < sb.size()) {
        const double step = std::min(ra, rb);
        total += step * std::abs(sa[i] - sb[j]);
        ra -= step;
        rb -= step;
        if (ra <= 1e-15) {
            ++i;
            ra = wa;
        }
        if (rb <= 1e-15) {
            ++j;
            rb = wb;
        }
    }
    return total;
}

InterplayProfile interplay_profile(const AttributedHypergraph& h, const InterplayOptions& opts) {
    InterplayProfile p;
    p.s_list = opts.s_list;
    p.hohe_rounds = opts.hohe_rounds;
    const int k = h.attr_count();
    p.he.resize(k);
    p.hohe.resize(k);
    p.nhs.resize(k);
    for (int l = 0; l < k; ++l) {
        p.he[l] = hyperedge_entropy(h, l);
        p.hohe[l] = higher_order_hyperedge_entropy(h, l, opts.hohe_rounds);
        p.nhs[l] = node_homophily(h, l);
    }
    p.ratios.resize(opts.s_list.size());
    for (size_t si = 0; si < opts.s_list.size(); ++si) {
        const int s = opts.s_list[si];
        p.ratios[si].resize(k);
        for (int l = 0; l < k; ++l) {
            for (int y = 0; y < 2; ++y) {
                auto& row = p.ratios[si][l][y];
                row.resize(s);
                for (int t = 1; t <= s; ++t) {
                    const auto r = affinity_ratio(h, l, y, s, t);
                    row[t - 1] = r ? *r : kNaN;
                }
            }
        }
    }
    return p;
}

MetricReport interplay_discrepancy(const AttributedHypergraph& real,
                                   const AttributedHypergraph& gen,
                                   const InterplayOptions& opts) {
    if (real.node_count != gen.node_count) {
        throw std::invalid_argument("node sets do not match");
    }
    if (!(real.attributes == gen.attributes)) {
        throw std::invalid_argument("attribute matrices do not match");
    }

    MetricReport rep;
    rep.s_list = opts.s_list;
    rep.hohe_rounds = opts.hohe_rounds;
    rep.real = interplay_profile(real, opts);
    rep.gen = interplay_profile(gen, opts);

    const int k = real.attr_count();
    for (size_t si = 0; si < opts.s_list.size(); ++si) {
        const int s = opts.s_list[si];
        double total = 0.0;
        for (int l = 0; l < k; ++l) {
            for (int y = 0; y < 2; ++y) {
                for (int t = 1; t <= s; ++t) {
                    const double rr = rep.real.ratios[si][l][y][t - 1];
                    const double rg = rep.gen.ratios[si][l][y][t - 1];
                    if (std::isnan(rr) || std::isnan(rg)) {
                        rep.skipped_ratio_terms++;
                        continue;
                    }
                    total += std::abs(std::log(rg + opts.log_eps) - std::log(rr + opts.log_eps));
                }
            }
        }
        rep.ts[s] = total;
    }

    auto sum_w1 = [&](const std::vector<std::vector<double>>& a,
                      const std::vector<std::vector<double>>& b, std::vector<double>& per_attr) {
        double total = 0.0;
        per_attr.assign(k, 0.0);
        for (int l = 0; l < k; ++l) {
            if (a[l].empty() && b[l].empty()) continue;
            if (a[l].empty() || b[l].empty()) {
                rep.skipped_distance_terms++;
                continue;
            }
            per_attr[l] = wasserstein1(a[l], b[l]);
            total += per_attr[l];
        }
        return total;
    };
    rep.he = sum_w1(rep.real.he, rep.gen.he, rep.he_per_attr);
    rep.hohe = sum_w1(rep.real.hohe, rep.gen.hohe, rep.hohe_per_attr);
    rep.nhs = sum_w1(rep.real.nhs, rep.gen.nhs, rep.nhs_per_attr);
    return rep;
}

std::string metric_report_to_json(const MetricReport& report) {
    nlohmann::json j;
    j["s_list"] = report.s_list;
    j["hohe_rounds"] = report.hohe_rounds;
    nlohmann::json d;
    for (const auto& [s, v] : report.ts) d["T" + std::to_string(s)] = v;
    d["HE"] = report.he;
    d["HOHE"] = report.hohe;
    d["NHS"] = report.nhs;
    j["discrepancy"] = d;
    j["per_attribute"] = {{"HE", report.he_per_attr},
                          {"HOHE", report.hohe_per_attr},
                          {"NHS", report.nhs_per_attr}};
    j["skipped_ratio_terms"] = report.skipped_ratio_terms;
    j["skipped_distance_terms"] = report.skipped_distance_terms;
    return j.dump(2) + "\n";
}

MetricReport metric_report_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    MetricReport rep;
    rep.s_list = j.at("s_list").get<std::vector<int>>();
    rep.hohe_rounds = j.at("hohe_rounds").get<int>();
    for (int s : rep.s_list) {
        rep.ts[s] = j.at("discrepancy").at("T" + std::to_string(s)).get<double>();
    }
    rep.he = j.at("discrepancy").at("HE").get<double>();
    rep.hohe = j.at("discrepancy").at("HOHE").get<double>();
    rep.nhs = j.at("discrepancy").at("NHS").get<double>();
    rep.he_per_attr = j.at("per_attribute").at("HE").get<std::vector<double>>();
    rep.hohe_per_attr = j.at("per_attribute").at("HOHE").get<std::vector<double>>();
    rep.nhs_per_attr = j.at("per_attribute").at("NHS").get<std::vector<double>>();
    rep.skipped_ratio_terms = j.at("skipped_ratio_terms").get<int>();
    rep.skipped_distance_terms = j.at("skipped_distance_terms").get<int>();
    return rep;
}

namespace {

// Jacobi eigenvalue iteration for small symmetric matrices (row-major n*n).
std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n) {
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
        }
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (std::abs(apq) < 1e-300) continue;
                const double tau = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                const double t = (tau >= 0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int i = 0; i < n; ++i) {
                    const double aip = a[i * n + p];
                    const double aiq = a[i * n + q];
                    a[i * n + p] = c * aip - s * aiq;
                    a[i * n + q] = s * aip + c * aiq;
                }
                for (int i = 0; i < n; ++i) {
                    const double api = a[p * n + i];
                    const double aqi = a[q * n + i];
                    a[p * n + i] = c * api - s * aqi;
                    a[q * n + i] = s * api + c * aqi;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (int i = 0; i < n; ++i) eig[i] = a[i * n + i];
    std::sort(eig.begin(), eig.end(), std::greater<>());
    return eig;
}

}  // namespace

StructuralReport structural_report(const AttributedHypergraph& h, int top_k_singular) {
    const int n_small = std::min(h.node_count, h.edge_count());
    if (top_k_singular < 0 || top_k_singular > n_small) {
        throw std::invalid_argument("top_k_singular must lie in [0, min(|V|, |E|)]");
    }

    StructuralReport rep;
    rep.degrees = degree_vector(h);
    rep.sizes = size_vector(h);
    std::sort(rep.degrees.begin(), rep.degrees.end(), std::greater<>());
    std::sort(rep.sizes.begin(), rep.sizes.end(), std::greater<>());
    if (top_k_singular == 0) return rep;

    // Gram operator of the incidence matrix on the smaller side.
    const bool node_side = h.node_count <= h.edge_count();
    const int n = node_side ? h.node_count : h.edge_count();
    const auto inc = incident_edges(h);
    auto apply_gram = [&](const std::vector<double>& x, std::vector<double>& out) {
        if (node_side) {
            // out = B (B^T x)
            std::vector<double> y(h.edge_count(), 0.0);
            for (int j = 0; j < h.edge_count(); ++j) {
                double s = 0.0;
                for (int v : h.hyperedges[j]) s += x[v];
                y[j] = s;
            }
            std::fill(out.begin(), out.end(), 0.0);
            for (int j = 0; j < h.edge_count(); ++j) {
                for (int v : h.hyperedges[j]) out[v] += y[j];
            }
        } else {
            // out = B^T (B x)
            std::vector<double> y(h.node_count, 0.0);
            for (int j = 0; j < h.edge_count(); ++j) {
                for (int v : h.hyperedges[j]) y[v] += x[j];
            }
            for (int j = 0; j < h.edge_count(); ++j) {
                double s = 0.0;
                for (int v : h.hyperedges[j]) s += y[v];
                out[j] = s;
            }
        }
    };

    const int block = std::min(top_k_singular + 4, n);
    Rng rng(0x5eed5eedULL);  // fixed internal stream: report is deterministic
    std::vector<std::vector<double>> q(block, std::vector<double>(n));
    for (auto& col : q) {
        for (double& x : col) x = 2.0 * rng.next_double() - 1.0;
    }

    auto project_out_previous = [&](std::vector<std::vector<double>>& cols, int i) {
        // two passes: a single sweep loses orthogonality when the mapped
        // block is numerically rank-deficient
        for (int pass = 0; pass < 2; ++pass) {
            for (int j = 0; j < i; ++j) {
                double dot = 0.0;
                for (int t = 0; t < n; ++t) dot += cols[i][t] * cols[j][t];
                for (int t = 0; t < n; ++t) cols[i][t] -= dot * cols[j][t];
            }
        }
    };
    auto orthonormalize = [&](std::vector<std::vector<double>>& cols) {
        for (int i = 0; i < block; ++i) {
            double before = 0.0;
            for (double x : cols[i]) before += x * x;
            project_out_previous(cols, i);
            double norm = 0.0;
            for (double x : cols[i]) norm += x * x;
            // restart columns swallowed by the span of earlier ones
            if (norm < 1e-24 * std::max(before, 1.0)) {
                for (double& x : cols[i]) x = 2.0 * rng.next_double() - 1.0;
                project_out_previous(cols, i);
                norm = 0.0;
                for (double x : cols[i]) norm += x * x;
            }
            norm = std::sqrt(std::max(norm, 1e-300));
            for (double& x : cols[i]) x /= norm;
        }
    };

    orthonormalize(q);
    std::vector<std::vector<double>> z(block, std::vector<double>(n));
    std::vector<double> prev(block, 0.0);
    for (int iter = 0; iter < 600; ++iter) {
        for (int i = 0; i < block; ++i) apply_gram(q[i], z[i]);
        std::vector<double> rayleigh(block, 0.0);
        for (int i = 0; i < block; ++i) {
            for (int t = 0; t < n; ++t) rayleigh[i] += q[i][t] * z[i][t];
        }
        std::sort(rayleigh.begin(), rayleigh.end(), std::greater<>());
        double change = 0.0;
        for (int i = 0; i < block; ++i) change = std::max(change, std::abs(rayleigh[i] - prev[i]));
        prev = rayleigh;
        std::swap(q, z);
        orthonormalize(q);
        if (iter > 4 && change <= 1e-13 * std::max(prev[0], 1.0)) break;
    }

    // Rayleigh-Ritz on the converged block for tight eigenvalue estimates.
    for (int i = 0; i < block; ++i) apply_gram(q[i], z[i]);
    std::vector<double> small(static_cast<size_t>(block) * block, 0.0);
    for (int i = 0; i < block; ++i) {
        for (int j = 0; j < block; ++j) {
            double dot = 0.0;
            for (int t = 0; t < n; ++t) dot += q[i][t] * z[j][t];
            small[i * block + j] = dot;
        }
    }
    // symmetrize against round-off
    for (int i = 0; i < block; ++i) {
        for (int j = i + 1; j < block; ++j) {
            const double m = 0.5 * (small[i * block + j] + small[j * block + i]);
            small[i * block + j] = small[j * block + i] = m;
        }
    }
    auto eig = symmetric_eigenvalues(std::move(small), block);
    rep.singular_values.resize(top_k_singular);
    for (int i = 0; i < top_k_singular; ++i) {
        rep.singular_values[i] = std::sqrt(std::max(eig[i], 0.0));
    }
    return rep;
}

}  // namespace noah
