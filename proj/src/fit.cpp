#include "noah/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace noah {

void FitConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be > 0");
    if (w_deg < 0.0 || w_card < 0.0) throw std::invalid_argument("loss weights must be >= 0");
    if (seed_decay < 0.0) throw std::invalid_argument("seed decay must be >= 0");
    if (!(prob_floor > 0.0 && prob_floor < 0.5)) {
        throw std::invalid_argument("prob_floor must lie in (0, 0.5)");
    }
}

double& ParamLogits::flat(size_t i) {
    if (i < seed.size()) return seed[i];
    i -= seed.size();
    if (i < theta_core.size()) return theta_core[i];
    return theta_fringe[i - theta_core.size()];
}

double ParamLogits::flat(size_t i) const {
    return const_cast<ParamLogits*>(this)->flat(i);
}

NoahParams params_from_logits(const ParamLogits& logits) {
    NoahParams p;
    p.p_seed.resize(logits.seed.size());
    double mx = -std::numeric_limits<double>::infinity();
    for (double z : logits.seed) mx = std::max(mx, z);
    double sum = 0.0;
    for (size_t i = 0; i < logits.seed.size(); ++i) {
        p.p_seed[i] = std::exp(logits.seed[i] - mx);
        sum += p.p_seed[i];
    }
    for (double& v : p.p_seed) v /= sum;

    auto unpack = [](const std::vector<double>& z) {
        std::vector<AffinityMatrix> thetas(z.size() / 4);
        for (size_t l = 0; l < thetas.size(); ++l) {
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    thetas[l][a][b] = 1.0 / (1.0 + std::exp(-z[l * 4 + a * 2 + b]));
                }
            }
        }
        return thetas;
    };
    p.theta_core = unpack(logits.theta_core);
    p.theta_fringe = unpack(logits.theta_fringe);
    return p;
}

ParamLogits logits_from_params(const NoahParams& params) {
    ParamLogits z;
    z.seed.resize(params.p_seed.size());
    for (size_t i = 0; i < params.p_seed.size(); ++i) {
        z.seed[i] = std::log(std::max(params.p_seed[i], 1e-300));
    }
    auto pack = [](const std::vector<AffinityMatrix>& thetas) {
        std::vector<double> z(thetas.size() * 4);
        for (size_t l = 0; l < thetas.size(); ++l) {
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    double t = thetas[l][a][b];
                    z[l * 4 + a * 2 + b] = std::log(t) - std::log1p(-t);
                }
            }
        }
        return z;
    };
    z.theta_core = pack(params.theta_core);
    z.theta_fringe = pack(params.theta_fringe);
    return z;
}

namespace {

// log(1 - e^x) for x < 0
double log1mexp(double x) {
    return x > -0.6931471805599453 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

// Log of a product of factors in (0,1), with exponent harvesting so long
// products neither underflow nor pay one log() per factor.
class LogProduct {
public:
    void mul(double f) {
        prod_ *= f;
        if (++count_ == 16) {
            int e = 0;
            prod_ = std::frexp(prod_, &e);
            exponent_ += e;
            count_ = 0;
        }
    }
    double log() const {
        return std::log(prod_) + static_cast<double>(exponent_) * 0.6931471805599453;
    }

private:
    double prod_ = 1.0;
    long long exponent_ = 0;
    int count_ = 0;
};

std::vector<std::pair<int, int>> run_length(std::vector<int> rows) {
    std::sort(rows.begin(), rows.end());
    std::vector<std::pair<int, int>> rle;
    for (int r : rows) {
        if (!rle.empty() && rle.back().first == r) {
            rle.back().second++;
        } else {
            rle.emplace_back(r, 1);
        }
    }
    return rle;
}

}  // namespace

FitData::FitData(const AttributedHypergraph& h, const CoreFringePartition& partition) {
    k = h.attr_count();
    core_count = partition.core_size();
    fringe_count = partition.fringe_size();

    auto dedup_rows = [&](const std::vector<int>& ids, std::vector<std::vector<uint8_t>>& rows,
                          std::vector<int>& row_of, std::vector<int>& row_count) {
        std::map<std::vector<uint8_t>, int> seen;
        row_of.resize(ids.size());
        for (size_t i = 0; i < ids.size(); ++i) {
            std::vector<uint8_t> row(h.attributes.row(ids[i]), h.attributes.row(ids[i]) + k);
            auto [it, inserted] = seen.emplace(std::move(row), static_cast<int>(rows.size()));
            if (inserted) {
                rows.push_back(it->first);
                row_count.push_back(0);
            }
            row_of[i] = it->second;
            row_count[it->second]++;
        }
    };
    dedup_rows(partition.core, core_rows, core_row_of, core_row_count);
    dedup_rows(partition.fringe, fringe_rows, fringe_row_of, fringe_row_count);

    obs_core_deg.assign(core_count, 0.0);
    obs_fringe_deg.assign(fringe_count, 0.0);

    std::map<std::vector<std::pair<int, int>>, int> sig_ids;
    for (int j = 0; j < h.edge_count(); ++j) {
        EdgeView ev;
        ev.original_index = j;
        std::vector<int> member_rows;
        std::vector<int> fringe_member_rows;
        std::vector<int> fringe_members;
        for (int v : h.hyperedges[j]) {
            if (partition.core_pos[v] >= 0) {
                ev.core_members.push_back(partition.core_pos[v]);
                member_rows.push_back(core_row_of[partition.core_pos[v]]);
            } else {
                fringe_members.push_back(partition.fringe_pos[v]);
                fringe_member_rows.push_back(fringe_row_of[partition.fringe_pos[v]]);
            }
        }
        if (ev.core_members.empty()) {
            skipped.push_back(j);
            continue;
        }
        ev.core_row_rle = run_length(std::move(member_rows));
        ev.fringe_row_rle = run_length(std::move(fringe_member_rows));

        auto [it, inserted] = sig_ids.emplace(ev.core_row_rle, static_cast<int>(sig_p.size()));
        if (inserted) {
            std::vector<double> p(k, 0.0);
            int total = 0;
            for (auto [row, cnt] : ev.core_row_rle) {
                total += cnt;
                for (int l = 0; l < k; ++l) p[l] += cnt * static_cast<double>(core_rows[row][l]);
            }
            for (double& v : p) v /= total;
            sig_p.push_back(std::move(p));
            sig_edge_count.push_back(0);
        }
        ev.sig = it->second;
        sig_edge_count[ev.sig]++;

        for (int ci : ev.core_members) obs_core_deg[ci] += 1.0;
        for (int fi : fringe_members) obs_fringe_deg[fi] += 1.0;
        obs_core_card.push_back(static_cast<double>(ev.core_members.size()));
        obs_fringe_card.push_back(static_cast<double>(fringe_members.size()));
        edges.push_back(std::move(ev));
    }
}

namespace {

// Parameter-dependent tables rebuilt once per evaluation. All per-hyperedge
// work reads these; only their construction touches the k attributes.
struct ParamCache {
    int dc = 0;
    int df = 0;
    int nsig = 0;

    std::vector<double> theta_c;  // clamped values, k*4
    std::vector<double> theta_f;
    std::vector<double> inv_theta_c;  // reciprocals for the backward pass
    std::vector<double> p_seed;

    std::vector<double> lpc;   // dc*dc: log P_C(col-row | row-row)
    std::vector<double> l1mc;  // dc*dc: log(1 - P_C)
    std::vector<double> pc;    // dc*dc: P_C
    std::vector<double> g1;    // dc: sum of l1mc over all core nodes
    std::vector<double> spc;   // dc: sum of pc over all core nodes

    // fringe marginal factors per (signature, attribute): value and
    // reciprocal for each candidate attribute bit
    std::vector<double> m0, m1, inv_m0, inv_m1;  // nsig*k

    std::vector<double> lpf;   // nsig*df
    std::vector<double> l1mf;  // nsig*df
    std::vector<double> pf;    // nsig*df
    std::vector<double> hf;    // nsig: sum of l1mf over all fringe nodes
    std::vector<double> spf;   // nsig: sum of pf over all fringe nodes
};

ParamCache build_cache(const FitData& fd, const NoahParams& params, double floor_eps) {
    ParamCache c;
    c.dc = static_cast<int>(fd.core_rows.size());
    c.df = static_cast<int>(fd.fringe_rows.size());
    c.nsig = static_cast<int>(fd.sig_p.size());

    c.theta_c.resize(static_cast<size_t>(fd.k) * 4);
    c.theta_f.resize(static_cast<size_t>(fd.k) * 4);
    c.inv_theta_c.resize(c.theta_c.size());
    for (int l = 0; l < fd.k; ++l) {
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                c.theta_c[l * 4 + a * 2 + b] = clamp_prob(params.theta_core[l][a][b], floor_eps);
                c.theta_f[l * 4 + a * 2 + b] = clamp_prob(params.theta_fringe[l][a][b], floor_eps);
                c.inv_theta_c[l * 4 + a * 2 + b] = 1.0 / c.theta_c[l * 4 + a * 2 + b];
            }
        }
    }
    c.p_seed.resize(params.p_seed.size());
    for (size_t i = 0; i < params.p_seed.size(); ++i) {
        c.p_seed[i] = std::max(params.p_seed[i], std::numeric_limits<double>::min());
    }

    c.lpc.assign(static_cast<size_t>(c.dc) * c.dc, 0.0);
    c.l1mc.resize(c.lpc.size());
    c.pc.resize(c.lpc.size());
    for (int r1 = 0; r1 < c.dc; ++r1) {
        const auto& xs = fd.core_rows[r1];
        for (int r2 = 0; r2 < c.dc; ++r2) {
            const auto& xc = fd.core_rows[r2];
            LogProduct prod;
            for (int l = 0; l < fd.k; ++l) {
                prod.mul(c.theta_c[l * 4 + xs[l] * 2 + xc[l]]);
            }
            const double lp = prod.log();
            const size_t idx = static_cast<size_t>(r1) * c.dc + r2;
            c.lpc[idx] = lp;
            c.pc[idx] = std::exp(lp);
            c.l1mc[idx] = log1mexp(lp);
        }
    }
    c.g1.assign(c.dc, 0.0);
    c.spc.assign(c.dc, 0.0);
    for (int r1 = 0; r1 < c.dc; ++r1) {
        for (int r2 = 0; r2 < c.dc; ++r2) {
            const size_t idx = static_cast<size_t>(r1) * c.dc + r2;
            c.g1[r1] += fd.core_row_count[r2] * c.l1mc[idx];
            c.spc[r1] += fd.core_row_count[r2] * c.pc[idx];
        }
    }

    c.m0.resize(static_cast<size_t>(c.nsig) * fd.k);
    c.m1.resize(c.m0.size());
    c.inv_m0.resize(c.m0.size());
    c.inv_m1.resize(c.m0.size());
    for (int s = 0; s < c.nsig; ++s) {
        const auto& pe = fd.sig_p[s];
        double* m0 = c.m0.data() + static_cast<size_t>(s) * fd.k;
        double* m1 = c.m1.data() + static_cast<size_t>(s) * fd.k;
        double* i0 = c.inv_m0.data() + static_cast<size_t>(s) * fd.k;
        double* i1 = c.inv_m1.data() + static_cast<size_t>(s) * fd.k;
        for (int l = 0; l < fd.k; ++l) {
            m0[l] = (1.0 - pe[l]) * c.theta_f[l * 4 + 0] + pe[l] * c.theta_f[l * 4 + 2];
            m1[l] = (1.0 - pe[l]) * c.theta_f[l * 4 + 1] + pe[l] * c.theta_f[l * 4 + 3];
            i0[l] = 1.0 / m0[l];
            i1[l] = 1.0 / m1[l];
        }
    }

    c.lpf.assign(static_cast<size_t>(c.nsig) * c.df, 0.0);
    c.l1mf.resize(c.lpf.size());
    c.pf.resize(c.lpf.size());
    for (int s = 0; s < c.nsig; ++s) {
        const double* m0 = c.m0.data() + static_cast<size_t>(s) * fd.k;
        const double* m1 = c.m1.data() + static_cast<size_t>(s) * fd.k;
        for (int rf = 0; rf < c.df; ++rf) {
            const auto& xf = fd.fringe_rows[rf];
            LogProduct prod;
            for (int l = 0; l < fd.k; ++l) {
                prod.mul(xf[l] ? m1[l] : m0[l]);
            }
            const double lp = prod.log();
            const size_t idx = static_cast<size_t>(s) * c.df + rf;
            c.lpf[idx] = lp;
            c.pf[idx] = std::exp(lp);
            c.l1mf[idx] = log1mexp(lp);
        }
    }
    c.hf.assign(c.nsig, 0.0);
    c.spf.assign(c.nsig, 0.0);
    for (int s = 0; s < c.nsig; ++s) {
        for (int rf = 0; rf < c.df; ++rf) {
            const size_t idx = static_cast<size_t>(s) * c.df + rf;
            c.hf[s] += fd.fringe_row_count[rf] * c.l1mf[idx];
            c.spf[s] += fd.fringe_row_count[rf] * c.pf[idx];
        }
    }
    return c;
}

// Gradient of sorted MSE with respect to `expected`, written into `grad`
// (scaled by `weight`); returns the loss value. Ties are broken by original
// index (stable sort), fixing the pairing within one evaluation.
double sorted_mse_with_grad(const std::vector<double>& obs, const std::vector<double>& exp,
                            double weight, std::vector<double>* grad) {
    if (obs.size() != exp.size()) throw std::invalid_argument("sorted_mse: length mismatch");
    const size_t n = obs.size();
    if (n == 0) return 0.0;
    std::vector<double> obs_sorted = obs;
    std::stable_sort(obs_sorted.begin(), obs_sorted.end(), std::greater<>());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return exp[a] > exp[b]; });
    double loss = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double d = exp[order[i]] - obs_sorted[i];
        loss += d * d;
        if (grad) (*grad)[order[i]] += weight * 2.0 * d / static_cast<double>(n);
    }
    return loss / static_cast<double>(n);
}

struct EngineResult {
    LossParts loss;
    ExpectedStats expected;
};

// Forward pass, optionally followed by the analytic backward pass. The
// likelihood is evaluated per hyperedge over the deduplicated row tables;
// gradients are accumulated against the cached tables and pushed through
// the logistic/softmax reparameterization at the end.
EngineResult evaluate(const FitData& fd, const NoahParams& params, const FitConfig& cfg,
                      const ParamLogits* logits, ParamLogits* grad) {
    const ParamCache c = build_cache(fd, params, cfg.prob_floor);
    const int dc = c.dc;
    const int df = c.df;

    EngineResult out;
    auto& exp_stats = out.expected;
    exp_stats.core_deg.assign(fd.core_count, 0.0);
    exp_stats.fringe_deg.assign(fd.fringe_count, 0.0);
    exp_stats.core_card.assign(fd.edges.size(), 0.0);
    exp_stats.fringe_card.assign(fd.edges.size(), 0.0);

    std::vector<double> rowacc_c(dc, 0.0);   // expected-degree mass per core row
    std::vector<double> nodeadj(fd.core_count, 0.0);  // seed self-inclusion correction
    std::vector<double> t_scratch;

    double l_edge = 0.0;
    for (size_t ei = 0; ei < fd.edges.size(); ++ei) {
        const auto& ev = fd.edges[ei];
        const size_t ne = ev.core_members.size();

        double s_e = 0.0;
        for (int ci : ev.core_members) s_e += c.p_seed[ci];

        t_scratch.assign(ne, 0.0);
        double t_max = -std::numeric_limits<double>::infinity();
        for (size_t si = 0; si < ne; ++si) {
            const int ci = ev.core_members[si];
            const int rs = fd.core_row_of[ci];
            double member_lpc = 0.0;
            double member_l1mc = 0.0;
            for (auto [r, cnt] : ev.core_row_rle) {
                member_lpc += cnt * c.lpc[static_cast<size_t>(rs) * dc + r];
                member_l1mc += cnt * c.l1mc[static_cast<size_t>(rs) * dc + r];
            }
            const double t = std::log(c.p_seed[ci]) + member_lpc -
                             c.lpc[static_cast<size_t>(rs) * dc + rs] + c.g1[rs] - member_l1mc;
            t_scratch[si] = t;
            t_max = std::max(t_max, t);
        }
        double sum_exp = 0.0;
        for (double t : t_scratch) sum_exp += std::exp(t - t_max);
        double ll_core = t_max + std::log(sum_exp);
        if (cfg.normalize_core) ll_core -= std::log(s_e);

        double ll_fringe = 0.0;
        for (auto [rf, cnt] : ev.fringe_row_rle) {
            const size_t idx = static_cast<size_t>(ev.sig) * df + rf;
            ll_fringe += cnt * (c.lpf[idx] - c.l1mf[idx]);
        }
        ll_fringe += c.hf[ev.sig];

        if (!std::isfinite(ll_core) || !std::isfinite(ll_fringe)) {
            throw std::runtime_error("non-finite likelihood at hyperedge " +
                                     std::to_string(ev.original_index));
        }
        l_edge -= ll_core + ll_fringe;

        // expected statistics, conditioned on the observed core group
        double card_c = 0.0;
        for (int ci : ev.core_members) {
            const int rs = fd.core_row_of[ci];
            const double w = c.p_seed[ci] / s_e;
            const double pcss = c.pc[static_cast<size_t>(rs) * dc + rs];
            card_c += w * (1.0 + c.spc[rs] - pcss);
            for (int r = 0; r < dc; ++r) {
                rowacc_c[r] += w * c.pc[static_cast<size_t>(rs) * dc + r];
            }
            nodeadj[ci] += w * (1.0 - pcss);
        }
        exp_stats.core_card[ei] = card_c;
        exp_stats.fringe_card[ei] = c.spf[ev.sig];
    }

    std::vector<double> rowacc_f(df, 0.0);
    for (int s = 0; s < c.nsig; ++s) {
        for (int rf = 0; rf < df; ++rf) {
            rowacc_f[rf] += fd.sig_edge_count[s] * c.pf[static_cast<size_t>(s) * df + rf];
        }
    }
    for (int i = 0; i < fd.core_count; ++i) {
        exp_stats.core_deg[i] = rowacc_c[fd.core_row_of[i]] + nodeadj[i];
    }
    for (int i = 0; i < fd.fringe_count; ++i) {
        exp_stats.fringe_deg[i] = rowacc_f[fd.fringe_row_of[i]];
    }

    // degree / cardinality losses with gradients w.r.t. the expected values
    std::vector<double> m_dc(fd.core_count, 0.0), m_df(fd.fringe_count, 0.0);
    std::vector<double> m_cc(fd.edges.size(), 0.0), m_cf(fd.edges.size(), 0.0);
    const bool want_grad = grad != nullptr;
    double l_deg =
        sorted_mse_with_grad(fd.obs_core_deg, exp_stats.core_deg, cfg.w_deg,
                             want_grad ? &m_dc : nullptr) +
        sorted_mse_with_grad(fd.obs_fringe_deg, exp_stats.fringe_deg, cfg.w_deg,
                             want_grad ? &m_df : nullptr);
    double l_card =
        sorted_mse_with_grad(fd.obs_core_card, exp_stats.core_card, cfg.w_card,
                             want_grad ? &m_cc : nullptr) +
        sorted_mse_with_grad(fd.obs_fringe_card, exp_stats.fringe_card, cfg.w_card,
                             want_grad ? &m_cf : nullptr);

    out.loss.edge = l_edge;
    out.loss.deg = l_deg;
    out.loss.card = l_card;
    out.loss.total = l_edge + cfg.w_deg * l_deg + cfg.w_card * l_card;
    if (!want_grad) return out;

    // ---- backward pass ----
    std::vector<double> glpc(c.lpc.size(), 0.0), gl1mc(c.lpc.size(), 0.0),
        gpcv(c.lpc.size(), 0.0);
    std::vector<double> g_g1(dc, 0.0), g_spc(dc, 0.0), ws_row_total(dc, 0.0);
    std::vector<double> glpf(c.lpf.size(), 0.0), gl1mf(c.lpf.size(), 0.0),
        gpfv(c.lpf.size(), 0.0);
    std::vector<double> g_hf(c.nsig, 0.0), g_spf(c.nsig, 0.0);
    std::vector<double> g_pseed(c.p_seed.size(), 0.0);

    std::vector<double> g_rowacc_c(dc, 0.0);
    for (int i = 0; i < fd.core_count; ++i) g_rowacc_c[fd.core_row_of[i]] += m_dc[i];
    std::vector<double> g_rowacc_f(df, 0.0);
    for (int i = 0; i < fd.fringe_count; ++i) g_rowacc_f[fd.fringe_row_of[i]] += m_df[i];

    // d(sum_r g_rowacc_c[r] * pc[rs][r]) precomputed per seed row
    std::vector<double> dot_c(dc, 0.0);
    for (int rs = 0; rs < dc; ++rs) {
        for (int r = 0; r < dc; ++r) {
            dot_c[rs] += g_rowacc_c[r] * c.pc[static_cast<size_t>(rs) * dc + r];
        }
    }

    for (size_t ei = 0; ei < fd.edges.size(); ++ei) {
        const auto& ev = fd.edges[ei];
        const size_t ne = ev.core_members.size();

        double s_e = 0.0;
        for (int ci : ev.core_members) s_e += c.p_seed[ci];

        t_scratch.assign(ne, 0.0);
        double t_max = -std::numeric_limits<double>::infinity();
        for (size_t si = 0; si < ne; ++si) {
            const int ci = ev.core_members[si];
            const int rs = fd.core_row_of[ci];
            double member_lpc = 0.0;
            double member_l1mc = 0.0;
            for (auto [r, cnt] : ev.core_row_rle) {
                member_lpc += cnt * c.lpc[static_cast<size_t>(rs) * dc + r];
                member_l1mc += cnt * c.l1mc[static_cast<size_t>(rs) * dc + r];
            }
            t_scratch[si] = std::log(c.p_seed[ci]) + member_lpc -
                            c.lpc[static_cast<size_t>(rs) * dc + rs] + c.g1[rs] - member_l1mc;
            t_max = std::max(t_max, t_scratch[si]);
        }
        double sum_exp = 0.0;
        for (double t : t_scratch) sum_exp += std::exp(t - t_max);
        const double lse = t_max + std::log(sum_exp);

        // edge negative log-likelihood: dL/d ll_core = dL/d ll_fringe = -1
        for (size_t si = 0; si < ne; ++si) {
            const int ci = ev.core_members[si];
            const int rs = fd.core_row_of[ci];
            const double alpha = std::exp(t_scratch[si] - lse);
            const double g_t = -alpha;
            g_pseed[ci] += g_t / c.p_seed[ci];
            for (auto [r, cnt] : ev.core_row_rle) {
                glpc[static_cast<size_t>(rs) * dc + r] += g_t * cnt;
                gl1mc[static_cast<size_t>(rs) * dc + r] -= g_t * cnt;
            }
            glpc[static_cast<size_t>(rs) * dc + rs] -= g_t;
            g_g1[rs] += g_t;
        }
        if (cfg.normalize_core) {
            for (int ci : ev.core_members) g_pseed[ci] += 1.0 / s_e;
        }
        for (auto [rf, cnt] : ev.fringe_row_rle) {
            const size_t idx = static_cast<size_t>(ev.sig) * df + rf;
            glpf[idx] -= cnt;
            gl1mf[idx] += cnt;
        }
        g_hf[ev.sig] -= 1.0;

        // degree / cardinality chains through w = p_seed / s_e
        double g_w_dot_w = 0.0;
        for (int ci : ev.core_members) {
            const int rs = fd.core_row_of[ci];
            const double w = c.p_seed[ci] / s_e;
            const size_t iss = static_cast<size_t>(rs) * dc + rs;
            const double pcss = c.pc[iss];

            double g_w = m_cc[ei] * (1.0 + c.spc[rs] - pcss);
            g_spc[rs] += m_cc[ei] * w;
            gpcv[iss] -= m_cc[ei] * w;

            g_w += dot_c[rs];
            ws_row_total[rs] += w;

            g_w += m_dc[ci] * (1.0 - pcss);
            gpcv[iss] -= m_dc[ci] * w;

            g_pseed[ci] += g_w / s_e;
            g_w_dot_w += g_w * w;
        }
        for (int ci : ev.core_members) g_pseed[ci] -= g_w_dot_w / s_e;

        g_spf[ev.sig] += m_cf[ei];
    }

    // deferred bulk contributions
    for (int rs = 0; rs < dc; ++rs) {
        for (int r = 0; r < dc; ++r) {
            gpcv[static_cast<size_t>(rs) * dc + r] += ws_row_total[rs] * g_rowacc_c[r];
        }
    }
    for (int s = 0; s < c.nsig; ++s) {
        for (int rf = 0; rf < df; ++rf) {
            gpfv[static_cast<size_t>(s) * df + rf] += fd.sig_edge_count[s] * g_rowacc_f[rf];
        }
    }
    for (int rs = 0; rs < dc; ++rs) {
        for (int r = 0; r < dc; ++r) {
            const size_t idx = static_cast<size_t>(rs) * dc + r;
            gl1mc[idx] += g_g1[rs] * fd.core_row_count[r];
            gpcv[idx] += g_spc[rs] * fd.core_row_count[r];
        }
    }
    for (int s = 0; s < c.nsig; ++s) {
        for (int rf = 0; rf < df; ++rf) {
            const size_t idx = static_cast<size_t>(s) * df + rf;
            gl1mf[idx] += g_hf[s] * fd.fringe_row_count[rf];
            gpfv[idx] += g_spf[s] * fd.fringe_row_count[rf];
        }
    }

    // collapse value-space and log(1-p) gradients onto the log tables
    for (size_t i = 0; i < glpc.size(); ++i) {
        glpc[i] += gpcv[i] * c.pc[i];
        glpc[i] -= gl1mc[i] * std::exp(c.lpc[i] - c.l1mc[i]);
    }
    for (size_t i = 0; i < glpf.size(); ++i) {
        glpf[i] += gpfv[i] * c.pf[i];
        glpf[i] -= gl1mf[i] * std::exp(c.lpf[i] - c.l1mf[i]);
    }

    // push through the per-attribute tables (the only k-proportional part)
    std::vector<double> g_theta_c(static_cast<size_t>(fd.k) * 4, 0.0);
    std::vector<double> g_theta_f(static_cast<size_t>(fd.k) * 4, 0.0);
    for (int r1 = 0; r1 < dc; ++r1) {
        const auto& xs = fd.core_rows[r1];
        for (int r2 = 0; r2 < dc; ++r2) {
            const double g = glpc[static_cast<size_t>(r1) * dc + r2];
            if (g == 0.0) continue;
            const auto& xc = fd.core_rows[r2];
            for (int l = 0; l < fd.k; ++l) {
                const size_t ti = static_cast<size_t>(l) * 4 + xs[l] * 2 + xc[l];
                g_theta_c[ti] += g * c.inv_theta_c[ti];
            }
        }
    }
    for (int s = 0; s < c.nsig; ++s) {
        const auto& pe = fd.sig_p[s];
        const double* inv_m0 = c.inv_m0.data() + static_cast<size_t>(s) * fd.k;
        const double* inv_m1 = c.inv_m1.data() + static_cast<size_t>(s) * fd.k;
        for (int rf = 0; rf < df; ++rf) {
            const double g = glpf[static_cast<size_t>(s) * df + rf];
            if (g == 0.0) continue;
            const auto& xf = fd.fringe_rows[rf];
            for (int l = 0; l < fd.k; ++l) {
                const double g_over_m = g * (xf[l] ? inv_m1[l] : inv_m0[l]);
                g_theta_f[l * 4 + xf[l]] += g_over_m * (1.0 - pe[l]);
                g_theta_f[l * 4 + 2 + xf[l]] += g_over_m * pe[l];
            }
        }
    }

    // reparameterization: logistic for affinities, softmax for seeds
    grad->seed.assign(c.p_seed.size(), 0.0);
    grad->theta_core.assign(static_cast<size_t>(fd.k) * 4, 0.0);
    grad->theta_fringe.assign(static_cast<size_t>(fd.k) * 4, 0.0);

    auto chain_theta = [&](const std::vector<double>& z, const std::vector<double>& g_val,
                           std::vector<double>& g_z) {
        for (size_t i = 0; i < z.size(); ++i) {
            const double s = 1.0 / (1.0 + std::exp(-z[i]));
            if (s <= cfg.prob_floor || s >= 1.0 - cfg.prob_floor) {
                g_z[i] = 0.0;  // clamp region: flat
            } else {
                g_z[i] = g_val[i] * s * (1.0 - s);
            }
        }
    };
    chain_theta(logits->theta_core, g_theta_c, grad->theta_core);
    chain_theta(logits->theta_fringe, g_theta_f, grad->theta_fringe);

    double dot_pg = 0.0;
    for (size_t i = 0; i < c.p_seed.size(); ++i) dot_pg += params.p_seed[i] * g_pseed[i];
    for (size_t i = 0; i < c.p_seed.size(); ++i) {
        grad->seed[i] = params.p_seed[i] * (g_pseed[i] - dot_pg);
    }
    return out;
}

}  // namespace

double core_log_likelihood(const std::vector<int>& edge, const CoreFringePartition& partition,
                           const BinaryMatrix& x, const NoahParams& params, bool normalize,
                           double prob_floor) {
    std::vector<int> core_nodes;
    for (int v : edge) {
        if (partition.core_pos[v] >= 0) core_nodes.push_back(v);
    }
    if (core_nodes.empty()) {
        throw std::invalid_argument("hyperedge has no core member");
    }
    std::vector<char> in_edge(x.rows, 0);
    for (int v : edge) in_edge[v] = 1;

    std::vector<double> terms;
    double s_e = 0.0;
    for (int v_s : core_nodes) {
        const double ps =
            std::max(params.p_seed[partition.core_pos[v_s]], std::numeric_limits<double>::min());
        s_e += ps;
        double t = std::log(ps);
        for (int v_c : partition.core) {
            if (v_c == v_s) continue;
            double lp = 0.0;
            for (int l = 0; l < x.cols; ++l) {
                lp += std::log(clamp_prob(params.theta_core[l][x.at(v_s, l)][x.at(v_c, l)],
                                          prob_floor));
            }
            t += in_edge[v_c] ? lp : log1mexp(lp);
        }
        terms.push_back(t);
    }
    const double t_max = *std::max_element(terms.begin(), terms.end());
    double sum_exp = 0.0;
    for (double t : terms) sum_exp += std::exp(t - t_max);
    double ll = t_max + std::log(sum_exp);
    if (normalize) ll -= std::log(s_e);
    return ll;
}

std::vector<double> core_mean_attributes(const BinaryMatrix& x,
                                         const std::vector<int>& core_group) {
    if (core_group.empty()) {
        throw std::invalid_argument("core group must be nonempty");
    }
    std::vector<double> p(x.cols, 0.0);
    for (int v : core_group) {
        for (int l = 0; l < x.cols; ++l) p[l] += x.at(v, l);
    }
    for (double& v : p) v /= static_cast<double>(core_group.size());
    return p;
}

double fringe_marginal_attach_prob(const NoahParams& params, const std::vector<double>& p_e,
                                   int v_f, const BinaryMatrix& x, double prob_floor) {
    double lp = 0.0;
    for (int l = 0; l < x.cols; ++l) {
        const uint8_t xf = x.at(v_f, l);
        const double t0 = clamp_prob(params.theta_fringe[l][0][xf], prob_floor);
        const double t1 = clamp_prob(params.theta_fringe[l][1][xf], prob_floor);
        lp += std::log((1.0 - p_e[l]) * t0 + p_e[l] * t1);
    }
    return std::exp(lp);
}

double fringe_log_likelihood(const std::vector<int>& edge, const CoreFringePartition& partition,
                             const BinaryMatrix& x, const NoahParams& params, double prob_floor) {
    std::vector<int> core_nodes;
    for (int v : edge) {
        if (partition.core_pos[v] >= 0) core_nodes.push_back(v);
    }
    if (core_nodes.empty()) {
        throw std::invalid_argument("hyperedge has no core member");
    }
    const auto p_e = core_mean_attributes(x, core_nodes);
    std::vector<char> in_edge(x.rows, 0);
    for (int v : edge) in_edge[v] = 1;

    double ll = 0.0;
    for (int v_f : partition.fringe) {
        const double p = fringe_marginal_attach_prob(params, p_e, v_f, x, prob_floor);
        ll += in_edge[v_f] ? std::log(p) : std::log1p(-p);
    }
    return ll;
}

double sorted_mse(const std::vector<double>& observed, const std::vector<double>& expected) {
    return sorted_mse_with_grad(observed, expected, 0.0, nullptr);
}

ExpectedStats expected_stats(const FitData& data, const NoahParams& params, double prob_floor) {
    FitConfig cfg;
    cfg.prob_floor = prob_floor;
    return evaluate(data, params, cfg, nullptr, nullptr).expected;
}

std::pair<std::vector<double>, std::vector<double>> expected_degrees(const FitData& data,
                                                                     const NoahParams& params,
                                                                     double prob_floor) {
    auto stats = expected_stats(data, params, prob_floor);
    return {std::move(stats.core_deg), std::move(stats.fringe_deg)};
}

std::pair<std::vector<double>, std::vector<double>> expected_cardinalities(
    const FitData& data, const NoahParams& params, double prob_floor) {
    auto stats = expected_stats(data, params, prob_floor);
    return {std::move(stats.core_card), std::move(stats.fringe_card)};
}

LossParts total_loss(const FitData& data, const NoahParams& params, const FitConfig& config) {
    config.validate();
    return evaluate(data, params, config, nullptr, nullptr).loss;
}

LossParts total_loss(const AttributedHypergraph& h, const CoreFringePartition& partition,
                     const NoahParams& params, const FitConfig& config) {
    FitData data(h, partition);
    return total_loss(data, params, config);
}

LossParts loss_and_gradients(const FitData& data, const ParamLogits& logits,
                             const FitConfig& config, ParamLogits& grad) {
    config.validate();
    const NoahParams params = params_from_logits(logits);
    return evaluate(data, params, config, &logits, &grad).loss;
}

double max_gradient_rel_error(const FitData& data, const ParamLogits& logits,
                              const FitConfig& config, double step) {
    ParamLogits grad;
    loss_and_gradients(data, logits, config, grad);
    ParamLogits probe = logits;
    double worst = 0.0;
    for (size_t i = 0; i < probe.size(); ++i) {
        const double z0 = probe.flat(i);
        probe.flat(i) = z0 + step;
        const double lp = total_loss(data, params_from_logits(probe), config).total;
        probe.flat(i) = z0 - step;
        const double lm = total_loss(data, params_from_logits(probe), config).total;
        probe.flat(i) = z0;
        const double fd = (lp - lm) / (2.0 * step);
        const double ga = grad.flat(i);
        const double denom = std::max({std::abs(fd), std::abs(ga), 1e-3});
        worst = std::max(worst, std::abs(fd - ga) / denom);
    }
    return worst;
}

std::pair<NoahParams, FitTrace> fit(const AttributedHypergraph& h,
                                    const CoreFringePartition& partition, const FitConfig& config,
                                    Rng& rng) {
    config.validate();
    FitData data(h, partition);

    // Initialization: every affinity entry starts at p0^(1/k) plus ~1% noise,
    // where p0 is the empirical per-node attachment rate, so the k-fold
    // product starts near the observed rate. Seeds start uniform.
    double mean_size = 0.0;
    for (const auto& e : h.hyperedges) mean_size += static_cast<double>(e.size());
    if (!h.hyperedges.empty()) mean_size /= static_cast<double>(h.hyperedges.size());
    double p0 = mean_size / static_cast<double>(h.node_count);
    p0 = std::min(std::max(p0, 1e-6), 1.0 - 1e-6);
    const double base = std::min(std::max(std::pow(p0, 1.0 / data.k), 1e-3), 1.0 - 1e-3);

    ParamLogits z;
    z.seed.assign(partition.core_size(), 0.0);
    z.theta_core.resize(static_cast<size_t>(data.k) * 4);
    z.theta_fringe.resize(z.theta_core.size());
    auto init_theta = [&](std::vector<double>& dst) {
        for (double& v : dst) {
            const double t = base * (1.0 + 0.01 * (2.0 * rng.next_double() - 1.0));
            v = std::log(t) - std::log1p(-t);
        }
    };
    init_theta(z.theta_core);
    init_theta(z.theta_fringe);

    FitTrace trace;
    trace.skipped_edges = static_cast<int>(data.skipped.size());
    if (config.grad_check) {
        trace.grad_check_max_rel_error = max_gradient_rel_error(data, z, config);
    }

    // Adam with bias correction; decoupled decay on the seed logits only.
    const double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
    std::vector<double> m(z.size(), 0.0), v(z.size(), 0.0);
    ParamLogits grad;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const LossParts loss = loss_and_gradients(data, z, config, grad);
        trace.epochs.push_back({loss.edge, loss.deg, loss.card, loss.total});
        const double bc1 = 1.0 - std::pow(beta1, epoch);
        const double bc2 = 1.0 - std::pow(beta2, epoch);
        for (size_t i = 0; i < z.size(); ++i) {
            const double g = grad.flat(i);
            m[i] = beta1 * m[i] + (1.0 - beta1) * g;
            v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
            double step = (m[i] / bc1) / (std::sqrt(v[i] / bc2) + adam_eps);
            if (i < z.seed.size()) step += config.seed_decay * z.flat(i);
            z.flat(i) -= config.learning_rate * step;
        }
    }
    return {params_from_logits(z), std::move(trace)};
}

}  // namespace noah
