// Command-line driver: partition / fit / generate / eval / compare / bench.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "noah/fit.hpp"
#include "noah/generator.hpp"
#include "noah/hypercl.hpp"
#include "noah/hypergraph.hpp"
#include "noah/metrics.hpp"
#include "noah/partition.hpp"
#include "noah/rng.hpp"

namespace fs = std::filesystem;
using namespace noah;

namespace {

struct RunConfig {
    std::string edges;
    std::string attrs;
    std::string out = ".";
    uint64_t seed = 42;
    int rounds = 10;
    std::string model = "noah";

    // fit
    FitConfig fit;
    std::string config_file;

    // generate
    std::string params_file;
    std::string core_file;
    int num_edges = 0;  // 0: match the input
    bool shared_mix = false;

    // metrics
    std::string gen_edges;
    std::string s_list = "2,3,4";
    int hohe_rounds = 1;
    int top_k_sv = 10;

    // bench
    std::string factors = "1,2,4,8,16,32,64";
    int bench_epochs = 3;
};

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stoi(tok));
    }
    if (out.empty()) throw std::invalid_argument("empty integer list: '" + text + "'");
    return out;
}

AttributedHypergraph load_input(const RunConfig& cfg) {
    std::vector<std::string> warnings;
    auto h = load_hypergraph(cfg.edges, cfg.attrs, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    return h;
}

void ensure_out_dir(const RunConfig& cfg) {
    fs::create_directories(cfg.out);
}

void write_core_file(const CoreFringePartition& p, const fs::path& path) {
    std::string text;
    for (int v : p.core) {
        text += std::to_string(v);
        text += '\n';
    }
    atomic_write(path, text);
}

CoreFringePartition read_core_file(const fs::path& path, int node_count) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open core file: " + path.string());
    std::vector<int> core;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        core.push_back(std::stoi(line));
    }
    return CoreFringePartition::from_core_set(node_count, std::move(core));
}

// FitConfig file: JSON or key=value lines.
void apply_config_file(const std::string& path, FitConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    auto assign = [&](const std::string& key, const nlohmann::json& v) {
        if (key == "epochs") {
            cfg.epochs = v.get<int>();
        } else if (key == "learning_rate" || key == "lr") {
            cfg.learning_rate = v.get<double>();
        } else if (key == "w_deg") {
            cfg.w_deg = v.get<double>();
        } else if (key == "w_card") {
            cfg.w_card = v.get<double>();
        } else if (key == "seed_decay") {
            cfg.seed_decay = v.get<double>();
        } else if (key == "prob_floor") {
            cfg.prob_floor = v.get<double>();
        } else if (key == "grad_check") {
            cfg.grad_check = v.get<bool>();
        } else if (key == "normalize_core") {
            cfg.normalize_core = v.get<bool>();
        } else {
            throw std::invalid_argument("unknown fit config key: " + key);
        }
    };

    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        const nlohmann::json parsed = nlohmann::json::parse(text);
        for (const auto& [key, v] : parsed.items()) assign(key, v);
        return;
    }
    std::stringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        const auto start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("bad config line (expected key=value): " + line);
        }
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        assign(key, nlohmann::json::parse(value));
    }
}

std::string csv_dist(const std::vector<std::vector<double>>& per_attr) {
    std::string out = "attr,value\n";
    for (size_t l = 0; l < per_attr.size(); ++l) {
        for (double v : per_attr[l]) {
            out += std::to_string(l) + "," + std::to_string(v) + "\n";
        }
    }
    return out;
}

std::string csv_ratios(const InterplayProfile& p) {
    std::ostringstream out;
    out << "attr,label,s,t,ratio\n";
    for (size_t si = 0; si < p.s_list.size(); ++si) {
        for (size_t l = 0; l < p.ratios[si].size(); ++l) {
            for (int y = 0; y < 2; ++y) {
                const auto& row = p.ratios[si][l][y];
                for (size_t t = 0; t < row.size(); ++t) {
                    out << l << "," << y << "," << p.s_list[si] << "," << (t + 1) << ",";
                    if (!std::isnan(row[t])) out << row[t];
                    out << "\n";
                }
            }
        }
    }
    return out.str();
}

template <typename T>
std::string csv_column(const std::string& header, const std::vector<T>& values) {
    std::ostringstream out;
    out << header << "\n";
    for (const T& v : values) out << v << "\n";
    return out.str();
}

void write_structural(const AttributedHypergraph& h, int top_k, const fs::path& dir,
                      const std::string& suffix) {
    const auto rep = structural_report(h, std::min(top_k, std::min(h.node_count, h.edge_count())));
    atomic_write(dir / ("degree" + suffix + ".csv"), csv_column("degree", rep.degrees));
    atomic_write(dir / ("size" + suffix + ".csv"), csv_column("size", rep.sizes));
    atomic_write(dir / ("singular_values" + suffix + ".csv"),
                 csv_column("sigma", rep.singular_values));
}

void write_profile_csvs(const InterplayProfile& p, const fs::path& dir,
                        const std::string& suffix) {
    atomic_write(dir / ("he" + suffix + ".csv"), csv_dist(p.he));
    atomic_write(dir / ("hohe" + suffix + ".csv"), csv_dist(p.hohe));
    atomic_write(dir / ("nhs" + suffix + ".csv"), csv_dist(p.nhs));
    atomic_write(dir / ("ratios" + suffix + ".csv"), csv_ratios(p));
}

int cmd_partition(const RunConfig& cfg) {
    auto h = load_input(cfg);
    ensure_out_dir(cfg);
    Rng rng(derive_stream(cfg.seed, "partition"));
    auto part = umhs_partition(h, cfg.rounds, rng);
    write_core_file(part, fs::path(cfg.out) / "core.txt");
    std::cout << "core=" << part.core_size() << " fringe=" << part.fringe_size()
              << " rounds=" << part.rounds_used << "\n";
    return 0;
}

int cmd_fit(const RunConfig& cfg) {
    auto h = load_input(cfg);
    ensure_out_dir(cfg);

    CoreFringePartition part;
    if (cfg.model == "noah") {
        Rng rng(derive_stream(cfg.seed, "partition"));
        part = umhs_partition(h, cfg.rounds, rng);
    } else if (cfg.model == "noah-cf") {
        part = all_core_partition(h);
    } else {
        throw std::invalid_argument("fit supports --model noah or noah-cf");
    }

    Rng fit_rng(derive_stream(cfg.seed, "fit-init"));
    auto [params, trace] = fit(h, part, cfg.fit, fit_rng);

    write_core_file(part, fs::path(cfg.out) / "core.txt");
    save_params(params, fs::path(cfg.out) / "params.json");
    std::ostringstream csv;
    csv << "epoch,L_edge,L_deg,L_card,L\n";
    csv.precision(12);
    for (size_t i = 0; i < trace.epochs.size(); ++i) {
        const auto& r = trace.epochs[i];
        csv << (i + 1) << "," << r.edge << "," << r.deg << "," << r.card << "," << r.total << "\n";
    }
    atomic_write(fs::path(cfg.out) / "trace.csv", csv.str());

    std::cout << "fit: epochs=" << trace.epochs.size() << " skipped_edges=" << trace.skipped_edges
              << " final_L=" << trace.epochs.back().total << "\n";
    if (cfg.fit.grad_check) {
        std::cout << "grad_check max_rel_error=" << trace.grad_check_max_rel_error << "\n";
    }
    return 0;
}

int cmd_generate(const RunConfig& cfg) {
    auto h = load_input(cfg);
    ensure_out_dir(cfg);
    const int m = cfg.num_edges > 0 ? cfg.num_edges : h.edge_count();
    const uint64_t gen_seed = derive_stream(cfg.seed, "generate");

    AttributedHypergraph out;
    if (cfg.model == "hypercl") {
        out = hypercl_generate(h, gen_seed);
        if (cfg.num_edges > 0 && cfg.num_edges != h.edge_count()) {
            throw std::invalid_argument("hypercl reuses the input size vector; --num-edges "
                                        "must be omitted or equal to |E|");
        }
    } else {
        if (cfg.params_file.empty()) {
            throw std::invalid_argument("--params is required for model " + cfg.model);
        }
        auto params = load_params(cfg.params_file);
        GenOptions opts;
        opts.shared_mix = cfg.shared_mix;
        CoreFringePartition part;
        if (cfg.model == "noah") {
            if (cfg.core_file.empty()) {
                throw std::invalid_argument("--core is required for model noah");
            }
            part = read_core_file(cfg.core_file, h.node_count);
            opts.mode = GenMode::noah;
        } else if (cfg.model == "noah-cf") {
            part = all_core_partition(h);
            opts.mode = GenMode::noah_cf;
        } else {
            throw std::invalid_argument("unknown model: " + cfg.model);
        }
        out = generate(params, part, h.attributes, m, gen_seed, opts);
    }
    save_edges(out, fs::path(cfg.out) / "gen_edges.txt");
    std::cout << "generated edges=" << out.edge_count() << " model=" << cfg.model << "\n";
    return 0;
}

InterplayOptions metric_options(const RunConfig& cfg) {
    InterplayOptions opts;
    opts.s_list = parse_int_list(cfg.s_list);
    opts.hohe_rounds = cfg.hohe_rounds;
    return opts;
}

int cmd_eval(const RunConfig& cfg) {
    auto h = load_input(cfg);
    ensure_out_dir(cfg);
    const auto opts = metric_options(cfg);
    const auto profile = interplay_profile(h, opts);
    const fs::path dir(cfg.out);
    write_profile_csvs(profile, dir, "");
    write_structural(h, cfg.top_k_sv, dir, "");

    nlohmann::json j;
    j["s_list"] = opts.s_list;
    j["hohe_rounds"] = opts.hohe_rounds;
    j["nodes"] = h.node_count;
    j["edges"] = h.edge_count();
    j["attributes"] = h.attr_count();
    atomic_write(dir / "eval.json", j.dump(2) + "\n");
    std::cout << "eval: nodes=" << h.node_count << " edges=" << h.edge_count()
              << " attrs=" << h.attr_count() << "\n";
    return 0;
}

int cmd_compare(const RunConfig& cfg) {
    auto h = load_input(cfg);
    if (cfg.gen_edges.empty()) {
        throw std::invalid_argument("--gen-edges is required for compare");
    }
    std::vector<std::string> warnings;
    auto gen = load_hypergraph(cfg.gen_edges, cfg.attrs, &warnings);
    ensure_out_dir(cfg);

    const auto report = interplay_discrepancy(h, gen, metric_options(cfg));
    const fs::path dir(cfg.out);
    atomic_write(dir / "report.json", metric_report_to_json(report));
    write_profile_csvs(report.real, dir, "_real");
    write_profile_csvs(report.gen, dir, "_gen");
    write_structural(h, cfg.top_k_sv, dir, "_real");
    write_structural(gen, cfg.top_k_sv, dir, "_gen");

    std::cout << "compare:";
    for (const auto& [s, v] : report.ts) std::cout << " T" << s << "=" << v;
    std::cout << " HE=" << report.he << " HOHE=" << report.hohe << " NHS=" << report.nhs << "\n";
    return 0;
}

AttributedHypergraph duplicate_edges(const AttributedHypergraph& h, int factor) {
    AttributedHypergraph out = h;
    out.hyperedges.clear();
    out.hyperedges.reserve(static_cast<size_t>(h.edge_count()) * factor);
    for (int f = 0; f < factor; ++f) {
        out.hyperedges.insert(out.hyperedges.end(), h.hyperedges.begin(), h.hyperedges.end());
    }
    return out;
}

AttributedHypergraph duplicate_attributes(const AttributedHypergraph& h, int factor) {
    AttributedHypergraph out = h;
    out.attributes = BinaryMatrix(h.node_count, h.attr_count() * factor);
    for (int v = 0; v < h.node_count; ++v) {
        for (int f = 0; f < factor; ++f) {
            for (int l = 0; l < h.attr_count(); ++l) {
                out.attributes.at(v, f * h.attr_count() + l) = h.attributes.at(v, l);
            }
        }
    }
    return out;
}

// Wall time per run, repeating short runs until the total is long enough to
// trust the clock.
template <typename F>
double time_seconds(F&& body) {
    using clock = std::chrono::steady_clock;
    body();  // warmup
    int reps = 0;
    const auto start = clock::now();
    double elapsed = 0.0;
    do {
        body();
        ++reps;
        elapsed = std::chrono::duration<double>(clock::now() - start).count();
    } while (elapsed < 0.2 && reps < 1000);
    return elapsed / reps;
}

int cmd_bench(const RunConfig& cfg) {
    auto h = load_input(cfg);
    ensure_out_dir(cfg);
    const auto factors = parse_int_list(cfg.factors);

    Rng prng(derive_stream(cfg.seed, "partition"));
    const auto base_part = umhs_partition(h, cfg.rounds, prng);
    FitConfig bench_cfg = cfg.fit;
    bench_cfg.epochs = cfg.bench_epochs;
    bench_cfg.grad_check = false;

    Rng fit_rng(derive_stream(cfg.seed, "fit-init"));
    const auto [base_params, base_trace] = fit(h, base_part, bench_cfg, fit_rng);

    std::ostringstream csv;
    csv << "kind,factor,m,k,seconds\n";
    csv.precision(9);
    auto row = [&](const char* kind, int factor, int m, int k, double sec) {
        csv << kind << "," << factor << "," << m << "," << k << "," << sec << "\n";
        std::cout << kind << " factor=" << factor << " m=" << m << " k=" << k << " sec=" << sec
                  << "\n";
    };

    for (int f : factors) {
        const auto hm = duplicate_edges(h, f);
        Rng pm(derive_stream(cfg.seed, "partition"));
        const auto part_m = umhs_partition(hm, cfg.rounds, pm);
        row("fit_m", f, hm.edge_count(), hm.attr_count(), time_seconds([&] {
                Rng r(derive_stream(cfg.seed, "fit-init"));
                fit(hm, part_m, bench_cfg, r);
            }));
        row("gen_m", f, hm.edge_count(), hm.attr_count(), time_seconds([&] {
                generate(base_params, base_part, h.attributes, hm.edge_count(),
                         derive_stream(cfg.seed, "generate"));
            }));
    }
    for (int f : factors) {
        const auto hk = duplicate_attributes(h, f);
        NoahParams params_k;
        row("fit_k", f, hk.edge_count(), hk.attr_count(), time_seconds([&] {
                Rng r(derive_stream(cfg.seed, "fit-init"));
                params_k = fit(hk, base_part, bench_cfg, r).first;
            }));
        row("gen_k", f, hk.edge_count(), hk.attr_count(), time_seconds([&] {
                generate(params_k, base_part, hk.attributes, hk.edge_count(),
                         derive_stream(cfg.seed, "generate"));
            }));
    }
    atomic_write(fs::path(cfg.out) / "bench.csv", csv.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"Attributed-hypergraph generation, fitting, and evaluation"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub, bool needs_attrs = true) {
        sub->add_option("--edges", cfg.edges, "hyperedge list file")->required();
        sub->add_option("--attrs", cfg.attrs, "binary attribute file")->required(needs_attrs);
        sub->add_option("--out", cfg.out, "output directory");
        sub->add_option("--seed", cfg.seed, "master rng seed");
    };

    auto* p_partition = app.add_subcommand("partition", "split nodes into core and fringe");
    add_common(p_partition);
    p_partition->add_option("--rounds", cfg.rounds, "hitting-set rounds");

    auto* p_fit = app.add_subcommand("fit", "fit generator parameters to a hypergraph");
    add_common(p_fit);
    p_fit->add_option("--rounds", cfg.rounds, "hitting-set rounds");
    p_fit->add_option("--model", cfg.model, "noah | noah-cf");
    auto* opt_epochs = p_fit->add_option("--epochs", cfg.fit.epochs, "training epochs");
    auto* opt_lr = p_fit->add_option("--lr", cfg.fit.learning_rate, "learning rate");
    auto* opt_wdeg = p_fit->add_option("--w-deg", cfg.fit.w_deg, "degree loss weight");
    auto* opt_wcard = p_fit->add_option("--w-card", cfg.fit.w_card, "cardinality loss weight");
    auto* opt_decay = p_fit->add_option("--seed-decay", cfg.fit.seed_decay,
                                        "weight decay on the seed logits");
    auto* opt_floor = p_fit->add_option("--prob-floor", cfg.fit.prob_floor, "probability floor");
    auto* opt_gc = p_fit->add_flag("--grad-check", cfg.fit.grad_check,
                                   "verify gradients against finite differences");
    auto* opt_norm = p_fit->add_flag("--normalize-core", "divide the core likelihood by the "
                                                          "seed mass over the core subset");
    p_fit->add_option("--config", cfg.config_file, "fit config file (key=value or JSON)");

    auto* p_gen = app.add_subcommand("generate", "sample a hypergraph from a model");
    add_common(p_gen);
    p_gen->add_option("--model", cfg.model, "noah | noah-cf | hypercl");
    p_gen->add_option("--params", cfg.params_file, "fitted parameter JSON");
    p_gen->add_option("--core", cfg.core_file, "core id list file");
    p_gen->add_option("-m,--num-edges", cfg.num_edges, "hyperedges to generate");
    p_gen->add_flag("--shared-mix", cfg.shared_mix,
                    "draw one mixed attribute vector per hyperedge");

    auto* p_eval = app.add_subcommand("eval", "interplay and structural measurements");
    add_common(p_eval);
    p_eval->add_option("--s-list", cfg.s_list, "affinity sizes, comma separated");
    p_eval->add_option("--hohe-rounds", cfg.hohe_rounds, "label propagation rounds");
    p_eval->add_option("--top-k-sv", cfg.top_k_sv, "singular values to report");

    auto* p_cmp = app.add_subcommand("compare", "discrepancies between real and generated");
    add_common(p_cmp);
    p_cmp->add_option("--gen-edges", cfg.gen_edges, "generated hyperedge list")->required();
    p_cmp->add_option("--s-list", cfg.s_list, "affinity sizes, comma separated");
    p_cmp->add_option("--hohe-rounds", cfg.hohe_rounds, "label propagation rounds");
    p_cmp->add_option("--top-k-sv", cfg.top_k_sv, "singular values to report");

    auto* p_bench = app.add_subcommand("bench", "scaling of fit and generation");
    add_common(p_bench);
    p_bench->add_option("--rounds", cfg.rounds, "hitting-set rounds");
    p_bench->add_option("--factors", cfg.factors, "duplication factors, comma separated");
    p_bench->add_option("--bench-epochs", cfg.bench_epochs, "fit epochs per timed run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        // config file first, explicit flags take precedence
        if (!cfg.config_file.empty()) {
            FitConfig from_file = cfg.fit;
            apply_config_file(cfg.config_file, from_file);
            if (!opt_epochs->count()) cfg.fit.epochs = from_file.epochs;
            if (!opt_lr->count()) cfg.fit.learning_rate = from_file.learning_rate;
            if (!opt_wdeg->count()) cfg.fit.w_deg = from_file.w_deg;
            if (!opt_wcard->count()) cfg.fit.w_card = from_file.w_card;
            if (!opt_decay->count()) cfg.fit.seed_decay = from_file.seed_decay;
            if (!opt_floor->count()) cfg.fit.prob_floor = from_file.prob_floor;
            if (!opt_gc->count()) cfg.fit.grad_check = from_file.grad_check;
            if (!opt_norm->count()) cfg.fit.normalize_core = from_file.normalize_core;
        }
        if (opt_norm->count()) cfg.fit.normalize_core = true;

        if (p_partition->parsed()) return cmd_partition(cfg);
        if (p_fit->parsed()) return cmd_fit(cfg);
        if (p_gen->parsed()) return cmd_generate(cfg);
        if (p_eval->parsed()) return cmd_eval(cfg);
        if (p_cmp->parsed()) return cmd_compare(cfg);
        if (p_bench->parsed()) return cmd_bench(cfg);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
