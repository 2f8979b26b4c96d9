#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "noah/hypergraph.hpp"
#include "noah/metrics.hpp"
#include "noah/params.hpp"

using namespace noah;
namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "noah_cli_test";

int run_cli(const std::string& args) {
    const std::string cmd = std::string(NOAH_CLI_PATH) + " " + args + " > " +
                            (kWork / "stdout.txt").string() + " 2> " +
                            (kWork / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Fixture {
    fs::path edges = kWork / "edges.txt";
    fs::path attrs = kWork / "attrs.txt";
    Fixture() {
        fs::create_directories(kWork);
        atomic_write(edges,
                     "0 1\n1 2\n0 1 3\n2 4\n0 5\n1 2 3\n0 2\n1 3\n0 1 2\n3 4\n0 4\n2 3\n");
        atomic_write(attrs, "1 0\n1 0\n0 1\n0 1\n1 1\n0 0\n");
    }
};

}  // namespace

TEST_CASE("cli partition writes a deterministic core file") {
    Fixture fx;
    const auto dir1 = kWork / "p1";
    const auto dir2 = kWork / "p2";
    REQUIRE(run_cli("partition --edges " + fx.edges.string() + " --attrs " + fx.attrs.string() +
                    " --out " + dir1.string() + " --seed 11 --rounds 4") == 0);
    REQUIRE(run_cli("partition --edges " + fx.edges.string() + " --attrs " + fx.attrs.string() +
                    " --out " + dir2.string() + " --seed 11 --rounds 4") == 0);
    CHECK(read_file(dir1 / "core.txt") == read_file(dir2 / "core.txt"));
    CHECK(!read_file(dir1 / "core.txt").empty());
}

TEST_CASE("cli exits with 2 on validation problems") {
    Fixture fx;
    CHECK(run_cli("partition --edges /missing.txt --attrs " + fx.attrs.string() + " --out " +
                  (kWork / "px").string()) == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("generate --edges " + fx.edges.string() + " --attrs " + fx.attrs.string() +
                  " --out " + (kWork / "py").string() + " --model noah") == 2);  // missing params
}

TEST_CASE("cli fit produces the documented outputs") {
    Fixture fx;
    const auto dir = kWork / "fit";
    REQUIRE(run_cli("fit --edges " + fx.edges.string() + " --attrs " + fx.attrs.string() +
                    " --out " + dir.string() + " --seed 5 --epochs 3") == 0);

    auto params = load_params(dir / "params.json");
    params.validate(static_cast<int>(params.p_seed.size()), 2);

    const auto trace = read_file(dir / "trace.csv");
    CHECK(trace.rfind("epoch,L_edge,L_deg,L_card,L\n", 0) == 0);
    CHECK(std::count(trace.begin(), trace.end(), '\n') == 4);  // header + 3 epochs

    SUBCASE("single epoch gives a single trace row") {
        const auto dir1 = kWork / "fit1";
        REQUIRE(run_cli("fit --edges " + fx.edges.string() + " --attrs " + fx.attrs.string() +
                        " --out " + dir1.string() + " --seed 5 --epochs 1") == 0);
        const auto t1 = read_file(dir1 / "trace.csv");
        CHECK(std::count(t1.begin(), t1.end(), '\n') == 2);
    }

    SUBCASE("grad check prints the max relative error") {
        const auto dir2 = kWork / "fitgc";
        REQUIRE(run_cli("fit --edges " + fx.edges.string() + " --attrs " + fx.attrs.string() +
                        " --out " + dir2.string() + " --seed 5 --epochs 2 --grad-check") == 0);
        CHECK(read_file(kWork / "stdout.txt").find("grad_check max_rel_error=") !=
              std::string::npos);
    }
}

TEST_CASE("cli fit accepts config files in both formats") {
    Fixture fx;
    const auto kv = kWork / "fit.conf";
    atomic_write(kv, "epochs = 2\nlearning_rate = 0.05\nw_deg = 0.0\n# comment\n");
    const auto dir = kWork / "fitconf";
    REQUIRE(run_cli("fit --edges " + fx.edges.string() + " --attrs " + fx.attrs.string() +
                    " --out " + dir.string() + " --config " + kv.string()) == 0);
    const auto t_kv = read_file(dir / "trace.csv");
    CHECK(std::count(t_kv.begin(), t_kv.end(), '\n') == 3);

    const auto js = kWork / "fit.json";
    atomic_write(js, "{\"epochs\": 4, \"w_card\": 0.5}\n");
    const auto dir2 = kWork / "fitconf2";
    REQUIRE(run_cli("fit --edges " + fx.edges.string() + " --attrs " + fx.attrs.string() +
                    " --out " + dir2.string() + " --config " + js.string()) == 0);
    const auto t_js = read_file(dir2 / "trace.csv");
    CHECK(std::count(t_js.begin(), t_js.end(), '\n') == 5);

    // explicit flag beats the file
    const auto dir3 = kWork / "fitconf3";
    REQUIRE(run_cli("fit --edges " + fx.edges.string() + " --attrs " + fx.attrs.string() +
                    " --out " + dir3.string() + " --config " + js.string() + " --epochs 1") == 0);
    const auto t_cli = read_file(dir3 / "trace.csv");
    CHECK(std::count(t_cli.begin(), t_cli.end(), '\n') == 2);
}

TEST_CASE("cli generate is reproducible and respects the model switch") {
    Fixture fx;
    const auto fit_dir = kWork / "gfit";
    REQUIRE(run_cli("fit --edges " + fx.edges.string() + " --attrs " + fx.attrs.string() +
                    " --out " + fit_dir.string() + " --seed 5 --epochs 5") == 0);

    const auto g1 = kWork / "gen1";
    const auto g2 = kWork / "gen2";
    const std::string base = "generate --edges " + fx.edges.string() + " --attrs " +
                             fx.attrs.string() + " --seed 21 --model noah --params " +
                             (fit_dir / "params.json").string() + " --core " +
                             (fit_dir / "core.txt").string();
    REQUIRE(run_cli(base + " --out " + g1.string() + " -m 30") == 0);
    REQUIRE(run_cli(base + " --out " + g2.string() + " -m 30") == 0);
    CHECK(read_file(g1 / "gen_edges.txt") == read_file(g2 / "gen_edges.txt"));

    auto gen = load_hypergraph(g1 / "gen_edges.txt", fx.attrs);
    CHECK(gen.edge_count() == 30);

    SUBCASE("hypercl preserves the size multiset") {
        const auto gh = kWork / "genh";
        REQUIRE(run_cli("generate --edges " + fx.edges.string() + " --attrs " +
                        fx.attrs.string() + " --out " + gh.string() +
                        " --seed 3 --model hypercl") == 0);
        auto h = load_hypergraph(fx.edges, fx.attrs);
        auto hcl = load_hypergraph(gh / "gen_edges.txt", fx.attrs);
        auto a = size_vector(h);
        auto b = size_vector(hcl);
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        CHECK(a == b);
    }

    SUBCASE("noah-cf ignores the core file and runs all-core") {
        const auto fit_cf = kWork / "gfitcf";
        REQUIRE(run_cli("fit --edges " + fx.edges.string() + " --attrs " + fx.attrs.string() +
                        " --out " + fit_cf.string() + " --seed 5 --epochs 5 --model noah-cf") ==
                0);
        const auto gcf = kWork / "gencf";
        REQUIRE(run_cli("generate --edges " + fx.edges.string() + " --attrs " +
                        fx.attrs.string() + " --out " + gcf.string() +
                        " --seed 4 --model noah-cf --params " +
                        (fit_cf / "params.json").string() + " -m 12") == 0);
        CHECK(load_hypergraph(gcf / "gen_edges.txt", fx.attrs).edge_count() == 12);
    }
}

TEST_CASE("cli compare of a hypergraph against itself reports zeros") {
    Fixture fx;
    const auto dir = kWork / "cmp_self";
    REQUIRE(run_cli("compare --edges " + fx.edges.string() + " --attrs " + fx.attrs.string() +
                    " --gen-edges " + fx.edges.string() + " --out " + dir.string() +
                    " --top-k-sv 3") == 0);
    const auto report = metric_report_from_json(read_file(dir / "report.json"));
    CHECK(report.he == 0.0);
    CHECK(report.hohe == 0.0);
    CHECK(report.nhs == 0.0);
    for (const auto& [s, v] : report.ts) CHECK(v == 0.0);

    for (const char* name :
         {"he_real.csv", "he_gen.csv", "nhs_real.csv", "ratios_real.csv", "degree_real.csv",
          "size_gen.csv", "singular_values_real.csv"}) {
        CHECK(fs::exists(dir / name));
    }
}

TEST_CASE("cli eval writes distribution files") {
    Fixture fx;
    const auto dir = kWork / "eval";
    REQUIRE(run_cli("eval --edges " + fx.edges.string() + " --attrs " + fx.attrs.string() +
                    " --out " + dir.string() + " --top-k-sv 2 --s-list 2,3") == 0);
    for (const char* name : {"he.csv", "hohe.csv", "nhs.csv", "ratios.csv", "degree.csv",
                             "size.csv", "singular_values.csv", "eval.json"}) {
        CHECK(fs::exists(dir / name));
    }
    const auto ratios = read_file(dir / "ratios.csv");
    CHECK(ratios.rfind("attr,label,s,t,ratio\n", 0) == 0);
}
