#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "helpers.hpp"
#include "json.hpp"
#include "lgt/config.hpp"
#include "lgt/experiment.hpp"
#include "lgt/io.hpp"

namespace fs = std::filesystem;
using namespace lgt;

namespace {

fs::path scratch()
{
    static fs::path p = [] {
        fs::path d = fs::temp_directory_path() / ("lgt_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& s)
{
    std::ofstream f(p, std::ios::binary);
    f << s;
}

struct Run
{
    int code = -1;
    std::string out;
};

// runs the command-line tool with arguments; stdout captured, stderr discarded
Run cli(const std::string& args)
{
    const char* exe = std::getenv("LGT_CLI");
    REQUIRE_MESSAGE(exe != nullptr, "LGT_CLI must point at the lgt_cli binary");
    fs::path so = scratch() / "stdout.txt";
    std::string cmd = std::string("\"") + exe + "\" " + args + " > \"" + so.string() + "\" 2>/dev/null";
    int st = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    r.out = slurp(so);
    return r;
}

const char* small_config = R"(# small run
[sim]
n = 3
lambda = 1.0
dt = auto
t_final = 0.01
seed = 11

[observable]
name = hamiltonian
stride = 5

[observable]
name = loop
w = 2
h = 3
stride = 10

[output]
format = binary
snapshot_stride = 20
)";

} // namespace

TEST_CASE("config: empty input lists the required keys")
{
    try {
        parse_config("");
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        std::string m = e.what();
        CHECK(m.find("sim.n") != std::string::npos);
        CHECK(m.find("sim.lambda") != std::string::npos);
    }
}

TEST_CASE("config: minimal spec gets documented defaults")
{
    ExperimentSpec s = parse_config("[sim]\nn = 4\nlambda = 1\ndt = auto\n");
    const double eps = 1.0 / 16;
    CHECK(s.sim.n == 4);
    CHECK(s.sim.lambda == 1.0);
    CHECK(s.dt_auto);
    CHECK(s.sim.dt == doctest::Approx(eps * eps / 8).epsilon(1e-15));
    CHECK(s.sim.c_eps_mode == CEpsMode::computed);
    CHECK(s.sim.t_final == doctest::Approx(100 * s.sim.dt));
    CHECK(s.format == Format::csv);
    CHECK(s.ensemble == 1);
    CHECK_FALSE(s.refinement.has_value());
    // dt omitted behaves like auto
    CHECK(parse_config("[sim]\nn = 4\nlambda = 1\n").sim.dt == s.sim.dt);
}

TEST_CASE("config: validation errors")
{
    auto message = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    std::string m = message("[sim]\nn = 4\nlambda = 1\ndt = 0.001\n");
    CHECK(m.find("stability bound") != std::string::npos);
    CHECK(m.find("eps^2/8") != std::string::npos);
    CHECK(message("[sim]\nn = 4\nlambda = 1\ndt = 0.0004\n").empty());
    CHECK(message("[sim]\nn = 4\nlambda = 1\nbogus = 2\n").find("line 4") != std::string::npos);
    CHECK_FALSE(message("[simulation]\nn = 4\n").empty());
    CHECK_FALSE(message("[sim]\nn = 15\nlambda = 1\n").empty());
    CHECK_FALSE(message("[sim]\nn = 4\nlambda = 1\n[observable]\nname = hamiltonian\nstride = 0\n").empty());
    CHECK_FALSE(message("[sim]\nn = 4\nlambda = 1\n[observable]\nname = entropy\n").empty());
    CHECK_FALSE(message("[sim]\nn = 4\nlambda = 1\nc_eps_mode = explicit\n").empty());
    CHECK_FALSE(message("[sim]\nn = 4\nlambda = 1\n[refinement]\nn_min = 5\nn_max = 4\n").empty());
    CHECK_FALSE(message("[sim]\nn = 4\nlambda = 1\n[refinement]\nn_max = 15\n").empty());
}

TEST_CASE("config: sections and observables")
{
    ExperimentSpec s = parse_config(small_config);
    REQUIRE(s.observables.size() == 2);
    CHECK(s.observables[0].name == "hamiltonian");
    CHECK(s.observables[0].stride == 5);
    CHECK(s.observables[1].param_string() == "h=3;w=2");
    CHECK(s.format == Format::binary);
    CHECK(s.snapshot_stride == 20);
    CHECK(s.sim.seed == 11);
    ExperimentSpec r = parse_config("[sim]\nn = 3\nlambda = 0.5\n[refinement]\nn_min = 3\nn_max = 5\ncoupled = yes\n");
    REQUIRE(r.refinement.has_value());
    CHECK(r.refinement->n_max == 5);
    CHECK(r.refinement->coupled);
}

TEST_CASE("CSV writer marks partial output")
{
    fs::path p = scratch() / "w.csv";
    {
        CsvWriter w(p.string());
        w.row(3, 0.5, "phi2", "", 0.1, 0.0);
        CHECK(slurp(p).rfind("# lgt-status: partial", 0) == 0);
        w.finish();
    }
    std::string s = slurp(p);
    CHECK(s.rfind("# lgt-status: complete\n", 0) == 0);
    CHECK(s.find("step,t,observable,params,value_re,value_im\n") != std::string::npos);
    CHECK(s.find(csv_row(3, 0.5, "phi2", "", 0.1, 0.0)) != std::string::npos);
    CHECK(csv_row(1, 0.25, "x", "a=1", 0.1, -2.0) == "1,0.25,x,\"a=1\",0.10000000000000001,-2\n");
}

TEST_CASE("snapshot round trip is bit exact")
{
    Lattice L(3);
    std::mt19937_64 rng(1);
    SystemState s = testing::random_state(L, rng);
    s.phase = testing::random_plane(L, rng);
    s.t = 0.0123;
    s.step = 77;
    fs::path p = scratch() / "snap.bin";
    write_snapshot(p.string(), L, s, 0.7, 1.5e-4, 99);
    Snapshot r = read_snapshot(p.string());
    CHECK(r.header.n == 3);
    CHECK(r.header.lambda == 0.7);
    CHECK(r.header.dt == 1.5e-4);
    CHECK(r.header.t == 0.0123);
    CHECK(r.header.seed == 99);
    CHECK(r.header.step == 77);
    CHECK(r.header.layout == std::vector<std::string>{"h", "v", "re", "im", "phase"});
    CHECK(r.state.gauge.h == s.gauge.h);
    CHECK(r.state.gauge.v == s.gauge.v);
    CHECK(r.state.scalar.re == s.scalar.re);
    CHECK(r.state.scalar.im == s.scalar.im);
    CHECK(r.state.phase == s.phase);
    // write(read(x)) reproduces the file
    fs::path q = scratch() / "snap2.bin";
    write_snapshot(q.string(), L, r.state, 0.7, 1.5e-4, 99);
    CHECK(slurp(p) == slurp(q));
    // corrupted files are rejected
    std::string bytes = slurp(p);
    spit(scratch() / "trunc.bin", bytes.substr(0, bytes.size() - 8));
    CHECK_THROWS_AS(read_snapshot((scratch() / "trunc.bin").string()), IoError);
    std::string bad = bytes;
    bad[0] = 'X';
    spit(scratch() / "bad.bin", bad);
    CHECK_THROWS_AS(read_snapshot((scratch() / "bad.bin").string()), IoError);
    CHECK_THROWS_AS(read_snapshot((scratch() / "missing.bin").string()), IoError);
}

TEST_CASE("sha256")
{
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("run: same spec twice gives identical bytes")
{
    fs::path cfg = scratch() / "small.cfg";
    spit(cfg, small_config);
    fs::path a = scratch() / "run_a", b = scratch() / "run_b";
    REQUIRE(cli("run --config " + cfg.string() + " --out " + a.string()).code == 0);
    REQUIRE(cli("run --config " + cfg.string() + " --out " + b.string()).code == 0);
    std::vector<std::string> names;
    for (auto& e : fs::directory_iterator(a))
        names.push_back(e.path().filename().string());
    CHECK(names.size() >= 4);
    for (auto& n : names)
        CHECK_MESSAGE(slurp(a / n) == slurp(b / n), n);

    std::string csv = slurp(a / "observables.csv");
    CHECK(csv.rfind("# lgt-status: complete\n", 0) == 0);
    CHECK(csv.find(",hamiltonian,\"\",") != std::string::npos);
    CHECK(csv.find(",loop,\"h=3;w=2\",") != std::string::npos);

    auto m = nlohmann::json::parse(slurp(a / "manifest.json"));
    CHECK(m["status"] == "complete");
    CHECK(m["seed"] == 11);
    CHECK(m["config_sha256"] == sha256_hex(small_config));
    for (auto& o : m["outputs"])
        CHECK(o["sha256"] == sha256_hex(slurp(a / o["file"].get<std::string>())));
    // the final snapshot reloads with the recorded header
    Snapshot s = read_snapshot((a / "final_s0.bin").string());
    CHECK(s.header.seed == 11);
    CHECK(s.header.n == 3);
    // t_final / dt = 5.12 rounds to 5 steps
    CHECK(s.state.step == 5);
    CHECK(s.state.t == doctest::Approx(5 * s.header.dt).epsilon(1e-12));

    // a different seed changes the stream
    fs::path c = scratch() / "run_c";
    REQUIRE(cli("run --config " + cfg.string() + " --seed 12 --out " + c.string()).code == 0);
    CHECK(slurp(c / "observables.csv") != csv);
    CHECK(nlohmann::json::parse(slurp(c / "manifest.json"))["seed"] == 12);
}

TEST_CASE("run: exit codes")
{
    fs::path bad = scratch() / "bad.cfg";
    spit(bad, "[sim]\nn = 3\n");
    CHECK(cli("run --config " + bad.string()).code == 2);
    CHECK(cli("run --config " + (scratch() / "nope.cfg").string()).code == 2);
    CHECK(cli("run").code == 2);
    CHECK(cli("frobnicate").code == 2);
    // output below a regular file cannot be created
    fs::path cfg = scratch() / "small.cfg";
    spit(cfg, small_config);
    spit(scratch() / "blocker", "x");
    CHECK(cli("run --config " + cfg.string() + " --out " + (scratch() / "blocker" / "sub").string()).code == 4);
    // a huge explicit counterterm blows up before t_final and still writes artifacts
    fs::path blow = scratch() / "blow.cfg";
    spit(blow, "[sim]\nn = 3\nlambda = 1\nt_final = 0.05\nc_eps_mode = explicit\nc_eps = -1e5\n"
               "[observable]\nname = phi2\n");
    fs::path out = scratch() / "run_blow";
    CHECK(cli("run --config " + blow.string() + " --out " + out.string()).code == 3);
    auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(m["outcome"]["trajectories"][0]["blew_up"] == true);
}

TEST_CASE("renorm-table subcommand")
{
    fs::path out = scratch() / "table";
    Run r = cli("renorm-table --n-min 3 --n-max 5 --out " + out.string());
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("# lgt-renorm-table v1", 0) == 0);
    CHECK(slurp(out / "renorm_table.txt") == r.out);
    CHECK(fs::exists(out / "manifest.json"));
    CHECK(cli("renorm-table --n-min 1 --n-max 3").code == 2);
}

TEST_CASE("ward-check and kernel-id-check subcommands")
{
    Run w = cli("ward-check --n 3");
    REQUIRE(w.code == 0);
    auto j = nlohmann::json::parse(w.out);
    CHECK(j["residual_div_minus_lap"].get<double>() < 1e-9);
    CHECK(j["residual_div_plus_lap"].get<double>() > 1e-3);
    Run k = cli("kernel-id-check --n 3 --count 4 --seed 5");
    REQUIRE(k.code == 0);
    auto q = nlohmann::json::parse(k.out);
    CHECK(q["samples"].size() == 4);
    CHECK(q["max_residual"].get<double>() < 1e-8);
    CHECK(cli("kernel-id-check --n 3 --count 4 --seed 5").out == k.out);
    CHECK(cli("ward-check --n 0").code == 2);
}

TEST_CASE("refine subcommand writes a distance table")
{
    fs::path cfg = scratch() / "refine.cfg";
    spit(cfg, "[sim]\nn = 2\nlambda = 0\nt_final = 0.01\nseed = 3\nensemble = 2\n"
              "[refinement]\nn_min = 2\nn_max = 3\nsnapshots = 2\n");
    fs::path out = scratch() / "refine";
    REQUIRE(cli("refine --config " + cfg.string() + " --out " + out.string()).code == 0);
    std::string csv = slurp(out / "refinement.csv");
    CHECK(csv.rfind("# lgt-status: complete\n", 0) == 0);
    CHECK(csv.find("sample=1;n_coarse=2;n_fine=3") != std::string::npos);
    auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
    REQUIRE(m["outcome"]["pairs"].size() == 1);
    CHECK(m["outcome"]["pairs"][0]["median_distance"].get<double>() > 0);
    fs::path plain = scratch() / "plain.cfg";
    spit(plain, "[sim]\nn = 2\nlambda = 0\n");
    CHECK(cli("refine --config " + plain.string() + " --out " + out.string()).code == 2);
}

TEST_CASE("coupled ladder of the linear system converges")
{
    // at alpha = -0.5 the discrepancy sits well above the sampling noise; per-seed monotone
    ExperimentSpec spec;
    spec.sim.n = 3;
    spec.sim.lambda = 0.0;
    spec.sim.t_final = 0.25;
    spec.dt_auto = true;
    spec.initial = InitialKind::zero;
    RefinementSpec r;
    r.n_min = 2;
    r.n_max = 5;
    r.alpha = -0.5;
    spec.refinement = r;
    for (std::uint64_t seed : {909, 910}) {
        RefinementResult res = run_refinement(spec, seed);
        REQUIRE(res.pairs.size() == 3);
        for (std::size_t i = 0; i < res.pairs.size(); ++i) {
            CHECK(!res.pairs[i].blew_up);
            CHECK(res.pairs[i].distance.value > 0);
            if (i > 0)
                CHECK(res.pairs[i].distance.value < res.pairs[i - 1].distance.value);
        }
    }
}
