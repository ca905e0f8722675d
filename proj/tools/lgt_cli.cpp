// Command-line driver: run, refine, renorm-table, ward-check, kernel-id-check.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "lgt/experiment.hpp"
#include "lgt/io.hpp"

namespace fs = std::filesystem;
using namespace lgt;

namespace {

enum Exit { ok = 0, config_error = 2, blow_up = 3, io_error = 4 };

struct Common
{
    std::string config;
    std::string out;
    long long seed = -1;
    int threads = 1;
};

void add_common(CLI::App* c, Common& o, bool need_config)
{
    auto* opt = c->add_option("--config", o.config, "configuration file");
    if (need_config)
        opt->required();
    c->add_option("--seed", o.seed, "seed override");
    c->add_option("--out", o.out, "output directory");
    c->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
}

ExperimentSpec load(const Common& o, std::string& text)
{
    ExperimentSpec spec = load_config(o.config, &text);
    if (o.seed >= 0) {
        spec.sim.seed = std::uint64_t(o.seed);
        text += fmt::format("\n# --seed {}\n", o.seed);
    }
    if (!o.out.empty())
        spec.output = o.out;
    return spec;
}

void ensure_dir(const std::string& d)
{
    std::error_code ec;
    fs::create_directories(d, ec);
    if (ec || !fs::is_directory(d))
        throw IoError("cannot create output directory '" + d + "'");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"U(1) lattice gauge-Higgs Langevin simulator"};
    app.require_subcommand(1);

    Common run_o, ref_o, tab_o, ward_o, kid_o;
    auto* run = app.add_subcommand("run", "simulate trajectories and record observables");
    add_common(run, run_o, true);
    auto* refine = app.add_subcommand("refine", "coupled refinement ladder and distance table");
    add_common(refine, ref_o, true);

    auto* table = app.add_subcommand("renorm-table", "renormalization constants C1..C4 and the mass counterterm");
    add_common(table, tab_o, false);
    int t_nmin = 3, t_nmax = 6;
    double t_lambda = 1.0;
    table->add_option("--n-min", t_nmin, "first level");
    table->add_option("--n-max", t_nmax, "last level");
    table->add_option("--lambda", t_lambda, "coupling");

    auto* ward = app.add_subcommand("ward-check", "Ward identity residuals of the Gaussian vector field");
    add_common(ward, ward_o, false);
    int w_n = 3, w_order = 20;
    double w_T = 4.0;
    ward->add_option("--n", w_n, "level");
    ward->add_option("--t-back", w_T, "burn-in time of the free fields");
    ward->add_option("--gl-order", w_order, "Gauss-Legendre order per panel");

    auto* kid = app.add_subcommand("kernel-id-check", "heat-kernel gradient identity at random points");
    add_common(kid, kid_o, false);
    int k_n = 4, k_count = 10;
    kid->add_option("--n", k_n, "level");
    kid->add_option("--count", k_count, "number of random (s, s', y, y')");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? ok : config_error;
    }

    try {
        if (run->parsed()) {
            std::string text;
            ExperimentSpec spec = load(run_o, text);
            RunSummary s = run_experiment(spec, text, spec.output, run_o.threads, std::cerr);
            return s.exit_code == 3 ? blow_up : ok;
        }
        if (refine->parsed()) {
            std::string text;
            ExperimentSpec spec = load(ref_o, text);
            if (!spec.refinement)
                throw ConfigError("refine needs a [refinement] section");
            refine_experiment(spec, text, spec.output, ref_o.threads, std::cerr);
            return ok;
        }
        if (table->parsed()) {
            std::vector<RenormConstants> rows = renorm_table(t_nmin, t_nmax, t_lambda, tab_o.threads);
            std::ostringstream os;
            write_renorm_table(os, rows);
            std::cout << os.str();
            if (!tab_o.out.empty()) {
                ensure_dir(tab_o.out);
                write_file_atomic((fs::path(tab_o.out) / "renorm_table.txt").string(), os.str());
                std::string cfg = fmt::format("renorm-table n_min={} n_max={} lambda={}", t_nmin, t_nmax, t_lambda);
                write_file_atomic((fs::path(tab_o.out) / "manifest.json").string(),
                                  manifest_json("renorm-table", cfg, 0, tab_o.out, {"renorm_table.txt"}, "{}"));
            }
            return ok;
        }
        if (ward->parsed()) {
            if (w_n < 1 || w_n > 8)
                throw ConfigError("ward-check supports 1 <= n <= 8");
            Lattice L(w_n);
            WardField w = ward_vector_field(L, w_T, w_order);
            double r_exact = max_abs(ward_residual(L, w, -1.0));
            double r_printed = max_abs(ward_residual(L, w, +1.0));
            double sum_h = 0, sum_v = 0;
            for (int x = 0; x < L.vertices(); ++x) {
                sum_h += w.V.h[x];
                sum_v += w.V.v[x];
            }
            const double e2 = L.eps() * L.eps();
            nlohmann::ordered_json j;
            j["n"] = w_n;
            j["t_back"] = w_T;
            j["residual_div_minus_lap"] = r_exact;
            j["residual_div_plus_lap"] = r_printed;
            j["eps2_sum_V1"] = e2 * sum_h;
            j["eps2_sum_V2"] = e2 * sum_v;
            j["tail_bound"] = w.tail_bound;
            std::cout << j.dump(2) << "\n";
            if (!ward_o.out.empty()) {
                ensure_dir(ward_o.out);
                write_file_atomic((fs::path(ward_o.out) / "ward.json").string(), j.dump(2) + "\n");
            }
            return ok;
        }
        if (kid->parsed()) {
            if (k_n < 1 || k_n > 7)
                throw ConfigError("kernel-id-check supports 1 <= n <= 7");
            Lattice L(k_n);
            std::mt19937_64 rng(std::uint64_t(kid_o.seed < 0 ? 1 : kid_o.seed));
            std::uniform_real_distribution<double> us(0.0, 0.25);
            std::uniform_int_distribution<int> uy(0, L.vertices() - 1);
            double worst = 0;
            nlohmann::ordered_json rows = nlohmann::ordered_json::array();
            for (int i = 0; i < k_count; ++i) {
                double s = us(rng), sp = us(rng);
                int y = uy(rng), yp = uy(rng);
                IdentityResidual r = heat_kernel_identity_residual(L, s, sp, y, yp);
                worst = std::max(worst, r.residual);
                rows.push_back({{"s", s}, {"s_prime", sp}, {"y", y}, {"y_prime", yp}, {"residual", r.residual},
                                {"tail_bound", r.tail_bound}});
            }
            nlohmann::ordered_json j;
            j["n"] = k_n;
            j["max_residual"] = worst;
            j["samples"] = rows;
            std::cout << j.dump(2) << "\n";
            if (!kid_o.out.empty()) {
                ensure_dir(kid_o.out);
                write_file_atomic((fs::path(kid_o.out) / "kernel_identity.json").string(), j.dump(2) + "\n");
            }
            return ok;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return io_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    }
    return ok;
}
