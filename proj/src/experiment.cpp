#include "lgt/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <limits>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include "json.hpp"

#include "lgt/calculus.hpp"
#include "lgt/io.hpp"
#include "lgt/observables.hpp"

namespace lgt {

namespace fs = std::filesystem;

namespace {

const char* tool_version = "1.0.0";

double c2_cached(const Lattice& L)
{
    static std::mutex m;
    static std::map<int, double> cache;
    {
        std::lock_guard<std::mutex> lock(m);
        auto it = cache.find(L.n());
        if (it != cache.end())
            return it->second;
    }
    QuadratureOptions q;
    q.refine_order = 0;
    double c2 = renorm_constants(L, 0.0, q).c2;
    std::lock_guard<std::mutex> lock(m);
    cache[L.n()] = c2;
    return c2;
}

double param_d(const ObservableSpec& o, const char* k, double def)
{
    auto it = o.params.find(k);
    if (it == o.params.end())
        return def;
    try {
        std::size_t pos = 0;
        double v = std::stod(it->second, &pos);
        if (pos == it->second.size())
            return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(fmt::format("observable '{}': parameter '{}' is not a number", o.name, k));
}

void ensure_dir(const std::string& d)
{
    std::error_code ec;
    fs::create_directories(d, ec);
    if (ec || !fs::is_directory(d))
        throw IoError("cannot create output directory '" + d + "'");
}

std::string read_file(const std::string& p)
{
    std::ifstream f(p, std::ios::binary);
    if (!f)
        throw IoError("cannot read back '" + p + "'");
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

} // namespace

double median(std::vector<double> v)
{
    if (v.empty())
        return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

SimConfig resolved_config(const ExperimentSpec& spec, int n, std::uint64_t seed)
{
    Lattice L(n);
    SimConfig c = spec.sim;
    c.n = n;
    c.seed = seed;
    if (spec.dt_auto || n != spec.sim.n)
        c.dt = default_dt(L);
    c.c_eps = resolve_c_eps(L, c);
    return c;
}

SystemState make_initial(const Lattice& L, const ExperimentSpec& spec, std::uint64_t seed)
{
    switch (spec.initial) {
    case InitialKind::zero: return initial_zero(L);
    case InitialKind::smooth:
        return initial_smooth(L, spec.initial_a, spec.initial_b, spec.initial_m1, spec.initial_m2);
    case InitialKind::gff: return initial_gff(L, spec.initial_eta, seed);
    }
    return initial_zero(L);
}

std::vector<cplx> evaluate_observable(const Lattice& L, const ObservableSpec& o, const SystemState& s,
                                      double lambda)
{
    const double e2 = L.eps() * L.eps();
    if (o.name == "hamiltonian")
        return {hamiltonian(L, s.gauge, s.scalar, lambda)};
    if (o.name == "phi2") {
        double acc = 0;
        for (int x = 0; x < L.vertices(); ++x)
            acc += std::norm(s.scalar[x]);
        return {acc / L.vertices()};
    }
    if (o.name == "wick") {
        int k = int(param_d(o, "order", 1));
        Plane w = wick_power(L, s.scalar, k, wick_variance_from_c2(c2_cached(L)));
        return {mean(w)};
    }
    if (o.name == "curvature2") {
        PlaquetteField F = curvature(L, s.gauge);
        double acc = 0;
        for (double f : F.f)
            acc += f * f;
        return {e2 * acc};
    }
    if (o.name == "loop") {
        int x0 = int(param_d(o, "x", 0)), y0 = int(param_d(o, "y", 0));
        int w = int(param_d(o, "w", std::max(1, L.side() / 2))), h = int(param_d(o, "h", std::max(1, L.side() / 2)));
        if (w < 1 || h < 1)
            throw ConfigError("loop observable needs w, h >= 1");
        std::vector<int> moves;
        moves.insert(moves.end(), w, 1);
        moves.insert(moves.end(), h, 2);
        moves.insert(moves.end(), w, -1);
        moves.insert(moves.end(), h, -2);
        DiscreteCurve c = lattice_path(L, L.index(x0, y0), moves);
        return {loop_observable(L, s.gauge, c).O_tilde};
    }
    if (o.name == "holder") {
        double alpha = param_d(o, "alpha", -0.1);
        auto it = o.params.find("field");
        std::string field = it == o.params.end() ? "state" : it->second;
        DiscreteField f = field == "scalar" ? vertex_field(L, s.scalar)
                          : field == "gauge" ? edge_field(L, s.gauge)
                          : field == "state" ? state_field(L, s)
                                             : throw ConfigError("holder observable: field must be scalar, gauge or state");
        static std::mutex m;
        static std::map<int, TestFunctionFamily> fams;
        const TestFunctionFamily* fam;
        {
            std::lock_guard<std::mutex> lock(m);
            auto f2 = fams.find(L.n());
            if (f2 == fams.end())
                f2 = fams.emplace(L.n(), make_family(L.eps())).first;
            fam = &f2->second;
        }
        return {holder_norm(f, alpha, *fam).value};
    }
    throw ConfigError("unknown observable '" + o.name + "'");
}

std::string manifest_json(const std::string& command, const std::string& config_text, std::uint64_t seed,
                          const std::string& out_dir, const std::vector<std::string>& outputs,
                          const std::string& outcome_json)
{
    nlohmann::ordered_json j;
    j["tool"] = "lgt";
    j["version"] = tool_version;
    j["command"] = command;
    j["config_sha256"] = sha256_hex(config_text);
    j["config"] = config_text;
    j["seed"] = seed;
    nlohmann::ordered_json outs = nlohmann::ordered_json::array();
    for (const auto& o : outputs)
        outs.push_back({{"file", o}, {"sha256", sha256_hex(read_file((fs::path(out_dir) / o).string()))}});
    j["outputs"] = outs;
    j["outcome"] = nlohmann::ordered_json::parse(outcome_json);
    j["status"] = "complete";
    return j.dump(2) + "\n";
}

RunSummary run_experiment(const ExperimentSpec& spec, const std::string& config_text, const std::string& out_dir,
                          int threads, std::ostream& log)
{
    ensure_dir(out_dir);
    const Lattice L(spec.sim.n);
    const int K = spec.ensemble;
    struct Result
    {
        std::string rows;
        TrajectoryRecord rec;
        SimConfig cfg;
        std::vector<std::string> snapshots;
    };
    std::vector<Result> res(K);
    // resolve c_eps once up front so workers only hit the cache
    SimConfig base = resolved_config(spec, spec.sim.n, spec.sim.seed);
    validate(L, base);

    parallel_for(std::size_t(K), threads, [&](std::size_t i) {
        Result& r = res[i];
        r.cfg = base;
        r.cfg.seed = spec.sim.seed + i;
        std::vector<ObserverSpec> obs;
        for (const auto& o : spec.observables) {
            std::string ps = o.param_string();
            if (K > 1)
                ps = fmt::format("sample={}", i) + (ps.empty() ? "" : ";" + ps);
            obs.push_back({[&, ps](long st, double t, const SystemState& s) {
                               for (cplx v : evaluate_observable(L, o, s, r.cfg.lambda))
                                   r.rows += csv_row(st, t, o.name, ps, v.real(), v.imag());
                           },
                           o.stride});
        }
        if (spec.format == Format::binary && spec.snapshot_stride > 0)
            obs.push_back({[&, i](long st, double, const SystemState& s) {
                               std::string name = fmt::format("snapshot_s{}_{:08d}.bin", i, st);
                               write_snapshot((fs::path(out_dir) / name).string(), L, s, r.cfg.lambda, r.cfg.dt,
                                              r.cfg.seed);
                               r.snapshots.push_back(name);
                           },
                           spec.snapshot_stride});
        r.rec = run_trajectory(L, r.cfg, make_initial(L, spec, r.cfg.seed), obs);
        if (spec.format == Format::binary) {
            std::string name = fmt::format("final_s{}.bin", i);
            write_snapshot((fs::path(out_dir) / name).string(), L, r.rec.final_state, r.cfg.lambda, r.cfg.dt,
                           r.cfg.seed);
            r.snapshots.push_back(name);
        }
    });

    RunSummary sum;
    {
        CsvWriter w((fs::path(out_dir) / "observables.csv").string());
        for (auto& r : res)
            w.raw(r.rows);
        w.finish();
    }
    sum.outputs.push_back("observables.csv");
    nlohmann::ordered_json outcome;
    outcome["n"] = L.n();
    outcome["lambda"] = base.lambda;
    outcome["dt"] = base.dt;
    outcome["t_final"] = base.t_final;
    outcome["c_eps"] = base.c_eps;
    nlohmann::ordered_json tr = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < res.size(); ++i) {
        auto& r = res[i];
        for (auto& s : r.snapshots)
            sum.outputs.push_back(s);
        nlohmann::ordered_json t;
        t["sample"] = i;
        t["seed"] = r.cfg.seed;
        t["steps"] = r.rec.steps;
        t["blew_up"] = r.rec.blew_up;
        if (r.rec.blew_up) {
            t["blowup_time"] = r.rec.blowup_time;
            sum.exit_code = 3;
            log << fmt::format("sample {} blew up at t = {}\n", i, r.rec.blowup_time);
        }
        tr.push_back(t);
    }
    outcome["trajectories"] = tr;
    write_file_atomic((fs::path(out_dir) / "manifest.json").string(),
                      manifest_json("run", config_text, spec.sim.seed, out_dir, sum.outputs, outcome.dump()));
    log << fmt::format("run: n={} lambda={} dt={} c_eps={} samples={} -> {}\n", L.n(), base.lambda, base.dt,
                       base.c_eps, K, out_dir);
    return sum;
}

RefinementResult run_refinement(const ExperimentSpec& spec, std::uint64_t seed)
{
    if (!spec.refinement)
        throw ConfigError("refinement requested without a [refinement] section");
    if (spec.initial == InitialKind::gff)
        throw ConfigError("refinement needs deterministic initial data (zero or smooth)");
    const RefinementSpec& rs = *spec.refinement;
    const int nl = rs.n_max - rs.n_min + 1;
    std::vector<Lattice> lat;
    std::vector<SimConfig> cfg;
    std::vector<SystemState> st;
    RefinementResult out;
    out.seed = seed;
    for (int n = rs.n_min; n <= rs.n_max; ++n) {
        lat.emplace_back(n);
        cfg.push_back(resolved_config(spec, n, seed));
        st.push_back(make_initial(lat.back(), spec, seed));
        out.levels.push_back(LevelOutcome{n, false, 0, cfg.back().c_eps});
    }
    // coarse steps per snapshot, rounded up so snapshots fall on the coarsest time grid
    const double dt_c = cfg[0].dt;
    const long per = std::max(1L, long(std::ceil(spec.sim.t_final / dt_c / rs.snapshots - 1e-9)));
    const long fine_per_coarse = 1L << (2 * (nl - 1));
    std::vector<std::vector<SystemState>> snaps(nl);
    std::vector<NoiseRealization> acc(nl);
    for (int l = 0; l < nl; ++l)
        acc[l] = NoiseRealization{GaugeField(lat[l]), ScalarField(lat[l])};

    const int F = nl - 1;
    const long total_fine = per * rs.snapshots * fine_per_coarse;
    for (long k = 0; k < total_fine; ++k) {
        NoiseRealization w = sample_noise(lat[F], cfg[F].dt, seed, std::uint64_t(k));
        if (!rs.coupled) // independent noise for each level (diagnostic baseline)
            for (int l = 0; l < F; ++l) {
                long stride = 1L << (2 * (F - l));
                if ((k + 1) % stride == 0)
                    acc[l] = sample_noise(lat[l], cfg[l].dt, seed + 7919 * std::uint64_t(l + 1), std::uint64_t(k / stride));
            }
        NoiseRealization c = w;
        for (int l = F; l >= 0; --l) {
            long stride = 1L << (2 * (F - l));
            if (l < F) {
                c = coarsen_noise(lat[l + 1], c, lat[l]);
                if (rs.coupled)
                    acc[l] = acc[l] + c;
            } else {
                acc[l] = w;
            }
            if ((k + 1) % stride != 0)
                continue;
            if (!out.levels[l].blew_up) {
                try {
                    st[l] = step(lat[l], st[l], cfg[l], acc[l]);
                } catch (const BlowUp& b) {
                    out.levels[l].blew_up = true;
                    out.levels[l].blowup_time = b.t;
                }
            }
            if (rs.coupled)
                acc[l] = NoiseRealization{GaugeField(lat[l]), ScalarField(lat[l])};
            long coarse_k = (k + 1) / fine_per_coarse;
            if ((k + 1) % fine_per_coarse == 0 && coarse_k % per == 0 && l == 0)
                out.times.push_back(double(coarse_k) * dt_c);
            if ((k + 1) % fine_per_coarse == 0 && coarse_k % per == 0 && !out.levels[l].blew_up)
                snaps[l].push_back(st[l]);
        }
    }
    for (int l = 0; l + 1 < nl; ++l) {
        LevelPair p;
        p.n_coarse = lat[l].n();
        p.n_fine = lat[l + 1].n();
        p.blew_up = out.levels[l].blew_up || out.levels[l + 1].blew_up;
        if (p.blew_up) {
            p.distance.value = p.distance.instantaneous = p.distance.increments =
                std::numeric_limits<double>::infinity();
        } else {
            TestFunctionFamily fam = make_family(lat[l].eps(), rs.smoothness);
            std::vector<PairingVector> a, b;
            for (auto& s : snaps[l])
                a.push_back(pairings(fam, state_field(lat[l], s)));
            for (auto& s : snaps[l + 1])
                b.push_back(pairings(fam, state_field(lat[l + 1], s)));
            p.distance = spacetime_distance(out.times, a, out.times, b, rs.alpha, rs.delta, rs.eta, lat[l].eps(), fam);
        }
        out.pairs.push_back(p);
    }
    return out;
}

RunSummary refine_experiment(const ExperimentSpec& spec, const std::string& config_text, const std::string& out_dir,
                             int threads, std::ostream& log)
{
    ensure_dir(out_dir);
    const int K = spec.ensemble;
    std::vector<RefinementResult> res(K);
    // warm the c_eps cache before spawning workers
    for (int n = spec.refinement->n_min; n <= spec.refinement->n_max; ++n)
        resolved_config(spec, n, spec.sim.seed);
    parallel_for(std::size_t(K), threads, [&](std::size_t i) { res[i] = run_refinement(spec, spec.sim.seed + i); });

    RunSummary sum;
    {
        CsvWriter w((fs::path(out_dir) / "refinement.csv").string());
        for (int i = 0; i < K; ++i)
            for (auto& p : res[i].pairs)
                w.row(0, spec.sim.t_final, "spacetime_distance",
                      fmt::format("sample={};n_coarse={};n_fine={};blew_up={}", i, p.n_coarse, p.n_fine,
                                  p.blew_up ? 1 : 0),
                      p.distance.value, 0.0);
        w.finish();
    }
    sum.outputs.push_back("refinement.csv");
    nlohmann::ordered_json outcome;
    nlohmann::ordered_json table = nlohmann::ordered_json::array();
    const std::size_t np = res.empty() ? 0 : res[0].pairs.size();
    for (std::size_t p = 0; p < np; ++p) {
        std::vector<double> d;
        int blown = 0;
        for (auto& r : res) {
            d.push_back(r.pairs[p].distance.value);
            blown += r.pairs[p].blew_up ? 1 : 0;
        }
        double med = median(d);
        nlohmann::ordered_json row;
        row["n_coarse"] = res[0].pairs[p].n_coarse;
        row["n_fine"] = res[0].pairs[p].n_fine;
        row["median_distance"] = std::isfinite(med) ? nlohmann::ordered_json(med) : nlohmann::ordered_json("inf");
        row["blown_up_samples"] = blown;
        table.push_back(row);
        log << fmt::format("n={}->{}: median distance {:.6g} ({} of {} samples blew up)\n",
                           res[0].pairs[p].n_coarse, res[0].pairs[p].n_fine, med, blown, K);
    }
    outcome["pairs"] = table;
    write_file_atomic((fs::path(out_dir) / "manifest.json").string(),
                      manifest_json("refine", config_text, spec.sim.seed, out_dir, sum.outputs, outcome.dump()));
    return sum;
}

std::vector<RenormConstants> renorm_table(int n_min, int n_max, double lambda, int threads)
{
    if (n_min < 2 || n_max < n_min || n_max > 14)
        throw ConfigError("renorm table needs 2 <= n_min <= n_max <= 14");
    std::vector<RenormConstants> rows(std::size_t(n_max - n_min + 1));
    parallel_for(rows.size(), threads,
                 [&](std::size_t i) { rows[i] = renorm_constants(Lattice(n_min + int(i)), lambda); });
    return rows;
}

} // namespace lgt
