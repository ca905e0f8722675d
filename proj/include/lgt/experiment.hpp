#pragma once

#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "lgt/config.hpp"
#include "lgt/kernels.hpp"
#include "lgt/norms.hpp"

namespace lgt {

// runs fn(i) for i in [0, count) on up to `threads` workers; rethrows the first failure
inline void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn)
{
    std::size_t nw = std::min<std::size_t>(count, std::size_t(std::max(1, threads)));
    if (nw <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex m;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < nw; ++w)
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= count)
                    return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(m);
                    if (!err)
                        err = std::current_exception();
                }
            }
        });
    for (auto& t : pool)
        t.join();
    if (err)
        std::rethrow_exception(err);
}

// SimConfig for the lattice of the spec with dt and c_eps resolved
SimConfig resolved_config(const ExperimentSpec& spec, int n, std::uint64_t seed);
SystemState make_initial(const Lattice& L, const ExperimentSpec& spec, std::uint64_t seed);

// values of one scheduled observable on a state (one or more (re, im) rows)
std::vector<cplx> evaluate_observable(const Lattice& L, const ObservableSpec& o, const SystemState& s,
                                      double lambda);

struct RunSummary
{
    int exit_code = 0; // 0 or 3 (blow-up before t_final)
    std::vector<std::string> outputs;
};
// writes observables.csv, snapshots and manifest.json (last) below out_dir
RunSummary run_experiment(const ExperimentSpec& spec, const std::string& config_text, const std::string& out_dir,
                          int threads, std::ostream& log);

struct LevelPair
{
    int n_coarse = 0, n_fine = 0;
    SpacetimeReport distance;
    bool blew_up = false; // either level blew up before t_final
};
struct LevelOutcome
{
    int n = 0;
    bool blew_up = false;
    double blowup_time = 0;
    double c_eps = 0;
};
struct RefinementResult
{
    std::uint64_t seed = 0;
    std::vector<LevelOutcome> levels;
    std::vector<LevelPair> pairs;
    std::vector<double> times;
};
// one coupled ladder n_min..n_max: noise generated on the finest lattice and block-averaged down
RefinementResult run_refinement(const ExperimentSpec& spec, std::uint64_t seed);
RunSummary refine_experiment(const ExperimentSpec& spec, const std::string& config_text, const std::string& out_dir,
                             int threads, std::ostream& log);

std::vector<RenormConstants> renorm_table(int n_min, int n_max, double lambda, int threads);

std::string manifest_json(const std::string& command, const std::string& config_text, std::uint64_t seed,
                          const std::string& out_dir, const std::vector<std::string>& outputs,
                          const std::string& outcome_json);

double median(std::vector<double> v);

} // namespace lgt
