#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lgt/dynamics.hpp"

namespace lgt {

struct ConfigError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct ObservableSpec
{
    std::string name;
    std::map<std::string, std::string> params;
    long stride = 1;

    std::string param_string() const; // "k=v;k=v", keys sorted
};

struct RefinementSpec
{
    int n_min = 3;
    int n_max = 5;
    bool coupled = true;
    int snapshots = 8; // equally spaced in (0, t_final]
    double alpha = -0.1, delta = 0.05, eta = -0.1;
    int smoothness = 2; // C^r order of the test family
};

enum class Format { csv, binary };
enum class InitialKind { zero, smooth, gff };

struct ExperimentSpec
{
    SimConfig sim;
    bool dt_auto = true;
    InitialKind initial = InitialKind::zero;
    double initial_eta = 0.1;                    // gff regularity
    double initial_a = 0.0, initial_b = 0.5;     // smooth amplitudes
    int initial_m1 = 1, initial_m2 = 0;          // smooth mode
    int ensemble = 1;                            // trajectories with seeds seed, seed+1, ...
    std::vector<ObservableSpec> observables;
    std::optional<RefinementSpec> refinement;
    std::string output = "out";
    Format format = Format::csv;
    long snapshot_stride = 0; // binary snapshots every k steps (0: final only when format = binary)
};

// key = value lines grouped into [sim], [initial], [observable] (repeatable),
// [refinement] and [output]; '#' starts a comment
ExperimentSpec parse_config(const std::string& text);
ExperimentSpec load_config(const std::string& path, std::string* text_out = nullptr);

} // namespace lgt
