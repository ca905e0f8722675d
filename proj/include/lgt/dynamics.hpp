#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lgt/fields.hpp"

namespace lgt {

enum class System { original, gauge_fixed, polynomial };
enum class CEpsMode { zero, computed, explicit_value };

struct SimConfig
{
    int n = 4;
    double lambda = 1.0;
    double dt = 0; // 0: default eps^2/8
    double t_final = 0;
    CEpsMode c_eps_mode = CEpsMode::computed;
    double c_eps = 0; // resolved value used by the drifts
    std::uint64_t seed = 1;
    System system = System::gauge_fixed;
};

constexpr double stability_factor = 1.0 / 8.0;
constexpr double blowup_threshold = 1e12;

// Gaussian increments, variance eps^-2 dt each
struct NoiseRealization
{
    GaugeField edges;
    ScalarField vertices;
};

NoiseRealization sample_noise(const Lattice& L, double dt, std::uint64_t seed, std::uint64_t step);
// 2x2 block average onto the lattice of mesh 2 eps
NoiseRealization coarsen_noise(const Lattice& fine, const NoiseRealization& w, const Lattice& coarse);
NoiseRealization operator+(const NoiseRealization& a, const NoiseRealization& b);
NoiseRealization operator*(double c, const NoiseRealization& a);

struct Drift
{
    GaugeField gauge;
    ScalarField scalar;
};

// eps^2/2 sum_p F^2 + eps^2/2 sum_x sum_j |D_j Phi|^2
double hamiltonian(const Lattice& L, const GaugeField& A, const ScalarField& phi, double lambda);

Drift drift_original(const Lattice& L, const SystemState& s, double lambda, double c_eps);
Drift drift_gauge_fixed(const Lattice& L, const SystemState& s, double lambda, double c_eps);

struct PolynomialDrift
{
    Drift rate;      // expanded polynomial drift (+ remainders when requested)
    Drift remainder; // R_B, R_Psi
};
PolynomialDrift drift_polynomial(const Lattice& L, const SystemState& s, double lambda,
                                 double c_eps, bool include_remainders);
// Same expansion evaluated edge by edge through the lattice stencil API
// (undirected-edge layout); reference for the vertex-indexed planes above.
PolynomialDrift drift_polynomial_edgewise(const Lattice& L, const SystemState& s, double lambda,
                                          double c_eps, bool include_remainders);

// e^z - 1 - z and e^z - 1 - z - z^2/2, accurate for small |z|
cplx exp_rem1(cplx z);
cplx exp_rem2(cplx z);

struct BlowUp : std::runtime_error
{
    double t;
    long step;
    BlowUp(double t_, long step_)
        : std::runtime_error("blow-up at t=" + std::to_string(t_)), t(t_), step(step_)
    {
    }
};

double default_dt(const Lattice& L);
void validate(const Lattice& L, const SimConfig& cfg);

// Euler-Maruyama step; throws BlowUp on non-finite or |value| > 1e12
SystemState step(const Lattice& L, const SystemState& s, const SimConfig& cfg,
                 const NoiseRealization& w);
bool finite_and_bounded(const SystemState& s);

using Observer = std::function<void(long, double, const SystemState&)>;

struct ObserverSpec
{
    Observer fn;
    long stride = 1;
};

struct TrajectoryRecord
{
    SystemState final_state;
    long steps = 0;
    bool blew_up = false;
    double blowup_time = 0;
};

TrajectoryRecord run_trajectory(const Lattice& L, const SimConfig& cfg, const SystemState& init,
                                const std::vector<ObserverSpec>& observers);

// initial data
SystemState initial_zero(const Lattice& L);
// single Fourier modes: A_j = a cos(2 pi (m.x)), Phi = b e^{2 pi i (m.x)}
SystemState initial_smooth(const Lattice& L, double a, double b, int m1, int m2);
// (1 - Delta)^{-(1+eta)/2} applied to white noise, all components
SystemState initial_gff(const Lattice& L, double eta, std::uint64_t seed);

} // namespace lgt
