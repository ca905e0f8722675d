#pragma once

#include <array>
#include <functional>
#include <vector>

#include "lgt/fields.hpp"

namespace lgt {

using BumpFn = std::function<double(double, double)>;

// Finite family of rescaled test functions phi_x^lambda(y) = lambda^-2 phi((y - x)/lambda):
// base functions supported in the unit ball with C^r norm 1, dyadic scales
// lambda_min * 2^k <= lambda_max, centers on a lambda/2 grid of the unit torus.
struct TestFunctionFamily
{
    int r = 2;
    std::vector<BumpFn> base;
    std::vector<double> scales;

    std::size_t centers_per_side(std::size_t scale) const;
    std::size_t size() const; // number of (scale, base, center) triples
};

struct TestIndex
{
    std::size_t scale = 0, base = 0;
    double x1 = 0, x2 = 0;
};

// sup over |k| <= r of sup |d^k phi|, numerically on a grid of [-1,1]^2
double cr_norm(const BumpFn& phi, int r);
// mother bump and its first-order modulations z_1 rho, z_2 rho, each normalized in C^r
std::vector<BumpFn> default_bumps(int r);
TestFunctionFamily make_family(double lambda_min, int r = 2, double lambda_max = 1.0);

// real field components sampled at lattice points shifted by (o1, o2) eps
struct DiscreteField
{
    Lattice lattice;
    std::vector<Plane> comps;
    std::vector<std::array<double, 2>> offsets;
};
DiscreteField vertex_field(const Lattice& L, const Plane& f);
DiscreteField vertex_field(const Lattice& L, const ScalarField& phi); // re, im
DiscreteField edge_field(const Lattice& L, const GaugeField& A);     // midpoints
DiscreteField state_field(const Lattice& L, const SystemState& s);   // h, v, re, im

// eps^2 sum_y f(y + o eps) phi_x^lambda(y + o eps), periodized over the torus
double discrete_pairing(const Lattice& L, const Plane& f, std::array<double, 2> offset,
                        const BumpFn& phi, double lambda, double x1, double x2);

// all pairings, ordered (scale, base, center) outer, component inner
struct PairingVector
{
    std::size_t ncomp = 0;
    std::vector<double> v;
};
PairingVector pairings(const TestFunctionFamily& fam, const DiscreteField& f);
TestIndex test_index(const TestFunctionFamily& fam, std::size_t triple);

struct HolderReport
{
    double alpha = 0;
    double value = 0;
    double lambda = 0;
    double x1 = 0, x2 = 0;
    std::size_t base = 0, comp = 0;
};
HolderReport holder_norm(const PairingVector& p, double alpha, const TestFunctionFamily& fam);
HolderReport holder_norm(const DiscreteField& f, double alpha, const TestFunctionFamily& fam);
// sup lambda^-alpha |<fine> - <coarse>|
HolderReport cross_scale_distance(const PairingVector& coarse, const PairingVector& fine, double alpha,
                                  const TestFunctionFamily& fam);
HolderReport cross_scale_distance(const DiscreteField& coarse, const DiscreteField& fine, double alpha,
                                  const TestFunctionFamily& fam);

struct SpacetimeReport
{
    double value = 0;
    double instantaneous = 0; // first supremum
    double increments = 0;    // second supremum
};
// sup_t |t|_eps^-eta d_alpha(t) + sup_{s != t} |s,t|_eps^-eta d_{alpha-delta}(t - s) / (|t-s|^1/2 v eps)^delta,
// |t|_eps = (|t|^1/2 ^ 1) v eps, |s,t|_eps = min; only t > 0 enters
SpacetimeReport spacetime_distance(const std::vector<double>& times_a, const std::vector<PairingVector>& a,
                                   const std::vector<double>& times_b, const std::vector<PairingVector>& b,
                                   double alpha, double delta, double eta, double eps,
                                   const TestFunctionFamily& fam);

} // namespace lgt
