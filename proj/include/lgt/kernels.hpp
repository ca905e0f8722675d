#pragma once

#include <array>
#include <complex>
#include <ostream>
#include <string>
#include <vector>

#include "lgt/dynamics.hpp"
#include "lgt/fields.hpp"

namespace lgt {

// 5-point symbol mu_k = eps^-2 sum_j (2 - 2 cos(k_j eps)), per flat mode index
std::vector<double> laplacian_symbol(const Lattice& L);

// one-dimensional kernel p(t, m), m = 0..side-1; P(t, x) = p(t, x1) p(t, x2)
std::vector<double> heat_kernel_1d(const Lattice& L, double t);
// transition probabilities P(t, x) indexed by displacement x
Plane heat_kernel(const Lattice& L, double t);

struct HeatKernel
{
    Lattice lattice;
    std::vector<double> t;
    std::vector<Plane> P;
};
HeatKernel heat_kernel(const Lattice& L, const std::vector<double>& t_grid);

// smooth plateau: 1 on [0, 1/4], 0 on [1/2, inf)
double cutoff(double u);
// smooth parabolic norm (t^2 + |x|^4)^{1/4}
double parabolic_norm(double t, double x1, double x2);
// chi(||(t,x)||_s) P(t,x), x taken as the representative in [-1/2, 1/2)^2
Plane truncated_kernel(const Lattice& L, double t);

struct TruncatedKernel
{
    Lattice lattice;
    Plane operator()(double t) const { return truncated_kernel(lattice, t); }
};
TruncatedKernel truncated_kernel(const Lattice& L);

// Decoration of a kernel leg: 0 none, +j forward difference, -j backward.
// Triangle graphs are T(a, b, c) = int int sum_k conj(b^(s1+s3)) a^(s1) c^(s3)
// with a the left leg, b the right leg and c the top arrow.
struct TriangleTable
{
    Lattice lattice{1};
    std::vector<double> W; // accumulated mode weights, flat mode index
    double triangle(int a, int b, int c) const;
};

struct RenormConstants
{
    int n = 0;
    double eps = 0;
    double lambda = 0;
    double c2 = 0;
    // index k: 0 -> +1, 1 -> +2, 2 -> -1, 3 -> -2
    std::array<std::array<double, 4>, 2> c3{}, c4{};
    std::array<double, 2> c3_neg{}; // C_{3,-k}^{k}
    std::array<double, 2> c1{};     // for j = 1, 2
    double c_mass = 0;
    double tol_c2 = 0, tol_triangle = 0, tol_mass = 0; // achieved (order comparison)
    TriangleTable table;
};

struct QuadratureOptions
{
    int order = 10;
    int refine_order = 14; // second order for the achieved-tolerance estimate
    double h0_factor = 1.0 / 16.0; // first panel [0, h0_factor * eps^2]
};

RenormConstants renorm_constants(const Lattice& L, double lambda, const QuadratureOptions& q = {});
// c_eps from the mode: zero, computed (cached per (n, lambda)) or explicit
double resolve_c_eps(const Lattice& L, const SimConfig& cfg);

void write_renorm_table(std::ostream& os, const std::vector<RenormConstants>& rows);

// Gaussian-field vector field of the Ward identity on the unit torus,
// free fields started at -T_back from zero, evaluated at t = 0 with x = origin
struct WardField
{
    GaugeField V;
    Plane U;
    double tail_bound = 0;
};
WardField ward_vector_field(const Lattice& L, double T_back, int gl_order = 20);
Plane ward_residual(const Lattice& L, const WardField& w, double sign_U);

// |2 sum_x sum_j int dt grad_j P(t+s, x+y) grad_j P(t+s', x+y') - (P(|s-s'|, y-y') - 1/N)|
struct IdentityResidual
{
    double residual = 0;
    double tail_bound = 0;
};
IdentityResidual heat_kernel_identity_residual(const Lattice& L, double s, double s_prime, int y,
                                               int y_prime);

// Gauss-Legendre nodes/weights on [-1, 1]
void gauss_legendre(int order, std::vector<double>& x, std::vector<double>& w);

} // namespace lgt
