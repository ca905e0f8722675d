#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "lgt/fields.hpp"

namespace lgt {

PlaquetteField curvature(const Lattice& L, const GaugeField& A);

struct WickVariance
{
    double sigma2 = 0; // E|psi|^2, both real components
};
// sigma2 = 2 C2 for psi = K * zeta with unit-variance components
WickVariance wick_variance_from_c2(double c2);

// :|Phi|^{2n}: = sum_k coeff[k] sigma2^k u^{n-k}, u = |Phi|^2 (exact integers)
std::vector<std::int64_t> wick_coefficients(int n);
Plane wick_power(const Lattice& L, const ScalarField& phi, int n, WickVariance var);

// conj(Phi(x)) (D_j^A Phi)(x) on the edge (x, x+e_j)
ScalarField covariant_composite(const Lattice& L, const GaugeField& A, const ScalarField& phi,
                                double lambda, int j);

struct SmoothCurve
{
    std::function<std::array<double, 2>(double)> r; // sigma in [0,1] -> R^2 (unwrapped)
    bool closed = false;
};

struct DiscreteCurve
{
    std::vector<EdgeId> edges;   // directed, consecutive
    std::vector<int> vertices;   // edges.size()+1 entries (last == first if closed)
    std::vector<double> partition; // sigma-length represented by each edge
    bool closed = false;
};

// an explicit lattice path from a start vertex and unit moves (+-1 = +-e1, +-2 = +-e2)
DiscreteCurve lattice_path(const Lattice& L, int start, const std::vector<int>& moves);
DiscreteCurve regular_approximation(const SmoothCurve& c, const Lattice& L);

struct LoopValue
{
    double O = 0;
    cplx O_tilde = 0;
};
LoopValue loop_observable(const Lattice& L, const GaugeField& A, const DiscreteCurve& c);

using TestFn = std::function<double(double, double)>;
cplx string_observable(const Lattice& L, const GaugeField& A, const ScalarField& phi, double lambda,
                       const DiscreteCurve& c, const TestFn& phi1, const TestFn& phi2);

} // namespace lgt
