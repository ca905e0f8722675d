#pragma once

#include "lgt/fields.hpp"

namespace lgt {

// forward difference along axis j, values on the edges (x, x+e_j)
Plane grad(const Lattice& L, const Plane& f, int j);
GaugeField grad(const Lattice& L, const Plane& f);
// backward difference: (grad_{-j} f)(x) = eps^-1 (f(x-e_j) - f(x))
Plane grad_back(const Lattice& L, const Plane& f, int j);

PlaquetteField curl(const Lattice& L, const GaugeField& A);
Plane div(const Lattice& L, const GaugeField& A);

Plane laplacian(const Lattice& L, const Plane& f);
ScalarField laplacian(const Lattice& L, const ScalarField& phi);

// D_j^A Phi at the edge (x, x + orient*e_j), stored at x
ScalarField cov_deriv(const Lattice& L, const GaugeField& A, const ScalarField& phi,
                      double lambda, int j, int orient = +1);
ScalarField cov_laplacian(const Lattice& L, const GaugeField& A, const ScalarField& phi,
                          double lambda);

GaugeField edge_laplacian(const Lattice& L, const GaugeField& B);
GaugeField grad_div(const Lattice& L, const GaugeField& B);

// zero-mean solution of Delta u = rhs - mean(rhs)
Plane solve_poisson(const Lattice& L, const Plane& rhs);

struct Helmholtz
{
    GaugeField divergence_free; // (-D2^- g, D1^- g) with backward differences D^-
    GaugeField gradient_part;   // grad f
    double c1 = 0, c2 = 0;
    Plane g; // plaquette potential, Delta g = F_A (indexed by south-west vertex)
    Plane f; // vertex potential, Delta f = div A
};
Helmholtz helmholtz(const Lattice& L, const GaugeField& A);

// eps^2-weighted inner products
double inner(const Lattice& L, const Plane& a, const Plane& b);
double inner(const Lattice& L, const GaugeField& a, const GaugeField& b);
cplx inner(const Lattice& L, const ScalarField& a, const ScalarField& b); // sum conj(a) b

double mean(const Plane& p);

} // namespace lgt
