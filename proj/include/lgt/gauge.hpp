#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "lgt/fields.hpp"

namespace lgt {

// A -> A + grad f, Phi -> e^{i lambda f} Phi
std::pair<GaugeField, ScalarField> apply_gauge(const Lattice& L, const GaugeField& A,
                                               const ScalarField& phi, const Plane& f,
                                               double lambda);

// f with A = B - grad f and Phi = e^{-i lambda f} Psi, if it exists within tol.
// The additive constant is fixed by the scalar relation modulo 2 pi / lambda;
// the representative has f(origin) in (-pi/lambda, pi/lambda] (f(origin) = 0
// when lambda = 0).
std::optional<Plane> gauge_equivalent(const Lattice& L, const GaugeField& A,
                                      const ScalarField& phi, const GaugeField& B,
                                      const ScalarField& psi, double lambda, double tol);

// A = B - grad(acc), Phi = e^{-i lambda acc} Psi
std::pair<GaugeField, ScalarField> deturck_reconstruct(const Lattice& L, const GaugeField& B,
                                                       const ScalarField& psi, const Plane& acc,
                                                       double lambda);
std::vector<SystemState> deturck_reconstruct(const Lattice& L,
                                             const std::vector<SystemState>& traj, double lambda);

} // namespace lgt
