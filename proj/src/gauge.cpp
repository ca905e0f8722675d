#include "lgt/gauge.hpp"

#include <cmath>
#include <tuple>

#include "lgt/calculus.hpp"

namespace lgt {

std::pair<GaugeField, ScalarField> apply_gauge(const Lattice& L, const GaugeField& A,
                                               const ScalarField& phi, const Plane& f,
                                               double lambda)
{
    require(L, f);
    GaugeField At = A + grad(L, f);
    ScalarField pt(L);
    for (int x = 0; x < L.vertices(); ++x)
        pt.set(x, std::polar(1.0, lambda * f[x]) * phi[x]);
    return {std::move(At), std::move(pt)};
}

std::optional<Plane> gauge_equivalent(const Lattice& L, const GaugeField& A,
                                      const ScalarField& phi, const GaugeField& B,
                                      const ScalarField& psi, double lambda, double tol)
{
    require(L, A);
    require(L, B);
    require(L, phi);
    require(L, psi);
    Plane f = solve_poisson(L, div(L, B - A));
    double c = -f[0];
    if (lambda != 0.0) {
        cplx z = 0;
        for (int x = 0; x < L.vertices(); ++x)
            z += phi[x] * std::conj(std::polar(1.0, -lambda * f[x]) * psi[x]);
        if (std::abs(z) > 0) {
            c = -std::arg(z) / lambda;
            double period = 2 * M_PI / std::abs(lambda);
            double f0 = f[0] + c;
            f0 -= period * std::ceil(f0 / period - 0.5);
            c = f0 - f[0];
        }
    }
    for (double& v : f)
        v += c;

    GaugeField Bf = B - grad(L, f);
    if (max_abs(Bf - A) > tol)
        return std::nullopt;
    for (int x = 0; x < L.vertices(); ++x)
        if (std::abs(std::polar(1.0, -lambda * f[x]) * psi[x] - phi[x]) > tol)
            return std::nullopt;
    return f;
}

std::pair<GaugeField, ScalarField> deturck_reconstruct(const Lattice& L, const GaugeField& B,
                                                       const ScalarField& psi, const Plane& acc,
                                                       double lambda)
{
    require(L, acc);
    GaugeField A = B - grad(L, acc);
    ScalarField phi(L);
    for (int x = 0; x < L.vertices(); ++x)
        phi.set(x, std::polar(1.0, -lambda * acc[x]) * psi[x]);
    return {std::move(A), std::move(phi)};
}

std::vector<SystemState> deturck_reconstruct(const Lattice& L,
                                             const std::vector<SystemState>& traj, double lambda)
{
    std::vector<SystemState> out;
    out.reserve(traj.size());
    for (const auto& s : traj) {
        if (s.phase.size() != static_cast<std::size_t>(L.vertices()))
            throw std::invalid_argument("phase/step misalignment in DeTurck reconstruction");
        SystemState r;
        std::tie(r.gauge, r.scalar) = deturck_reconstruct(L, s.gauge, s.scalar, s.phase, lambda);
        r.phase = Plane(L.vertices(), 0.0);
        r.t = s.t;
        r.step = s.step;
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace lgt
