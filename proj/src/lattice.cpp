#include "lgt/lattice.hpp"

#include <string>

namespace lgt {

Lattice::Lattice(int n) : n_(n)
{
    if (n < 1 || n > 14)
        throw std::invalid_argument("lattice level n=" + std::to_string(n) + " outside [1,14]");
    side_ = 1 << n;
    mask_ = side_ - 1;
    eps_ = 1.0 / side_;
}

std::array<EdgeId, 4> Lattice::plaquette_edges(PlaquetteId p) const
{
    int x = p.sw;
    return {EdgeId{shift(x, 1, 0), 2, +1},
            EdgeId{shift(x, 0, 1), 1, -1},
            EdgeId{x, 2, -1},
            EdgeId{x, 1, +1}};
}

EdgeStencil Lattice::edge_neighborhood(EdgeId e) const
{
    int x = e.base;
    int d = e.dir;
    EdgeStencil st{EdgeId{shift(x, 0, 1), d}, EdgeId{shift(x, 0, -1), d},
                   EdgeId{shift(x, 1, 0), d}, EdgeId{shift(x, -1, 0), d},
                   PlaquetteId{0}, PlaquetteId{0}};
    if (d == 1) {
        st.p_a = PlaquetteId{shift(x, 0, -1)};
        st.p_b = PlaquetteId{x};
    } else {
        st.p_a = PlaquetteId{x};
        st.p_b = PlaquetteId{shift(x, -1, 0)};
    }
    return st;
}

HalfPoint Lattice::midpoint(EdgeId e) const
{
    HalfPoint p = vertex_point(e.base);
    if (e.dir == 1)
        p.hx += 1;
    else
        p.hy += 1;
    return p;
}

} // namespace lgt
