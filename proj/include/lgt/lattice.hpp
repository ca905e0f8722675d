#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

namespace lgt {

// Directed edge: base vertex, axis (1 or 2), orientation (+1 from base to
// base+e_axis, -1 the reverse).  The undirected edge is (base, axis).
struct EdgeId
{
    int base;
    int dir;
    int orient = +1;

    bool operator==(const EdgeId&) const = default;
};

struct PlaquetteId
{
    int sw;
};

// Point on the half-integer grid (units of eps/2); vertices have even
// coordinates, edge midpoints one odd coordinate.
struct HalfPoint
{
    int hx;
    int hy;
};

// Local stencil around an undirected edge.  For a horizontal edge n/s are the
// parallel neighbours above/below and e/w the end-to-end ones; for a vertical
// edge e/w are parallel and n/s end-to-end.  p_a/p_b are the plaquettes
// entering the curl part of the drift: (p^S, p^N) for horizontal edges,
// (p^E, p^W) for vertical ones.
struct EdgeStencil
{
    EdgeId n, s, e, w;
    PlaquetteId p_a, p_b;
};

class Lattice
{
public:
    explicit Lattice(int n);

    int n() const { return n_; }
    int side() const { return side_; }
    int mask() const { return mask_; }
    double eps() const { return eps_; }
    int vertices() const { return side_ * side_; }
    int edges() const { return 2 * side_ * side_; }
    int plaquettes() const { return side_ * side_; }

    int index(int x, int y) const { return ((y & mask_) << n_) | (x & mask_); }
    int x_of(int i) const { return i & mask_; }
    int y_of(int i) const { return i >> n_; }
    int shift(int i, int dx, int dy) const { return index(x_of(i) + dx, y_of(i) + dy); }
    // neighbour along axis j (1 or 2), step +1 or -1
    int step(int i, int j, int s) const { return j == 1 ? shift(i, s, 0) : shift(i, 0, s); }

    // end points of a directed edge
    int tail(EdgeId e) const { return e.orient > 0 ? e.base : step(e.base, e.dir, 1); }
    int head(EdgeId e) const { return e.orient > 0 ? step(e.base, e.dir, 1) : e.base; }

    // counter-clockwise boundary walk: east (up), north (leftward),
    // west (down), south (rightward)
    std::array<EdgeId, 4> plaquette_edges(PlaquetteId p) const;
    EdgeStencil edge_neighborhood(EdgeId e) const;

    HalfPoint vertex_point(int i) const { return {2 * x_of(i), 2 * y_of(i)}; }
    HalfPoint midpoint(EdgeId e) const;
    // coordinate in [0,1) of a half-grid point
    double coord(int h) const { return ((h % (2 * side_)) + 2 * side_) % (2 * side_) * 0.5 * eps_; }

    bool operator==(const Lattice& o) const { return n_ == o.n_; }

private:
    int n_;
    int side_;
    int mask_;
    double eps_;
};

} // namespace lgt
