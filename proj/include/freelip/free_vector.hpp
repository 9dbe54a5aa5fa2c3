#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "freelip/errors.hpp"
#include "freelip/metric_space.hpp"

namespace freelip {

// Coordinates of an element of the free space over M in the delta basis.
// The base point's coordinate is identically zero and is omitted, so the
// dimension is |M| - 1.
template <class T>
struct FreeVector {
    std::vector<T> c;

    std::size_t dim() const { return c.size(); }
};

using PointPair = std::pair<std::size_t, std::size_t>;

template <class T>
inline std::size_t coord_of_point(const MetricSpace<T>& M, std::size_t i) {
    if (i == M.base) fail(Errc::BadInput, "base point has no free coordinate");
    return i < M.base ? i : i - 1;
}

template <class T>
inline std::size_t point_of_coord(const MetricSpace<T>& M, std::size_t c) {
    return c < M.base ? c : c + 1;
}

template <class T>
inline FreeVector<T> molecule_vector(const MetricSpace<T>& M, std::size_t x, std::size_t y) {
    if (x >= M.size() || y >= M.size()) fail(Errc::OutOfRange, "point index");
    if (x == y) fail(Errc::NotDistinct, "molecule endpoints coincide");
    FreeVector<T> v;
    v.c.assign(M.size() - 1, T(0));
    T invd = T(1) / M.d(x, y);
    if (x != M.base) v.c[coord_of_point(M, x)] = invd;
    if (y != M.base) v.c[coord_of_point(M, y)] = -invd;
    return v;
}

// Pairing <f, v> for a scalar Lipschitz map f and v = sum_x v_x delta(x).
template <class T, class Map>
inline T pair_with_map(const MetricSpace<T>& M, const Map& f, const FreeVector<T>& v) {
    T acc(0);
    for (std::size_t c = 0; c < v.c.size(); ++c)
        if (v.c[c] != 0) acc += v.c[c] * f.at(point_of_coord(M, c));
    return acc;
}

} // namespace freelip
