#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "freelip/errors.hpp"
#include "freelip/scalar.hpp"

namespace freelip {

// A finite pointed metric space: labels, a distinguished base point, and the
// full distance matrix. Everything downstream (maps, molecules, hull tests)
// works against this one type, instantiated with double or Rational entries.
template <class T>
struct MetricSpace {
    std::vector<std::string> labels;
    std::vector<T> dist; // n*n row-major
    std::size_t base = 0;

    std::size_t size() const { return labels.size(); }

    const T& d(std::size_t i, std::size_t j) const { return dist[i * size() + j]; }
    T& d(std::size_t i, std::size_t j) { return dist[i * size() + j]; }
};

using MetricSpaceD = MetricSpace<double>;
using MetricSpaceQ = MetricSpace<Rational>;

struct TriangleReport {
    std::size_t i = 0, j = 0, k = 0;
    double excess = 0; // d(i,k) - d(i,j) - d(j,k), positive means violated
};

// Validation tolerance: absolute 1e-9 on triangle slack for double spaces,
// exact comparison for rational spaces.
inline constexpr double kTriangleTol = 1e-9;

template <class T>
void validate_metric(const MetricSpace<T>& M, double tri_tol = kTriangleTol) {
    const std::size_t n = M.size();
    if (M.dist.size() != n * n) fail(Errc::BadInput, "distance matrix is not n x n");
    if (M.base >= n) fail(Errc::BadBaseIndex, "base index " + std::to_string(M.base));
    for (std::size_t i = 0; i < n; ++i) {
        if (!scalar_traits<T>::is_zero(M.d(i, i), tri_tol))
            fail(Errc::BadInput, "nonzero diagonal at " + std::to_string(i));
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!scalar_traits<T>::is_zero(M.d(i, j) - M.d(j, i), tri_tol))
                fail(Errc::BadInput, "asymmetric entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
            if (M.d(i, j) <= 0)
                fail(Errc::NonPositiveOffDiagonal,
                     "d(" + std::to_string(i) + "," + std::to_string(j) + ") <= 0");
        }
    }
    TriangleReport worst;
    bool violated = false;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            for (std::size_t k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                T excess = M.d(i, k) - M.d(i, j) - M.d(j, k);
                bool bad = scalar_traits<T>::exact ? (excess > 0)
                                                   : (to_double(excess) > tri_tol);
                if (bad) {
                    double e = to_double(excess);
                    if (!violated || e > worst.excess) worst = {i, j, k, e};
                    violated = true;
                }
            }
        }
    if (violated)
        fail(Errc::TriangleViolation,
             "worst triple (" + std::to_string(worst.i) + "," + std::to_string(worst.j) + "," +
                 std::to_string(worst.k) + ") excess " + std::to_string(worst.excess));
}

template <class T>
MetricSpace<T> build_from_matrix(std::vector<std::string> labels, std::vector<T> dist,
                                 std::size_t base, double tri_tol = kTriangleTol) {
    MetricSpace<T> M{std::move(labels), std::move(dist), base};
    validate_metric(M, tri_tol);
    return M;
}

enum class NormP { One, Two, Inf };

inline NormP norm_from_int(int p) {
    if (p == 1) return NormP::One;
    if (p == 2) return NormP::Two;
    fail(Errc::WrongNorm, "p must be 1, 2 or inf");
}

inline double pnorm(const std::vector<double>& v, NormP p) {
    double acc = 0;
    switch (p) {
        case NormP::One:
            for (double x : v) acc += std::fabs(x);
            return acc;
        case NormP::Two:
            for (double x : v) acc += x * x;
            return std::sqrt(acc);
        case NormP::Inf:
            for (double x : v) acc = std::max(acc, std::fabs(x));
            return acc;
    }
    return acc;
}

// l2 needs square roots, so the rational overload supports l1 and linf only.
inline Rational pnorm(const std::vector<Rational>& v, NormP p) {
    Rational acc = 0;
    switch (p) {
        case NormP::One:
            for (const Rational& x : v) acc += abs_val(x);
            return acc;
        case NormP::Inf:
            for (const Rational& x : v) acc = std::max(acc, abs_val(x));
            return acc;
        case NormP::Two:
            fail(Errc::WrongNorm, "exact mode supports p in {1, inf} only");
    }
    return acc;
}

template <class T>
MetricSpace<T> build_normed_subset(const std::vector<std::vector<T>>& points, NormP p,
                                   std::size_t base, std::vector<std::string> labels = {}) {
    const std::size_t n = points.size();
    if (n == 0) fail(Errc::TooFewPoints, "empty point set");
    if (base >= n) fail(Errc::BadBaseIndex, "base index " + std::to_string(base));
    const std::size_t dim = points[0].size();
    for (const auto& pt : points)
        if (pt.size() != dim) fail(Errc::BadInput, "points of mixed dimension");
    if (labels.empty()) {
        labels.reserve(n);
        for (std::size_t i = 0; i < n; ++i) labels.push_back("p" + std::to_string(i));
    }
    MetricSpace<T> M{std::move(labels), std::vector<T>(n * n, T(0)), base};
    std::vector<T> diff(dim);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            for (std::size_t c = 0; c < dim; ++c) diff[c] = points[i][c] - points[j][c];
            T dd = pnorm(diff, p);
            if (dd == 0)
                fail(Errc::DuplicatePoint,
                     "points " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
            M.d(i, j) = dd;
            M.d(j, i) = dd;
        }
    return M;
}

// Chordal metric pulled back from the unit circle: d(x, y) = |e^{ix} - e^{iy}|.
// Evaluated as 2 sin(|x - y| / 2), which is exact for the same quantity and
// avoids cancellation near zero.
inline double chord(double t) { return 2.0 * std::sin(0.5 * std::fabs(t)); }

// Samples live in [0,1] (arc-length parameters); base is the smallest sample.
inline MetricSpaceD build_chordal_interval(std::vector<double> samples) {
    if (samples.size() < 2) fail(Errc::TooFewPoints, "need at least 2 samples");
    std::sort(samples.begin(), samples.end());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i] < 0.0 || samples[i] > 1.0)
            fail(Errc::OutOfRange, "sample " + std::to_string(samples[i]) + " outside [0,1]");
        if (i > 0 && samples[i] == samples[i - 1])
            fail(Errc::DuplicatePoint, "duplicate sample " + std::to_string(samples[i]));
    }
    const std::size_t n = samples.size();
    std::vector<std::string> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = "t" + std::to_string(i);
    MetricSpaceD M{std::move(labels), std::vector<double>(n * n, 0.0), 0};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double dd = chord(samples[i] - samples[j]);
            M.d(i, j) = dd;
            M.d(j, i) = dd;
        }
    return M;
}

// Full-circle variant: samples are angles in [0, 2pi).
inline MetricSpaceD build_chordal_circle(std::vector<double> angles, std::size_t base = 0) {
    if (angles.size() < 2) fail(Errc::TooFewPoints, "need at least 2 samples");
    if (base >= angles.size()) fail(Errc::BadBaseIndex, "base index " + std::to_string(base));
    const double two_pi = 2.0 * std::acos(-1.0);
    std::sort(angles.begin(), angles.end());
    for (std::size_t i = 0; i < angles.size(); ++i) {
        if (angles[i] < 0.0 || angles[i] >= two_pi)
            fail(Errc::OutOfRange, "angle " + std::to_string(angles[i]) + " outside [0,2pi)");
        if (i > 0 && angles[i] == angles[i - 1])
            fail(Errc::DuplicatePoint, "duplicate angle " + std::to_string(angles[i]));
    }
    const std::size_t n = angles.size();
    std::vector<std::string> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = "a" + std::to_string(i);
    MetricSpaceD M{std::move(labels), std::vector<double>(n * n, 0.0), base};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double dd = chord(angles[i] - angles[j]);
            M.d(i, j) = dd;
            M.d(j, i) = dd;
        }
    return M;
}

// d^theta is again a metric for 0 < theta <= 1 (subadditivity of t^theta).
inline MetricSpaceD snowflake(const MetricSpaceD& M, double theta) {
    if (!(theta > 0.0 && theta <= 1.0)) fail(Errc::ThetaOutOfRange, "theta must lie in (0,1]");
    MetricSpaceD S = M;
    for (double& v : S.dist)
        if (v != 0.0) v = std::pow(v, theta);
    return S;
}

// Coproduct glues the two base points; cross distances go through the glue:
// d(a, b) = d1(a, base1) + d2(base2, b).
template <class T>
MetricSpace<T> coproduct(const MetricSpace<T>& A, const MetricSpace<T>& B) {
    const std::size_t na = A.size();
    const std::size_t nb = B.size();
    std::vector<std::size_t> bkeep; // B indices that survive (all but B.base)
    bkeep.reserve(nb - 1);
    for (std::size_t j = 0; j < nb; ++j)
        if (j != B.base) bkeep.push_back(j);

    std::vector<std::string> labels = A.labels;
    for (std::size_t j : bkeep) {
        std::string lab = B.labels[j];
        while (std::find(labels.begin(), labels.end(), lab) != labels.end()) lab += "'";
        labels.push_back(lab);
    }
    const std::size_t n = na + bkeep.size();
    MetricSpace<T> M{std::move(labels), std::vector<T>(n * n, T(0)), A.base};
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < na; ++j) M.d(i, j) = A.d(i, j);
    for (std::size_t bi = 0; bi < bkeep.size(); ++bi) {
        for (std::size_t bj = 0; bj < bkeep.size(); ++bj)
            M.d(na + bi, na + bj) = B.d(bkeep[bi], bkeep[bj]);
        for (std::size_t i = 0; i < na; ++i) {
            T cross = A.d(i, A.base) + B.d(B.base, bkeep[bi]);
            M.d(i, na + bi) = cross;
            M.d(na + bi, i) = cross;
        }
    }
    return M;
}

// ---- dyadic grid over [0,1] x {levels 1/2^n}  -------------------------------
//
// Level n holds the 2^n + 1 points (k/2^n, 1/2^n); the space of depth N is the
// union of levels 0..N, based at (0, 1) = level 0, column 0.

struct GridPoint {
    unsigned n = 0;
    unsigned long long k = 0;
    bool operator==(const GridPoint&) const = default;
};

inline std::size_t grid_level_size(unsigned n) { return (1ull << n) + 1; }

inline std::size_t grid_point_count(unsigned depth) {
    return (2ull << depth) + depth; // sum over n<=depth of 2^n + 1
}

inline std::size_t grid_index(const GridPoint& p) {
    return ((1ull << p.n) - 1) + p.n + static_cast<std::size_t>(p.k);
}

inline GridPoint grid_point_at(std::size_t idx) {
    unsigned n = 0;
    std::size_t offset = 0;
    while (idx >= offset + grid_level_size(n)) {
        offset += grid_level_size(n);
        ++n;
    }
    return GridPoint{n, idx - offset};
}

inline std::string grid_label(const GridPoint& p) {
    return "(" + std::to_string(p.n) + "," + std::to_string(p.k) + ")";
}

template <class T>
MetricSpace<T> build_grid_space(int p, unsigned depth) {
    if (p != 1 && p != 2) fail(Errc::WrongNorm, "grid space supports p in {1,2}");
    if (p == 2 && scalar_traits<T>::exact)
        fail(Errc::WrongNorm, "exact mode supports the grid for p = 1 only");
    const std::size_t n = grid_point_count(depth);
    std::vector<std::string> labels(n);
    std::vector<std::vector<T>> coords(n, std::vector<T>(2));
    for (std::size_t i = 0; i < n; ++i) {
        GridPoint gp = grid_point_at(i);
        labels[i] = grid_label(gp);
        if constexpr (scalar_traits<T>::exact) {
            coords[i][0] = dyadic(static_cast<long long>(gp.k), gp.n);
            coords[i][1] = dyadic(1, gp.n);
        } else {
            coords[i][0] = std::ldexp(static_cast<double>(gp.k), -static_cast<int>(gp.n));
            coords[i][1] = std::ldexp(1.0, -static_cast<int>(gp.n));
        }
    }
    return build_normed_subset<T>(coords, p == 1 ? NormP::One : NormP::Two,
                                  grid_index(GridPoint{0, 0}), std::move(labels));
}

} // namespace freelip
