#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "freelip/errors.hpp"
#include "freelip/free_vector.hpp"
#include "freelip/lipschitz_map.hpp"
#include "freelip/metric_space.hpp"
#include "freelip/simplex.hpp"

namespace freelip {

// Convex-hull membership, ball-equals-hull scans, norming tests, and
// exposing functionals on the unit ball of the free space over M.

template <class T>
struct HullCertificate {
    bool inside = false;
    // generator index -> weight; nonzero entries only.
    std::vector<std::pair<std::size_t, T>> weights;
    // When outside: functional w (max-abs normalized) with
    // w.v > max_j w.g_j; gap is that difference.
    std::vector<T> separator;
    T gap{};
};

namespace detail {

template <class T>
inline T dot(const std::vector<T>& a, const std::vector<T>& b) {
    T acc(0);
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0 && b[i] != 0) acc += a[i] * b[i];
    return acc;
}

template <class T>
inline double cert_tol(double tol) {
    if constexpr (scalar_traits<T>::exact)
        return 0.0;
    else
        return tol;
}

// Checks a solver answer against the raw data; certificates make warm
// restarts safe. Returns false when the answer does not verify.
template <class T>
inline bool verify_hull(const std::vector<T>& v, const std::vector<std::vector<T>>& gens,
                        HullCertificate<T>& cert, double tol) {
    const double eps = cert_tol<T>(tol);
    if (cert.inside) {
        std::vector<T> rec(v.size(), T(0));
        T mass(0);
        for (const auto& [j, w] : cert.weights) {
            if (j >= gens.size()) return false;
            if constexpr (scalar_traits<T>::exact) {
                if (w < 0) return false;
            } else {
                if (to_double(w) < -eps) return false;
            }
            mass += w;
            for (std::size_t i = 0; i < v.size(); ++i)
                if (gens[j][i] != 0) rec[i] += w * gens[j][i];
        }
        if constexpr (scalar_traits<T>::exact) {
            if (mass != 1) return false;
            for (std::size_t i = 0; i < v.size(); ++i)
                if (rec[i] != v[i]) return false;
        } else {
            double scale = 1.0;
            for (const auto& x : v) scale = std::max(scale, std::abs(to_double(x)));
            if (std::abs(to_double(mass) - 1.0) > eps) return false;
            for (std::size_t i = 0; i < v.size(); ++i)
                if (std::abs(to_double(rec[i]) - to_double(v[i])) > eps * scale) return false;
        }
        return true;
    }
    if (cert.separator.size() != v.size()) return false;
    T fv = dot(cert.separator, v);
    bool first = true;
    T fg_max(0);
    for (const auto& g : gens) {
        T fg = dot(cert.separator, g);
        if (first || fg > fg_max) fg_max = fg;
        first = false;
    }
    cert.gap = fv - fg_max;
    if constexpr (scalar_traits<T>::exact)
        return cert.gap > 0;
    else
        return to_double(cert.gap) > eps;
}

template <class T>
inline HullCertificate<T> hull_from_result(const FeasibilityResult<T>& res,
                                           std::size_t dim) {
    HullCertificate<T> cert;
    if (res.feasible) {
        cert.inside = true;
        cert.weights = res.coeffs;
    } else {
        cert.inside = false;
        // Drop the convexity-row multiplier: separation holds without the
        // offset because all weights sum to one.
        cert.separator.assign(res.farkas.begin(), res.farkas.begin() + dim);
        T big(0);
        for (const auto& x : cert.separator) {
            T a = abs_val(x);
            if (a > big) big = a;
        }
        if (big != 0)
            for (auto& x : cert.separator) x /= big;
    }
    return cert;
}

} // namespace detail

// Feasibility of v in conv(generators). The certificate (weights or
// separating functional) is re-verified against the inputs before return.
template <class T>
inline HullCertificate<T> in_convex_hull(const FreeVector<T>& v,
                                         const std::vector<FreeVector<T>>& generators,
                                         double tol = 1e-9) {
    if (generators.empty()) fail(Errc::BadInput, "no generators");
    const std::size_t dim = v.dim();
    std::vector<std::vector<T>> gens;
    gens.reserve(generators.size());
    for (const auto& g : generators) {
        if (g.dim() != dim) fail(Errc::BadInput, "generator dimension mismatch");
        gens.push_back(g.c);
    }
    FeasibilitySolver<T> solver(dim + 1);
    for (const auto& g : gens) {
        SparseCol<T> col;
        for (std::size_t i = 0; i < dim; ++i)
            if (g[i] != 0) col.emplace_back(i, g[i]);
        col.emplace_back(dim, T(1));
        solver.add_column(std::move(col));
    }
    std::vector<T> b(v.c);
    b.push_back(T(1));
    auto res = solver.solve(b);
    auto cert = detail::hull_from_result(res, dim);
    if (!detail::verify_hull(v.c, gens, cert, tol))
        fail(Errc::SolverFailure, "hull certificate did not verify");
    return cert;
}

template <class T>
struct BallHullReport {
    bool equal = false;
    std::size_t classes_checked = 0;
    std::optional<PointPair> violator;
    HullCertificate<T> violator_certificate; // separator when a violator exists
};

// Checks every molecule sign-class of M against conv(+-Gamma), stopping at
// the first violator (lexicographic scan). One solver instance is kept warm
// across molecules; certificates are verified per molecule.
template <class T>
inline BallHullReport<T> ball_equals_hull(const MetricSpace<T>& M,
                                          const std::vector<PointPair>& gamma,
                                          double tol = 1e-9) {
    if (gamma.empty()) fail(Errc::BadInput, "empty generator family");
    const std::size_t n = M.size();
    const std::size_t dim = n - 1;
    std::vector<std::vector<T>> gens;
    gens.reserve(2 * gamma.size());
    for (const auto& [x, y] : gamma) {
        auto mv = molecule_vector(M, x, y);
        gens.push_back(mv.c);
        std::vector<T> neg(mv.c);
        for (auto& t : neg) t = -t;
        gens.push_back(std::move(neg));
    }
    FeasibilitySolver<T> solver(dim + 1);
    for (const auto& g : gens) {
        SparseCol<T> col;
        for (std::size_t i = 0; i < dim; ++i)
            if (g[i] != 0) col.emplace_back(i, g[i]);
        col.emplace_back(dim, T(1));
        solver.add_column(std::move(col));
    }

    auto class_generator_index = [&](std::size_t x, std::size_t y) -> std::optional<std::size_t> {
        for (std::size_t k = 0; k < gamma.size(); ++k) {
            auto [a, b] = gamma[k];
            if ((a == x && b == y) || (a == y && b == x)) return 2 * k + (a == x ? 0 : 1);
        }
        return std::nullopt;
    };

    BallHullReport<T> report;
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = x + 1; y < n; ++y) {
            ++report.classes_checked;
            auto mv = molecule_vector(M, x, y);
            HullCertificate<T> cert;
            if (auto k = class_generator_index(x, y)) {
                cert.inside = true;
                cert.weights.emplace_back(*k, T(1));
            } else {
                std::vector<T> b(mv.c);
                b.push_back(T(1));
                auto res = solver.solve(b);
                cert = detail::hull_from_result(res, dim);
            }
            if (!detail::verify_hull(mv.c, gens, cert, tol))
                fail(Errc::SolverFailure, "hull certificate did not verify");
            if (!cert.inside) {
                report.equal = false;
                report.violator = PointPair{x, y};
                report.violator_certificate = std::move(cert);
                return report;
            }
        }
    }
    report.equal = true;
    return report;
}

template <class T>
struct NormingReport {
    bool norming = false;
    T norm{};
    T sup_gamma{};
    std::optional<PointPair> attaining; // class where the sup is reached
};

// Whether sup over Gamma of |f(m)| equals the Lipschitz norm of f.
template <class T>
inline NormingReport<T> norming_test(const LipschitzMap<T>& f,
                                     const std::vector<PointPair>& gamma,
                                     double tol = 1e-9) {
    if (gamma.empty()) fail(Errc::BadInput, "empty test family");
    NormingReport<T> report;
    report.norm = lip_norm(f).norm;
    bool first = true;
    for (const auto& [x, y] : gamma) {
        T v = molecule_value_norm(f, x, y);
        if (first || v > report.sup_gamma) {
            report.sup_gamma = v;
            report.attaining = PointPair{x, y};
        }
        first = false;
    }
    if constexpr (scalar_traits<T>::exact) {
        report.norming = (report.sup_gamma == report.norm);
    } else {
        double scale = std::max(1.0, to_double(report.norm));
        report.norming =
            std::abs(to_double(report.sup_gamma) - to_double(report.norm)) <= tol * scale;
    }
    return report;
}

template <class T>
struct ExposingFunctional {
    LipschitzMap<T> h;
    T gamma{};
    bool exposes = false; // gamma > 0
};

// Maximizes gamma subject to h(m_{x,y}) = 1, |h(m')| <= 1 - gamma for every
// other sign-class, Lip(h) <= 1, 0 <= gamma <= 1. Solved through the dual so
// the basis stays |M|-sized; the optimal multipliers ARE the primal (h, gamma),
// which is then verified directly against the constraints.
template <class T>
inline ExposingFunctional<T> exposing_functional(const MetricSpace<T>& M, std::size_t x,
                                                 std::size_t y) {
    const std::size_t n = M.size();
    if (x >= n || y >= n) fail(Errc::OutOfRange, "point index");
    if (x == y) fail(Errc::NotDistinct, "molecule endpoints coincide");
    const std::size_t rows = n;          // one per non-base h value, plus gamma
    const std::size_t grow = n - 1;      // gamma row index
    auto hrow = [&](std::size_t p) { return coord_of_point(M, p); };

    std::vector<std::vector<T>> cols;
    std::vector<T> costs;
    auto add_col = [&](const std::vector<T>& col, const T& cost) {
        cols.push_back(col);
        costs.push_back(cost);
    };
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = u + 1; v < n; ++v) {
            for (int s : {1, -1}) {
                std::vector<T> col(rows, T(0));
                if (u != M.base) col[hrow(u)] += T(s);
                if (v != M.base) col[hrow(v)] -= T(s);
                add_col(col, M.d(u, v));
            }
        }
    }
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            if ((p == x && q == y) || (p == y && q == x)) continue;
            T invd = T(1) / M.d(p, q);
            for (int s : {1, -1}) {
                std::vector<T> col(rows, T(0));
                if (p != M.base) col[hrow(p)] += T(s) * invd;
                if (q != M.base) col[hrow(q)] -= T(s) * invd;
                col[grow] = T(1);
                add_col(col, T(1));
            }
        }
    }
    {
        std::vector<T> cap(rows, T(0));
        cap[grow] = T(1);
        add_col(cap, T(1));
    }
    for (int s : {1, -1}) {
        std::vector<T> col(rows, T(0));
        if (x != M.base) col[hrow(x)] += T(s);
        if (y != M.base) col[hrow(y)] -= T(s);
        add_col(col, T(s) * M.d(x, y));
    }
    {
        std::vector<T> sur(rows, T(0));
        sur[grow] = T(-1);
        add_col(sur, T(0));
    }
    std::vector<T> b(rows, T(0));
    b[grow] = T(1);

    auto lp = DenseSimplex<T>::solve(rows, cols, costs, b);
    if (lp.status != LpStatus::Optimal) fail(Errc::SolverFailure, "exposing LP not optimal");

    ExposingFunctional<T> out;
    std::vector<T> values(n, T(0));
    for (std::size_t p = 0; p < n; ++p)
        if (p != M.base) values[p] = lp.y[hrow(p)];
    out.h = LipschitzMap<T>::scalar(M, std::move(values));
    out.gamma = lp.y[grow];

    // Independent verification of optimality-by-construction.
    const double eps = detail::cert_tol<T>(1e-7);
    T hm = evaluate_molecule(out.h, x, y)[0];
    T lip = lip_norm(out.h).norm;
    T max_other(0);
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = p + 1; q < n; ++q) {
            if ((p == x && q == y) || (p == y && q == x)) continue;
            T v = molecule_value_norm(out.h, p, q);
            if (v > max_other) max_other = v;
        }
    T gamma_re = T(1) - max_other;
    if (gamma_re > lp.value) gamma_re = lp.value; // gamma <= LP optimum always
    bool ok;
    if constexpr (scalar_traits<T>::exact) {
        ok = (hm == 1) && !(lip > 1) && (out.gamma == lp.value) && (gamma_re == out.gamma);
    } else {
        ok = std::abs(to_double(hm) - 1.0) <= eps && to_double(lip) <= 1.0 + eps &&
             std::abs(to_double(out.gamma) - to_double(lp.value)) <= eps &&
             std::abs(to_double(gamma_re) - to_double(out.gamma)) <= eps;
    }
    if (!ok) fail(Errc::SolverFailure, "exposing functional did not verify");
    if constexpr (scalar_traits<T>::exact)
        out.exposes = out.gamma > 0;
    else
        out.exposes = to_double(out.gamma) > 1e-9;
    return out;
}

} // namespace freelip
