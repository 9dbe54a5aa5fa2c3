#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "freelip/errors.hpp"
#include "freelip/metric_space.hpp"
#include "freelip/scalar.hpp"

namespace freelip {

// Relative tolerance used to decide "attains the norm" in double mode; exact
// equality is used in rational mode.
inline constexpr double kAttainTol = 1e-12;

// A map M -> R^dim vanishing at the base point, with a chosen target norm.
// The constructor shifts all values by the base value so the vanishing
// invariant always holds; the Lipschitz constant is unaffected.
template <class T>
struct LipschitzMap {
    const MetricSpace<T>* space = nullptr;
    std::size_t dim = 1;
    NormP target = NormP::One;
    std::vector<T> values; // size() * dim, row-major

    LipschitzMap() = default;
    LipschitzMap(const MetricSpace<T>& M, std::size_t d, NormP tp, std::vector<T> vals)
        : space(&M), dim(d), target(tp), values(std::move(vals)) {
        if (dim == 0) fail(Errc::BadInput, "target dimension 0");
        if (values.size() != M.size() * dim)
            fail(Errc::BadInput, "value table size mismatch");
        for (std::size_t c = 0; c < dim; ++c) {
            T b = values[M.base * dim + c];
            if (b != 0)
                for (std::size_t i = 0; i < M.size(); ++i) values[i * dim + c] -= b;
        }
    }

    const T& at(std::size_t point, std::size_t coord = 0) const {
        return values[point * dim + coord];
    }

    static LipschitzMap scalar(const MetricSpace<T>& M, std::vector<T> vals) {
        return LipschitzMap(M, 1, NormP::One, std::move(vals));
    }
};

using LipschitzMapD = LipschitzMap<double>;
using LipschitzMapQ = LipschitzMap<Rational>;

template <class T>
T target_norm(const LipschitzMap<T>& f, const std::vector<T>& v) {
    if (f.dim == 1) return abs_val(v[0]);
    return pnorm(v, f.target);
}

template <class T>
std::vector<T> evaluate_molecule(const LipschitzMap<T>& f, std::size_t x, std::size_t y) {
    if (x == y) fail(Errc::NotDistinct, "molecule needs two distinct points");
    std::vector<T> out(f.dim);
    const T& dxy = f.space->d(x, y);
    for (std::size_t c = 0; c < f.dim; ++c) out[c] = (f.at(x, c) - f.at(y, c)) / dxy;
    return out;
}

template <class T>
T molecule_value_norm(const LipschitzMap<T>& f, std::size_t x, std::size_t y) {
    auto v = evaluate_molecule(f, x, y);
    return target_norm(f, v);
}

template <class T>
struct LipNormResult {
    T norm{};
    bool zero = true;
    // Unordered attaining classes (x < y), all within kAttainTol of the max.
    std::vector<std::pair<std::size_t, std::size_t>> attaining;
};

// Brute force over all pairs. This is deliberately the single source of truth
// for Lipschitz constants; every other module checks against it.
template <class T>
LipNormResult<T> lip_norm(const LipschitzMap<T>& f) {
    const auto& M = *f.space;
    const std::size_t n = M.size();
    if (n < 2) return {};
    LipNormResult<T> r;
    r.norm = T(0);
    std::vector<T> vals;
    vals.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            T v = molecule_value_norm(f, i, j);
            vals.push_back(v);
            if (v > r.norm) r.norm = v;
        }
    if (r.norm == 0) return r;
    r.zero = false;
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j, ++idx) {
            bool hit = scalar_traits<T>::exact
                           ? vals[idx] == r.norm
                           : to_double(vals[idx]) >= to_double(r.norm) * (1.0 - kAttainTol);
            if (hit) r.attaining.emplace_back(i, j);
        }
    return r;
}

template <class T>
struct LocalityProfile {
    std::vector<T> thresholds; // distinct distances, ascending
    std::vector<T> s;          // s[i] = sup of molecule values over d <= thresholds[i]
    T norm{};
    T nonlocal_margin{};       // norm - s at the smallest distance scale
};

template <class T>
LocalityProfile<T> locality_profile(const LipschitzMap<T>& f) {
    const auto& M = *f.space;
    const std::size_t n = M.size();
    if (n < 2) fail(Errc::TooFewPoints, "locality profile needs 2 points");
    std::vector<std::pair<T, T>> by_dist; // (distance, molecule value)
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            by_dist.emplace_back(M.d(i, j), molecule_value_norm(f, i, j));
    std::sort(by_dist.begin(), by_dist.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    LocalityProfile<T> prof;
    T running = T(0);
    for (std::size_t i = 0; i < by_dist.size(); ++i) {
        running = std::max(running, by_dist[i].second);
        if (i + 1 == by_dist.size() || by_dist[i + 1].first != by_dist[i].first) {
            prof.thresholds.push_back(by_dist[i].first);
            prof.s.push_back(running);
        }
    }
    prof.norm = running;
    prof.nonlocal_margin = prof.norm - prof.s.front();
    return prof;
}

template <class T>
T nonlocal_margin(const LipschitzMap<T>& f) {
    return locality_profile(f).nonlocal_margin;
}

// McShane extension from a subset: g(x) = min over s in S of f(s) + L d(x, s).
// Scalar targets extend directly; vector targets only coordinatewise under
// the sup norm (the only p for which coordinatewise extension is isometric).
template <class T>
LipschitzMap<T> mcshane_extend(const MetricSpace<T>& M, const std::vector<std::size_t>& subset,
                               const std::vector<T>& sub_values, std::size_t dim, NormP target,
                               const T& L) {
    if (subset.empty()) fail(Errc::BadInput, "empty subset");
    if (dim == 0) fail(Errc::BadInput, "target dimension 0");
    if (dim > 1 && target != NormP::Inf)
        fail(Errc::UnsupportedTarget, "vector McShane extension requires the sup norm");
    if (sub_values.size() != subset.size() * dim)
        fail(Errc::BadInput, "subset value table size mismatch");
    bool has_base = false;
    for (std::size_t s : subset) {
        if (s >= M.size()) fail(Errc::OutOfRange, "subset index " + std::to_string(s));
        if (s == M.base) has_base = true;
    }
    if (!has_base) fail(Errc::BadInput, "subset must contain the base point");

    // Lipschitz constant of f on S, coordinatewise for the sup-norm case.
    T sub_lip = T(0);
    for (std::size_t a = 0; a < subset.size(); ++a)
        for (std::size_t b = a + 1; b < subset.size(); ++b) {
            const T& dd = M.d(subset[a], subset[b]);
            for (std::size_t c = 0; c < dim; ++c) {
                T slope = abs_val(sub_values[a * dim + c] - sub_values[b * dim + c]) / dd;
                sub_lip = std::max(sub_lip, slope);
            }
        }
    bool too_small = scalar_traits<T>::exact
                         ? L < sub_lip
                         : to_double(L) < to_double(sub_lip) * (1.0 - kAttainTol);
    if (too_small) fail(Errc::LTooSmall, "L below the Lipschitz constant of f on S");

    std::vector<T> vals(M.size() * dim);
    for (std::size_t x = 0; x < M.size(); ++x)
        for (std::size_t c = 0; c < dim; ++c) {
            bool first = true;
            T best{};
            for (std::size_t a = 0; a < subset.size(); ++a) {
                T cand = sub_values[a * dim + c] + L * M.d(x, subset[a]);
                if (first || cand < best) best = cand;
                first = false;
            }
            vals[x * dim + c] = best;
        }
    return LipschitzMap<T>(M, dim, dim == 1 ? NormP::One : target, std::move(vals));
}

} // namespace freelip
