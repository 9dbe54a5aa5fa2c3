#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "freelip/errors.hpp"
#include "freelip/free_ball.hpp"
#include "freelip/free_vector.hpp"
#include "freelip/lipschitz_map.hpp"
#include "freelip/metric_space.hpp"
#include "freelip/scalar.hpp"

namespace freelip {

// Extremal structure of molecules: segment witnesses, Gromov concavity
// moduli, witness searches, and norm-raising perturbations.

inline constexpr double kSegmentTol = 1e-9;
// A molecule whose best segment excess lands in (tol, 16 tol] relative to
// d(x,y) is classified extreme but flagged, so tolerance-edge cases are
// visible instead of silently resolved.
inline constexpr double kAmbiguousBand = 16.0;

template <class T>
inline T gromov_product(const MetricSpace<T>& M, std::size_t x, std::size_t y, std::size_t z) {
    if (x >= M.size() || y >= M.size() || z >= M.size()) fail(Errc::OutOfRange, "point index");
    if (x == y || x == z || y == z) fail(Errc::NotDistinct, "gromov product needs 3 points");
    return (M.d(x, z) + M.d(y, z) - M.d(x, y)) / T(2);
}

template <class T>
struct SegmentTest {
    bool extreme = true;
    bool ambiguous = false;
    std::optional<std::size_t> witness; // z achieving the minimal excess
    T min_excess{};                     // d(x,z)+d(z,y)-d(x,y) at the witness
};

namespace detail {

template <class T>
inline bool excess_is_witness(const T& excess, const T& dxy, double tol) {
    if constexpr (scalar_traits<T>::exact)
        return excess == 0;
    else
        return to_double(excess) <= tol * to_double(dxy);
}

} // namespace detail

// The shared metric-segment predicate: every classification below derives
// from the same per-z comparison, so extreme <=> (eps* > 0) holds by
// construction and a violation indicates a genuine bug.
template <class T>
inline SegmentTest<T> is_extreme_molecule(const MetricSpace<T>& M, std::size_t x, std::size_t y,
                                          double tol = kSegmentTol) {
    if (x >= M.size() || y >= M.size()) fail(Errc::OutOfRange, "point index");
    if (x == y) fail(Errc::NotDistinct, "molecule endpoints coincide");
    SegmentTest<T> r;
    const T& dxy = M.d(x, y);
    bool first = true;
    std::size_t arg = 0;
    T best{};
    for (std::size_t z = 0; z < M.size(); ++z) {
        if (z == x || z == y) continue;
        T excess = M.d(x, z) + M.d(z, y) - dxy;
        if (first || excess < best) {
            best = excess;
            arg = z;
            first = false;
        }
    }
    if (first) return r; // two-point space: no candidate z, extreme
    r.min_excess = best;
    if (detail::excess_is_witness(best, dxy, tol)) {
        r.extreme = false;
        r.witness = arg;
    } else if constexpr (!scalar_traits<T>::exact) {
        if (to_double(best) <= kAmbiguousBand * tol * to_double(dxy)) r.ambiguous = true;
    }
    return r;
}

template <class T>
struct ConcavityResult {
    T eps_star{};
    bool infinite = false; // two-point space sentinel
    std::optional<std::size_t> argmin;
};

// eps* = min over z of (x,y)_z / min(d(x,z), d(y,z)). The ratio is snapped to
// zero exactly when the segment predicate fires for that z, keeping the two
// classifications consistent on float spaces.
template <class T>
inline ConcavityResult<T> concavity_modulus(const MetricSpace<T>& M, std::size_t x,
                                            std::size_t y, double tol = kSegmentTol) {
    if (x >= M.size() || y >= M.size()) fail(Errc::OutOfRange, "point index");
    if (x == y) fail(Errc::NotDistinct, "molecule endpoints coincide");
    ConcavityResult<T> r;
    const T& dxy = M.d(x, y);
    bool first = true;
    for (std::size_t z = 0; z < M.size(); ++z) {
        if (z == x || z == y) continue;
        T excess = M.d(x, z) + M.d(z, y) - dxy;
        T ratio;
        if (detail::excess_is_witness(excess, dxy, tol)) {
            ratio = T(0);
        } else {
            const T& dxz = M.d(x, z);
            const T& dyz = M.d(y, z);
            ratio = (excess / T(2)) / std::min(dxz, dyz);
        }
        if (first || ratio < r.eps_star) {
            r.eps_star = ratio;
            r.argmin = z;
            first = false;
        }
    }
    if (first) {
        r.infinite = true;
        r.eps_star = T(0);
    }
    return r;
}

template <class T>
struct MoleculeReport {
    PointPair mol;
    T distance{};
    bool is_extreme = false;
    bool ambiguous = false;
    std::optional<std::size_t> witness;
    T eps_star{};
    bool eps_infinite = false;
    bool strongly_exposed = false;
};

template <class T>
inline std::vector<MoleculeReport<T>> classify_molecules(const MetricSpace<T>& M,
                                                         double tol = kSegmentTol) {
    std::vector<MoleculeReport<T>> out;
    const std::size_t n = M.size();
    out.reserve(n * (n - 1) / 2);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x + 1; y < n; ++y) {
            MoleculeReport<T> rep;
            rep.mol = {x, y};
            rep.distance = M.d(x, y);
            auto seg = is_extreme_molecule(M, x, y, tol);
            rep.is_extreme = seg.extreme;
            rep.ambiguous = seg.ambiguous;
            rep.witness = seg.witness;
            auto con = concavity_modulus(M, x, y, tol);
            rep.eps_star = con.eps_star;
            rep.eps_infinite = con.infinite;
            rep.strongly_exposed = con.infinite || con.eps_star > 0;
            if (rep.is_extreme != rep.strongly_exposed)
                fail(Errc::ConsistencyViolation,
                     "extreme/strongly-exposed disagreement at class (" +
                         std::to_string(x) + "," + std::to_string(y) + ")");
            out.push_back(std::move(rep));
        }
    return out;
}

template <class T>
struct ExposureFamilyReport {
    struct Member {
        PointPair mol;
        T eps_star{};
        bool eps_infinite = false;
        std::vector<T> delta; // per grid epsilon
    };
    std::vector<T> eps_grid; // 2^-1 .. 2^-10
    std::vector<Member> members;
    std::vector<T> family_delta; // min over members, per grid epsilon
    T family_min_eps_star{};
    bool family_min_infinite = false;
    bool non_uniform = false;
};

// delta(eps) = eps * eps* per member; the family modulus is the pointwise
// minimum. Families whose minimal eps* drops below the threshold are flagged.
template <class T>
inline ExposureFamilyReport<T> uniform_exposure_modulus(const MetricSpace<T>& M,
                                                        const std::vector<PointPair>& family,
                                                        double non_uniform_threshold = 1e-3) {
    if (family.empty()) fail(Errc::BadInput, "empty family");
    ExposureFamilyReport<T> rep;
    for (unsigned i = 1; i <= 10; ++i) rep.eps_grid.push_back(T(1) / T(1 << i));
    bool first = true;
    for (const auto& [x, y] : family) {
        auto con = concavity_modulus(M, x, y);
        if (!con.infinite && !(con.eps_star > 0))
            fail(Errc::MemberNotExposed, "family member (" + std::to_string(x) + "," +
                                             std::to_string(y) + ") has eps* = 0");
        typename ExposureFamilyReport<T>::Member mem;
        mem.mol = {x, y};
        mem.eps_star = con.eps_star;
        mem.eps_infinite = con.infinite;
        T effective = con.infinite ? T(1) : con.eps_star;
        for (const auto& e : rep.eps_grid) mem.delta.push_back(e * effective);
        if (!con.infinite) {
            if (first || con.eps_star < rep.family_min_eps_star)
                rep.family_min_eps_star = con.eps_star;
            first = false;
        }
        rep.members.push_back(std::move(mem));
    }
    rep.family_min_infinite = first; // every member was the two-point sentinel
    rep.family_delta.assign(rep.eps_grid.size(), T(0));
    for (std::size_t i = 0; i < rep.eps_grid.size(); ++i) {
        bool f2 = true;
        for (const auto& mem : rep.members)
            if (f2 || mem.delta[i] < rep.family_delta[i]) {
                rep.family_delta[i] = mem.delta[i];
                f2 = false;
            }
    }
    rep.non_uniform =
        !rep.family_min_infinite && to_double(rep.family_min_eps_star) < non_uniform_threshold;
    return rep;
}

namespace detail {

template <class T>
inline bool attains_at(const LipschitzMap<T>& f, const T& norm, std::size_t x, std::size_t y) {
    T v = molecule_value_norm(f, x, y);
    if constexpr (scalar_traits<T>::exact)
        return v == norm;
    else
        return to_double(v) >= to_double(norm) * (1.0 - kAttainTol);
}

} // namespace detail

// Pairs refining the metric segment p .. q: d(p,q) = d(p,x)+d(x,y)+d(y,q).
template <class T>
inline bool in_refining_family(const MetricSpace<T>& M, std::size_t p, std::size_t q,
                               std::size_t x, std::size_t y, double tol = kSegmentTol) {
    if (x == y) return false;
    T lhs = M.d(p, x) + M.d(x, y) + M.d(y, q);
    T gap = lhs - M.d(p, q);
    if constexpr (scalar_traits<T>::exact)
        return gap == 0;
    else
        return std::abs(to_double(gap)) <= tol * to_double(M.d(p, q));
}

// Minimal-distance attaining pair inside the refining family of (p,q).
// Shrinking through a segment witness keeps attainment and strictly reduces
// the distance, so the minimum is extreme; that is asserted before return.
template <class T>
inline PointPair extreme_witness(const LipschitzMap<T>& f, std::size_t p, std::size_t q,
                                 double tol = kSegmentTol) {
    const auto& M = *f.space;
    auto ln = lip_norm(f);
    if (ln.zero) fail(Errc::ZeroMap, "zero map attains nowhere");
    if (!detail::attains_at(f, ln.norm, p, q))
        fail(Errc::NotAttaining, "map does not attain its norm at the given molecule");
    bool found = false;
    PointPair best{0, 0};
    for (std::size_t x = 0; x < M.size(); ++x)
        for (std::size_t y = 0; y < M.size(); ++y) {
            if (x == y) continue;
            if (!in_refining_family(M, p, q, x, y, tol)) continue;
            if (!detail::attains_at(f, ln.norm, x, y)) continue;
            if (!found || M.d(x, y) < M.d(best.first, best.second)) {
                best = {x, y};
                found = true;
            }
        }
    if (!found) fail(Errc::NotAttaining, "refining family has no attaining pair");
    if (!is_extreme_molecule(M, best.first, best.second, tol).extreme)
        fail(Errc::ConsistencyViolation, "minimal refining attaining pair not extreme");
    return best;
}

template <class T>
struct ExposedWitness {
    PointPair mol;
    T eps_star{};
    bool eps_infinite = false;
};

// Minimal-distance attaining molecule; its concavity modulus must be positive.
template <class T>
inline ExposedWitness<T> strongly_exposed_witness(const LipschitzMap<T>& f,
                                                  double tol = kSegmentTol) {
    auto ln = lip_norm(f);
    if (ln.zero) fail(Errc::ZeroMap, "zero map attains nowhere");
    const auto& M = *f.space;
    bool found = false;
    PointPair best{0, 0};
    for (const auto& [x, y] : ln.attaining) {
        if (!found || M.d(x, y) < M.d(best.first, best.second)) {
            best = {x, y};
            found = true;
        }
    }
    auto con = concavity_modulus(M, best.first, best.second, tol);
    if (!con.infinite && !(con.eps_star > 0))
        fail(Errc::DegenerateLocal, "minimal attaining pair has eps* = 0");
    return {best, con.eps_star, con.infinite};
}

template <class T>
struct NonlocalPerturbation {
    LipschitzMap<T> phi;
    T gamma{};      // exposing-functional gap at m
    T beta{};       // gamma / 2
    T norm_phi{};
    T dist_to_f{};  // Lipschitz norm of phi - f
    T threshold{};  // 1 + eps (1 - beta)
    double delta = 0.25;
    bool slice_ok = false; // classes above threshold sit delta-close to {x,y}
    T margin{};            // nonlocal_margin(phi)
};

// phi = f + eps h (.) z with h the exposing functional at m and z the unit
// target vector aligned with f(m). Every other sign-class stays below
// 1 + eps (1 - gamma) < threshold, so the norm argmax is pinned at +-m.
template <class T>
inline NonlocalPerturbation<T> nonlocal_perturbation(const LipschitzMap<T>& f, std::size_t x,
                                                     std::size_t y, const T& eps) {
    const auto& M = *f.space;
    if (eps < 0) fail(Errc::BadInput, "negative perturbation size");
    auto ln = lip_norm(f);
    bool unit;
    if constexpr (scalar_traits<T>::exact)
        unit = (ln.norm == 1);
    else
        unit = std::abs(to_double(ln.norm) - 1.0) <= 1e-9;
    if (!unit) fail(Errc::NonUnitNorm, "normalize f before perturbing");
    if (!detail::attains_at(f, ln.norm, x, y))
        fail(Errc::NotAttaining, "map does not attain its norm at the given molecule");
    if (!is_extreme_molecule(M, x, y).extreme)
        fail(Errc::NotExtreme, "base molecule is not extreme");

    NonlocalPerturbation<T> out;
    if (eps == 0) {
        out.phi = f;
        out.norm_phi = ln.norm;
        out.threshold = T(1);
        out.slice_ok = true;
        out.margin = nonlocal_margin(f);
        return out;
    }
    auto expo = exposing_functional(M, x, y);
    if (!expo.exposes) fail(Errc::NotExtreme, "exposing gap vanished");
    out.gamma = expo.gamma;
    out.beta = expo.gamma / T(2);

    auto fm = evaluate_molecule(f, x, y);
    T fmn = target_norm(f, fm);
    std::vector<T> z(fm);
    for (auto& c : z) c /= fmn;

    std::vector<T> vals(M.size() * f.dim);
    for (std::size_t w = 0; w < M.size(); ++w)
        for (std::size_t c = 0; c < f.dim; ++c)
            vals[w * f.dim + c] = f.at(w, c) + eps * expo.h.at(w) * z[c];
    out.phi = LipschitzMap<T>(M, f.dim, f.target, std::move(vals));

    std::vector<T> dvals(M.size() * f.dim);
    for (std::size_t w = 0; w < M.size(); ++w)
        for (std::size_t c = 0; c < f.dim; ++c)
            dvals[w * f.dim + c] = out.phi.at(w, c) - f.at(w, c);
    LipschitzMap<T> diff(M, f.dim, f.target, std::move(dvals));
    out.dist_to_f = lip_norm(diff).norm;

    out.norm_phi = lip_norm(out.phi).norm;
    out.threshold = T(1) + eps * (T(1) - out.beta);
    out.slice_ok = true;
    const T bound = M.d(x, y) / T(4); // delta = 1/4

    for (std::size_t u = 0; u < M.size() && out.slice_ok; ++u)
        for (std::size_t v = u + 1; v < M.size(); ++v) {
            if (!(molecule_value_norm(out.phi, u, v) > out.threshold)) continue;
            bool u_near = std::min(M.d(u, x), M.d(u, y)) <= bound;
            bool v_near = std::min(M.d(v, x), M.d(v, y)) <= bound;
            if (!u_near || !v_near) {
                out.slice_ok = false;
                break;
            }
        }
    out.margin = nonlocal_margin(out.phi);
    return out;
}

template <class T>
struct ExposingPerturbation {
    LipschitzMap<T> S;
    T norm_T{};
    T norm_S{};
    T second{};        // largest |S| over classes other than +-m
    T gap{};           // norm_S - second
    bool gap_positive = false;
    bool attains_at_m = false;
};

// S = T + eps f_m (.) T(m). Norm grows exactly by the factor 1+eps and the
// argmax stays pinned at m whenever the functional has a positive gap there.
template <class T>
inline ExposingPerturbation<T> exposing_perturbation(const LipschitzMap<T>& Tm,
                                                     std::size_t x, std::size_t y,
                                                     const LipschitzMap<T>& f_m, const T& eps) {
    const auto& M = *Tm.space;
    if (f_m.space != Tm.space) fail(Errc::BadInput, "functional lives on a different space");
    if (f_m.dim != 1) fail(Errc::BadFunctional, "exposing functional must be scalar");
    if (eps < 0) fail(Errc::BadInput, "negative perturbation size");
    auto lnT = lip_norm(Tm);
    if (lnT.zero) fail(Errc::ZeroMap, "zero map attains nowhere");
    if (!detail::attains_at(Tm, lnT.norm, x, y))
        fail(Errc::NotAttaining, "map does not attain its norm at the given molecule");
    T fmm = evaluate_molecule(f_m, x, y)[0];
    T fn = lip_norm(f_m).norm;
    bool good;
    if constexpr (scalar_traits<T>::exact)
        good = (fmm == 1) && (fn == 1);
    else
        good = std::abs(to_double(fmm) - 1.0) <= 1e-9 && std::abs(to_double(fn) - 1.0) <= 1e-9;
    if (!good) fail(Errc::BadFunctional, "need f(m) = 1 = Lip(f)");

    auto tm = evaluate_molecule(Tm, x, y);
    std::vector<T> vals(M.size() * Tm.dim);
    for (std::size_t w = 0; w < M.size(); ++w)
        for (std::size_t c = 0; c < Tm.dim; ++c)
            vals[w * Tm.dim + c] = Tm.at(w, c) + eps * f_m.at(w) * tm[c];

    ExposingPerturbation<T> out;
    out.S = LipschitzMap<T>(M, Tm.dim, Tm.target, std::move(vals));
    out.norm_T = lnT.norm;
    out.norm_S = lip_norm(out.S).norm;
    out.attains_at_m = detail::attains_at(out.S, out.norm_S, x, y);
    bool first = true;
    for (std::size_t u = 0; u < M.size(); ++u)
        for (std::size_t v = u + 1; v < M.size(); ++v) {
            if ((u == x && v == y) || (u == y && v == x)) continue;
            T val = molecule_value_norm(out.S, u, v);
            if (first || val > out.second) out.second = val;
            first = false;
        }
    out.gap = out.norm_S - out.second;
    if (first) out.gap = out.norm_S; // single-class space
    out.gap_positive = out.gap > 0;
    return out;
}

template <class T>
struct OpenSetWitness {
    T eta{};
    PointPair mol;
    T r{};
};

// Searches attaining pairs and radii from half the distinct-distance grid for
// a configuration where the closed balls B(x,r), B(y,r) are disjoint and all
// molecule classes with an endpoint outside both balls stay eta below the
// norm. Returns the best eta found.
template <class T>
inline std::optional<OpenSetWitness<T>> open_set_B_membership(const LipschitzMap<T>& f) {
    auto ln = lip_norm(f);
    if (ln.zero) fail(Errc::ZeroMap, "zero map attains nowhere");
    const auto& M = *f.space;
    const std::size_t n = M.size();
    std::vector<T> radii;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) radii.push_back(M.d(i, j) / T(2));
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

    std::optional<OpenSetWitness<T>> best;
    for (const auto& [x, y] : ln.attaining) {
        for (const auto& r : radii) {
            bool disjoint = true;
            std::vector<char> inside(n, 0); // in B(x,r) or B(y,r)
            for (std::size_t w = 0; w < n; ++w) {
                bool bx = !(M.d(w, x) > r);
                bool by = !(M.d(w, y) > r);
                if (bx && by) {
                    disjoint = false;
                    break;
                }
                inside[w] = bx || by;
            }
            if (!disjoint) continue;
            bool any_outside = false;
            T max_out(0);
            for (std::size_t u = 0; u < n; ++u)
                for (std::size_t v = u + 1; v < n; ++v) {
                    if (inside[u] && inside[v]) continue;
                    T val = molecule_value_norm(f, u, v);
                    if (!any_outside || val > max_out) max_out = val;
                    any_outside = true;
                }
            T eta = any_outside ? ln.norm - max_out : ln.norm;
            if (!(eta > 0)) continue;
            if (!best || eta > best->eta) best = OpenSetWitness<T>{eta, {x, y}, r};
        }
    }
    return best;
}

} // namespace freelip
