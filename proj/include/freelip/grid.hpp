#pragma once

// The dyadic grid spaces: molecule families H and V, their biorthogonal-style
// functionals, the property-alpha certificate (dual-route: LP hull test and
// explicit path decompositions), the two-case strong-attainment approximation,
// and the non-uniformity sequence. Everything indexed by (level n, offset k)
// with point (n,k) = (k/2^n, 1/2^n) and base (0,0) = (0,1).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "freelip/errors.hpp"
#include "freelip/extremal.hpp"
#include "freelip/free_ball.hpp"
#include "freelip/free_vector.hpp"
#include "freelip/lipschitz_map.hpp"
#include "freelip/metric_space.hpp"
#include "freelip/scalar.hpp"

namespace freelip {

// Inverse of grid_point_count; rejects sizes that are not full grids.
inline unsigned grid_depth_of(std::size_t npoints) {
    for (unsigned d = 0; d <= 48; ++d)
        if (grid_point_count(d) == npoints) return d;
    fail(Errc::BadInput, "point count " + std::to_string(npoints) + " is not a full grid");
}

struct GammaMolecule {
    bool horizontal = true;  // h_{n,k} = m_{(n,k),(n,k+1)}; else v_{n,k} = m_{(n,k),(n+1,2k)}
    unsigned n = 0;
    unsigned long long k = 0;
    int sign = 1;
    bool operator==(const GammaMolecule&) const = default;
};

inline PointPair gamma_endpoints(const GammaMolecule& g) {
    if (g.horizontal) return {grid_index({g.n, g.k}), grid_index({g.n, g.k + 1})};
    return {grid_index({g.n, g.k}), grid_index({g.n + 1, 2 * g.k})};
}

inline std::string gamma_label(const GammaMolecule& g) {
    std::string s = g.sign < 0 ? "-" : "";
    s += g.horizontal ? 'h' : 'v';
    return s + "(" + std::to_string(g.n) + "," + std::to_string(g.k) + ")";
}

struct GammaSet {
    std::vector<GammaMolecule> horizontal;  // h_{n,k}, n <= N, k < 2^n
    std::vector<GammaMolecule> vertical;    // v_{n,k}, n < N, k <= 2^n

    std::vector<GammaMolecule> all() const {
        auto out = horizontal;
        out.insert(out.end(), vertical.begin(), vertical.end());
        return out;
    }
    std::vector<GammaMolecule> signed_all() const {
        auto base = all();
        auto out = base;
        for (auto g : base) {
            g.sign = -1;
            out.push_back(g);
        }
        return out;
    }
};

inline GammaSet gamma_set(unsigned N) {
    GammaSet out;
    for (unsigned n = 0; n <= N; ++n)
        for (unsigned long long k = 0; k < (1ull << n); ++k)
            out.horizontal.push_back({true, n, k, 1});
    for (unsigned n = 0; n + 1 <= N; ++n)
        for (unsigned long long k = 0; k <= (1ull << n); ++k)
            out.vertical.push_back({false, n, k, 1});
    return out;
}

namespace detail {

template <class T>
T dyadic_of(long long num, unsigned exp) {
    if constexpr (scalar_traits<T>::exact)
        return dyadic(num, exp);
    else
        return std::ldexp(static_cast<double>(num), -static_cast<int>(exp));
}

}  // namespace detail

// f_{n,k}: the point mass 1/2^{n+1} at (n,k). Pairs with v_{n,k}: the value
// there is 1 and the nearest competing pair gives 1/2.
template <class T>
LipschitzMap<T> vertical_functional(const MetricSpace<T>& M, unsigned n, unsigned long long k) {
    const unsigned depth = grid_depth_of(M.size());
    if (n + 1 > depth || k > (1ull << n))
        fail(Errc::IndexOutOfRange, "vertical functional (" + std::to_string(n) + "," +
                                        std::to_string(k) + ") needs depth > n");
    std::vector<T> vals(M.size(), T(0));
    vals[grid_index({n, k})] = detail::dyadic_of<T>(1, n + 1);
    return LipschitzMap<T>::scalar(M, std::move(vals));
}

// g_{n,k}: 1/2^n on levels <= n left of the cutoff x = k/2^n, 0 right of it,
// and the ramp phi_{n,k} on deeper levels (3/2^{n+2} left plateau, slope -1/2
// across [k/2^n, (k+1)/2^n], 1/2^{n+2} right plateau). Pairs with h_{n,k}.
template <class T>
LipschitzMap<T> horizontal_functional(const MetricSpace<T>& M, unsigned n,
                                      unsigned long long k) {
    const unsigned depth = grid_depth_of(M.size());
    if (n > depth || k >= (1ull << n))
        fail(Errc::IndexOutOfRange, "horizontal functional (" + std::to_string(n) + "," +
                                        std::to_string(k) + ") out of range");
    std::vector<T> vals(M.size(), T(0));
    for (std::size_t i = 0; i < M.size(); ++i) {
        const GridPoint p = grid_point_at(i);
        if (p.n <= n) {
            // x' <= x  <=>  k' 2^{n-n'} <= k
            if (p.k << (n - p.n) <= k) vals[i] = detail::dyadic_of<T>(1, n);
        } else {
            const unsigned s = p.n - n;
            if (p.k <= (k << s))
                vals[i] = detail::dyadic_of<T>(3, n + 2);
            else if (p.k >= ((k + 1) << s))
                vals[i] = detail::dyadic_of<T>(1, n + 2);
            else
                vals[i] = detail::dyadic_of<T>(static_cast<long long>(2 * k + 3), n + 2) -
                          detail::dyadic_of<T>(static_cast<long long>(p.k), p.n + 1);
        }
    }
    return LipschitzMap<T>::scalar(M, std::move(vals));
}

template <class T>
LipschitzMap<T> gamma_functional(const MetricSpace<T>& M, const GammaMolecule& g) {
    auto f = g.horizontal ? horizontal_functional<T>(M, g.n, g.k)
                          : vertical_functional<T>(M, g.n, g.k);
    if (g.sign < 0)
        for (auto& v : f.values) v = -v;
    return f;
}

// One term of a convex path decomposition: lambda * (signed Gamma molecule).
template <class T>
struct PathTerm {
    GammaMolecule gamma;
    T lambda{};
};

// Writes m_{x,y} as a convex combination over +-H u +-V by walking the
// vertical drop from the shallower point and then the horizontal run at the
// deeper level. Exact for the l1 grid, where the step lengths add up to
// d(x,y); any other metric fails that identity and is rejected.
template <class T>
std::vector<PathTerm<T>> path_decompose(const MetricSpace<T>& M, int p, std::size_t x,
                                        std::size_t y) {
    if (p != 1) fail(Errc::WrongNorm, "path decomposition is l1-specific");
    const unsigned depth = grid_depth_of(M.size());
    if (x >= M.size() || y >= M.size()) fail(Errc::OutOfRange, "point index out of range");
    if (x == y) fail(Errc::NotDistinct, "need two distinct points");
    (void)depth;

    GridPoint a = grid_point_at(x), b = grid_point_at(y);
    int flip = 1;
    if (a.n > b.n) {
        std::swap(a, b);
        flip = -1;
    }
    const T total = M.d(x, y);

    std::vector<PathTerm<T>> terms;
    // vertical drop: (n, j 2^{n-a.n}) -> (n+1, j 2^{n+1-a.n})
    for (unsigned n = a.n; n < b.n; ++n) {
        GammaMolecule g{false, n, a.k << (n - a.n), flip};
        terms.push_back({g, detail::dyadic_of<T>(1, n + 1) / total});
    }
    // horizontal run at level b.n
    const unsigned long long start = a.k << (b.n - a.n);
    if (start < b.k)
        for (unsigned long long i = start; i < b.k; ++i)
            terms.push_back({{true, b.n, i, flip}, detail::dyadic_of<T>(1, b.n) / total});
    else
        for (unsigned long long i = start; i > b.k; --i)
            terms.push_back({{true, b.n, i - 1, -flip}, detail::dyadic_of<T>(1, b.n) / total});

    // the step lengths must tile d(x,y) exactly, and the telescoped sum must
    // reproduce the molecule coordinate by coordinate
    T lsum(0);
    for (const auto& t : terms) lsum += t.lambda;
    FreeVector<T> recon{std::vector<T>(M.size() - 1, T(0))};
    for (const auto& t : terms) {
        const auto [u, v] = gamma_endpoints(t.gamma);
        auto mv = molecule_vector(M, u, v);
        for (std::size_t c = 0; c < recon.c.size(); ++c)
            recon.c[c] += T(t.gamma.sign) * t.lambda * mv.c[c];
    }
    auto target = molecule_vector(M, x, y);
    bool ok = true;
    if constexpr (scalar_traits<T>::exact) {
        ok = lsum == T(1);
        for (std::size_t c = 0; ok && c < recon.c.size(); ++c) ok = recon.c[c] == target.c[c];
    } else {
        ok = std::fabs(to_double(lsum) - 1.0) <= 1e-9;
        for (std::size_t c = 0; ok && c < recon.c.size(); ++c)
            ok = std::fabs(to_double(recon.c[c]) - to_double(target.c[c])) <= 1e-9;
    }
    if (!ok)
        fail(Errc::WrongNorm, "path steps do not tile the distance: metric is not the l1 grid");
    return terms;
}

template <class T>
struct AlphaReport {
    unsigned N = 0;
    std::size_t gamma_count = 0;     // |H| + |V|
    std::size_t classes_checked = 0; // molecule classes run through both hull routes
    T max_cross{};                   // max |F_gamma(m)| over every class m != gamma
    T max_cross_gamma{};             // same restricted to m in Gamma
    bool norms_ok = false;           // every ||x_gamma|| = ||F_gamma|| = F_gamma(x_gamma) = 1
    bool cross_ok = false;           // max_cross <= 2/3
    bool hull_ok = false;            // LP: ball_equals_hull over Gamma
    bool paths_ok = false;           // combinatorial: every class path-decomposes
    bool pass = false;
};

// Property-alpha certificate for the l1 grid at depth N, exact rationals.
// (i) unit norms and biorthogonality, (ii) every functional stays <= 2/3 on
// every foreign molecule class (within Gamma the maximum is only 1/2; the
// grandchild pairs m_{(n,k),(n+2,4k)} realise 2/3 exactly once N >= 2, so
// both maxima are reported), (iii) unit-ball equality via two independent
// routes: the LP hull scan and explicit path decompositions.
inline AlphaReport<Rational> alpha_certificate(int p, unsigned N) {
    if (p != 1) fail(Errc::WrongNorm, "the certificate is l1-specific");
    auto M = build_grid_space<Rational>(1, N);
    const auto gs = gamma_set(N);
    const auto gamma = gs.all();

    AlphaReport<Rational> rep;
    rep.N = N;
    rep.gamma_count = gamma.size();

    // (i) each functional norms its own molecule: F(x_gamma) = 1 with
    // ||F||_L = 1 pins ||x_gamma|| = 1 from both sides of the duality.
    for (const auto& g : gamma) {
        auto F = gamma_functional<Rational>(M, g);
        const auto [u, v] = gamma_endpoints(g);
        auto val = evaluate_molecule(F, u, v);
        if (val[0] != 1)
            fail(Errc::CertificateViolation, "functional value not 1 at " + gamma_label(g));
        if (lip_norm(F).norm != 1)
            fail(Errc::CertificateViolation, "functional norm not 1 at " + gamma_label(g));
    }
    rep.norms_ok = true;

    // (ii) cross-values over every molecule class of the space
    rep.max_cross = Rational(0);
    rep.max_cross_gamma = Rational(0);
    for (const auto& g : gamma) {
        auto F = gamma_functional<Rational>(M, g);
        const auto own = gamma_endpoints(g);
        for (const auto& o : gamma) {
            if (o.horizontal == g.horizontal && o.n == g.n && o.k == g.k) continue;
            const auto [u, v] = gamma_endpoints(o);
            Rational cv = abs_val(evaluate_molecule(F, u, v)[0]);
            if (cv > rep.max_cross_gamma) rep.max_cross_gamma = cv;
        }
        for (std::size_t i = 0; i < M.size(); ++i)
            for (std::size_t j = i + 1; j < M.size(); ++j) {
                if ((i == own.first && j == own.second) || (i == own.second && j == own.first))
                    continue;
                Rational cv = abs_val(evaluate_molecule(F, i, j)[0]);
                if (cv > rep.max_cross) rep.max_cross = cv;
                if (cv > Rational(2, 3))
                    fail(Errc::CertificateViolation,
                         "cross value above 2/3: " + gamma_label(g) + " on class (" +
                             M.labels[i] + "," + M.labels[j] + ")");
            }
    }
    rep.cross_ok = rep.max_cross <= Rational(2, 3);

    // (iii) two independent hull routes
    std::vector<PointPair> classes;
    classes.reserve(gamma.size());
    for (const auto& g : gamma) classes.push_back(gamma_endpoints(g));
    auto hull = ball_equals_hull(M, classes);
    rep.hull_ok = hull.equal;
    if (!rep.hull_ok)
        fail(Errc::CertificateViolation, "hull route found a molecule outside conv(Gamma)");

    rep.paths_ok = true;
    for (std::size_t i = 0; i < M.size(); ++i)
        for (std::size_t j = i + 1; j < M.size(); ++j) {
            path_decompose<Rational>(M, 1, i, j);  // throws if the tiling breaks
            ++rep.classes_checked;
        }
    rep.pass = rep.norms_ok && rep.cross_ok && rep.hull_ok && rep.paths_ok;
    return rep;
}

template <class T>
struct SnaCertificate {
    int case_tag = 0;  // 1: flattening below the witness levels; 2: Gamma boost
    T rho{};           // sup over Gamma of ||f^(m)||
    // case 1
    PointPair witness{0, 0};  // argmax pair with distinct levels and x-coordinates
    unsigned cutoff = 0;      // n3 = max witness level
    T threshold{};            // (1 + rho eps)/(1 + eps)
    // case 2
    GammaMolecule chosen{};  // Gamma member with ||f^|| > 1 - delta
    T delta{};               // largest 2^-j with (1 + eps/2)(1 - delta) > 1 + eps/3
    // common
    unsigned deep_cutoff = 0;  // gap scanned over classes with both levels > this
    T norm_g{};
    PointPair attains_at{0, 0};
    T value_at_witness{};
    T deep_sup{};
    T gap{};
    T dist{};  // ||f - g||
};

template <class T>
struct SnaResult {
    LipschitzMap<T> g;
    SnaCertificate<T> cert;
};

// Approximates a normalized f by a map that provably attains: either flatten
// everything below the best pair's levels and amplify (case 1, needs the
// Gamma supremum rho < 1), or boost along the best Gamma molecule's
// functional (case 2). The certificate carries the witness and the verified
// gap to the excluded deep classes.
template <class T>
SnaResult<T> sna_approximate(const LipschitzMap<T>& f, const T& eps) {
    const auto& M = *f.space;
    const unsigned depth = grid_depth_of(M.size());
    if (!(eps > T(0))) fail(Errc::BadInput, "need eps > 0");

    auto fn = lip_norm(f);
    if (fn.zero) fail(Errc::ZeroMap, "cannot approximate the zero map");
    if constexpr (scalar_traits<T>::exact) {
        if (fn.norm != 1) fail(Errc::NonUnitNorm, "caller normalizes: ||f|| must be 1");
    } else {
        if (std::fabs(to_double(fn.norm) - 1.0) > 1e-9)
            fail(Errc::NonUnitNorm, "caller normalizes: ||f|| must be 1");
    }

    const auto gamma = gamma_set(depth).all();
    SnaResult<T> out;
    auto& c = out.cert;
    c.rho = T(0);
    for (const auto& g : gamma) {
        const auto [u, v] = gamma_endpoints(g);
        T val = molecule_value_norm(f, u, v);
        if (val > c.rho) c.rho = val;
    }

    bool case1;
    if constexpr (scalar_traits<T>::exact)
        case1 = c.rho < T(1);
    else
        case1 = to_double(c.rho) < 1.0 - 1e-9;

    if (case1) {
        c.case_tag = 1;
        c.threshold = (T(1) + c.rho * eps) / (T(1) + eps);
        // best pair among those with distinct levels and distinct
        // x-coordinates; the global argmax is always such a pair, since
        // same-level and same-x classes telescope into Gamma and are capped
        // by rho < 1
        bool found = false;
        T best(0);
        for (std::size_t i = 0; i < M.size(); ++i)
            for (std::size_t j2 = i + 1; j2 < M.size(); ++j2) {
                const GridPoint a = grid_point_at(i), b = grid_point_at(j2);
                if (a.n == b.n) continue;
                const unsigned top = std::max(a.n, b.n);
                if ((a.k << (top - a.n)) == (b.k << (top - b.n))) continue;
                T val = molecule_value_norm(f, i, j2);
                if (!found || val > best) {
                    best = val;
                    c.witness = {i, j2};
                    found = true;
                }
            }
        if (!found || !(best > c.threshold))
            fail(Errc::NoWitness,
                 "no pair with distinct levels and x-coordinates beats the threshold; "
                 "increase depth");
        c.cutoff = std::max(grid_point_at(c.witness.first).n,
                            grid_point_at(c.witness.second).n);
        c.deep_cutoff = c.cutoff;

        // h: copy f on levels <= n3, affine interpolation of the level-n3
        // values on deeper levels
        std::vector<T> hv(M.size() * f.dim, T(0));
        for (std::size_t i = 0; i < M.size(); ++i) {
            const GridPoint gp = grid_point_at(i);
            if (gp.n <= c.cutoff) {
                for (std::size_t cc = 0; cc < f.dim; ++cc) hv[i * f.dim + cc] = f.at(i, cc);
            } else {
                const unsigned s = gp.n - c.cutoff;
                const unsigned long long lo = gp.k >> s;
                const unsigned long long r = gp.k - (lo << s);
                const std::size_t ilo = grid_index({c.cutoff, lo});
                if (r == 0) {
                    for (std::size_t cc = 0; cc < f.dim; ++cc)
                        hv[i * f.dim + cc] = f.at(ilo, cc);
                } else {
                    const std::size_t ihi = grid_index({c.cutoff, lo + 1});
                    const T t = detail::dyadic_of<T>(static_cast<long long>(r), s);
                    for (std::size_t cc = 0; cc < f.dim; ++cc)
                        hv[i * f.dim + cc] =
                            (T(1) - t) * f.at(ilo, cc) + t * f.at(ihi, cc);
                }
            }
        }
        LipschitzMap<T> h(M, f.dim, f.target, std::move(hv));
        auto hn = lip_norm(h);
        if (to_double(hn.norm) > 1.0 + 1e-9)
            fail(Errc::ConsistencyViolation, "flattening exceeded the Lipschitz budget");

        std::vector<T> gv(M.size() * f.dim);
        for (std::size_t i = 0; i < gv.size(); ++i) gv[i] = f.values[i] + eps * h.values[i];
        out.g = LipschitzMap<T>(M, f.dim, f.target, std::move(gv));
    } else {
        c.case_tag = 2;
        // largest dyadic delta with (1 + eps/2)(1 - delta) > 1 + eps/3,
        // i.e. delta < eps / (6 + 3 eps)
        const T bound = eps / (T(6) + T(3) * eps);
        unsigned j = 1;
        while (j < 60 && !(detail::dyadic_of<T>(1, j) < bound)) ++j;
        c.delta = detail::dyadic_of<T>(1, j);

        const GammaMolecule* best = nullptr;
        T best_val(0);
        for (const auto& g : gamma) {
            const auto [u, v] = gamma_endpoints(g);
            T val = molecule_value_norm(f, u, v);
            if (val > best_val) {
                best_val = val;
                best = &g;
            }
        }
        if (best == nullptr || !(best_val > T(1) - c.delta))
            fail(Errc::NoWitness, "no Gamma molecule within delta of the norm; increase depth");
        c.chosen = *best;
        c.deep_cutoff = c.chosen.horizontal ? c.chosen.n : c.chosen.n + 1;

        auto F = gamma_functional<T>(M, c.chosen);
        const auto [mu, mv] = gamma_endpoints(c.chosen);
        auto fm = evaluate_molecule(f, mu, mv);  // f^(m), the boost direction
        std::vector<T> gv(M.size() * f.dim);
        const T half_eps = eps / T(2);
        for (std::size_t i = 0; i < M.size(); ++i)
            for (std::size_t cc = 0; cc < f.dim; ++cc)
                gv[i * f.dim + cc] =
                    f.at(i, cc) + half_eps * F.at(i) * fm[cc];
        out.g = LipschitzMap<T>(M, f.dim, f.target, std::move(gv));
        c.witness = {mu, mv};
    }

    {
        std::vector<T> dv(M.size() * f.dim);
        for (std::size_t i = 0; i < dv.size(); ++i) dv[i] = f.values[i] - out.g.values[i];
        LipschitzMap<T> diff(M, f.dim, f.target, std::move(dv));
        auto dn = lip_norm(diff);
        c.dist = dn.zero ? T(0) : dn.norm;
    }

    auto gn = lip_norm(out.g);
    c.norm_g = gn.norm;
    c.attains_at = gn.attaining.front();
    c.value_at_witness = molecule_value_norm(out.g, c.witness.first, c.witness.second);

    c.deep_sup = T(0);
    for (std::size_t i = 0; i < M.size(); ++i) {
        if (grid_point_at(i).n <= c.deep_cutoff) continue;
        for (std::size_t j2 = i + 1; j2 < M.size(); ++j2) {
            if (grid_point_at(j2).n <= c.deep_cutoff) continue;
            T val = molecule_value_norm(out.g, i, j2);
            if (val > c.deep_sup) c.deep_sup = val;
        }
    }
    c.gap = c.value_at_witness - c.deep_sup;
    if (!(c.gap > T(0)))
        fail(Errc::ConsistencyViolation, "no gap between the witness and the deep classes");
    return out;
}

struct NocufeRow {
    unsigned n = 0;
    double value = 0.0;    // 2 (x_n, y_n)_{z_n}
    double formula = 0.0;  // sqrt(1/4 + 2^{-2n-2}) + 1/2 - sqrt(1 + 2^{-2n-2})
    double ratio = 0.0;    // gromov / min distance; the min is d(y_n, z_n) = 1/2
    double eps_star = 0.0;
    bool strongly_exposed = false;
};

struct NocufeTable {
    std::vector<NocufeRow> rows;  // n = 1 .. N-1
    bool decreasing = false;
};

// The witnesses of non-uniform exposure on the l2 grid at depth N:
// x_n = (0, 1/2^n), y_n = (1, 1/2^{n+1}), z_n = (1/2, 1/2^{n+1}). Each
// molecule m_{x_n,y_n} is strongly exposed, yet the concavity ratios decay
// to zero, so no single exposure modulus covers the family.
inline NocufeTable nocufe_sequence(int p, unsigned N) {
    if (p != 2) fail(Errc::WrongNorm, "the sequence lives on the l2 grid");
    if (N < 2) fail(Errc::BadInput, "need N >= 2");

    auto M = build_grid_space<double>(2, N);
    NocufeTable out;
    for (unsigned n = 1; n + 1 <= N; ++n) {
        const std::size_t x = grid_index({n, 0});
        const std::size_t y = grid_index({n + 1, 1ull << (n + 1)});
        const std::size_t z = grid_index({n + 1, 1ull << n});

        NocufeRow row;
        row.n = n;
        const double g = gromov_product(M, x, y, z);
        row.value = 2.0 * g;
        const double q = std::ldexp(1.0, -2 * static_cast<int>(n) - 2);
        row.formula = std::sqrt(0.25 + q) + 0.5 - std::sqrt(1.0 + q);
        const double dmin = std::min(M.d(x, z), M.d(y, z));
        row.ratio = g / dmin;

        auto cm = concavity_modulus(M, x, y);
        row.eps_star = cm.infinite ? std::numeric_limits<double>::infinity() : cm.eps_star;
        row.strongly_exposed = cm.infinite || cm.eps_star > 0.0;
        out.rows.push_back(row);
    }
    out.decreasing = true;
    for (std::size_t i = 1; i < out.rows.size(); ++i)
        if (!(out.rows[i].ratio < out.rows[i - 1].ratio)) out.decreasing = false;
    return out;
}

}  // namespace freelip
