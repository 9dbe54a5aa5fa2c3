#pragma once

// Fat Cantor stages on [0,1], the associated integral functions, and the
// circle construction that pins their norm-attainment behaviour down at
// finite resolution. Interval endpoints stay rational end to end; only the
// chordal-space sampling drops to double.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "freelip/errors.hpp"
#include "freelip/free_vector.hpp"
#include "freelip/lipschitz_map.hpp"
#include "freelip/metric_space.hpp"
#include "freelip/scalar.hpp"

namespace freelip {

// Closed, pairwise disjoint, sorted rational intervals.
struct IntervalSet {
    std::vector<std::pair<Rational, Rational>> intervals;

    Rational measure() const {
        Rational m(0);
        for (const auto& [a, b] : intervals) m += b - a;
        return m;
    }
};

// Stage n of the fat Cantor set: start from [1/4, 3/4]; at each step every
// component of length L loses its open middle of length L^2, leaving two
// closed components of length (L - L^2) / 2. Endpoint bit sizes roughly
// double per stage, so this is meant for small n; measures for deep stages
// come from stage_lambdas below.
inline IntervalSet cantor_stage(unsigned n) {
    IntervalSet C;
    C.intervals.emplace_back(Rational(1, 4), Rational(3, 4));
    for (unsigned s = 0; s < n; ++s) {
        std::vector<std::pair<Rational, Rational>> next;
        next.reserve(C.intervals.size() * 2);
        for (const auto& [a, b] : C.intervals) {
            const Rational len = b - a;
            const Rational half = (len - len * len) / 2;
            next.emplace_back(a, a + half);
            next.emplace_back(b - half, b);
        }
        C.intervals = std::move(next);
    }
    return C;
}

// lambda_n = measure of stage n via the scalar recurrence
// lambda_{n+1} = lambda_n - 2^n (lambda_n / 2^n)^2, starting at 1/2.
// Entry k of the result is lambda_k; the recurrence avoids materialising the
// 2^n intervals and stays exact.
inline std::vector<Rational> stage_lambdas(unsigned N) {
    std::vector<Rational> lam;
    lam.reserve(N + 1);
    Rational l(1, 2);
    lam.push_back(l);
    Rational pow2(1);
    for (unsigned n = 0; n < N; ++n) {
        l -= l * l / pow2;
        pow2 *= 2;
        lam.push_back(l);
    }
    return lam;
}

struct StageMeasure {
    unsigned n = 0;
    Rational lambda;          // from the scalar recurrence
    Rational residual;        // recurrence value minus interval-set measure
    bool interval_checked = false;
};

// Measure table for stages 0..N. Stages up to interval_cap are recomputed
// from the explicit interval sets and the residual must vanish exactly;
// deeper stages rely on the recurrence alone (their interval lists are
// astronomically wide rationals). Also enforces strict decrease, positivity,
// and lambda_n < 1/4 for n >= 1.
inline std::vector<StageMeasure> stage_measure_check(unsigned N, unsigned interval_cap = 8) {
    if (N < 1) fail(Errc::BadInput, "need N >= 1");
    const auto lam = stage_lambdas(N);
    std::vector<StageMeasure> table(N + 1);
    for (unsigned n = 0; n <= N; ++n) {
        auto& row = table[n];
        row.n = n;
        row.lambda = lam[n];
        if (n <= interval_cap) {
            row.residual = lam[n] - cantor_stage(n).measure();
            row.interval_checked = true;
            if (row.residual != 0)
                fail(Errc::ConsistencyViolation,
                     "recurrence and interval measure disagree at stage " + std::to_string(n));
        }
        if (!(row.lambda > 0))
            fail(Errc::ConsistencyViolation, "stage measure not positive");
        if (n >= 1) {
            if (!(row.lambda < lam[n - 1]))
                fail(Errc::ConsistencyViolation, "stage measures not strictly decreasing");
            // equality holds at n = 1 (1/2 - (1/2)^2), strict below 1/4 afterwards
            if (!(row.lambda <= Rational(1, 4)) || (n >= 2 && row.lambda == Rational(1, 4)))
                fail(Errc::ConsistencyViolation, "stage measure not below 1/4");
        }
    }
    return table;
}

// Integral of the indicator of C over [0, x], exact.
inline Rational cantor_function(const IntervalSet& C, const Rational& x) {
    if (x < 0 || x > 1) fail(Errc::OutOfRange, "argument outside [0,1]");
    Rational acc(0);
    for (const auto& [a, b] : C.intervals) {
        if (a >= x) break;
        const Rational hi = b < x ? b : x;
        acc += hi - a;
    }
    return acc;
}

// Double flavour over a pre-converted endpoint list; used by the samplers.
inline double cantor_function_d(const std::vector<std::pair<double, double>>& C, double x) {
    double acc = 0.0;
    for (const auto& [a, b] : C) {
        if (a >= x) break;
        acc += std::min(b, x) - a;
    }
    return acc;
}

inline std::vector<std::pair<double, double>> intervals_as_double(const IntervalSet& C) {
    std::vector<std::pair<double, double>> out;
    out.reserve(C.intervals.size());
    for (const auto& [a, b] : C.intervals) out.emplace_back(to_double(a), to_double(b));
    return out;
}

struct ChordBoundsReport {
    std::size_t samples = 0;
    double max_lower_violation = 0.0;  // of t - t^3/24 <= chord(t)
    double max_upper_violation = 0.0;  // of chord(t) <= t
};

// Samples t = k/m over [0,1] and records how badly either envelope bound
// fails. Both maxima should sit at rounding noise.
inline ChordBoundsReport chord_bounds_check(std::size_t m) {
    if (m == 0) fail(Errc::BadInput, "need at least one sample");
    ChordBoundsReport rep;
    rep.samples = m + 1;
    for (std::size_t k = 0; k <= m; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(m);
        const double c = chord(t);
        const double lower = t - t * t * t / 24.0;
        rep.max_lower_violation = std::max(rep.max_lower_violation, lower - c);
        rep.max_upper_violation = std::max(rep.max_upper_violation, c - t);
    }
    return rep;
}

// Guard behind the envelope argument: t^2 <= t^3 / 24 would force t >= 24,
// impossible for t in (0,1]. Kept as an executable statement of the bound.
inline bool chord_gap_guard() { return Rational(24) > Rational(1); }

// Minimum of chord(t)/t over a uniform grid on (0,1]. The ratio is strictly
// decreasing, so the minimum must land on the last grid point; anything else
// trips a consistency failure. The value at t = 1 is 2*sin(1/2).
inline double chord_ratio_min(std::size_t grid = 4096) {
    if (grid == 0) fail(Errc::BadInput, "need at least one sample");
    double best = 2.0;
    std::size_t arg = 0;
    for (std::size_t k = 1; k <= grid; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(grid);
        const double r = chord(t) / t;
        if (r < best) {
            best = r;
            arg = k;
        }
    }
    if (arg != grid)
        fail(Errc::ConsistencyViolation, "chord(t)/t minimum not at t = 1");
    return best;
}

struct StageNormReport {
    MetricSpaceD space;           // chordal interval over the sample set
    LipschitzMap<double> f;       // cantor_function restricted to the samples
    std::vector<double> samples;  // sorted, matches point indices
    double ell = 0.0;             // component length of the stage
    double norm = 0.0;            // brute-force Lipschitz constant
    double closed_form = 0.0;     // ell / chord(ell)
    std::vector<PointPair> attaining;
    bool attains_on_components = false;  // attaining set == component endpoint pairs
};

// Lipschitz analysis of the stage-n integral function on the chordal
// interval. Samples are the component endpoints plus an optional uniform
// grid; the norm must match ell_n / chord(ell_n) and be attained exactly on
// the per-component endpoint pairs.
inline StageNormReport stage_norm_analysis(unsigned n, std::size_t extra_grid = 0) {
    const IntervalSet C = cantor_stage(n);
    const auto cd = intervals_as_double(C);

    std::vector<double> samples;
    samples.reserve(cd.size() * 2 + extra_grid + 1);
    for (const auto& [a, b] : cd) {
        samples.push_back(a);
        samples.push_back(b);
    }
    if (extra_grid > 0)
        for (std::size_t k = 0; k <= extra_grid; ++k)
            samples.push_back(static_cast<double>(k) / static_cast<double>(extra_grid));
    std::sort(samples.begin(), samples.end());
    samples.erase(std::unique(samples.begin(), samples.end()), samples.end());

    StageNormReport rep;
    rep.space = build_chordal_interval(samples);
    rep.samples = samples;

    std::vector<double> vals(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) vals[i] = cantor_function_d(cd, samples[i]);
    rep.f = LipschitzMap<double>::scalar(rep.space, std::move(vals));

    const Rational ell = C.intervals.front().second - C.intervals.front().first;
    rep.ell = to_double(ell);
    rep.closed_form = rep.ell / chord(rep.ell);

    auto ln = lip_norm(rep.f);
    rep.norm = ln.norm;
    rep.attaining = std::move(ln.attaining);

    std::vector<PointPair> component_pairs;
    component_pairs.reserve(cd.size());
    for (const auto& [a, b] : cd) {
        const auto ia = std::lower_bound(samples.begin(), samples.end(), a) - samples.begin();
        const auto ib = std::lower_bound(samples.begin(), samples.end(), b) - samples.begin();
        component_pairs.emplace_back(static_cast<std::size_t>(ia), static_cast<std::size_t>(ib));
    }
    std::sort(component_pairs.begin(), component_pairs.end());
    auto sorted_attaining = rep.attaining;
    std::sort(sorted_attaining.begin(), sorted_attaining.end());
    rep.attains_on_components = sorted_attaining == component_pairs;
    return rep;
}

struct CircleReport {
    MetricSpaceD space;          // chordal circle over the angle set
    LipschitzMap<double> phi;
    std::vector<double> angles;  // sorted, matches point indices
    double delta = 0.0;
    double eta = 0.0;
    double K = 0.0;              // min chord(t)/t on (0,1]
    double lambda = 0.0;         // stage measure
    double h_end = 0.0;          // value at angle 1: lambda - delta*(1 - lambda)
    double x3 = 0.0;             // end of the return ramp
    double norm_phi = 0.0;
    double arc_norm = 0.0;       // best class with both angles in [0,1]
    double outside_sup = 0.0;    // best class with an endpoint outside (0,1)
    double outside_bound = 0.0;  // max(1/2, 2*delta/K)
    bool confined = false;       // near-attaining classes all inside the open arc
    bool outside_ok = false;     // outside_sup <= outside_bound + tol
};

// Circle function whose attainment is confined to the open arc (0,1):
//   on [0,1]       h(x) = (1+delta) f_n(x) - delta x   (slope 1 on C_n, -delta off)
//   on [1,1+eta]   the constant h(1)
//   on [1+eta,x3]  a ramp of slope -sign(h(1))/2 back to zero,
//                  x3 = 1 + eta + 2|h(1)|
//   on [x3,2pi)    zero.
// h(1) = lambda_n - delta (1 - lambda_n) can be negative at usable stages
// (stage 2 with delta = 2/5 gives -3/32), so the ramp direction follows the
// sign rather than assuming a descent. Requires x3 < 2pi.
inline CircleReport circle_counterexample(unsigned stage, double delta, double eta,
                                          std::size_t grid = 1024, double tol = 1e-9) {
    CircleReport rep;
    rep.K = chord_ratio_min();
    if (!(delta > 0.0) || !(delta < rep.K / 2.0))
        fail(Errc::DeltaTooLarge, "need 0 < delta < K/2 with K = " + std::to_string(rep.K));
    if (!(eta > 0.0) || !(eta < 1.0)) fail(Errc::EtaOutOfRange, "need 0 < eta < 1");
    if (grid < 4) fail(Errc::BadInput, "need at least 4 grid angles");

    const IntervalSet C = cantor_stage(stage);
    const auto cd = intervals_as_double(C);
    const Rational lam = C.measure();
    rep.delta = delta;
    rep.eta = eta;
    rep.lambda = to_double(lam);
    rep.h_end = rep.lambda - delta * (1.0 - rep.lambda);
    rep.x3 = 1.0 + eta + 2.0 * std::fabs(rep.h_end);
    const double two_pi = 2.0 * std::acos(-1.0);
    if (!(rep.x3 < two_pi))
        fail(Errc::BreakpointOverflow, "return ramp ends at " + std::to_string(rep.x3));

    std::vector<double> angles;
    angles.reserve(grid + cd.size() * 2 + 4);
    for (std::size_t k = 0; k < grid; ++k)
        angles.push_back(two_pi * static_cast<double>(k) / static_cast<double>(grid));
    for (const auto& [a, b] : cd) {
        angles.push_back(a);
        angles.push_back(b);
    }
    angles.push_back(1.0);
    angles.push_back(1.0 + eta);
    angles.push_back(rep.x3);
    std::sort(angles.begin(), angles.end());
    angles.erase(std::unique(angles.begin(), angles.end()), angles.end());

    rep.space = build_chordal_circle(angles, 0);
    rep.angles = angles;

    auto value_at = [&](double a) -> double {
        if (a <= 1.0) return (1.0 + delta) * cantor_function_d(cd, a) - delta * a;
        if (a <= 1.0 + eta) return rep.h_end;
        if (a <= rep.x3) {
            const double sgn = rep.h_end >= 0.0 ? 1.0 : -1.0;
            return rep.h_end - sgn * (a - (1.0 + eta)) / 2.0;
        }
        return 0.0;
    };
    std::vector<double> vals(angles.size());
    for (std::size_t i = 0; i < angles.size(); ++i) vals[i] = value_at(angles[i]);
    rep.phi = LipschitzMap<double>::scalar(rep.space, std::move(vals));

    rep.outside_bound = std::max(0.5, 2.0 * delta / rep.K);
    const std::size_t n = angles.size();
    bool confined = true;
    double norm = 0.0, arc = 0.0, outside = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = std::fabs(molecule_value_norm(rep.phi, i, j));
            norm = std::max(norm, v);
            const bool in_closed = angles[i] <= 1.0 && angles[j] <= 1.0;
            const bool in_open = angles[i] > 0.0 && angles[i] < 1.0 && angles[j] > 0.0 &&
                                 angles[j] < 1.0;
            if (in_closed) arc = std::max(arc, v);
            if (!in_open) {
                outside = std::max(outside, v);
                if (v > 1.0 - tol) confined = false;
            }
        }
    rep.norm_phi = norm;
    rep.arc_norm = arc;
    rep.outside_sup = outside;
    rep.confined = confined;
    rep.outside_ok = outside <= rep.outside_bound + tol;
    if (std::fabs(rep.norm_phi - rep.arc_norm) > tol)
        fail(Errc::ConsistencyViolation, "norm not realised on the arc");
    return rep;
}

struct ConcavityScan {
    std::size_t samples = 0;
    double min_ratio = 0.0;   // min over z of gromov(x,y;z) / min(d(x,z), d(y,z))
    double min_bound = 0.0;   // min over z of the quantitative floor phi(s)
    double worst_slack = 0.0; // min over z of ratio - phi(s)
    bool pointwise_ok = false;
};

// For x = e^{it}, y = 1 on the chordal circle, sweeps z = e^{is} over
// s in [-pi + t/2, t/2] \ {0} (there the nearer endpoint is y) and verifies
//   (x,y)_z / d(y,z)  >=  (1/8) | (e^{is}-1)/|e^{is}-1| - (e^{it}-1)/|e^{it}-1| |^2,
// the floor extracted from the parallelogram-convexity chain. A strictly
// positive minimum certifies uniform concavity along this family.
inline ConcavityScan circle_concavity_scan(double t, std::size_t samples = 10000,
                                           double tol = 1e-9) {
    const double pi = std::acos(-1.0);
    if (!(t > 0.0) || !(t <= pi)) fail(Errc::OutOfRange, "need t in (0, pi]");
    if (samples < 2) fail(Errc::BadInput, "need at least 2 samples");

    const std::complex<double> x = std::polar(1.0, t);
    const std::complex<double> y(1.0, 0.0);
    const double dxy = std::abs(x - y);
    const double lo = -pi + t / 2.0, hi = t / 2.0;

    ConcavityScan rep;
    rep.min_ratio = 2.0;
    rep.min_bound = 2.0;
    rep.worst_slack = 2.0;
    const std::complex<double> ux = (x - y) / dxy;
    for (std::size_t k = 0; k <= samples; ++k) {
        const double s = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(samples);
        if (std::fabs(s) < 1e-12) continue;
        const std::complex<double> z = std::polar(1.0, s);
        const double dxz = std::abs(x - z), dyz = std::abs(y - z);
        const double g = (dxz + dyz - dxy) / 2.0;
        const double ratio = g / std::min(dxz, dyz);
        const std::complex<double> uz = (z - y) / dyz;
        const double bound = std::norm(uz - ux) / 8.0;
        rep.min_ratio = std::min(rep.min_ratio, ratio);
        rep.min_bound = std::min(rep.min_bound, bound);
        rep.worst_slack = std::min(rep.worst_slack, ratio - bound);
        ++rep.samples;
    }
    rep.pointwise_ok = rep.worst_slack >= -tol && rep.min_ratio > 0.0;
    return rep;
}

// Convexity modulus of the plane: delta(u) = 1 - sqrt(1 - u^2/4). The scan's
// floor rests on delta(u) >= u^2/8; exposed for direct testing.
inline double plane_convexity_modulus(double u) {
    if (u < 0.0 || u > 2.0) fail(Errc::OutOfRange, "need u in [0,2]");
    return 1.0 - std::sqrt(1.0 - u * u / 4.0);
}

}  // namespace freelip
