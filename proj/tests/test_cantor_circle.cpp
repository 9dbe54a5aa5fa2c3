#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "freelip/cantor_circle.hpp"

using namespace freelip;

TEST_CASE("stage construction: explicit intervals for n = 0,1,2") {
    auto C0 = cantor_stage(0);
    REQUIRE(C0.intervals.size() == 1);
    CHECK(C0.intervals[0].first == Rational(1, 4));
    CHECK(C0.intervals[0].second == Rational(3, 4));
    CHECK(C0.measure() == Rational(1, 2));

    auto C1 = cantor_stage(1);
    REQUIRE(C1.intervals.size() == 2);
    CHECK(C1.intervals[0] == std::make_pair(Rational(1, 4), Rational(3, 8)));
    CHECK(C1.intervals[1] == std::make_pair(Rational(5, 8), Rational(3, 4)));
    CHECK(C1.measure() == Rational(1, 4));

    auto C2 = cantor_stage(2);
    REQUIRE(C2.intervals.size() == 4);
    CHECK(C2.intervals[0] == std::make_pair(Rational(1, 4), Rational(39, 128)));
    CHECK(C2.intervals[1] == std::make_pair(Rational(41, 128), Rational(3, 8)));
    CHECK(C2.intervals[2] == std::make_pair(Rational(5, 8), Rational(87, 128)));
    CHECK(C2.intervals[3] == std::make_pair(Rational(89, 128), Rational(3, 4)));
    CHECK(C2.measure() == Rational(7, 32));

    // components of one stage all share the same length
    for (unsigned n : {3u, 5u}) {
        auto C = cantor_stage(n);
        REQUIRE(C.intervals.size() == (std::size_t{1} << n));
        const Rational len = C.intervals[0].second - C.intervals[0].first;
        for (const auto& [a, b] : C.intervals) CHECK(b - a == len);
        CHECK(len * Rational(1 << n) == C.measure());
    }
}

TEST_CASE("measure recurrence: table, residuals, telescoped identity") {
    auto table = stage_measure_check(12);
    REQUIRE(table.size() == 13);
    CHECK(table[0].lambda == Rational(1, 2));
    CHECK(table[1].lambda == Rational(1, 4));
    CHECK(table[2].lambda == Rational(7, 32));
    CHECK(table[3].lambda == Rational(847, 4096));
    for (unsigned n = 0; n <= 12; ++n) {
        CHECK(table[n].residual == 0);
        CHECK(table[n].interval_checked == (n <= 8));
        if (n >= 1) {
            CHECK(table[n].lambda < table[n - 1].lambda);
            CHECK(table[n].lambda <= Rational(1, 4));
        }
        if (n >= 2) CHECK(table[n].lambda < Rational(1, 4));
        CHECK(table[n].lambda > 0);
    }

    // lambda_n = 1/2 - sum of removed measure, exactly
    const auto lam = stage_lambdas(8);
    Rational removed(0);
    Rational pw(1);
    for (unsigned n = 0; n < 8; ++n) {
        removed += (lam[n] / pw) * (lam[n] / pw) * pw;
        pw *= 2;
        CHECK(lam[n + 1] == Rational(1, 2) - removed);
    }

    CHECK_THROWS_WITH_AS(stage_measure_check(0), doctest::Contains("N >= 1"), Error);
}

TEST_CASE("deep recurrence stays exact and monotone") {
    auto lam = stage_lambdas(20);
    REQUIRE(lam.size() == 21);
    for (unsigned n = 1; n <= 20; ++n) {
        CHECK(lam[n] > 0);
        CHECK(lam[n] < lam[n - 1]);
    }
    CHECK(lam[20] > Rational(3, 16));  // fat: measure stays bounded away from 0
}

TEST_CASE("cantor_function: exact integrals") {
    auto C0 = cantor_stage(0);
    CHECK(cantor_function(C0, Rational(0)) == 0);
    CHECK(cantor_function(C0, Rational(1, 4)) == 0);
    CHECK(cantor_function(C0, Rational(3, 4)) == Rational(1, 2));
    CHECK(cantor_function(C0, Rational(1)) == Rational(1, 2));

    auto C1 = cantor_stage(1);
    CHECK(cantor_function(C1, Rational(5, 16)) == Rational(1, 16));
    CHECK(cantor_function(C1, Rational(1, 2)) == Rational(1, 8));
    CHECK(cantor_function(C1, Rational(1)) == Rational(1, 4));

    auto C2 = cantor_stage(2);
    CHECK(cantor_function(C2, Rational(1)) == Rational(7, 32));

    // non-decreasing on a dyadic sweep
    Rational prev(-1);
    for (int k = 0; k <= 64; ++k) {
        Rational v = cantor_function(C2, Rational(k, 64));
        CHECK(v >= prev);
        prev = v;
    }

    CHECK_THROWS_WITH_AS(cantor_function(C1, Rational(3, 2)), doctest::Contains("outside"),
                         Error);
    CHECK_THROWS_WITH_AS(cantor_function(C1, Rational(-1, 4)), doctest::Contains("outside"),
                         Error);

    // double flavour agrees on dyadic inputs
    auto cd = intervals_as_double(C1);
    CHECK(cantor_function_d(cd, 0.5) == 0.125);
    CHECK(cantor_function_d(cd, 0.75) == 0.25);
}

TEST_CASE("chord envelope: t - t^3/24 <= chord(t) <= t on [0,1]") {
    auto rep = chord_bounds_check(100000);
    CHECK(rep.samples == 100001);
    CHECK(rep.max_lower_violation <= 1e-12);
    CHECK(rep.max_upper_violation <= 1e-12);

    // endpoint values: 23/24 <= 2 sin(1/2) <= 1
    CHECK(chord(1.0) == doctest::Approx(0.958851077208406).epsilon(1e-15));
    CHECK(23.0 / 24.0 <= chord(1.0));
    CHECK(chord(1.0) <= 1.0);
    CHECK(chord(0.0) == 0.0);

    CHECK(chord_gap_guard());
    CHECK_THROWS_AS(chord_bounds_check(0), Error);
}

TEST_CASE("chord_ratio_min lands on t = 1") {
    const double K = chord_ratio_min();
    CHECK(K == 2.0 * std::sin(0.5));
    CHECK(K == doctest::Approx(0.958851077208406).epsilon(1e-15));
    CHECK(chord_ratio_min(977) == K);  // grid-size independent endpoint
}

TEST_CASE("stage norms match the closed form and attain on components") {
    auto r0 = stage_norm_analysis(0);
    CHECK(r0.samples.size() == 2);
    CHECK(r0.ell == 0.5);
    CHECK(r0.norm == doctest::Approx(r0.closed_form).epsilon(1e-12));
    CHECK(r0.norm == doctest::Approx(1.0104931253052678).epsilon(1e-12));
    CHECK(r0.attains_on_components);
    REQUIRE(r0.attaining.size() == 1);
    CHECK(r0.attaining[0] == PointPair{0, 1});

    auto r1 = stage_norm_analysis(1, 64);
    CHECK(r1.norm == doctest::Approx(r1.closed_form).epsilon(1e-9));
    CHECK(r1.closed_form == doctest::Approx(1.000651338487597).epsilon(1e-12));
    CHECK(r1.attains_on_components);
    CHECK(r1.attaining.size() == 2);

    auto r2 = stage_norm_analysis(2, 128);
    CHECK(r2.norm == doctest::Approx(1.0001246243148247).epsilon(1e-12));
    CHECK(r2.attains_on_components);
    CHECK(r2.attaining.size() == 4);

    // trend: above 1, strictly decreasing
    CHECK(r2.norm > 1.0);
    CHECK(r2.norm < r1.norm);
    CHECK(r1.norm < r0.norm);
}

TEST_CASE("circle counterexample: stage 2, delta 0.4, eta 0.5") {
    auto rep = circle_counterexample(2, 0.4, 0.5, 1024);
    CHECK(rep.K == doctest::Approx(0.958851077208406).epsilon(1e-15));
    CHECK(rep.lambda == doctest::Approx(7.0 / 32.0).epsilon(1e-15));
    CHECK(rep.h_end == doctest::Approx(-3.0 / 32.0).epsilon(1e-15));
    CHECK(rep.x3 == doctest::Approx(1.6875).epsilon(1e-15));

    // norm realised on the arc at the component-endpoint scale
    CHECK(rep.norm_phi == doctest::Approx(1.0001246243148247).epsilon(1e-9));
    CHECK(rep.arc_norm == doctest::Approx(rep.norm_phi).epsilon(1e-12));

    // everything near the norm lives strictly inside the arc
    CHECK(rep.confined);
    CHECK(rep.outside_sup < rep.norm_phi - 1e-6);

    // outside sup is the return-ramp endpoint pair, well under the bound
    CHECK(rep.outside_sup == doctest::Approx(0.5007331735901486).epsilon(1e-12));
    CHECK(rep.outside_bound == doctest::Approx(0.4 * 2.0 / rep.K).epsilon(1e-15));
    CHECK(rep.outside_ok);
}

TEST_CASE("circle counterexample: stage 0 attains at the component image") {
    auto rep = circle_counterexample(0, 0.4, 0.5, 512);
    CHECK(rep.h_end == doctest::Approx(0.3).epsilon(1e-15));  // positive branch
    CHECK(rep.x3 == doctest::Approx(2.1).epsilon(1e-15));
    CHECK(rep.norm_phi == doctest::Approx(1.0104931253052678).epsilon(1e-9));
    CHECK(rep.confined);
    CHECK(rep.outside_ok);

    // the attaining class is exactly the image of (1/4, 3/4)
    auto ln = lip_norm(rep.phi);
    REQUIRE(ln.attaining.size() == 1);
    const auto [i, j] = ln.attaining[0];
    CHECK(rep.angles[i] == 0.25);
    CHECK(rep.angles[j] == 0.75);
}

TEST_CASE("circle counterexample: parameter guards") {
    CHECK_THROWS_WITH_AS(circle_counterexample(1, 0.48, 0.5), doctest::Contains("K/2"), Error);
    CHECK_THROWS_WITH_AS(circle_counterexample(1, 0.0, 0.5), doctest::Contains("K/2"), Error);
    CHECK_THROWS_WITH_AS(circle_counterexample(1, 0.4, 1.2), doctest::Contains("eta"), Error);
    CHECK_THROWS_WITH_AS(circle_counterexample(1, 0.4, 0.0), doctest::Contains("eta"), Error);
    CHECK_THROWS_AS(circle_counterexample(1, 0.4, 0.5, 2), Error);
}

TEST_CASE("concavity scan: spot values and positive minima") {
    // four samples over [-pi/2, pi/2] for t = pi: s = -pi/2 is the first node
    auto quick = circle_concavity_scan(std::acos(-1.0), 4);
    CHECK(quick.samples == 4);  // s = 0 excluded
    CHECK(quick.pointwise_ok);
    CHECK(quick.min_ratio > 0.0);

    const double pi = std::acos(-1.0);
    auto s1 = circle_concavity_scan(1.0, 10000);
    CHECK(s1.pointwise_ok);
    CHECK(s1.worst_slack > 0.0);
    // grid minimum sits at s = t/2: 1 - chord(1)/(2 chord(1/2))
    const double expect = 1.0 - chord(1.0) / (2.0 * chord(0.5));
    CHECK(s1.min_ratio == doctest::Approx(expect).epsilon(1e-12));
    CHECK(s1.min_ratio == doctest::Approx(0.031087578289355235).epsilon(1e-12));

    for (double t : {0.1, 0.5, 2.0, pi}) {
        auto s = circle_concavity_scan(t, 2000);
        CHECK(s.pointwise_ok);
        CHECK(s.min_ratio > 0.0);
        CHECK(s.min_bound >= 0.0);
    }

    CHECK_THROWS_AS(circle_concavity_scan(0.0), Error);
    CHECK_THROWS_AS(circle_concavity_scan(3.2), Error);
    CHECK_THROWS_AS(circle_concavity_scan(1.0, 1), Error);
}

TEST_CASE("plane convexity modulus") {
    CHECK(plane_convexity_modulus(0.0) == 0.0);
    CHECK(plane_convexity_modulus(2.0) == 1.0);
    CHECK(plane_convexity_modulus(1.0) == doctest::Approx(1.0 - std::sqrt(3.0) / 2.0));
    for (int k = 0; k <= 200; ++k) {
        const double u = 2.0 * k / 200.0;
        CHECK(plane_convexity_modulus(u) >= u * u / 8.0 - 1e-15);
    }
    CHECK_THROWS_AS(plane_convexity_modulus(2.5), Error);
}
