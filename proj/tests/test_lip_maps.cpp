#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "freelip/lipschitz_map.hpp"
#include "freelip/metric_space.hpp"

using namespace freelip;

namespace {

MetricSpaceD line3() {
    return build_from_matrix<double>({"0", "1", "2"}, {0, 1, 2, 1, 0, 1, 2, 1, 0}, 0);
}

} // namespace

TEST_CASE("lip_norm of the identity on a 3-point line") {
    auto M = line3();
    auto f = LipschitzMapD::scalar(M, {0, 1, 2});
    auto r = lip_norm(f);
    CHECK(r.norm == doctest::Approx(1.0));
    CHECK(!r.zero);
    CHECK(r.attaining.size() == 3); // every pair has slope exactly 1
}

TEST_CASE("lip_norm attainment is selective and signed values match") {
    auto M = line3();
    auto f = LipschitzMapD::scalar(M, {0, 1, 1});
    auto r = lip_norm(f);
    CHECK(r.norm == doctest::Approx(1.0));
    REQUIRE(r.attaining.size() == 1);
    CHECK(r.attaining[0] == std::pair<std::size_t, std::size_t>{0, 1});

    CHECK(evaluate_molecule(f, 1, 0)[0] == doctest::Approx(1.0));
    CHECK(evaluate_molecule(f, 0, 1)[0] == doctest::Approx(-1.0));
    CHECK(molecule_value_norm(f, 0, 2) == doctest::Approx(0.5));
    CHECK_THROWS_AS(evaluate_molecule(f, 1, 1), Error);
}

TEST_CASE("vector targets use the chosen norm") {
    auto M = line3();
    LipschitzMapD f(M, 2, NormP::Two, {0, 0, 1, 0, 1, 1});
    auto r = lip_norm(f);
    CHECK(r.norm == doctest::Approx(1.0));
    CHECK(molecule_value_norm(f, 0, 2) == doctest::Approx(std::sqrt(2.0) / 2.0));

    LipschitzMapD g(M, 2, NormP::One, {0, 0, 1, 0, 1, 1});
    CHECK(lip_norm(g).norm == doctest::Approx(1.0));
    CHECK(molecule_value_norm(g, 0, 2) == doctest::Approx(1.0));
}

TEST_CASE("base values are normalized away") {
    auto M = line3();
    auto f = LipschitzMapD::scalar(M, {5, 6, 7});
    CHECK(f.at(0) == 0.0);
    CHECK(f.at(2) == 2.0);
    CHECK(lip_norm(f).norm == doctest::Approx(1.0));
}

TEST_CASE("rational maps evaluate exactly") {
    auto M = build_from_matrix<Rational>({"0", "1", "2"},
                                         {0, 1, 2, 1, 0, 1, 2, 1, 0}, 0);
    auto f = LipschitzMapQ::scalar(M, {Rational(0), Rational(1), Rational(3, 2)});
    auto r = lip_norm(f);
    CHECK(r.norm == Rational(1));
    REQUIRE(r.attaining.size() == 1);
    CHECK(evaluate_molecule(f, 2, 1)[0] == Rational(1, 2));
    CHECK(molecule_value_norm(f, 0, 2) == Rational(3, 4));

    // Exact vector values under l1 / linf.
    LipschitzMapQ g(M, 2, NormP::Inf,
                    {Rational(0), Rational(0), Rational(1), Rational(1, 2), Rational(2), Rational(1)});
    CHECK(lip_norm(g).norm == Rational(1));
}

TEST_CASE("zero maps are flagged") {
    auto M = line3();
    auto f = LipschitzMapD::scalar(M, {0, 0, 0});
    auto r = lip_norm(f);
    CHECK(r.zero);
    CHECK(r.attaining.empty());
}

TEST_CASE("locality profile tracks scales and the margin") {
    auto M = line3();
    auto f = LipschitzMapD::scalar(M, {0, 0, 1});
    auto prof = locality_profile(f);
    REQUIRE(prof.thresholds.size() == 2);
    CHECK(prof.thresholds[0] == 1.0);
    CHECK(prof.thresholds[1] == 2.0);
    CHECK(prof.s[0] == doctest::Approx(1.0)); // slope 1 already at distance 1
    CHECK(prof.s[1] == doctest::Approx(1.0));
    CHECK(prof.nonlocal_margin == doctest::Approx(0.0));
    CHECK(prof.s.back() == doctest::Approx(lip_norm(f).norm)); // profile tops out at the norm

    // A map whose norm lives only at the large scale has positive margin.
    auto W = build_from_matrix<double>({"0", "1", "2"},
                                       {0, 1, 1.2, 1, 0, 1, 1.2, 1, 0}, 0);
    auto g = LipschitzMapD::scalar(W, {0, 0.5, 1.2});
    auto gp = locality_profile(g);
    CHECK(lip_norm(g).norm == doctest::Approx(1.0));
    CHECK(gp.nonlocal_margin == doctest::Approx(0.3));

    // Profiles are monotone in the threshold.
    for (std::size_t i = 1; i < gp.s.size(); ++i) CHECK(gp.s[i] >= gp.s[i - 1]);
}

TEST_CASE("McShane extension") {
    auto M = line3();
    SUBCASE("tight constant reproduces the formula") {
        auto ext = mcshane_extend<double>(M, {0, 1}, {0, 1}, 1, NormP::One, 1.0);
        CHECK(ext.at(2) == doctest::Approx(2.0));
        CHECK(ext.at(0) == 0.0);
        CHECK(ext.at(1) == doctest::Approx(1.0));
        CHECK(lip_norm(ext).norm <= 1.0 + 1e-12);
    }
    SUBCASE("looser constants stay admissible") {
        auto ext = mcshane_extend<double>(M, {0, 1}, {0, 1}, 1, NormP::One, 2.0);
        CHECK(ext.at(2) == doctest::Approx(3.0));
        CHECK(lip_norm(ext).norm <= 2.0 + 1e-12);
    }
    SUBCASE("L below the subset constant is rejected") {
        try {
            mcshane_extend<double>(M, {0, 1}, {0, 1}, 1, NormP::One, 0.5);
            CHECK(false);
        } catch (const Error& e) {
            CHECK(e.code() == Errc::LTooSmall);
        }
    }
    SUBCASE("vector targets extend coordinatewise under sup norm only") {
        auto ext = mcshane_extend<double>(M, {0, 1}, {0, 0, 1, 0.5}, 2, NormP::Inf, 1.0);
        CHECK(ext.at(2, 0) == doctest::Approx(2.0));
        CHECK(ext.at(2, 1) == doctest::Approx(1.5));
        CHECK(lip_norm(ext).norm <= 1.0 + 1e-12);
        CHECK_THROWS_AS(mcshane_extend<double>(M, {0, 1}, {0, 0, 1, 0.5}, 2, NormP::Two, 1.0),
                        Error);
    }
    SUBCASE("subset must contain the base") {
        CHECK_THROWS_AS(mcshane_extend<double>(M, {1, 2}, {0, 1}, 1, NormP::One, 1.0), Error);
    }
    SUBCASE("exact rational extension") {
        auto Q = build_from_matrix<Rational>({"0", "1", "2"},
                                             {0, 1, 2, 1, 0, 1, 2, 1, 0}, 0);
        auto ext = mcshane_extend<Rational>(Q, {0, 1}, {Rational(0), Rational(1, 3)}, 1,
                                            NormP::One, Rational(1, 3));
        CHECK(ext.at(2) == Rational(2, 3));
        CHECK(lip_norm(ext).norm == Rational(1, 3));
    }
}
