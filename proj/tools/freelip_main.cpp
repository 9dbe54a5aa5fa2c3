// freelip: analyze finite pointed metric spaces (molecule classification and
// unit-ball hull checks), drive the fat-Cantor/circle constructions, and run
// the dyadic-grid certificates. JSON report on stdout (byte-deterministic for
// fixed inputs and seed), CSV side files with --out, wall time on stderr.
// Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 input error.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "freelip/free_ball.hpp"
#include "freelip/io.hpp"

using namespace freelip;

namespace {

int exit_code_for(Errc c) {
    switch (c) {
        case Errc::ConsistencyViolation:
        case Errc::CertificateViolation:
        case Errc::SolverFailure:
        case Errc::NoWitness:
        case Errc::NotExtreme:
        case Errc::NotAttaining:
        case Errc::DegenerateLocal:
        case Errc::MemberNotExposed:
        case Errc::BreakpointOverflow:
            return 1;
        default:
            return 2;
    }
}

bool exact_env() {
    const char* v = std::getenv("FREELIP_EXACT");
    return v != nullptr && std::string(v) == "1";
}

// Deterministic uniform doubles in [0,1): fixed 53-bit mapping, independent
// of library distribution internals.
double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct AnalyzeResult {
    Json results;
    bool pass = false;
    std::string csv;
};

template <class T>
AnalyzeResult analyze_space(const Json& space_json, double tol) {
    MetricSpace<T> M;
    if constexpr (scalar_traits<T>::exact)
        M = space_from_json_q(space_json);
    else
        M = space_from_json_d(space_json);

    auto reps = classify_molecules(M, tol);
    std::vector<PointPair> extreme;
    std::size_t ambiguous = 0;
    for (const auto& r : reps) {
        if (r.is_extreme) extreme.push_back(r.mol);
        if (r.ambiguous) ++ambiguous;
    }
    auto hull = ball_equals_hull(M, extreme);

    AnalyzeResult out;
    out.results["points"] = M.size();
    out.results["base"] = M.labels[M.base];
    out.results["classes"] = reps.size();
    out.results["extreme_classes"] = extreme.size();
    out.results["ambiguous_classes"] = ambiguous;
    Json hj;
    hj["equal"] = hull.equal;
    hj["classes_checked"] = hull.classes_checked;
    if (hull.violator) {
        hj["violator"] = {M.labels[hull.violator->first], M.labels[hull.violator->second]};
        Json sep = Json::array();
        for (const auto& s : hull.violator_certificate.separator) sep.push_back(to_double(s));
        hj["separator"] = sep;
        hj["gap"] = to_double(hull.violator_certificate.gap);
    }
    out.results["hull"] = hj;
    out.pass = hull.equal;
    out.csv = classify_csv(M, reps);
    return out;
}

int cmd_analyze(const std::string& file, bool exact, double tol, const std::string& outdir) {
    Json space_json = read_json_file(file);
    AnalyzeResult res = exact ? analyze_space<Rational>(space_json, tol)
                              : analyze_space<double>(space_json, tol);

    Json rep;
    rep["command"] = "analyze";
    rep["inputs"] = {{"file", file}, {"exact", exact}, {"tol", tol}};
    rep["results"] = res.results;
    rep["pass"] = res.pass;
    if (!outdir.empty()) write_text_file(outdir + "/molecules.csv", res.csv);
    std::cout << rep.dump(2) << '\n';
    return res.pass ? 0 : 1;
}

int cmd_cantor(unsigned stage, std::size_t grid, const std::string& outdir) {
    auto measures = stage_measure_check(stage == 0 ? 1 : stage);
    auto chord = chord_bounds_check(grid);
    const double K = chord_ratio_min();

    std::vector<StageNormReport> norms;
    for (unsigned n = 0; n <= stage; ++n) norms.push_back(stage_norm_analysis(n));

    const std::vector<double> ts = {0.1, 0.5, 1.0, 2.0, std::acos(-1.0)};
    std::vector<std::pair<double, ConcavityScan>> scans;
    for (double t : ts) scans.emplace_back(t, circle_concavity_scan(t));

    bool pass = chord.max_lower_violation <= 1e-12 && chord.max_upper_violation <= 1e-12;
    Json mrows = Json::array();
    for (const auto& m : measures) {
        if (m.n > stage) break;
        mrows.push_back({{"n", m.n},
                         {"lambda", num_str(m.lambda)},
                         {"interval_checked", m.interval_checked}});
    }
    Json nrows = Json::array();
    for (std::size_t i = 0; i < norms.size(); ++i) {
        const auto& nr = norms[i];
        if (i > 0 && !(nr.norm < norms[i - 1].norm)) pass = false;
        if (!nr.attains_on_components || !(nr.norm > 1.0)) pass = false;
        nrows.push_back({{"n", i},
                         {"ell", nr.ell},
                         {"norm", nr.norm},
                         {"closed_form", nr.closed_form},
                         {"attains_on_components", nr.attains_on_components}});
    }
    Json crows = Json::array();
    for (const auto& [t, scan] : scans) {
        if (!scan.pointwise_ok || !(scan.min_ratio > 0.0)) pass = false;
        crows.push_back({{"t", t},
                         {"min_ratio", scan.min_ratio},
                         {"min_bound", scan.min_bound},
                         {"pointwise_ok", scan.pointwise_ok}});
    }

    Json rep;
    rep["command"] = "cantor";
    rep["inputs"] = {{"stage", stage}, {"grid", grid}};
    rep["results"]["measures"] = mrows;
    rep["results"]["chord"] = {{"samples", chord.samples},
                               {"max_lower_violation", chord.max_lower_violation},
                               {"max_upper_violation", chord.max_upper_violation},
                               {"K", K}};
    rep["results"]["stage_norms"] = nrows;
    rep["results"]["concavity"] = crows;
    rep["pass"] = pass;
    if (!outdir.empty()) {
        write_text_file(outdir + "/trend.csv", cantor_trend_csv(measures, norms));
        write_text_file(outdir + "/concavity.csv", concavity_csv(scans));
    }
    std::cout << rep.dump(2) << '\n';
    return pass ? 0 : 1;
}

int run_alpha(int p, unsigned depth, Json& rep) {
    auto cert = alpha_certificate(p, depth);
    rep["results"]["alpha"] = {{"N", cert.N},
                               {"gamma_count", cert.gamma_count},
                               {"classes_checked", cert.classes_checked},
                               {"max_cross", num_str(cert.max_cross)},
                               {"max_cross_gamma", num_str(cert.max_cross_gamma)},
                               {"cross_bound", "2/3"},
                               {"norms_ok", cert.norms_ok},
                               {"cross_ok", cert.cross_ok},
                               {"hull_ok", cert.hull_ok},
                               {"paths_ok", cert.paths_ok},
                               {"pass", cert.pass}};
    rep["pass"] = cert.pass;
    return cert.pass ? 0 : 1;
}

int run_nocufe(int p, unsigned depth, const std::string& outdir, Json& rep) {
    auto table = nocufe_sequence(p, depth);
    bool pass = table.decreasing;
    Json rows = Json::array();
    for (const auto& r : table.rows) {
        if (!r.strongly_exposed) pass = false;
        if (std::fabs(r.value - r.formula) > 1e-12) pass = false;
        rows.push_back({{"n", r.n},
                        {"value", r.value},
                        {"formula", r.formula},
                        {"ratio", r.ratio},
                        {"eps_star", r.eps_star},
                        {"strongly_exposed", r.strongly_exposed}});
    }
    rep["results"]["nocufe"] = {{"rows", rows}, {"decreasing", table.decreasing}};
    rep["pass"] = pass;
    if (!outdir.empty()) write_text_file(outdir + "/nocufe.csv", nocufe_csv(table));
    return pass ? 0 : 1;
}

template <class T>
Json sna_one(const MetricSpace<T>& M, std::mt19937_64& rng, std::size_t dim, const T& eps) {
    std::vector<T> vals(M.size() * dim);
    for (auto& v : vals) {
        const double u = 2.0 * unit_double(rng) - 1.0;
        if constexpr (scalar_traits<T>::exact)
            v = dyadic(static_cast<long long>(std::ldexp(u, 20)), 20);
        else
            v = u;
    }
    LipschitzMap<T> f(M, dim, NormP::Two, std::move(vals));
    auto n0 = lip_norm(f);
    if (n0.zero) fail(Errc::ZeroMap, "degenerate random draw");
    for (auto& v : f.values) v /= n0.norm;

    auto res = sna_approximate(f, eps);
    const auto& c = res.cert;
    bool ok = to_double(c.dist) <= to_double(eps) * (1.0 + 1e-9) && to_double(c.gap) > 0.0;
    Json cj;
    cj["case"] = c.case_tag;
    cj["rho"] = to_double(c.rho);
    cj["witness"] = {M.labels[c.witness.first], M.labels[c.witness.second]};
    if (c.case_tag == 1) {
        cj["cutoff"] = c.cutoff;
    } else {
        cj["chosen"] = gamma_label(c.chosen);
        cj["delta"] = to_double(c.delta);
    }
    cj["norm_g"] = to_double(c.norm_g);
    cj["attains_at"] = {M.labels[c.attains_at.first], M.labels[c.attains_at.second]};
    cj["value_at_witness"] = to_double(c.value_at_witness);
    cj["deep_sup"] = to_double(c.deep_sup);
    cj["gap"] = to_double(c.gap);
    cj["dist"] = to_double(c.dist);
    cj["ok"] = ok;
    return cj;
}

int run_sna(int p, unsigned depth, double eps, std::uint64_t seed, unsigned count,
            std::size_t dim, bool exact, Json& rep) {
    std::mt19937_64 rng(seed);
    bool pass = true;
    Json certs = Json::array();
    if (exact && p == 1) {
        auto M = build_grid_space<Rational>(1, depth);
        Rational eq = parse_rational(num_str(eps));
        for (unsigned i = 0; i < count; ++i) {
            Json cj = sna_one<Rational>(M, rng, dim, eq);
            if (!cj["ok"].get<bool>()) pass = false;
            certs.push_back(std::move(cj));
        }
    } else {
        auto M = build_grid_space<double>(p, depth);
        for (unsigned i = 0; i < count; ++i) {
            Json cj = sna_one<double>(M, rng, dim, eps);
            if (!cj["ok"].get<bool>()) pass = false;
            certs.push_back(std::move(cj));
        }
    }
    rep["results"]["sna"] = {{"certificates", certs}};
    rep["pass"] = pass;
    return pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"extremal structure of free spaces over finite metric spaces"};
    app.require_subcommand(1);

    std::string space_file, outdir;
    bool exact = exact_env();
    double tol = kSegmentTol;
    unsigned stage = 5;
    std::size_t grid = 100000;
    int p = 1;
    unsigned depth = 3;
    std::string run;
    double eps = 0.2;
    std::uint64_t seed = 0;
    unsigned count = 5;
    std::size_t dim = 1;
    int jobs = 1;

    auto* analyze = app.add_subcommand("analyze", "classify molecules and check the hull");
    analyze->add_option("file", space_file, "space JSON file")->required();
    analyze->add_flag("--exact", exact, "exact rational arithmetic");
    analyze->add_option("--tol", tol, "segment tolerance for float spaces");
    analyze->add_option("--out", outdir, "directory for CSV side files");

    auto* cantor = app.add_subcommand("cantor", "fat Cantor measures and circle norms");
    cantor->add_option("--stage", stage, "deepest construction stage");
    cantor->add_option("--grid", grid, "chord bound sample count");
    cantor->add_option("--out", outdir, "directory for CSV side files");

    auto* gridcmd = app.add_subcommand("grid", "dyadic grid certificates");
    gridcmd->add_option("--p", p, "grid norm (1 or 2)");
    gridcmd->add_option("--depth", depth, "grid depth N");
    gridcmd->add_option("--run", run, "alpha | nocufe | sna")->required();
    gridcmd->add_option("--eps", eps, "sna approximation budget");
    gridcmd->add_option("--seed", seed, "sna random seed");
    gridcmd->add_option("--count", count, "sna batch size");
    gridcmd->add_option("--dim", dim, "sna target dimension");
    gridcmd->add_flag("--exact", exact, "exact rational arithmetic (p = 1)");
    gridcmd->add_option("--out", outdir, "directory for CSV side files");

    app.add_option("--jobs", jobs, "reserved; scans are single-threaded")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const auto t0 = std::chrono::steady_clock::now();
    int code = 2;
    try {
        if (!outdir.empty()) std::filesystem::create_directories(outdir);
        if (analyze->parsed()) {
            code = cmd_analyze(space_file, exact, tol, outdir);
        } else if (cantor->parsed()) {
            code = cmd_cantor(stage, grid, outdir);
        } else if (gridcmd->parsed()) {
            Json rep;
            rep["command"] = "grid";
            rep["inputs"] = {{"p", p},       {"depth", depth}, {"run", run},
                             {"eps", eps},   {"seed", seed},   {"count", count},
                             {"dim", dim},   {"exact", exact}};
            if (run == "alpha")
                code = run_alpha(p, depth, rep);
            else if (run == "nocufe")
                code = run_nocufe(p, depth, outdir, rep);
            else if (run == "sna")
                code = run_sna(p, depth, eps, seed, count, dim, exact, rep);
            else
                fail(Errc::BadInput, "--run must be alpha, nocufe or sna");
            std::cout << rep.dump(2) << '\n';
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        code = exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        code = 2;
    }
    const auto t1 = std::chrono::steady_clock::now();
    std::fprintf(stderr, "wall_ms=%.1f\n",
                 std::chrono::duration<double, std::milli>(t1 - t0).count());
    return code;
}
