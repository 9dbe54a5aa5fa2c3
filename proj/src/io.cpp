#include "freelip/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace freelip {

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::BadInput, "cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const std::exception& e) {
        fail(Errc::BadInput, "json parse error in '" + path + "': " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) fail(Errc::BadInput, "cannot write '" + path + "'");
    out << text;
}

std::string num_str(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string num_str(const Rational& x) { return rational_string(x); }

namespace {

double scalar_from(const Json& v, double*) {
    if (!v.is_number()) fail(Errc::BadInput, "expected a number, got " + v.dump());
    return v.get<double>();
}

Rational scalar_from(const Json& v, Rational*) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (v.is_number_float()) return parse_rational(v.dump());
    fail(Errc::BadInput, "expected a number or rational string, got " + v.dump());
}

NormP norm_from_json(const Json& v) {
    if (v.is_string()) {
        if (v.get<std::string>() == "inf") return NormP::Inf;
        fail(Errc::BadInput, "p must be 1, 2 or \"inf\"");
    }
    if (v.is_number_integer()) return norm_from_int(v.get<int>());
    fail(Errc::BadInput, "p must be 1, 2 or \"inf\"");
}

template <class T>
MetricSpace<T> space_from_json_impl(const Json& j) {
    if (!j.is_object()) fail(Errc::BadInput, "space file must be a json object");
    if (j.contains("matrix") == j.contains("coords"))
        fail(Errc::BadInput, "space needs exactly one of \"matrix\" or \"coords\"");

    std::vector<std::string> labels;
    if (j.contains("labels")) {
        for (const auto& l : j.at("labels")) labels.push_back(l.get<std::string>());
    }

    std::size_t n = 0;
    std::vector<std::vector<T>> points;
    std::vector<T> dist;
    NormP p = NormP::One;
    if (j.contains("matrix")) {
        const auto& mat = j.at("matrix");
        n = mat.size();
        dist.reserve(n * n);
        for (const auto& row : mat) {
            if (row.size() != n) fail(Errc::BadInput, "distance matrix is not square");
            for (const auto& e : row) dist.push_back(scalar_from(e, static_cast<T*>(nullptr)));
        }
    } else {
        const auto& co = j.at("coords");
        if (!co.contains("points")) fail(Errc::BadInput, "coords needs \"points\"");
        p = co.contains("p") ? norm_from_json(co.at("p")) : NormP::Two;
        for (const auto& pt : co.at("points")) {
            std::vector<T> row;
            for (const auto& e : pt) row.push_back(scalar_from(e, static_cast<T*>(nullptr)));
            points.push_back(std::move(row));
        }
        n = points.size();
    }
    if (n == 0) fail(Errc::TooFewPoints, "empty space");
    if (labels.empty())
        for (std::size_t i = 0; i < n; ++i) labels.push_back("p" + std::to_string(i));
    if (labels.size() != n) fail(Errc::BadInput, "label count does not match point count");

    std::size_t base = 0;
    if (j.contains("base")) {
        if (!j.at("base").is_string()) fail(Errc::BadInput, "base must be a label string");
        const std::string want = j.at("base").get<std::string>();
        bool found = false;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == want) {
                base = i;
                found = true;
                break;
            }
        if (!found) fail(Errc::BadInput, "base label '" + want + "' not in labels");
    }

    if (!dist.empty()) return build_from_matrix<T>(std::move(labels), std::move(dist), base);
    return build_normed_subset<T>(points, p, base, std::move(labels));
}

template <class T>
std::pair<std::shared_ptr<MetricSpace<T>>, LipschitzMap<T>> map_from_json_impl(const Json& j) {
    if (!j.is_object() || !j.contains("space") || !j.contains("values"))
        fail(Errc::BadInput, "map file needs \"space\" and \"values\"");
    Json sj = j.at("space").is_string() ? read_json_file(j.at("space").get<std::string>())
                                        : j.at("space");
    auto space = std::make_shared<MetricSpace<T>>(space_from_json_impl<T>(sj));

    const auto& vv = j.at("values");
    if (!vv.is_object()) fail(Errc::BadInput, "\"values\" must map labels to numbers");
    std::size_t dim = 0;
    std::vector<T> vals;
    for (const auto& label : space->labels) {
        if (!vv.contains(label)) fail(Errc::BadInput, "missing value for label '" + label + "'");
        const auto& cell = vv.at(label);
        std::vector<T> row;
        if (cell.is_array())
            for (const auto& e : cell) row.push_back(scalar_from(e, static_cast<T*>(nullptr)));
        else
            row.push_back(scalar_from(cell, static_cast<T*>(nullptr)));
        if (dim == 0) dim = row.size();
        if (row.size() != dim || dim == 0)
            fail(Errc::BadInput, "inconsistent value dimension at '" + label + "'");
        vals.insert(vals.end(), row.begin(), row.end());
    }
    if (vv.size() != space->size()) fail(Errc::BadInput, "values list extra labels");

    NormP target = NormP::Inf;
    if (j.contains("target_p")) target = norm_from_json(j.at("target_p"));
    return {space, LipschitzMap<T>(*space, dim, target, std::move(vals))};
}

template <class T>
std::string classify_csv_impl(const MetricSpace<T>& M,
                              const std::vector<MoleculeReport<T>>& reps) {
    std::ostringstream out;
    out << "x,y,d,extreme,witness,epsilon_star,strongly_exposed\n";
    for (const auto& r : reps) {
        out << M.labels[r.mol.first] << ',' << M.labels[r.mol.second] << ','
            << num_str(r.distance) << ',' << (r.is_extreme ? 1 : 0) << ','
            << (r.witness ? M.labels[*r.witness] : std::string{}) << ','
            << (r.eps_infinite ? std::string("inf") : num_str(r.eps_star)) << ','
            << (r.strongly_exposed ? 1 : 0) << '\n';
    }
    return out.str();
}

} // namespace

MetricSpace<double> space_from_json_d(const Json& j) { return space_from_json_impl<double>(j); }
MetricSpace<Rational> space_from_json_q(const Json& j) {
    return space_from_json_impl<Rational>(j);
}

LoadedMapD map_from_json_d(const Json& j) {
    auto [space, map] = map_from_json_impl<double>(j);
    return {space, std::move(map)};
}

LoadedMapQ map_from_json_q(const Json& j) {
    auto [space, map] = map_from_json_impl<Rational>(j);
    return {space, std::move(map)};
}

std::string classify_csv(const MetricSpace<double>& M,
                         const std::vector<MoleculeReport<double>>& reps) {
    return classify_csv_impl(M, reps);
}

std::string classify_csv(const MetricSpace<Rational>& M,
                         const std::vector<MoleculeReport<Rational>>& reps) {
    return classify_csv_impl(M, reps);
}

std::string cantor_trend_csv(const std::vector<StageMeasure>& measures,
                             const std::vector<StageNormReport>& norms) {
    if (measures.size() < norms.size())
        fail(Errc::BadInput, "need a measure row for every stage norm row");
    std::ostringstream out;
    out << "n,lambda,ell,L,argmax\n";
    for (std::size_t i = 0; i < norms.size(); ++i) {
        const auto& nr = norms[i];
        out << i << ',' << num_str(measures[i].lambda) << ',' << num_str(nr.ell) << ','
            << num_str(nr.norm) << ',';
        if (!nr.attaining.empty())
            out << num_str(nr.samples[nr.attaining.front().first]) << '~'
                << num_str(nr.samples[nr.attaining.front().second]);
        out << '\n';
    }
    return out.str();
}

std::string concavity_csv(const std::vector<std::pair<double, ConcavityScan>>& rows) {
    std::ostringstream out;
    out << "t,min_ratio,min_bound\n";
    for (const auto& [t, scan] : rows)
        out << num_str(t) << ',' << num_str(scan.min_ratio) << ',' << num_str(scan.min_bound)
            << '\n';
    return out.str();
}

std::string nocufe_csv(const NocufeTable& table) {
    std::ostringstream out;
    out << "n,value,formula,ratio,eps_star,strongly_exposed\n";
    for (const auto& r : table.rows)
        out << r.n << ',' << num_str(r.value) << ',' << num_str(r.formula) << ','
            << num_str(r.ratio) << ',' << num_str(r.eps_star) << ','
            << (r.strongly_exposed ? 1 : 0) << '\n';
    return out.str();
}

} // namespace freelip
