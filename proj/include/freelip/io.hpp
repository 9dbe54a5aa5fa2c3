#pragma once

// JSON loaders for space and map files, and the CSV emitters used by the CLI.
//
// Space file: { "labels": [...], "base": "label",
//               "matrix": [[...]] | "coords": {"points": [[...]], "p": 1|2|"inf"} }
// Map file:   { "space": "<path>" | {...inline...},
//               "values": {"label": v | [v1,...,vd]}, "target_p": 1|2|"inf" }
//
// Rational mode parses numeric entries through their decimal text, so "0.1"
// loads as exactly 1/10.

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "freelip/cantor_circle.hpp"
#include "freelip/extremal.hpp"
#include "freelip/grid.hpp"
#include "freelip/lipschitz_map.hpp"
#include "freelip/metric_space.hpp"

namespace freelip {

using Json = nlohmann::ordered_json;

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Shortest-exact rendering for CSV cells: %.17g for doubles, p/q for exact.
std::string num_str(double x);
std::string num_str(const Rational& x);

MetricSpace<double> space_from_json_d(const Json& j);
MetricSpace<Rational> space_from_json_q(const Json& j);

// The map keeps a pointer into its space, so loading returns both with the
// space pinned behind a shared_ptr.
struct LoadedMapD {
    std::shared_ptr<MetricSpace<double>> space;
    LipschitzMap<double> map;
};
struct LoadedMapQ {
    std::shared_ptr<MetricSpace<Rational>> space;
    LipschitzMap<Rational> map;
};
LoadedMapD map_from_json_d(const Json& j);
LoadedMapQ map_from_json_q(const Json& j);

std::string classify_csv(const MetricSpace<double>& M,
                         const std::vector<MoleculeReport<double>>& reps);
std::string classify_csv(const MetricSpace<Rational>& M,
                         const std::vector<MoleculeReport<Rational>>& reps);

// One row per stage: n, lambda, component length, stage norm, argmax pair.
std::string cantor_trend_csv(const std::vector<StageMeasure>& measures,
                             const std::vector<StageNormReport>& norms);
std::string concavity_csv(const std::vector<std::pair<double, ConcavityScan>>& rows);
std::string nocufe_csv(const NocufeTable& table);

} // namespace freelip
