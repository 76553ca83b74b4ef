#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "aptest/distribution.hpp"
#include "aptest/errors.hpp"
#include "aptest/generators.hpp"
#include "aptest/ltf.hpp"
#include "aptest/piecewise.hpp"
#include "aptest/target.hpp"

namespace aptest {

using json = nlohmann::ordered_json;

inline json to_json(const PiecewiseConstantFn& f) {
    return json{{"breakpoints", f.breakpoints()}, {"values", f.block_values()}};
}

inline PiecewiseConstantFn piecewise_from_json(const json& j) {
    return PiecewiseConstantFn(j.at("breakpoints").get<std::vector<double>>(),
                               j.at("values").get<std::vector<int>>());
}

inline json to_json(const LinearThreshold& f) {
    return json{{"w", f.w}, {"theta", f.theta}};
}

inline LinearThreshold ltf_from_json(const json& j) {
    return LinearThreshold(j.at("w").get<std::vector<double>>(), j.at("theta").get<double>());
}

inline json to_json(const BinnedTable& t) {
    json rows = json::array();
    for (const auto& [p0, p1] : t.bins) rows.push_back(json::array({p0, p1}));
    return json{{"p", rows}};
}

inline BinnedTable binned_table_from_json(const json& j) {
    std::vector<std::pair<double, double>> bins;
    for (const auto& row : j.at("p")) bins.emplace_back(row.at(0).get<double>(), row.at(1).get<double>());
    return BinnedTable{std::move(bins)};
}

inline json to_json(const MarginInstance& inst) {
    json atoms = json::array();
    for (std::size_t i = 0; i < inst.atoms.atom_count(); ++i) {
        const auto x = inst.atoms.atom(i);
        atoms.push_back(json{{"x", std::vector<double>(x.begin(), x.end())},
                             {"label", inst.labels.labels[i]},
                             {"weight", inst.atoms.weights[i]}});
    }
    return json{{"d", inst.dim}, {"atoms", std::move(atoms)}};
}

inline MarginInstance margin_instance_from_json(const json& j) {
    MarginInstance inst;
    inst.dim = j.at("d").get<std::size_t>();
    std::vector<double> coords, weights;
    std::vector<int> labels;
    for (const auto& atom : j.at("atoms")) {
        const auto x = atom.at("x").get<std::vector<double>>();
        if (x.size() != inst.dim) throw BadParams("margin instance: atom dimension mismatch");
        coords.insert(coords.end(), x.begin(), x.end());
        labels.push_back(atom.at("label").get<int>());
        weights.push_back(atom.value("weight", 0.0));
    }
    if (weights.empty()) throw BadParams("margin instance: no atoms");
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0)
        for (auto& w : weights) w = 1.0 / static_cast<double>(weights.size());
    inst.atoms = Empirical(inst.dim, std::move(coords), std::move(weights));
    inst.labels = AtomTable{std::move(labels)};
    return inst;
}

inline json distribution_to_json(const Distribution& dist) {
    if (std::holds_alternative<Uniform01>(dist)) return json{{"kind", "uniform01"}};
    if (const auto* g = std::get_if<GaussianIsotropic>(&dist))
        return json{{"kind", "gaussian"}, {"n", g->n}};
    if (const auto* u = std::get_if<UnitPiecewiseDensity>(&dist))
        return json{{"kind", "unit_piecewise"}, {"edges", u->edges}, {"weights", u->weights}};
    if (const auto* b = std::get_if<UnitBallUniform>(&dist))
        return json{{"kind", "unit_ball"}, {"d", b->d}};
    throw BadParams("distribution_to_json: unsupported kind");
}

inline Distribution distribution_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "uniform01") return Uniform01{};
    if (kind == "gaussian") return GaussianIsotropic{j.at("n").get<std::size_t>()};
    if (kind == "unit_piecewise")
        return UnitPiecewiseDensity(j.at("edges").get<std::vector<double>>(),
                                    j.at("weights").get<std::vector<double>>());
    if (kind == "unit_ball") return UnitBallUniform{j.at("d").get<std::size_t>()};
    throw BadParams("distribution_from_json: unknown kind " + kind);
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BadParams("cannot open " + path);
    json j;
    in >> j;
    return j;
}

inline void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw BadParams("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace aptest
