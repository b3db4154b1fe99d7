// json_io.hpp — JSON (de)serialization for operators, POVMs, measurement
// pairs, ensembles and witnesses. All formats share the operator layout
// {"dim": d, "re": [[...]], "im": [[...]]}, row-major IEEE-754 doubles.

#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "iwit/ensemble.hpp"
#include "iwit/errors.hpp"
#include "iwit/operators.hpp"
#include "iwit/povm.hpp"
#include "iwit/witness.hpp"

namespace iwit {

using Json = nlohmann::ordered_json;

namespace detail {

inline const Json& require_field(const Json& j, const std::string& key,
                                 const std::string& context) {
    if (!j.is_object() || !j.contains(key))
        throw JsonError("missing field '" + key + "' in " + context);
    return j.at(key);
}

inline std::vector<std::vector<double>> real_grid(const Matrix& m, bool imag) {
    std::vector<std::vector<double>> out(m.rows(), std::vector<double>(m.cols()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            out[i][j] = imag ? m(i, j).imag() : m(i, j).real();
    return out;
}

}  // namespace detail

inline Json to_json(const HermitianOperator& h) {
    return Json{{"dim", h.dim()},
                {"re", detail::real_grid(h.matrix(), false)},
                {"im", detail::real_grid(h.matrix(), true)}};
}

inline HermitianOperator operator_from_json(const Json& j, const std::string& context = "operator") {
    const int d = detail::require_field(j, "dim", context).get<int>();
    const auto& re = detail::require_field(j, "re", context);
    const auto& im = detail::require_field(j, "im", context);
    if (static_cast<int>(re.size()) != d || static_cast<int>(im.size()) != d)
        throw JsonError("field 're'/'im' row count differs from 'dim' in " + context);
    Matrix m(d, d);
    for (int i = 0; i < d; ++i) {
        if (static_cast<int>(re.at(i).size()) != d || static_cast<int>(im.at(i).size()) != d)
            throw JsonError("field 're'/'im' is not a d x d grid in " + context);
        for (int k = 0; k < d; ++k)
            m(i, k) = Complex(re.at(i).at(k).get<double>(), im.at(i).at(k).get<double>());
    }
    try {
        return HermitianOperator(std::move(m));
    } catch (const Error& e) {
        throw JsonError(context + ": " + e.what());
    }
}

inline Json to_json(const Povm& p) {
    Json j{{"dim", p.dim}, {"outcomes", p.outcomes}};
    Json effects = Json::array();
    for (const auto& e : p.effects) effects.push_back(to_json(e));
    j["effects"] = std::move(effects);
    if (p.outcome_pairs) {
        Json pairs = Json::array();
        for (const auto& [x, y] : *p.outcome_pairs) pairs.push_back(Json::array({x, y}));
        j["outcome_pairs"] = std::move(pairs);
    }
    return j;
}

inline Povm povm_from_json(const Json& j, const std::string& context = "povm") {
    detail::require_field(j, "dim", context);
    const auto labels =
        detail::require_field(j, "outcomes", context).get<std::vector<std::string>>();
    const auto& effects_json = detail::require_field(j, "effects", context);
    std::vector<HermitianOperator> effects;
    for (std::size_t i = 0; i < effects_json.size(); ++i)
        effects.push_back(
            operator_from_json(effects_json.at(i), context + ".effects[" + std::to_string(i) + "]"));
    Povm p = validate_povm(std::move(effects), labels);
    if (j.contains("outcome_pairs")) {
        std::vector<LabelPair> pairs;
        for (const auto& item : j.at("outcome_pairs")) {
            if (!item.is_array() || item.size() != 2)
                throw JsonError("field 'outcome_pairs' entries must be [x, y] in " + context);
            pairs.emplace_back(item.at(0).get<std::string>(), item.at(1).get<std::string>());
        }
        if (pairs.size() != p.effects.size())
            throw JsonError("field 'outcome_pairs' length differs from 'effects' in " + context);
        p.outcome_pairs = std::move(pairs);
    }
    return p;
}

inline Json to_json(const MeasurementPair& pair) {
    return Json{{"a", to_json(pair.a)}, {"b", to_json(pair.b)}};
}

inline MeasurementPair pair_from_json(const Json& j) {
    MeasurementPair pair{povm_from_json(detail::require_field(j, "a", "pair"), "pair.a"),
                         povm_from_json(detail::require_field(j, "b", "pair"), "pair.b")};
    if (pair.a.dim != pair.b.dim) throw JsonError("pair.a and pair.b have different 'dim'");
    for (const auto& x : pair.a.outcomes)
        for (const auto& y : pair.b.outcomes)
            if (x == y) throw JsonError("pair outcome sets must be disjoint; both contain '" + x + "'");
    return pair;
}

inline Json to_json(const StateEnsemble& e) {
    Json j{{"dim", e.dim}, {"labels", e.labels}};
    Json ops = Json::array();
    for (const auto& op : e.operators) ops.push_back(to_json(op));
    j["operators"] = std::move(ops);
    return j;
}

inline Json to_json(const PartitionedEnsemble& pe) {
    Json j = to_json(pe.ensemble);
    j["blockX"] = pe.block_x;
    j["blockY"] = pe.block_y;
    return j;
}

inline StateEnsemble ensemble_from_json(const Json& j, const std::string& context = "ensemble") {
    detail::require_field(j, "dim", context);
    const auto labels = detail::require_field(j, "labels", context).get<std::vector<std::string>>();
    const auto& ops_json = detail::require_field(j, "operators", context);
    std::vector<HermitianOperator> ops;
    for (std::size_t i = 0; i < ops_json.size(); ++i)
        ops.push_back(
            operator_from_json(ops_json.at(i), context + ".operators[" + std::to_string(i) + "]"));
    try {
        return validate_ensemble(std::move(ops), labels);
    } catch (const Error& e) {
        throw JsonError(context + ": " + e.what());
    }
}

inline PartitionedEnsemble partitioned_from_json(const Json& j) {
    StateEnsemble e = ensemble_from_json(j);
    const auto bx = detail::require_field(j, "blockX", "ensemble").get<std::vector<std::string>>();
    const auto by = detail::require_field(j, "blockY", "ensemble").get<std::vector<std::string>>();
    try {
        return make_partitioned(std::move(e), bx, by);
    } catch (const Error& err) {
        throw JsonError(std::string("ensemble blocks: ") + err.what());
    }
}

inline Json to_json(const OperatorFamily& fam) {
    Json ops = Json::array();
    for (const auto& op : fam.operators) ops.push_back(to_json(op));
    return Json{{"labels", fam.labels}, {"operators", std::move(ops)}};
}

inline Json to_json(const Witness& w) {
    return Json{{"delta", w.delta}, {"f", to_json(w.f)}, {"g", to_json(w.g)}};
}

inline OperatorFamily family_from_json(const Json& j, const std::string& context) {
    OperatorFamily fam;
    fam.labels = detail::require_field(j, "labels", context).get<std::vector<std::string>>();
    const auto& ops_json = detail::require_field(j, "operators", context);
    for (std::size_t i = 0; i < ops_json.size(); ++i)
        fam.operators.push_back(
            operator_from_json(ops_json.at(i), context + ".operators[" + std::to_string(i) + "]"));
    if (fam.labels.size() != fam.operators.size())
        throw JsonError("'labels' and 'operators' differ in length in " + context);
    return fam;
}

inline Witness witness_from_json(const Json& j) {
    Witness w;
    w.delta = detail::require_field(j, "delta", "witness").get<double>();
    w.f = family_from_json(detail::require_field(j, "f", "witness"), "witness.f");
    w.g = family_from_json(detail::require_field(j, "g", "witness"), "witness.g");
    return w;
}

inline Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw JsonError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw JsonError("malformed JSON in '" + path + "': " + e.what());
    }
}

inline void save_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw JsonError("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

}  // namespace iwit
