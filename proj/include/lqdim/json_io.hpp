#pragma once

/**
 * @file json_io.hpp
 * @brief JSON encodings of scalars, rationals, WIFS and measures.
 *
 * Integers are written as decimal strings so big numerators survive readers
 * that use binary64 numbers.
 */

#include <json.hpp>

#include <string>

#include "lqdim/measure.hpp"
#include "lqdim/scalar.hpp"
#include "lqdim/wifs.hpp"

namespace lqdim {

using Json = nlohmann::ordered_json;

inline Json rational_to_json(const Rational& q) {
    return Json{{"type", "rational"}, {"num", q.get_num().get_str()}, {"den", q.get_den().get_str()}};
}

inline Json scalar_to_json(const Scalar& x) {
    switch (x.kind()) {
    case Scalar::Kind::rational: return rational_to_json(x.as_rational());
    case Scalar::Kind::quadratic: {
        const auto& q = x.as_quadratic();
        return Json{{"type", "quadratic"}, {"a", rational_to_json(q.a)}, {"b", rational_to_json(q.b)}, {"d", q.d}};
    }
    case Scalar::Kind::floating: return Json{{"type", "float"}, {"value", x.as_double_variant()}};
    }
    return {};
}

namespace detail {

inline BigInt json_integer(const Json& j, const char* what) {
    try {
        if (j.is_string()) return BigInt(j.get<std::string>());
        if (j.is_number_integer()) return BigInt(j.get<long>());
    } catch (const std::exception&) {
    }
    fail(ErrorKind::config, std::string("expected an integer for '") + what + "'");
}

} // namespace detail

inline Rational rational_from_json(const Json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (!j.is_object()) fail(ErrorKind::config, "rational must be an object, string or integer");
    if (j.contains("type") && j["type"] != "rational") fail(ErrorKind::config, "expected a rational scalar");
    if (!j.contains("num") || !j.contains("den")) fail(ErrorKind::config, "rational needs num and den");
    return make_rational(detail::json_integer(j["num"], "num"), detail::json_integer(j["den"], "den"));
}

/// Accepts the typed object form, a literal string ("2/3", "golden", "sqrt(2)") or a plain number.
inline Scalar scalar_from_json(const Json& j) {
    if (j.is_string()) return parse_scalar(j.get<std::string>());
    if (j.is_number_integer()) return Scalar(Rational(j.get<long>()));
    if (j.is_number_float()) return Scalar::floating(j.get<double>());
    if (!j.is_object() || !j.contains("type")) fail(ErrorKind::config, "scalar must be a typed object or a literal");
    const std::string type = j["type"].get<std::string>();
    if (type == "rational") return Scalar(rational_from_json(j));
    if (type == "quadratic") {
        if (!j.contains("a") || !j.contains("b") || !j.contains("d")) fail(ErrorKind::config, "quadratic needs a, b, d");
        return Scalar::quadratic(rational_from_json(j["a"]), rational_from_json(j["b"]), j["d"].get<long>());
    }
    if (type == "float") return Scalar::floating(j.at("value").get<double>());
    fail(ErrorKind::config, "unknown scalar type '" + type + "'");
}

inline Json wifs_to_json(const Wifs& w) {
    Json maps = Json::array();
    for (const auto& f : w.maps) maps.push_back(Json{{"lambda", scalar_to_json(f.ratio)}, {"t", scalar_to_json(f.translation)}});
    Json weights = Json::array();
    for (const auto& p : w.weights) weights.push_back(rational_to_json(p));
    return Json{{"maps", maps}, {"weights", weights}};
}

/**
 * Explicit form {"maps":[{"lambda":..,"t":..}],"weights":[..]} or a preset:
 * {"preset":"bernoulli","lambda":..}, {"preset":"p_cantor","p":3,"digits":[0,2]},
 * {"preset":"projected_product","p":3,"digits":[0,2],"t":..}, {"preset":"golden"}.
 */
inline Wifs wifs_from_json(const Json& j) {
    if (j.is_string()) return preset(j.get<std::string>());
    if (!j.is_object()) fail(ErrorKind::config, "WIFS must be an object");
    try {
        if (j.contains("preset")) {
            const std::string name = j["preset"].get<std::string>();
            if (name == "bernoulli") return bernoulli(scalar_from_json(j.at("lambda")));
            if (name == "p_cantor") return p_cantor(j.at("p").get<int>(), j.at("digits").get<std::vector<int>>());
            if (name == "projected_product")
                return projected_product(j.at("p").get<int>(), j.at("digits").get<std::vector<int>>(),
                                         scalar_from_json(j.at("t")));
            return preset(name);
        }
        Wifs w;
        for (const auto& m : j.at("maps")) w.maps.push_back({scalar_from_json(m.at("lambda")), scalar_from_json(m.at("t"))});
        for (const auto& p : j.at("weights")) w.weights.push_back(rational_from_json(p));
        return w;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::config, std::string("malformed WIFS JSON: ") + e.what());
    }
}

inline Json measure_to_json(const DiscreteMeasure& m) {
    Json atoms = Json::array();
    for (const auto& a : m.atoms()) atoms.push_back(Json{{"x", scalar_to_json(a.position)}, {"mass", rational_to_json(a.mass)}});
    return Json{{"atoms", atoms}};
}

inline DiscreteMeasure measure_from_json(const Json& j) {
    std::vector<Atom> atoms;
    for (const auto& a : j.at("atoms")) atoms.push_back({scalar_from_json(a.at("x")), rational_from_json(a.at("mass"))});
    return DiscreteMeasure::from_atoms(std::move(atoms));
}

} // namespace lqdim
