#pragma once

// JSON wire formats. Certificates stream as one self-describing record per
// line: {"candidate":{...},"external_assumption":...,"filter_id":...,
// "witness":{...}}. All arbitrary-precision values are decimal strings so
// nothing is ever rounded through a double.

#include <fermat/filters.hpp>

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace fermat {

using json = nlohmann::json;

inline json to_json(const Natural& n) { return n.str(); }

inline Natural natural_from_json(const json& j) {
    if (!j.is_string()) throw std::invalid_argument("expected decimal string");
    return Natural(j.get<std::string>());
}

inline json to_json(const Candidate& c) {
    return json{{"x", to_json(c.x)}, {"y", to_json(c.y)}, {"z", to_json(c.z)},
                {"p", to_json(c.p.value())}};
}

inline Candidate candidate_from_json(const json& j) {
    return Candidate(natural_from_json(j.at("x")), natural_from_json(j.at("y")),
                     natural_from_json(j.at("z")), OddPrime(natural_from_json(j.at("p"))));
}

namespace detail {

inline const char* bounds_violation_name(BoundsViolation v) {
    switch (v) {
        case BoundsViolation::XGeZ: return "x>=z";
        case BoundsViolation::YGeZ: return "y>=z";
        case BoundsViolation::SumLeZ: return "x+y<=z";
        case BoundsViolation::SumGe2Z: return "x+y>=2z";
    }
    return "?";
}

inline BoundsViolation bounds_violation_from_name(const std::string& s) {
    if (s == "x>=z") return BoundsViolation::XGeZ;
    if (s == "y>=z") return BoundsViolation::YGeZ;
    if (s == "x+y<=z") return BoundsViolation::SumLeZ;
    if (s == "x+y>=2z") return BoundsViolation::SumGe2Z;
    throw std::invalid_argument("unknown bounds violation: " + s);
}

inline const char* t3_clause_name(T3Clause c) {
    switch (c) {
        case T3Clause::SumZ: return "gcd(x+y,z)";
        case T3Clause::ZMinusYX: return "gcd(z-y,x)";
        case T3Clause::ZMinusXY: return "gcd(z-x,y)";
    }
    return "?";
}

inline T3Clause t3_clause_from_name(const std::string& s) {
    if (s == "gcd(x+y,z)") return T3Clause::SumZ;
    if (s == "gcd(z-y,x)") return T3Clause::ZMinusYX;
    if (s == "gcd(z-x,y)") return T3Clause::ZMinusXY;
    throw std::invalid_argument("unknown gcd clause: " + s);
}

} // namespace detail

inline json to_json(const Witness& w) {
    using namespace detail;
    json j;
    if (auto* b = std::get_if<BoundsWitness>(&w)) {
        j["violated"] = bounds_violation_name(b->violated);
    } else if (auto* t2 = std::get_if<T2Witness>(&w)) {
        j["d"] = to_json(t2->d);
        j["swapped"] = t2->swapped;
    } else if (auto* t3 = std::get_if<T3Witness>(&w)) {
        j["clause"] = t3_clause_name(t3->clause);
        j["a"] = to_json(t3->a);
        j["b"] = to_json(t3->b);
    } else if (auto* t4 = std::get_if<T4Witness>(&w)) {
        j["z"] = to_json(t4->z);
    } else if (auto* t5 = std::get_if<T5Witness>(&w)) {
        j["g"] = to_json(t5->g);
        j["s"] = to_json(t5->s);
        j["lower"] = to_json(t5->lower);
        j["upper"] = to_json(t5->upper);
        if (t5->r) j["r"] = to_json(*t5->r);
    } else if (auto* t6 = std::get_if<T6Witness>(&w)) {
        j["side"] = t6->side == T6Side::ZMinusY ? "z-y" : "z-x";
    } else if (auto* m = std::get_if<ModularWitness>(&w)) {
        j["m"] = to_json(m->m);
        j["lhs"] = to_json(m->lhs);
        j["rhs"] = to_json(m->rhs);
    } else if (auto* e = std::get_if<ExternalWitness>(&w)) {
        j["gcd_xy"] = to_json(e->gcd_xy);
    }
    return j;
}

inline Witness witness_from_json(FilterId id, const json& j) {
    using namespace detail;
    switch (id) {
        case FilterId::BasicBounds:
            return BoundsWitness{bounds_violation_from_name(j.at("violated").get<std::string>())};
        case FilterId::T2:
            return T2Witness{natural_from_json(j.at("d")), j.at("swapped").get<bool>()};
        case FilterId::T3:
            return T3Witness{t3_clause_from_name(j.at("clause").get<std::string>()),
                             natural_from_json(j.at("a")), natural_from_json(j.at("b"))};
        case FilterId::T4:
            return T4Witness{natural_from_json(j.at("z"))};
        case FilterId::T5: {
            std::optional<Natural> r;
            if (j.contains("r")) r = natural_from_json(j.at("r"));
            return T5Witness{natural_from_json(j.at("g")), natural_from_json(j.at("s")),
                             natural_from_json(j.at("lower")), natural_from_json(j.at("upper")),
                             std::move(r)};
        }
        case FilterId::T6: {
            std::string side = j.at("side").get<std::string>();
            if (side == "z-y") return T6Witness{T6Side::ZMinusY};
            if (side == "z-x") return T6Witness{T6Side::ZMinusX};
            throw std::invalid_argument("unknown gap side: " + side);
        }
        case FilterId::Modular:
            return ModularWitness{natural_from_json(j.at("m")), natural_from_json(j.at("lhs")),
                                  natural_from_json(j.at("rhs"))};
        case FilterId::T1External:
            return ExternalWitness{natural_from_json(j.at("gcd_xy"))};
    }
    throw std::invalid_argument("unknown filter id");
}

inline json to_json(const Refutation& r) {
    return json{{"candidate", to_json(r.candidate)},
                {"external_assumption", r.certificate.external_assumption},
                {"filter_id", std::string(to_string(r.certificate.filter_id))},
                {"witness", to_json(r.certificate.witness)}};
}

inline Refutation refutation_from_json(const json& j) {
    auto id = parse_filter_id(j.at("filter_id").get<std::string>());
    if (!id) throw std::invalid_argument("unknown filter id in record");
    Certificate cert{*id, witness_from_json(*id, j.at("witness")),
                     j.at("external_assumption").get<bool>()};
    return Refutation{candidate_from_json(j.at("candidate")), std::move(cert)};
}

// One compact record per line, with keys in sorted order -- the canonical
// stream encoding.
inline std::string to_json_line(const Refutation& r) { return to_json(r).dump(); }

inline Refutation refutation_from_json_line(const std::string& line) {
    return refutation_from_json(json::parse(line));
}

} // namespace fermat
