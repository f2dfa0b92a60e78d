#pragma once

// Structured verdict records and their JSON form.

#include "json.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cosub {

using json = nlohmann::ordered_json;

/// fail is a disproof; evidence_only means every computed check passed but
/// the underlying statement is not certified by the computation.
enum class Verdict { pass, fail, evidence_only };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::evidence_only: return "evidence-only";
    }
    return "?";
}

/// Worst of two verdicts: fail > evidence-only > pass.
inline Verdict worst(Verdict a, Verdict b) {
    if (a == Verdict::fail || b == Verdict::fail) return Verdict::fail;
    if (a == Verdict::evidence_only || b == Verdict::evidence_only) return Verdict::evidence_only;
    return Verdict::pass;
}

struct CheckReport {
    std::string name;
    std::string anchor;  ///< hypothesis label within its suite, e.g. "prop56/f"
    Verdict verdict = Verdict::pass;
    std::string note;
    json payload = json::object();
    json parameters = json::object();
    json tolerances = json::object();
    std::uint64_t seed = 0;

    [[nodiscard]] json to_json() const {
        json j;
        j["name"] = name;
        j["anchor"] = anchor;
        j["verdict"] = to_string(verdict);
        if (!note.empty()) j["note"] = note;
        j["parameters"] = parameters;
        j["tolerances"] = tolerances;
        j["seed"] = seed;
        j["payload"] = payload;
        return j;
    }
};

inline Verdict combined_verdict(const std::vector<CheckReport>& reports) {
    Verdict v = Verdict::pass;
    for (const auto& r : reports) v = worst(v, r.verdict);
    return v;
}

/// 0 = all pass, 1 = any fail, 2 = evidence-only.
inline int exit_code(Verdict v) {
    switch (v) {
        case Verdict::pass: return 0;
        case Verdict::fail: return 1;
        case Verdict::evidence_only: return 2;
    }
    return 1;
}

inline json to_json(const std::vector<CheckReport>& reports) {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(r.to_json());
    return arr;
}

}  // namespace cosub
