#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "udam/model.hpp"
#include "udam/pddl_parser.hpp"
#include "udam/sexpr.hpp"

namespace udam {

namespace detail {

inline GroundAtom atom_from_json(const nlohmann::json& j) {
    GroundAtom atom;
    if (j.is_string()) {
        Sexpr s = read_single_sexpr(j.get<std::string>());
        if (!s.is_list || s.items.empty() || !s.items[0].is_atom())
            throw ParseError(ParseErrorKind::Syntax, "bad atom string in trace");
        atom.pred = s.items[0].atom;
        for (std::size_t i = 1; i < s.items.size(); ++i) atom.args.push_back(s.items[i].atom);
        return atom;
    }
    if (!j.is_array() || j.empty())
        throw ParseError(ParseErrorKind::Syntax, "trace atom must be a string or array");
    atom.pred = to_lower(j[0].get<std::string>());
    for (std::size_t i = 1; i < j.size(); ++i) atom.args.push_back(to_lower(j[i].get<std::string>()));
    return atom;
}

inline std::vector<GroundAtom> atoms_from_json(const nlohmann::json& j) {
    std::vector<GroundAtom> atoms;
    for (const auto& e : j) atoms.push_back(atom_from_json(e));
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    return atoms;
}

inline nlohmann::json atoms_to_json(const std::vector<GroundAtom>& atoms) {
    auto arr = nlohmann::json::array();
    for (const auto& a : atoms) {
        auto e = nlohmann::json::array();
        e.push_back(a.pred);
        for (const auto& arg : a.args) e.push_back(arg);
        arr.push_back(std::move(e));
    }
    return arr;
}

}  // namespace detail

// One trace per line: {"id":..., "init":[...], "goal":[...],
// "states":[[...],null,...]?, "objects":[["p1","place"],...]?}
// Atoms are ["pred","arg",...] arrays or "(pred arg ...)" strings; a null
// entry in "states" marks an unobserved state.
struct TraceFile {
    std::vector<Trace> traces;
    std::vector<TypedName> objects;  // union of per-trace object declarations
};

inline TraceFile read_traces_jsonl(std::istream& in) {
    TraceFile out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) { blank = false; break; }
        if (blank) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        Trace t;
        t.id = j.contains("id") ? j["id"].get<std::string>()
                                : ("trace-" + std::to_string(line_no));
        if (j.contains("init")) t.init = detail::atoms_from_json(j["init"]);
        if (j.contains("goal")) t.goal = detail::atoms_from_json(j["goal"]);
        if (j.contains("states")) {
            for (const auto& s : j["states"]) {
                ObservedState obs;
                if (s.is_null()) {
                    obs.full = false;
                } else {
                    obs.atoms = detail::atoms_from_json(s);
                }
                t.observed_states.push_back(std::move(obs));
            }
        }
        if (j.contains("objects")) {
            for (const auto& o : j["objects"]) {
                TypedName tn;
                if (o.is_array()) {
                    tn.name = to_lower(o[0].get<std::string>());
                    if (o.size() > 1) tn.type = to_lower(o[1].get<std::string>());
                } else {
                    tn.name = to_lower(o.get<std::string>());
                }
                bool known = false;
                for (const auto& existing : out.objects)
                    if (existing.name == tn.name) known = true;
                if (!known) out.objects.push_back(std::move(tn));
            }
        }
        out.traces.push_back(std::move(t));
    }
    return out;
}

inline TraceFile read_traces_jsonl_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file '" + path + "'");
    return read_traces_jsonl(in);
}

inline void write_traces_jsonl(std::ostream& os, const std::vector<Trace>& traces,
                               const std::vector<TypedName>& objects = {}) {
    for (const auto& t : traces) {
        nlohmann::json j;
        j["id"] = t.id;
        j["init"] = detail::atoms_to_json(t.init);
        j["goal"] = detail::atoms_to_json(t.goal);
        if (!t.observed_states.empty()) {
            auto arr = nlohmann::json::array();
            for (const auto& s : t.observed_states) {
                if (s.full)
                    arr.push_back(detail::atoms_to_json(s.atoms));
                else
                    arr.push_back(nullptr);
            }
            j["states"] = std::move(arr);
        }
        if (!objects.empty()) {
            auto arr = nlohmann::json::array();
            for (const auto& o : objects) arr.push_back({o.name, o.type});
            j["objects"] = std::move(arr);
        }
        os << j.dump() << "\n";
    }
}

// Objects referenced by a trace but not declared anywhere get their type from
// the first predicate slot they appear in.
inline std::vector<TypedName> infer_objects(const std::vector<Trace>& traces,
                                            const std::vector<PredicateSignature>& predicates,
                                            const std::vector<TypedName>& declared = {}) {
    std::vector<TypedName> out = declared;
    auto known = [&](const std::string& name) {
        for (const auto& o : out)
            if (o.name == name) return true;
        return false;
    };
    auto visit = [&](const std::vector<GroundAtom>& atoms) {
        for (const auto& atom : atoms) {
            const PredicateSignature* sig = nullptr;
            for (const auto& p : predicates)
                if (p.name == atom.pred) { sig = &p; break; }
            for (std::size_t i = 0; i < atom.args.size(); ++i) {
                if (known(atom.args[i])) continue;
                std::string type = kRootType;
                if (sig && i < sig->params.size()) type = sig->params[i].type;
                out.push_back({atom.args[i], type});
            }
        }
    };
    for (const auto& t : traces) {
        visit(t.init);
        visit(t.goal);
        for (const auto& s : t.observed_states)
            if (s.full) visit(s.atoms);
    }
    return out;
}

}  // namespace udam
