#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "udam/pddl_ast.hpp"
#include "udam/util.hpp"

namespace udam {

class ModelError : public std::runtime_error {
public:
    enum class Kind { NotFullyObserved, Invariant };
    ModelError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

// The predicate/type/object vocabulary shared by a learning task. Immutable
// after construction; safe to share across workers.
struct Vocabulary {
    std::vector<TypeDecl> types;
    std::vector<PredicateSignature> predicates;
    std::vector<TypedName> objects;

    int pred_index(const std::string& name) const {
        for (std::size_t i = 0; i < predicates.size(); ++i)
            if (predicates[i].name == name) return static_cast<int>(i);
        return -1;
    }
    int object_index(const std::string& name) const {
        for (std::size_t i = 0; i < objects.size(); ++i)
            if (objects[i].name == name) return static_cast<int>(i);
        return -1;
    }

    bool is_subtype(const std::string& sub, const std::string& super) const {
        if (super == kRootType || sub == super) return true;
        std::string cur = sub;
        for (std::size_t guard = 0; guard <= types.size(); ++guard) {
            const TypeDecl* decl = nullptr;
            for (const auto& t : types)
                if (t.name == cur) { decl = &t; break; }
            if (!decl) return false;
            if (decl->parent == super) return true;
            if (decl->parent == kRootType) return false;
            cur = decl->parent;
        }
        return false;
    }

    // object ids (in declaration order) compatible with a parameter type
    std::vector<int> object_candidates(const std::string& type) const {
        std::vector<int> out;
        for (std::size_t i = 0; i < objects.size(); ++i)
            if (is_subtype(objects[i].type, type)) out.push_back(static_cast<int>(i));
        return out;
    }
};

// Atom over schema parameters; vars hold 0-based parameter indices.
struct LiftedAtom {
    int pred = -1;
    std::vector<int> vars;
    friend auto operator<=>(const LiftedAtom&, const LiftedAtom&) = default;
};

struct ActionSchema {
    std::string name;
    std::vector<TypedName> params;  // variable names without '?'
    std::vector<LiftedAtom> pre;
    std::vector<LiftedAtom> add;
    std::vector<LiftedAtom> del;

    int arity() const { return static_cast<int>(params.size()); }
    friend bool operator==(const ActionSchema&, const ActionSchema&) = default;

    void sort_body() {
        std::sort(pre.begin(), pre.end());
        std::sort(add.begin(), add.end());
        std::sort(del.begin(), del.end());
    }
    bool effect_free() const { return add.empty() && del.empty(); }
    bool has_conflicting_effects() const {
        for (const auto& a : add)
            if (std::find(del.begin(), del.end(), a) != del.end()) return true;
        return false;
    }
};

// A schema is well-defined when the body uses exactly the declared parameters.
inline bool well_defined(const ActionSchema& schema) {
    std::set<int> used;
    auto scan = [&](const std::vector<LiftedAtom>& atoms) {
        for (const auto& a : atoms)
            for (int v : a.vars) used.insert(v);
    };
    scan(schema.pre);
    scan(schema.add);
    scan(schema.del);
    if (static_cast<int>(used.size()) != schema.arity()) return false;
    for (int v : used)
        if (v < 0 || v >= schema.arity()) return false;
    return true;
}

struct ObservedState {
    bool full = true;
    std::vector<GroundAtom> atoms;
    friend bool operator==(const ObservedState&, const ObservedState&) = default;
};

// Goal-oriented example: an initial state and a (possibly partial) goal, with
// an optional fully observed state sequence used by the splitting extension.
struct Trace {
    std::string id;
    std::vector<GroundAtom> init;
    std::vector<GroundAtom> goal;
    std::vector<ObservedState> observed_states;  // empty when unobserved
    friend bool operator==(const Trace&, const Trace&) = default;
};

struct LearningTask {
    Vocabulary vocab;
    std::vector<Trace> traces;
    int k = 1;
    int r = 0;
    std::vector<ActionSchema> seeds;  // prior-knowledge partial models

    int trace_count() const { return static_cast<int>(traces.size()); }

    void check_invariants() const {
        if (k < 1) throw ModelError(ModelError::Kind::Invariant, "k must be >= 1");
        if (r < 0) throw ModelError(ModelError::Kind::Invariant, "r must be >= 0");
        if (traces.empty()) throw ModelError(ModelError::Kind::Invariant, "no traces");
        if (k > 2 * static_cast<int>(vocab.predicates.size()))
            throw ModelError(ModelError::Kind::Invariant, "k exceeds 2*|P|");
        if (r > static_cast<int>(vocab.objects.size()))
            throw ModelError(ModelError::Kind::Invariant, "r exceeds |objects|");
        if (static_cast<int>(seeds.size()) > k)
            throw ModelError(ModelError::Kind::Invariant, "more seed models than actions");
        for (const auto& s : seeds)
            if (s.arity() > r)
                throw ModelError(ModelError::Kind::Invariant,
                                 "seed '" + s.name + "' arity exceeds r");
    }
};

// Bijection between type-compatible ground atoms and dense fluent ids, in
// predicate declaration order then object-tuple lexicographic order.
class GroundAtomTable {
public:
    GroundAtomTable() = default;

    GroundAtomTable(const Vocabulary& vocab) : vocab_(&vocab) {
        offsets_.reserve(vocab.predicates.size());
        int next = 0;
        for (const auto& pred : vocab.predicates) {
            PredEntry entry;
            entry.offset = next;
            for (const auto& param : pred.params) {
                entry.candidates.push_back(vocab.object_candidates(param.type));
                std::vector<int> rank(vocab.objects.size(), -1);
                for (std::size_t i = 0; i < entry.candidates.back().size(); ++i)
                    rank[entry.candidates.back()[i]] = static_cast<int>(i);
                entry.ranks.push_back(std::move(rank));
            }
            entry.count = 1;
            for (const auto& c : entry.candidates) entry.count *= static_cast<long long>(c.size());
            next += static_cast<int>(entry.count);
            offsets_.push_back(std::move(entry));
        }
        size_ = next;
    }

    int size() const { return size_; }

    // -1 when the tuple is not type-compatible
    int atom_id(int pred, const std::vector<int>& objs) const {
        const PredEntry& e = offsets_[pred];
        long long local = 0;
        for (std::size_t i = 0; i < objs.size(); ++i) {
            int r = e.ranks[i][objs[i]];
            if (r < 0) return -1;
            local = local * static_cast<long long>(e.candidates[i].size()) + r;
        }
        return e.offset + static_cast<int>(local);
    }

    int atom_id(const GroundAtom& atom) const {
        int p = vocab_->pred_index(atom.pred);
        if (p < 0) return -1;
        if (atom.args.size() != vocab_->predicates[p].params.size()) return -1;
        std::vector<int> objs;
        objs.reserve(atom.args.size());
        for (const auto& a : atom.args) {
            int o = vocab_->object_index(a);
            if (o < 0) return -1;
            objs.push_back(o);
        }
        return atom_id(p, objs);
    }

    std::pair<int, std::vector<int>> atom_of(int id) const {
        for (std::size_t p = 0; p < offsets_.size(); ++p) {
            const PredEntry& e = offsets_[p];
            if (id >= e.offset && id < e.offset + e.count) {
                long long local = id - e.offset;
                std::vector<int> objs(e.candidates.size());
                for (int i = static_cast<int>(e.candidates.size()) - 1; i >= 0; --i) {
                    long long n = static_cast<long long>(e.candidates[i].size());
                    objs[i] = e.candidates[i][local % n];
                    local /= n;
                }
                return {static_cast<int>(p), objs};
            }
        }
        throw std::out_of_range("fluent id out of range");
    }

    GroundAtom ground_atom_of(int id) const {
        auto [p, objs] = atom_of(id);
        GroundAtom atom;
        atom.pred = vocab_->predicates[p].name;
        for (int o : objs) atom.args.push_back(vocab_->objects[o].name);
        return atom;
    }

    std::string name_of(int id) const {
        auto atom = ground_atom_of(id);
        std::string s = "(" + atom.pred;
        for (const auto& a : atom.args) s += " " + a;
        return s + ")";
    }

    const Vocabulary& vocab() const { return *vocab_; }

private:
    struct PredEntry {
        int offset = 0;
        long long count = 0;
        std::vector<std::vector<int>> candidates;  // per position
        std::vector<std::vector<int>> ranks;       // object id -> rank, -1 incompatible
    };
    const Vocabulary* vocab_ = nullptr;
    std::vector<PredEntry> offsets_;
    int size_ = 0;
};

inline GroundAtomTable ground(const Vocabulary& vocab) { return GroundAtomTable(vocab); }

namespace detail {

// All var tuples of the given arity over variables 0..r-1, lexicographic.
inline std::vector<std::vector<int>> var_tuples(int r, int arity) {
    std::vector<std::vector<int>> out;
    std::vector<std::vector<int>> cands(arity);
    std::vector<int> all(r);
    for (int i = 0; i < r; ++i) all[i] = i;
    for (auto& c : cands) c = all;
    if (arity == 0) {
        out.push_back({});
        return out;
    }
    for_each_tuple(cands, [&](const std::vector<int>& t) { out.push_back(t); });
    return out;
}

inline bool injective(const std::vector<int>& tuple) {
    for (std::size_t i = 0; i < tuple.size(); ++i)
        for (std::size_t j = i + 1; j < tuple.size(); ++j)
            if (tuple[i] == tuple[j]) return false;
    return true;
}

inline std::string var_name(int i) { return "x" + std::to_string(i + 1); }

}  // namespace detail

// Builds the k partial models: every precondition atom over distinct-variable
// tuples of the r parameters, and no effects. Arities below r are realized by
// trimming unused parameters after induction, not by separate schemas.
inline std::vector<ActionSchema> init_partial_models(const Vocabulary& vocab, int k, int r) {
    std::vector<ActionSchema> out;
    for (int a = 0; a < k; ++a) {
        ActionSchema schema;
        schema.name = "act" + std::to_string(a + 1);
        for (int v = 0; v < r; ++v) schema.params.push_back({detail::var_name(v), kRootType});
        for (std::size_t p = 0; p < vocab.predicates.size(); ++p) {
            int ar = vocab.predicates[p].arity();
            for (const auto& sigma : detail::var_tuples(r, ar))
                if (detail::injective(sigma))
                    schema.pre.push_back({static_cast<int>(p), sigma});
        }
        schema.sort_body();
        out.push_back(std::move(schema));
    }
    return out;
}

// One ground occurrence per type-compatible object tuple; repeats allowed.
inline std::vector<std::vector<int>> ground_schema(const ActionSchema& schema,
                                                   const Vocabulary& vocab) {
    std::vector<std::vector<int>> out;
    std::vector<std::vector<int>> cands;
    for (const auto& p : schema.params) cands.push_back(vocab.object_candidates(p.type));
    if (schema.params.empty()) {
        out.push_back({});
        return out;
    }
    for_each_tuple(cands, [&](const std::vector<int>& t) { out.push_back(t); });
    return out;
}

// Splits a fully observed trace into one endpoint task per transition. The
// goal of each split is the full successor state.
inline std::vector<Trace> split_traces(const Trace& trace) {
    for (const auto& s : trace.observed_states)
        if (!s.full)
            throw ModelError(ModelError::Kind::NotFullyObserved,
                             "trace '" + trace.id + "' has a partial state");
    std::vector<Trace> out;
    if (trace.observed_states.size() < 2) return out;
    for (std::size_t i = 1; i < trace.observed_states.size(); ++i) {
        Trace t;
        t.id = trace.id + "#" + std::to_string(i);
        t.init = trace.observed_states[i - 1].atoms;
        t.goal = trace.observed_states[i].atoms;
        t.observed_states = {trace.observed_states[i - 1], trace.observed_states[i]};
        out.push_back(std::move(t));
    }
    return out;
}

inline void validate_trace(const Trace& trace, const Vocabulary& vocab) {
    GroundAtomTable table(vocab);
    auto check = [&](const std::vector<GroundAtom>& atoms, const char* what) {
        for (const auto& a : atoms)
            if (table.atom_id(a) < 0)
                throw ModelError(ModelError::Kind::Invariant,
                                 std::string("trace '") + trace.id + "': " + what +
                                     " atom (" + a.pred + " ...) not in vocabulary");
    };
    check(trace.init, "init");
    check(trace.goal, "goal");
    for (const auto& s : trace.observed_states)
        if (s.full) check(s.atoms, "observed");
    if (!trace.observed_states.empty() && trace.observed_states.front().full) {
        auto first = trace.observed_states.front().atoms;
        auto init = trace.init;
        std::sort(first.begin(), first.end());
        std::sort(init.begin(), init.end());
        if (first != init)
            throw ModelError(ModelError::Kind::Invariant,
                             "trace '" + trace.id + "': first observed state differs from init");
    }
}

}  // namespace udam
