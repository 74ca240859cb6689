#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "udam/ground_task.hpp"
#include "udam/model.hpp"
#include "udam/pddl_ast.hpp"
#include "udam/pddl_parser.hpp"

namespace udam {

class GroundingError : public std::runtime_error {
public:
    explicit GroundingError(const std::string& msg) : std::runtime_error(msg) {}
};

struct GrounderOptions {
    long long max_ground_actions = 5'000'000;
    // Drop literals over predicates no effect ever touches, using their value
    // in the initial state. Sound; speeds up search on relational domains.
    bool prune_statics = true;
};

struct GroundedInstance {
    GroundTask task;
    Vocabulary vocab;
    GroundAtomTable table;
};

namespace detail {

inline Vocabulary make_vocabulary(const DomainAst& dom, const ProblemAst& prob) {
    Vocabulary v;
    v.types = dom.types;
    v.predicates = dom.predicates;
    v.objects = dom.constants;
    v.objects.insert(v.objects.end(), prob.objects.begin(), prob.objects.end());
    return v;
}

inline std::set<std::string> dynamic_predicates(const DomainAst& dom) {
    std::set<std::string> dyn;
    for (const auto& act : dom.actions) {
        for (const auto& lit : act.effect.direct) dyn.insert(lit.pred);
        for (const auto& ce : act.effect.conditional)
            for (const auto& lit : ce.effects) dyn.insert(lit.pred);
    }
    return dyn;
}

}  // namespace detail

// Grounds a domain/problem pair into a propositional task. Equality literals
// are decided per binding; ill-typed atoms are statically false.
inline GroundedInstance ground_task(const DomainAst& dom, const ProblemAst& prob,
                                    const GrounderOptions& opts = {}) {
    GroundedInstance out;
    out.vocab = detail::make_vocabulary(dom, prob);
    out.table = GroundAtomTable(out.vocab);
    const Vocabulary& vocab = out.vocab;
    const GroundAtomTable& table = out.table;

    GroundTask& task = out.task;
    task.num_fluents = table.size();
    task.fluent_names.reserve(table.size());
    for (int i = 0; i < table.size(); ++i) task.fluent_names.push_back(table.name_of(i));

    task.init = State(table.size());
    for (const auto& atom : prob.init) {
        int id = table.atom_id(atom);
        if (id < 0) throw GroundingError("init atom out of vocabulary");
        task.init.set(id);
    }
    for (const auto& atom : prob.goal) {
        int id = table.atom_id(atom);
        if (id < 0) throw GroundingError("goal atom out of vocabulary");
        task.goal.push_back(id);
    }
    std::sort(task.goal.begin(), task.goal.end());
    task.goal.erase(std::unique(task.goal.begin(), task.goal.end()), task.goal.end());

    std::set<std::string> dyn = detail::dynamic_predicates(dom);
    auto is_static = [&](const std::string& pred) {
        return opts.prune_statics && !dyn.count(pred);
    };

    for (const auto& act : dom.actions) {
        std::vector<std::vector<int>> cands;
        for (const auto& p : act.params) cands.push_back(vocab.object_candidates(p.type));

        // binding: parameter index -> object id
        auto instantiate = [&](const std::vector<int>& binding) {
            auto object_of = [&](const Term& t) -> int {
                if (t.is_variable) {
                    for (std::size_t i = 0; i < act.params.size(); ++i)
                        if (act.params[i].name == t.name) return binding[i];
                    throw GroundingError("unbound variable ?" + t.name);
                }
                int o = vocab.object_index(t.name);
                if (o < 0) throw GroundingError("unknown constant " + t.name);
                return o;
            };
            auto atom_id_of = [&](const FormulaLiteral& lit) -> int {
                int p = vocab.pred_index(lit.pred);
                std::vector<int> objs;
                objs.reserve(lit.args.size());
                for (const auto& t : lit.args) objs.push_back(object_of(t));
                return table.atom_id(p, objs);
            };

            GroundAction ga;
            bool impossible = false;
            for (const auto& clause : act.precondition.clauses) {
                GroundClause gc;
                bool satisfied = false;
                for (const auto& lit : clause.literals) {
                    if (lit.kind == FormulaLiteral::Kind::Equality) {
                        bool eq = object_of(lit.args[0]) == object_of(lit.args[1]);
                        if (eq == lit.positive) { satisfied = true; break; }
                        continue;  // statically false literal
                    }
                    int id = atom_id_of(lit);
                    if (id < 0) {
                        // ill-typed atom: false forever
                        if (!lit.positive) { satisfied = true; break; }
                        continue;
                    }
                    if (is_static(lit.pred)) {
                        bool val = task.init.test(id);
                        if (val == lit.positive) { satisfied = true; break; }
                        continue;
                    }
                    gc.literals.push_back({id, lit.positive});
                }
                if (satisfied) continue;
                if (gc.literals.empty()) { impossible = true; break; }
                ga.pre.push_back(std::move(gc));
            }
            if (impossible) return;

            auto ground_effect_literals = [&](const std::vector<FormulaLiteral>& lits,
                                              std::vector<Literal>& dst) {
                for (const auto& lit : lits) {
                    int id = atom_id_of(lit);
                    if (id >= 0) dst.push_back({id, lit.positive});
                }
            };

            if (!act.effect.direct.empty()) {
                GroundCondEffect ce;
                ground_effect_literals(act.effect.direct, ce.effects);
                if (!ce.effects.empty()) ga.effects.push_back(std::move(ce));
            }
            for (const auto& cea : act.effect.conditional) {
                GroundCondEffect ce;
                bool dead = false;
                for (const auto& lit : cea.condition) {
                    if (lit.kind == FormulaLiteral::Kind::Equality) {
                        bool eq = object_of(lit.args[0]) == object_of(lit.args[1]);
                        if (eq != lit.positive) { dead = true; break; }
                        continue;
                    }
                    int id = atom_id_of(lit);
                    if (id < 0) {
                        if (lit.positive) { dead = true; break; }
                        continue;
                    }
                    ce.condition.push_back({id, lit.positive});
                }
                if (dead) continue;
                ground_effect_literals(cea.effects, ce.effects);
                if (!ce.effects.empty()) ga.effects.push_back(std::move(ce));
            }

            GroundActionSig sig;
            sig.name = act.name;
            for (int o : binding) sig.args.push_back(vocab.objects[o].name);
            task.actions.push_back(std::move(ga));
            task.action_sigs.push_back(std::move(sig));
            if (static_cast<long long>(task.actions.size()) > opts.max_ground_actions)
                throw GroundingError("ground action budget exceeded");
        };

        if (act.params.empty()) {
            instantiate({});
        } else {
            for_each_tuple(cands, instantiate);
        }
    }
    task.action_is_edit.assign(task.actions.size(), 0);
    return out;
}

inline GroundActionIndex make_action_index(const GroundTask& task) {
    GroundActionIndex index;
    for (std::size_t i = 0; i < task.action_sigs.size(); ++i)
        index.add(task.action_sigs[i].name, task.action_sigs[i].args, static_cast<int>(i));
    return index;
}

}  // namespace udam
