#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "udam/compile.hpp"
#include "udam/model.hpp"
#include "udam/util.hpp"

namespace udam {

class InductionError : public std::runtime_error {
public:
    enum class Kind { IllFormedPlan, NotASolution, NotRepresentable };
    InductionError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct InducedSchema {
    int slot = 0;
    ActionSchema schema;          // trimmed, contiguous parameters
    ActionSchema untrimmed;       // body over the full r parameters
    std::vector<int> kept_vars;   // trimmed param j -> original var index
    bool effect_free = false;
    bool inconsistent = false;    // add and del share an atom
};

struct InductionResult {
    std::vector<InducedSchema> schemas;  // one per declared action slot
    std::vector<std::string> warnings;
    int k_declared = 0;

    // schemas that actually do something; what gets exported
    std::vector<ActionSchema> kept_models() const {
        std::vector<ActionSchema> out;
        for (const auto& s : schemas)
            if (!s.effect_free) out.push_back(s.schema);
        return out;
    }
};

struct PlanViews {
    std::vector<int> edit_prefix;
    int pivot = -1;
    std::vector<int> apply_suffix;
};

inline PlanViews split_plan(const CompiledProblem& cp, const Plan& plan) {
    PlanViews views;
    bool seen_pivot = false;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const ActionTag& tag = cp.action_tags[plan[i]];
        if (std::holds_alternative<PivotTag>(tag)) {
            if (seen_pivot)
                throw InductionError(InductionError::Kind::IllFormedPlan,
                                     "plan pivots more than once");
            seen_pivot = true;
            views.pivot = static_cast<int>(i);
        } else if (std::holds_alternative<EditRef>(tag)) {
            if (seen_pivot)
                throw InductionError(InductionError::Kind::IllFormedPlan,
                                     "edit action after the pivot at step " + std::to_string(i));
            views.edit_prefix.push_back(plan[i]);
        } else {
            if (!seen_pivot)
                throw InductionError(InductionError::Kind::IllFormedPlan,
                                     "apply action before the pivot at step " + std::to_string(i));
            views.apply_suffix.push_back(plan[i]);
        }
    }
    if (!seen_pivot)
        throw InductionError(InductionError::Kind::IllFormedPlan, "plan never pivots");
    return views;
}

// Reads the learned models off a solution plan: removed preconditions and
// programmed effects from the edit prefix, then parameter trimming.
inline InductionResult induce_models(const CompiledProblem& cp, const Plan& plan) {
    PlanViews views = split_plan(cp, plan);
    InductionResult result;
    result.k_declared = cp.k;

    std::vector<ActionSchema> work = cp.initial_models;
    for (int action : views.edit_prefix) {
        const auto& ed = std::get<EditRef>(cp.action_tags[action]);
        ActionSchema& schema = work[ed.act];
        LiftedAtom atom{ed.pred, ed.sigma};
        switch (ed.kind) {
            case EditKind::Rpre: {
                auto it = std::find(schema.pre.begin(), schema.pre.end(), atom);
                if (it == schema.pre.end())
                    throw InductionError(InductionError::Kind::IllFormedPlan,
                                         "removed precondition not present in partial model");
                schema.pre.erase(it);
                break;
            }
            case EditKind::Add:
                schema.add.push_back(atom);
                break;
            case EditKind::Del:
                schema.del.push_back(atom);
                break;
        }
    }

    for (int slot = 0; slot < cp.k; ++slot) {
        ActionSchema& full = work[slot];
        full.sort_body();
        InducedSchema induced;
        induced.slot = slot;
        induced.untrimmed = full;
        induced.effect_free = full.effect_free();
        induced.inconsistent = full.has_conflicting_effects();

        std::set<int> used;
        auto scan = [&](const std::vector<LiftedAtom>& atoms) {
            for (const auto& a : atoms)
                for (int v : a.vars) used.insert(v);
        };
        scan(full.pre);
        scan(full.add);
        scan(full.del);
        // seeded parameters stay part of the signature even if unused
        for (int v = 0; v < cp.seed_arity[slot]; ++v) used.insert(v);

        induced.kept_vars.assign(used.begin(), used.end());
        std::map<int, int> renumber;
        for (std::size_t j = 0; j < induced.kept_vars.size(); ++j)
            renumber[induced.kept_vars[j]] = static_cast<int>(j);

        ActionSchema trimmed;
        trimmed.name = full.name;
        for (int v : induced.kept_vars) trimmed.params.push_back(full.params[v]);
        auto remap = [&](const std::vector<LiftedAtom>& src, std::vector<LiftedAtom>& dst) {
            for (const auto& a : src) {
                LiftedAtom out{a.pred, a.vars};
                for (int& v : out.vars) v = renumber.at(v);
                dst.push_back(std::move(out));
            }
        };
        remap(full.pre, trimmed.pre);
        remap(full.add, trimmed.add);
        remap(full.del, trimmed.del);
        trimmed.sort_body();
        induced.schema = std::move(trimmed);

        if (induced.effect_free)
            result.warnings.push_back("action '" + full.name +
                                      "' has no effects and is dropped from the exported model");
        if (induced.inconsistent)
            result.warnings.push_back("action '" + full.name +
                                      "' both adds and deletes the same atom");
        if (!induced.effect_free && !well_defined(induced.schema))
            result.warnings.push_back("action '" + full.name +
                                      "' is not well-defined after trimming");
        result.schemas.push_back(std::move(induced));
    }
    return result;
}

// Edit cost: per-action average of programmed effects minus the retained
// precondition credit. The denominator is the declared action count, and
// effect-free actions still contribute their untouched preconditions.
inline Rational model_cost(const std::vector<ActionSchema>& all_slots, int k_declared) {
    long long num = 0;
    for (const auto& s : all_slots)
        num += static_cast<long long>(s.add.size()) + static_cast<long long>(s.del.size()) -
               static_cast<long long>(s.pre.size());
    return Rational(num, k_declared);
}

inline Rational model_cost(const InductionResult& result) {
    std::vector<ActionSchema> slots;
    for (const auto& s : result.schemas) slots.push_back(s.untrimmed);
    return model_cost(slots, result.k_declared);
}

// The cost is computable from the plan prefix alone: every edit raises the
// numerator by exactly one over the initial models' baseline.
inline Rational cost_from_plan(const CompiledProblem& cp, const Plan& plan) {
    PlanViews views = split_plan(cp, plan);
    long long base = 0;
    for (const auto& s : cp.initial_models)
        base += static_cast<long long>(s.add.size()) + static_cast<long long>(s.del.size()) -
                static_cast<long long>(s.pre.size());
    return Rational(base + static_cast<long long>(views.edit_prefix.size()), cp.k);
}

struct ReplayOutcome {
    bool ok = false;
    std::vector<bool> per_trace;
    std::string detail;
};

namespace detail {

// Ground-applies an untrimmed schema body at the given object tuple on a set
// of atom ids. Ill-typed atoms are statically false / no-ops.
struct SchemaSimulator {
    const GroundAtomTable* table;

    bool applicable(const ActionSchema& schema, const std::vector<int>& omega,
                    const std::set<int>& state) const {
        for (const auto& atom : schema.pre) {
            int id = table->atom_id(atom.pred, substitute(atom.vars, omega));
            if (id < 0 || !state.count(id)) return false;
        }
        return true;
    }

    void apply(const ActionSchema& schema, const std::vector<int>& omega,
               std::set<int>& state) const {
        std::vector<int> adds, dels;
        for (const auto& atom : schema.del) {
            int id = table->atom_id(atom.pred, substitute(atom.vars, omega));
            if (id >= 0) dels.push_back(id);
        }
        for (const auto& atom : schema.add) {
            int id = table->atom_id(atom.pred, substitute(atom.vars, omega));
            if (id >= 0) adds.push_back(id);
        }
        for (int f : dels) state.erase(f);
        for (int f : adds) state.insert(f);
    }
};

inline std::set<int> atom_set(const GroundAtomTable& table, const std::vector<GroundAtom>& atoms) {
    std::set<int> out;
    for (const auto& a : atoms) {
        int id = table.atom_id(a);
        if (id >= 0) out.insert(id);
    }
    return out;
}

}  // namespace detail

// Soundness replay: simulate the plan's per-trace apply subsequences under
// the induced models and require every trace goal to be reached.
inline ReplayOutcome replay_models(const CompiledProblem& cp, const InductionResult& models,
                                   const Plan& plan) {
    ReplayOutcome out;
    PlanViews views = split_plan(cp, plan);
    detail::SchemaSimulator sim{&cp.atom_table};

    out.per_trace.assign(cp.m, false);
    out.ok = true;
    for (int t = 0; t < cp.m; ++t) {
        std::set<int> state = detail::atom_set(cp.atom_table, cp.traces[t].init);
        bool trace_ok = true;
        for (int action : views.apply_suffix) {
            const auto& ap = std::get<ApplyRef>(cp.action_tags[action]);
            if (ap.trace != t) continue;
            const ActionSchema& schema = models.schemas[ap.act].untrimmed;
            if (!sim.applicable(schema, ap.omega, state)) {
                trace_ok = false;
                out.detail = "trace '" + cp.traces[t].id + "': model '" + schema.name +
                             "' inapplicable at " + cp.task.action_sigs[action].str();
                break;
            }
            sim.apply(schema, ap.omega, state);
        }
        if (trace_ok) {
            for (const auto& g : cp.traces[t].goal) {
                int id = cp.atom_table.atom_id(g);
                if (id < 0 || !state.count(id)) {
                    trace_ok = false;
                    out.detail = "trace '" + cp.traces[t].id + "': goal atom (" + g.pred +
                                 " ...) not reached";
                    break;
                }
            }
        }
        out.per_trace[t] = trace_ok;
        out.ok = out.ok && trace_ok;
    }
    return out;
}

// One step of a witness: a model index plus the objects bound to its
// (trimmed) parameters.
struct WitnessStep {
    int model = 0;
    std::vector<int> omega;
};
using TracePlans = std::vector<std::vector<WitnessStep>>;

// Completeness direction: given models that already solve every trace (their
// per-trace plans are supplied), build the compiled-problem plan that first
// edits the partial models into the given ones and then replays the traces.
inline Plan encode_witness(const std::vector<ActionSchema>& models, const CompiledProblem& cp,
                           const TracePlans& trace_plans) {
    if (static_cast<int>(models.size()) > cp.k)
        throw InductionError(InductionError::Kind::NotRepresentable,
                             "more models than declared actions");
    if (static_cast<int>(trace_plans.size()) != cp.m)
        throw InductionError(InductionError::Kind::NotASolution,
                             "need one action sequence per trace");
    for (const auto& model : models)
        if (model.arity() > cp.r)
            throw InductionError(InductionError::Kind::NotRepresentable,
                                 "model arity exceeds the compiled bound");

    // simulate first; a witness only exists for genuine solutions
    detail::SchemaSimulator sim{&cp.atom_table};
    for (int t = 0; t < cp.m; ++t) {
        std::set<int> state = detail::atom_set(cp.atom_table, cp.traces[t].init);
        for (const auto& step : trace_plans[t]) {
            if (step.model < 0 || step.model >= static_cast<int>(models.size()))
                throw InductionError(InductionError::Kind::NotASolution, "bad model index");
            const ActionSchema& schema = models[step.model];
            if (static_cast<int>(step.omega.size()) != schema.arity())
                throw InductionError(InductionError::Kind::NotASolution,
                                     "binding arity mismatch");
            if (!sim.applicable(schema, step.omega, state))
                throw InductionError(InductionError::Kind::NotASolution,
                                     "trace '" + cp.traces[t].id + "': step inapplicable");
            sim.apply(schema, step.omega, state);
        }
        for (const auto& g : cp.traces[t].goal) {
            int id = cp.atom_table.atom_id(g);
            if (id < 0 || !state.count(id))
                throw InductionError(InductionError::Kind::NotASolution,
                                     "trace '" + cp.traces[t].id + "' does not reach its goal");
        }
    }

    std::map<EditRef, int> edit_actions;
    std::map<std::pair<std::pair<int, int>, std::vector<int>>, int> apply_actions;
    for (std::size_t i = 0; i < cp.action_tags.size(); ++i) {
        if (const auto* ed = std::get_if<EditRef>(&cp.action_tags[i]))
            edit_actions[*ed] = static_cast<int>(i);
        else if (const auto* ap = std::get_if<ApplyRef>(&cp.action_tags[i]))
            apply_actions[{{ap->act, ap->trace}, ap->omega}] = static_cast<int>(i);
    }

    Plan plan;
    for (std::size_t slot = 0; slot < models.size(); ++slot) {
        const ActionSchema& model = models[slot];
        const ActionSchema& initial = cp.initial_models[slot];

        std::set<LiftedAtom> target_pre(model.pre.begin(), model.pre.end());
        for (const auto& atom : model.pre)
            if (std::find(initial.pre.begin(), initial.pre.end(), atom) == initial.pre.end())
                throw InductionError(InductionError::Kind::NotRepresentable,
                                     "model precondition not part of the partial model");
        for (const auto& atom : initial.pre) {
            if (target_pre.count(atom)) continue;
            auto it = edit_actions.find(EditRef{EditKind::Rpre, static_cast<int>(slot),
                                                atom.pred, atom.vars});
            if (it == edit_actions.end())
                throw InductionError(InductionError::Kind::NotRepresentable,
                                     "precondition is protected and cannot be removed");
            plan.push_back(it->second);
        }
        auto program = [&](EditKind kind, const std::vector<LiftedAtom>& atoms,
                           const std::vector<LiftedAtom>& preset) {
            for (const auto& atom : atoms) {
                if (std::find(preset.begin(), preset.end(), atom) != preset.end())
                    continue;  // seeded effect already set
                auto it = edit_actions.find(EditRef{kind, static_cast<int>(slot),
                                                    atom.pred, atom.vars});
                if (it == edit_actions.end())
                    throw InductionError(InductionError::Kind::NotRepresentable,
                                         "effect outside the compiled edit space");
                plan.push_back(it->second);
            }
        };
        program(EditKind::Add, model.add, initial.add);
        program(EditKind::Del, model.del, initial.del);
    }
    plan.push_back(cp.pivot_action);

    for (int t = 0; t < cp.m; ++t) {
        for (const auto& step : trace_plans[t]) {
            std::vector<int> omega(step.omega);
            while (static_cast<int>(omega.size()) < cp.r) {
                auto cands = cp.vocab.object_candidates(
                    cp.act_param_types[step.model][omega.size()]);
                if (cands.empty())
                    throw InductionError(InductionError::Kind::NotRepresentable,
                                         "no object can pad an unused parameter");
                omega.push_back(cands.front());
            }
            auto it = apply_actions.find({{step.model, t}, omega});
            if (it == apply_actions.end())
                throw InductionError(InductionError::Kind::NotRepresentable,
                                     "no compiled apply action for this binding");
            plan.push_back(it->second);
        }
    }
    return plan;
}

}  // namespace udam
