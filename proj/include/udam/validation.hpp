#pragma once

#include <chrono>
#include <string>
#include <vector>

#include <json.hpp>

#include "udam/grounder.hpp"
#include "udam/model.hpp"
#include "udam/pddl_printer.hpp"
#include "udam/planner.hpp"

namespace udam {

// Renders learned schemas as a plain STRIPS domain.
inline DomainAst schemas_to_domain(const std::vector<ActionSchema>& models,
                                   const Vocabulary& vocab, const std::string& name = "learned") {
    DomainAst dom;
    dom.name = name;
    dom.requirements = {":strips"};
    bool typed = false;
    for (const auto& t : vocab.types) {
        dom.types.push_back(t);
        typed = true;
    }
    if (typed) dom.requirements.push_back(":typing");
    dom.predicates = vocab.predicates;
    for (const auto& schema : models) {
        ActionAst act;
        act.name = schema.name;
        for (const auto& p : schema.params) act.params.push_back(p);
        auto to_literal = [&](const LiftedAtom& atom, bool positive) {
            FormulaLiteral lit;
            lit.positive = positive;
            lit.pred = vocab.predicates[atom.pred].name;
            for (int v : atom.vars) lit.args.push_back({schema.params[v].name, true});
            return lit;
        };
        for (const auto& atom : schema.pre)
            act.precondition.clauses.push_back({{to_literal(atom, true)}});
        for (const auto& atom : schema.add) act.effect.direct.push_back(to_literal(atom, true));
        for (const auto& atom : schema.del) act.effect.direct.push_back(to_literal(atom, false));
        dom.actions.push_back(std::move(act));
    }
    return dom;
}

struct InstanceRecord {
    std::string instance;
    bool solved = false;
    int plan_length = -1;
    double wall_s = 0.0;
    std::string note;
};

struct CoverageReport {
    int solved = 0;
    int total = 0;
    std::vector<InstanceRecord> records;
    double fraction() const { return total == 0 ? 0.0 : static_cast<double>(solved) / total; }
};

// Solves every held-out instance under the learned domain. An instance only
// counts as covered if the returned plan survives re-simulation.
inline CoverageReport coverage(const DomainAst& dom, const std::vector<ProblemAst>& instances,
                               const PlannerConfig& cfg) {
    CoverageReport report;
    report.total = static_cast<int>(instances.size());
    for (const auto& inst : instances) {
        InstanceRecord rec;
        rec.instance = inst.name;
        auto t0 = std::chrono::steady_clock::now();
        try {
            GroundedInstance gi = ground_task(dom, inst);
            SolveResult res = solve(gi.task, cfg);
            if (res.solved()) {
                auto check = validate_plan(gi.task, res.plan);
                if (check.ok) {
                    rec.solved = true;
                    rec.plan_length = static_cast<int>(res.plan.size());
                } else {
                    rec.note = "plan failed re-validation: " + check.violation.what;
                }
            } else {
                rec.note = to_string(res.status);
            }
        } catch (const std::exception& e) {
            rec.note = e.what();
        }
        rec.wall_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (rec.solved) ++report.solved;
        report.records.push_back(std::move(rec));
    }
    return report;
}

inline CoverageReport coverage(const std::vector<ActionSchema>& models, const Vocabulary& vocab,
                               const std::vector<ProblemAst>& instances,
                               const PlannerConfig& cfg) {
    return coverage(schemas_to_domain(models, vocab), instances, cfg);
}

inline nlohmann::json coverage_json(const CoverageReport& report) {
    nlohmann::json j;
    j["solved"] = report.solved;
    j["total"] = report.total;
    j["coverage"] = report.fraction();
    auto& arr = j["instances"] = nlohmann::json::array();
    for (const auto& rec : report.records) {
        nlohmann::json e{{"instance", rec.instance},
                         {"solved", rec.solved},
                         {"wall_s", rec.wall_s}};
        if (rec.plan_length >= 0) e["plan_length"] = rec.plan_length;
        if (!rec.note.empty()) e["note"] = rec.note;
        arr.push_back(std::move(e));
    }
    return j;
}

enum class Observability { Endpoints, FullStates };

struct TraceGenResult {
    std::vector<Trace> traces;
    std::vector<std::pair<std::string, std::string>> skipped;  // (instance, reason)
};

// Builds training traces from reference instances. Endpoint mode copies the
// instance's init/goal; full-state mode solves the instance and records the
// simulated state sequence.
inline TraceGenResult generate_traces(const DomainAst& reference,
                                      const std::vector<ProblemAst>& instances,
                                      Observability mode, const PlannerConfig& cfg) {
    TraceGenResult out;
    for (const auto& inst : instances) {
        if (mode == Observability::Endpoints) {
            Trace t;
            t.id = inst.name;
            t.init = inst.init;
            t.goal = inst.goal;
            out.traces.push_back(std::move(t));
            continue;
        }
        try {
            GroundedInstance gi = ground_task(reference, inst);
            SolveResult res = solve(gi.task, cfg);
            if (!res.solved()) {
                out.skipped.push_back({inst.name, to_string(res.status)});
                continue;
            }
            auto check = validate_plan(gi.task, res.plan);
            if (!check.ok) {
                out.skipped.push_back({inst.name, "plan failed validation"});
                continue;
            }
            Trace t;
            t.id = inst.name;
            t.init = inst.init;
            t.goal = inst.goal;
            for (const State& s : check.states) {
                ObservedState obs;
                for (int f : s.to_fluents()) obs.atoms.push_back(gi.table.ground_atom_of(f));
                std::sort(obs.atoms.begin(), obs.atoms.end());
                t.observed_states.push_back(std::move(obs));
            }
            out.traces.push_back(std::move(t));
        } catch (const std::exception& e) {
            out.skipped.push_back({inst.name, e.what()});
        }
    }
    return out;
}

}  // namespace udam
