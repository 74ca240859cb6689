#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "udam/ground_task.hpp"
#include "udam/model.hpp"
#include "udam/pddl_ast.hpp"
#include "udam/pddl_printer.hpp"

namespace udam {

class CompileError : public std::runtime_error {
public:
    explicit CompileError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class EditKind { Rpre, Add, Del };

inline const char* to_string(EditKind k) {
    switch (k) {
        case EditKind::Rpre: return "rpre";
        case EditKind::Add: return "add";
        case EditKind::Del: return "del";
    }
    return "?";
}

struct ModeTag {
    bool edit = true;  // false = val-mode
    friend bool operator==(const ModeTag&, const ModeTag&) = default;
};

struct EditRef {
    EditKind kind = EditKind::Rpre;
    int act = -1;
    int pred = -1;
    std::vector<int> sigma;  // 0-based var indices
    friend bool operator==(const EditRef&, const EditRef&) = default;
    friend auto operator<=>(const EditRef&, const EditRef&) = default;
};

struct HoldsRef {
    int trace = -1;
    int pred = -1;
    std::vector<int> omega;  // object ids
    friend bool operator==(const HoldsRef&, const HoldsRef&) = default;
};

struct OrderTag {  // symmetry-breaking auxiliary fluent
    int act = -1;
    friend bool operator==(const OrderTag&, const OrderTag&) = default;
};

struct PivotTag {
    friend bool operator==(const PivotTag&, const PivotTag&) = default;
};

struct ApplyRef {
    int act = -1;
    int trace = -1;
    std::vector<int> omega;
    friend bool operator==(const ApplyRef&, const ApplyRef&) = default;
};

using FluentTag = std::variant<ModeTag, EditRef, HoldsRef, OrderTag>;
using ActionTag = std::variant<EditRef, PivotTag, ApplyRef>;

struct CompileOptions {
    long long max_ground_actions = 5'000'000;
    long long max_fluents = 5'000'000;
    // Variables a schema body may use; -1 means all r. Arities below this are
    // realized by trimming unused parameters at induction time.
    int usable_arity = -1;
    bool symmetry_breaking = false;
};

struct CompiledProblem {
    GroundTask task;
    std::vector<FluentTag> fluent_tags;
    std::vector<ActionTag> action_tags;

    int k = 0;
    int r = 0;
    int m = 0;
    int usable_arity = 0;
    bool symmetry_breaking = false;
    bool has_seeds = false;

    long long n_fed = 0;
    long long n_fpred = 0;
    long long n_aed = 0;
    long long n_aapp = 0;
    int pivot_action = -1;

    Vocabulary vocab;
    std::vector<Trace> traces;
    GroundAtomTable atom_table;
    std::vector<ActionSchema> initial_models;
    // non-removable (seeded) precondition entries per act: (pred, sigma)
    std::vector<std::set<std::pair<int, std::vector<int>>>> protected_pre;
    // per act and parameter slot: the declared parameter type
    std::vector<std::vector<std::string>> act_param_types;
    // parameters pinned by a seed signature; induction never trims them
    std::vector<int> seed_arity;

    std::map<std::tuple<int, int, int, std::vector<int>>, int> edit_fluent_ids;
    int holds_base = 0;

    int edit_fluent(EditKind kind, int act, int pred, const std::vector<int>& sigma) const {
        auto it = edit_fluent_ids.find({static_cast<int>(kind), act, pred, sigma});
        return it == edit_fluent_ids.end() ? -1 : it->second;
    }
    int holds_fluent(int trace, int atom_id) const {
        return holds_base + trace * atom_table.size() + atom_id;
    }

    long long operator_count() const { return n_aed + 1 + n_aapp; }
};

namespace detail {

inline std::string sigma_suffix(const std::vector<int>& sigma) {
    std::string s;
    for (int v : sigma) s += " var" + std::to_string(v + 1);
    return s;
}

inline std::string edit_fluent_name(EditKind kind, int act, int pred_name_idx,
                                    const Vocabulary& vocab, const std::vector<int>& sigma) {
    std::string s = "(";
    s += to_string(kind);
    s += "-" + vocab.predicates[pred_name_idx].name + " act" + std::to_string(act + 1);
    s += sigma_suffix(sigma);
    return s + ")";
}

// substitute var indices by the apply action's object tuple
inline std::vector<int> substitute(const std::vector<int>& sigma, const std::vector<int>& omega) {
    std::vector<int> out(sigma.size());
    for (std::size_t i = 0; i < sigma.size(); ++i) out[i] = omega[sigma[i]];
    return out;
}

inline void check_reserved_names(const Vocabulary& vocab) {
    static const std::set<std::string> reserved_types = {"base", "dam-act", "dam-var", "dam-tr"};
    for (const auto& t : vocab.types)
        if (reserved_types.count(t.name))
            throw CompileError("type name '" + t.name + "' is reserved by the compilation");
    // only exact actN/varN/trN forms collide with compiled object names
    for (const auto& o : vocab.objects) {
        for (const char* stem : {"act", "var", "tr"}) {
            std::size_t len = std::string(stem).size();
            if (o.name.rfind(stem, 0) != 0 || o.name.size() <= len) continue;
            std::string rest = o.name.substr(len);
            if (rest.find_first_not_of("0123456789") == std::string::npos)
                throw CompileError("object name '" + o.name +
                                   "' collides with compiled object names");
        }
    }
    std::set<std::string> prefixed;
    for (const auto& p : vocab.predicates) {
        for (const char* prefix : {"rpre-", "add-", "del-", "holds-"}) {
            std::string name = prefix + p.name;
            if (!prefixed.insert(name).second)
                throw CompileError("predicate name clash on '" + name + "'");
            for (const auto& q : vocab.predicates)
                if (q.name == name)
                    throw CompileError("predicate name '" + name +
                                       "' collides with a compiled fluent family");
        }
    }
}

}  // namespace detail

// Transforms a learning task into a single classical problem: an edit phase
// that removes preconditions / programs effects of the k partial models, a
// pivot action, and an apply phase that must rebuild every trace's goal.
inline CompiledProblem compile(const LearningTask& task, const CompileOptions& opts = {}) {
    task.check_invariants();
    detail::check_reserved_names(task.vocab);

    CompiledProblem cp;
    cp.vocab = task.vocab;
    cp.traces = task.traces;
    cp.k = task.k;
    cp.r = task.r;
    cp.m = task.trace_count();
    cp.usable_arity = opts.usable_arity < 0 ? task.r : std::min(opts.usable_arity, task.r);
    cp.symmetry_breaking = opts.symmetry_breaking;
    cp.has_seeds = !task.seeds.empty();
    cp.atom_table = GroundAtomTable(cp.vocab);

    const Vocabulary& vocab = cp.vocab;
    const int k = cp.k, r = cp.r, m = cp.m;
    const int n_pred = static_cast<int>(vocab.predicates.size());

    // per-act parameter types: seeds may pin types on their parameter prefix
    cp.act_param_types.assign(k, std::vector<std::string>(r, kRootType));
    cp.protected_pre.assign(k, {});
    cp.seed_arity.assign(k, 0);
    cp.initial_models = init_partial_models(vocab, k, r);
    for (std::size_t s = 0; s < task.seeds.size(); ++s) {
        const ActionSchema& seed = task.seeds[s];
        cp.initial_models[s].name = seed.name;
        cp.seed_arity[s] = seed.arity();
        for (int i = 0; i < seed.arity(); ++i) {
            cp.act_param_types[s][i] = seed.params[i].type;
            cp.initial_models[s].params[i].type = seed.params[i].type;
        }
        for (const auto& atom : seed.pre)
            cp.protected_pre[s].insert({atom.pred, atom.vars});
        cp.initial_models[s].add = seed.add;
        cp.initial_models[s].del = seed.del;
        cp.initial_models[s].sort_body();
    }
    // restrict initial preconditions to the usable variable prefix
    if (cp.usable_arity < r) {
        for (auto& model : cp.initial_models) {
            std::erase_if(model.pre, [&](const LiftedAtom& a) {
                for (int v : a.vars)
                    if (v >= cp.usable_arity) return true;
                return false;
            });
        }
    }

    // ---- fluents ----
    GroundTask& gt = cp.task;
    auto add_fluent = [&](const std::string& name, FluentTag tag) {
        gt.fluent_names.push_back(name);
        cp.fluent_tags.push_back(std::move(tag));
        return static_cast<int>(gt.fluent_names.size()) - 1;
    };

    add_fluent("(edit-mode)", ModeTag{true});
    add_fluent("(val-mode)", ModeTag{false});

    for (int a = 0; a < k; ++a) {
        for (EditKind kind : {EditKind::Rpre, EditKind::Add, EditKind::Del}) {
            for (int p = 0; p < n_pred; ++p) {
                for (const auto& sigma : detail::var_tuples(r, vocab.predicates[p].arity())) {
                    if (kind == EditKind::Rpre && cp.protected_pre[a].count({p, sigma}))
                        continue;  // seeded preconditions are not removable
                    int id = add_fluent(detail::edit_fluent_name(kind, a, p, vocab, sigma),
                                        EditRef{kind, a, p, sigma});
                    cp.edit_fluent_ids[{static_cast<int>(kind), a, p, sigma}] = id;
                }
            }
        }
    }
    cp.n_fed = static_cast<long long>(gt.fluent_names.size()) - 2;
    cp.holds_base = static_cast<int>(gt.fluent_names.size());

    for (int t = 0; t < m; ++t) {
        for (int atom = 0; atom < cp.atom_table.size(); ++atom) {
            auto [p, omega] = cp.atom_table.atom_of(atom);
            std::string nm = "(holds-" + vocab.predicates[p].name + " tr" + std::to_string(t + 1);
            for (int o : omega) nm += " " + vocab.objects[o].name;
            nm += ")";
            add_fluent(nm, HoldsRef{t, p, omega});
        }
    }
    cp.n_fpred = static_cast<long long>(m) * cp.atom_table.size();

    std::vector<int> order_fluent(k, -1);
    if (opts.symmetry_breaking) {
        for (int a = 0; a < k; ++a)
            order_fluent[a] = add_fluent("(touched act" + std::to_string(a + 1) + ")",
                                         OrderTag{a});
    }
    gt.num_fluents = static_cast<int>(gt.fluent_names.size());
    if (gt.num_fluents > opts.max_fluents)
        throw CompileError("fluent budget exceeded: " + std::to_string(gt.num_fluents));

    // ---- actions ----
    auto add_action = [&](GroundAction action, GroundActionSig sig, ActionTag tag,
                          bool is_edit) {
        gt.actions.push_back(std::move(action));
        gt.action_sigs.push_back(std::move(sig));
        cp.action_tags.push_back(std::move(tag));
        gt.action_is_edit.push_back(is_edit ? 1 : 0);
        if (static_cast<long long>(gt.actions.size()) > opts.max_ground_actions)
            throw CompileError("ground action budget exceeded");
        return static_cast<int>(gt.actions.size()) - 1;
    };

    const int edit_mode = 0, val_mode = 1;

    for (int a = 0; a < k; ++a) {
        for (EditKind kind : {EditKind::Rpre, EditKind::Add, EditKind::Del}) {
            for (int p = 0; p < n_pred; ++p) {
                for (const auto& sigma :
                     detail::var_tuples(cp.usable_arity, vocab.predicates[p].arity())) {
                    int fluent = cp.edit_fluent(kind, a, p, sigma);
                    if (fluent < 0) continue;  // protected
                    GroundAction act;
                    act.pre.push_back({{Literal{edit_mode, true}}});
                    act.pre.push_back({{Literal{fluent, false}}});  // no repeated edits
                    if (opts.symmetry_breaking && a > 0)
                        act.pre.push_back({{Literal{order_fluent[a - 1], true}}});
                    GroundCondEffect eff;
                    eff.effects.push_back({fluent, true});
                    if (opts.symmetry_breaking) eff.effects.push_back({order_fluent[a], true});
                    act.effects.push_back(std::move(eff));

                    GroundActionSig sig;
                    sig.name = std::string("edit-") + to_string(kind) + "-" +
                               vocab.predicates[p].name;
                    sig.args.push_back("act" + std::to_string(a + 1));
                    for (int v : sigma) sig.args.push_back("var" + std::to_string(v + 1));
                    add_action(std::move(act), std::move(sig), EditRef{kind, a, p, sigma}, true);
                }
            }
        }
    }
    cp.n_aed = static_cast<long long>(gt.actions.size());

    {
        GroundAction pivot;
        pivot.pre.push_back({{Literal{edit_mode, true}}});
        GroundCondEffect eff;
        eff.effects.push_back({edit_mode, false});
        eff.effects.push_back({val_mode, true});
        pivot.effects.push_back(std::move(eff));
        cp.pivot_action = add_action(std::move(pivot), {"ed2val", {}}, PivotTag{}, false);
    }

    // apply actions: one per (act, trace, object tuple); each carries the
    // not-removed => holds clause and the programmed-effect conditionals for
    // every (predicate, sigma) pair
    for (int a = 0; a < k; ++a) {
        std::vector<std::vector<int>> cands(r);
        for (int i = 0; i < r; ++i) cands[i] = vocab.object_candidates(cp.act_param_types[a][i]);
        std::vector<std::vector<int>> omegas;
        if (r == 0) {
            omegas.push_back({});
        } else {
            for_each_tuple(cands, [&](const std::vector<int>& t) { omegas.push_back(t); });
        }
        for (int t = 0; t < m; ++t) {
            for (const auto& omega : omegas) {
                GroundAction act;
                act.pre.push_back({{Literal{val_mode, true}}});
                bool impossible = false;
                for (int p = 0; p < n_pred && !impossible; ++p) {
                    for (const auto& sigma :
                         detail::var_tuples(r, vocab.predicates[p].arity())) {
                        int atom = cp.atom_table.atom_id(p, detail::substitute(sigma, omega));
                        int rpre = cp.edit_fluent(EditKind::Rpre, a, p, sigma);
                        GroundClause clause;
                        if (rpre >= 0) clause.literals.push_back({rpre, true});
                        if (atom >= 0)
                            clause.literals.push_back({cp.holds_fluent(t, atom), true});
                        if (clause.literals.empty()) { impossible = true; break; }
                        act.pre.push_back(std::move(clause));
                    }
                }
                if (impossible) continue;  // seeded ill-typed precondition
                for (int p = 0; p < n_pred; ++p) {
                    for (const auto& sigma :
                         detail::var_tuples(r, vocab.predicates[p].arity())) {
                        int atom = cp.atom_table.atom_id(p, detail::substitute(sigma, omega));
                        if (atom < 0) continue;
                        int holds = cp.holds_fluent(t, atom);
                        int add_f = cp.edit_fluent(EditKind::Add, a, p, sigma);
                        int del_f = cp.edit_fluent(EditKind::Del, a, p, sigma);
                        act.effects.push_back({{{add_f, true}}, {{holds, true}}});
                        act.effects.push_back({{{del_f, true}}, {{holds, false}}});
                    }
                }
                GroundActionSig sig;
                sig.name = "apply-act" + std::to_string(a + 1);
                sig.args.push_back("tr" + std::to_string(t + 1));
                for (int o : omega) sig.args.push_back(vocab.objects[o].name);
                add_action(std::move(act), std::move(sig), ApplyRef{a, t, omega}, false);
            }
        }
    }
    cp.n_aapp = static_cast<long long>(gt.actions.size()) - cp.n_aed - 1;

    // ---- initial state and goal ----
    gt.init = State(gt.num_fluents);
    gt.init.set(edit_mode);
    // preconditions outside the initial partial models are pre-removed:
    // repeated-variable tuples and tuples beyond the usable prefix
    for (int a = 0; a < k; ++a) {
        for (int p = 0; p < n_pred; ++p) {
            for (const auto& sigma : detail::var_tuples(r, vocab.predicates[p].arity())) {
                bool active = detail::injective(sigma);
                for (int v : sigma)
                    if (v >= cp.usable_arity) active = false;
                if (active) continue;
                int f = cp.edit_fluent(EditKind::Rpre, a, p, sigma);
                if (f >= 0) gt.init.set(f);
            }
        }
        // seeded effects are pre-programmed
        for (const auto& atom : cp.initial_models[a].add) {
            int f = cp.edit_fluent(EditKind::Add, a, atom.pred, atom.vars);
            if (f >= 0) gt.init.set(f);
        }
        for (const auto& atom : cp.initial_models[a].del) {
            int f = cp.edit_fluent(EditKind::Del, a, atom.pred, atom.vars);
            if (f >= 0) gt.init.set(f);
        }
    }
    for (int t = 0; t < m; ++t) {
        for (const auto& atom : cp.traces[t].init) {
            int id = cp.atom_table.atom_id(atom);
            if (id < 0)
                throw CompileError("trace '" + cp.traces[t].id + "' init atom out of vocabulary");
            gt.init.set(cp.holds_fluent(t, id));
        }
        for (const auto& atom : cp.traces[t].goal) {
            int id = cp.atom_table.atom_id(atom);
            if (id < 0)
                throw CompileError("trace '" + cp.traces[t].id + "' goal atom out of vocabulary");
            gt.goal.push_back(cp.holds_fluent(t, id));
        }
    }
    gt.goal.push_back(val_mode);
    std::sort(gt.goal.begin(), gt.goal.end());
    gt.goal.erase(std::unique(gt.goal.begin(), gt.goal.end()), gt.goal.end());

    return cp;
}

struct EmittedTask {
    std::string domain_text;
    std::string problem_text;
};

// Renders the compiled problem as lifted PDDL whose grounding is
// action-for-action bijective with the compiled task. Only the default
// configuration is expressible this way.
inline EmittedTask emit_pddl(const CompiledProblem& cp) {
    if (cp.symmetry_breaking)
        throw CompileError("cannot emit PDDL with symmetry breaking enabled");
    if (cp.usable_arity != cp.r)
        throw CompileError("cannot emit PDDL with a restricted usable arity");
    if (cp.has_seeds)
        throw CompileError("cannot emit PDDL for seeded tasks");

    const Vocabulary& vocab = cp.vocab;
    DomainAst dom;
    dom.name = "dam";
    dom.requirements = {":strips", ":typing", ":negative-preconditions",
                        ":disjunctive-preconditions", ":conditional-effects"};

    dom.types.push_back({"base", kRootType});
    dom.types.push_back({"dam-act", kRootType});
    dom.types.push_back({"dam-var", kRootType});
    dom.types.push_back({"dam-tr", kRootType});
    for (const auto& t : vocab.types)
        dom.types.push_back({t.name, t.parent == kRootType ? "base" : t.parent});

    auto base_type = [&](const std::string& t) { return t == kRootType ? "base" : t; };

    for (int a = 0; a < cp.k; ++a)
        dom.constants.push_back({"act" + std::to_string(a + 1), "dam-act"});
    for (int v = 0; v < cp.r; ++v)
        dom.constants.push_back({"var" + std::to_string(v + 1), "dam-var"});
    for (int t = 0; t < cp.m; ++t)
        dom.constants.push_back({"tr" + std::to_string(t + 1), "dam-tr"});

    dom.predicates.push_back({"edit-mode", {}});
    dom.predicates.push_back({"val-mode", {}});
    for (const auto& p : vocab.predicates) {
        for (const char* prefix : {"rpre-", "add-", "del-"}) {
            PredicateSignature sig;
            sig.name = prefix + p.name;
            sig.params.push_back({"a", "dam-act"});
            for (int i = 0; i < p.arity(); ++i)
                sig.params.push_back({"v" + std::to_string(i + 1), "dam-var"});
            dom.predicates.push_back(std::move(sig));
        }
        PredicateSignature sig;
        sig.name = "holds-" + p.name;
        sig.params.push_back({"t", "dam-tr"});
        for (int i = 0; i < p.arity(); ++i)
            sig.params.push_back({"o" + std::to_string(i + 1), base_type(p.params[i].type)});
        dom.predicates.push_back(std::move(sig));
    }

    auto var_term = [](const std::string& n) { return Term{n, true}; };
    auto const_term = [](const std::string& n) { return Term{n, false}; };

    for (std::size_t p = 0; p < vocab.predicates.size(); ++p) {
        const auto& pred = vocab.predicates[p];
        for (EditKind kind : {EditKind::Rpre, EditKind::Add, EditKind::Del}) {
            ActionAst act;
            act.name = std::string("edit-") + to_string(kind) + "-" + pred.name;
            act.params.push_back({"a", "dam-act"});
            FormulaLiteral target;
            target.pred = std::string(to_string(kind)) + "-" + pred.name;
            target.args.push_back(var_term("a"));
            for (int i = 0; i < pred.arity(); ++i) {
                act.params.push_back({"v" + std::to_string(i + 1), "dam-var"});
                target.args.push_back(var_term("v" + std::to_string(i + 1)));
            }
            act.precondition.clauses.push_back({{FormulaLiteral{
                FormulaLiteral::Kind::Atom, true, "edit-mode", {}}}});
            FormulaLiteral not_yet = target;
            not_yet.positive = false;
            act.precondition.clauses.push_back({{not_yet}});
            act.effect.direct.push_back(target);
            dom.actions.push_back(std::move(act));
        }
    }
    {
        ActionAst pivot;
        pivot.name = "ed2val";
        pivot.precondition.clauses.push_back({{FormulaLiteral{
            FormulaLiteral::Kind::Atom, true, "edit-mode", {}}}});
        pivot.effect.direct.push_back({FormulaLiteral::Kind::Atom, false, "edit-mode", {}});
        pivot.effect.direct.push_back({FormulaLiteral::Kind::Atom, true, "val-mode", {}});
        dom.actions.push_back(std::move(pivot));
    }

    for (int a = 0; a < cp.k; ++a) {
        ActionAst act;
        act.name = "apply-act" + std::to_string(a + 1);
        act.params.push_back({"t", "dam-tr"});
        for (int i = 0; i < cp.r; ++i)
            act.params.push_back({"o" + std::to_string(i + 1),
                                  base_type(cp.act_param_types[a][i])});
        std::string act_obj = "act" + std::to_string(a + 1);
        act.precondition.clauses.push_back({{FormulaLiteral{
            FormulaLiteral::Kind::Atom, true, "val-mode", {}}}});
        for (std::size_t p = 0; p < vocab.predicates.size(); ++p) {
            const auto& pred = vocab.predicates[p];
            for (const auto& sigma : detail::var_tuples(cp.r, pred.arity())) {
                std::vector<Term> edit_args{const_term(act_obj)};
                for (int v : sigma) edit_args.push_back(const_term("var" + std::to_string(v + 1)));
                FormulaLiteral holds;
                holds.pred = "holds-" + pred.name;
                holds.args.push_back(var_term("t"));
                for (int v : sigma) holds.args.push_back(var_term("o" + std::to_string(v + 1)));

                FormulaClause clause;
                clause.literals.push_back({FormulaLiteral::Kind::Atom, true,
                                           "rpre-" + pred.name, edit_args});
                clause.literals.push_back(holds);
                act.precondition.clauses.push_back(std::move(clause));

                FormulaLiteral add_cond{FormulaLiteral::Kind::Atom, true,
                                        "add-" + pred.name, edit_args};
                FormulaLiteral del_cond{FormulaLiteral::Kind::Atom, true,
                                        "del-" + pred.name, edit_args};
                act.effect.conditional.push_back({{add_cond}, {holds}});
                FormulaLiteral holds_del = holds;
                holds_del.positive = false;
                act.effect.conditional.push_back({{del_cond}, {holds_del}});
            }
        }
        dom.actions.push_back(std::move(act));
    }

    ProblemAst prob;
    prob.name = "dam-task";
    prob.domain_name = dom.name;
    for (const auto& o : vocab.objects) prob.objects.push_back({o.name, base_type(o.type)});

    for (int f = 0; f < cp.task.num_fluents; ++f) {
        if (!cp.task.init.test(f)) continue;
        const FluentTag& tag = cp.fluent_tags[f];
        if (std::holds_alternative<ModeTag>(tag)) {
            prob.init.push_back({std::get<ModeTag>(tag).edit ? "edit-mode" : "val-mode", {}});
        } else if (const auto* ed = std::get_if<EditRef>(&tag)) {
            GroundAtom atom;
            atom.pred = std::string(to_string(ed->kind)) + "-" +
                        vocab.predicates[ed->pred].name;
            atom.args.push_back("act" + std::to_string(ed->act + 1));
            for (int v : ed->sigma) atom.args.push_back("var" + std::to_string(v + 1));
            prob.init.push_back(std::move(atom));
        } else if (const auto* h = std::get_if<HoldsRef>(&tag)) {
            GroundAtom atom;
            atom.pred = "holds-" + vocab.predicates[h->pred].name;
            atom.args.push_back("tr" + std::to_string(h->trace + 1));
            for (int o : h->omega) atom.args.push_back(vocab.objects[o].name);
            prob.init.push_back(std::move(atom));
        }
    }
    for (int g : cp.task.goal) {
        const FluentTag& tag = cp.fluent_tags[g];
        if (std::holds_alternative<ModeTag>(tag)) {
            prob.goal.push_back({"val-mode", {}});
        } else if (const auto* h = std::get_if<HoldsRef>(&tag)) {
            GroundAtom atom;
            atom.pred = "holds-" + vocab.predicates[h->pred].name;
            atom.args.push_back("tr" + std::to_string(h->trace + 1));
            for (int o : h->omega) atom.args.push_back(vocab.objects[o].name);
            prob.goal.push_back(std::move(atom));
        }
    }
    std::sort(prob.init.begin(), prob.init.end());
    std::sort(prob.goal.begin(), prob.goal.end());

    return {print_domain(dom), print_problem(prob)};
}

// Serialized fluent/action tags, enough to decode an external planner's output
// into edit and apply semantics.
inline nlohmann::json backmap_json(const CompiledProblem& cp) {
    nlohmann::json j;
    j["k"] = cp.k;
    j["r"] = cp.r;
    j["m"] = cp.m;
    auto& fluents = j["fluents"] = nlohmann::json::array();
    for (std::size_t f = 0; f < cp.fluent_tags.size(); ++f) {
        nlohmann::json e;
        e["id"] = f;
        e["name"] = cp.task.fluent_names[f];
        const FluentTag& tag = cp.fluent_tags[f];
        if (const auto* mode = std::get_if<ModeTag>(&tag)) {
            e["kind"] = mode->edit ? "edit-mode" : "val-mode";
        } else if (const auto* ed = std::get_if<EditRef>(&tag)) {
            e["kind"] = to_string(ed->kind);
            e["act"] = ed->act + 1;
            e["pred"] = cp.vocab.predicates[ed->pred].name;
            e["sigma"] = ed->sigma;
        } else if (const auto* h = std::get_if<HoldsRef>(&tag)) {
            e["kind"] = "holds";
            e["trace"] = h->trace + 1;
            e["pred"] = cp.vocab.predicates[h->pred].name;
            auto names = nlohmann::json::array();
            for (int o : h->omega) names.push_back(cp.vocab.objects[o].name);
            e["omega"] = names;
        } else {
            e["kind"] = "order";
        }
        fluents.push_back(std::move(e));
    }
    auto& actions = j["actions"] = nlohmann::json::array();
    for (std::size_t a = 0; a < cp.action_tags.size(); ++a) {
        nlohmann::json e;
        e["id"] = a;
        e["name"] = cp.task.action_sigs[a].str();
        const ActionTag& tag = cp.action_tags[a];
        if (const auto* ed = std::get_if<EditRef>(&tag)) {
            e["kind"] = std::string("edit-") + to_string(ed->kind);
            e["act"] = ed->act + 1;
            e["pred"] = cp.vocab.predicates[ed->pred].name;
            e["sigma"] = ed->sigma;
        } else if (std::holds_alternative<PivotTag>(tag)) {
            e["kind"] = "ed2val";
        } else if (const auto* ap = std::get_if<ApplyRef>(&tag)) {
            e["kind"] = "apply";
            e["act"] = ap->act + 1;
            e["trace"] = ap->trace + 1;
            auto names = nlohmann::json::array();
            for (int o : ap->omega) names.push_back(cp.vocab.objects[o].name);
            e["omega"] = names;
        }
        actions.push_back(std::move(e));
    }
    return j;
}

}  // namespace udam
