#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "udam/pddl_ast.hpp"
#include "udam/sexpr.hpp"

namespace udam {

inline const std::set<std::string>& supported_requirements() {
    static const std::set<std::string> reqs = {
        ":strips",
        ":typing",
        ":negative-preconditions",
        ":disjunctive-preconditions",
        ":conditional-effects",
        ":equality",
    };
    return reqs;
}

namespace detail {

inline const std::string& atom_or_fail(const Sexpr& s, const char* what) {
    if (!s.is_atom())
        throw ParseError(ParseErrorKind::Syntax, std::string("expected ") + what, s.line, s.col);
    return s.atom;
}

// Parses a PDDL typed list `n1 n2 - t1 n3 - t2 n4` into (name, type) pairs.
// Names without a trailing type get the root type.
inline std::vector<TypedName> parse_typed_list(const std::vector<Sexpr>& items,
                                               std::size_t begin, std::size_t end) {
    std::vector<TypedName> out;
    std::vector<std::string> pending;
    for (std::size_t i = begin; i < end; ++i) {
        const std::string& tok = atom_or_fail(items[i], "name in typed list");
        if (tok == "-") {
            if (i + 1 >= end)
                throw ParseError(ParseErrorKind::Syntax, "missing type after '-'",
                                 items[i].line, items[i].col);
            const std::string& type = atom_or_fail(items[i + 1], "type name");
            for (auto& n : pending) out.push_back({n, type});
            pending.clear();
            ++i;
        } else {
            pending.push_back(tok);
        }
    }
    for (auto& n : pending) out.push_back({n, kRootType});
    return out;
}

inline void check_type_declared(const DomainAst& dom, const std::string& type,
                                const Sexpr& where) {
    if (type == kRootType) return;
    for (const auto& t : dom.types)
        if (t.name == type) return;
    throw ParseError(ParseErrorKind::UndeclaredType, "undeclared type '" + type + "'",
                     where.line, where.col);
}

inline Term parse_term(const Sexpr& s) {
    const std::string& a = atom_or_fail(s, "term");
    if (!a.empty() && a[0] == '?') return {a.substr(1), true};
    return {a, false};
}

// literal := (pred t*) | (not (pred t*)) | (= t t) | (not (= t t))
inline FormulaLiteral parse_literal(const Sexpr& s) {
    if (!s.is_list || s.items.empty())
        throw ParseError(ParseErrorKind::Syntax, "expected literal", s.line, s.col);
    if (s.head_is("not")) {
        if (s.items.size() != 2)
            throw ParseError(ParseErrorKind::Syntax, "'not' takes one argument", s.line, s.col);
        FormulaLiteral lit = parse_literal(s.items[1]);
        lit.positive = !lit.positive;
        return lit;
    }
    FormulaLiteral lit;
    const std::string& head = atom_or_fail(s.items[0], "predicate name");
    if (head == "=") {
        if (s.items.size() != 3)
            throw ParseError(ParseErrorKind::Syntax, "'=' takes two arguments", s.line, s.col);
        lit.kind = FormulaLiteral::Kind::Equality;
        lit.args = {parse_term(s.items[1]), parse_term(s.items[2])};
        return lit;
    }
    lit.pred = head;
    for (std::size_t i = 1; i < s.items.size(); ++i) lit.args.push_back(parse_term(s.items[i]));
    return lit;
}

// Precondition grammar: conjunction of clauses, each clause a literal or a
// disjunction of literals. `(and ...)` nests flatten into one clause list.
inline void parse_formula_into(const Sexpr& s, Formula& out) {
    if (s.head_is("and")) {
        for (std::size_t i = 1; i < s.items.size(); ++i) parse_formula_into(s.items[i], out);
        return;
    }
    if (s.head_is("or")) {
        FormulaClause clause;
        for (std::size_t i = 1; i < s.items.size(); ++i)
            clause.literals.push_back(parse_literal(s.items[i]));
        if (clause.literals.empty())
            throw ParseError(ParseErrorKind::Syntax, "empty 'or'", s.line, s.col);
        out.clauses.push_back(std::move(clause));
        return;
    }
    out.clauses.push_back({{parse_literal(s)}});
}

inline std::vector<FormulaLiteral> parse_literal_conjunction(const Sexpr& s) {
    std::vector<FormulaLiteral> lits;
    if (s.head_is("and")) {
        for (std::size_t i = 1; i < s.items.size(); ++i)
            lits.push_back(parse_literal(s.items[i]));
    } else {
        lits.push_back(parse_literal(s));
    }
    return lits;
}

inline void parse_effect_into(const Sexpr& s, EffectFormula& out) {
    if (s.head_is("and")) {
        for (std::size_t i = 1; i < s.items.size(); ++i) parse_effect_into(s.items[i], out);
        return;
    }
    if (s.head_is("when")) {
        if (s.items.size() != 3)
            throw ParseError(ParseErrorKind::Syntax, "'when' takes condition and effect",
                             s.line, s.col);
        CondEffectAst ce;
        ce.condition = parse_literal_conjunction(s.items[1]);
        ce.effects = parse_literal_conjunction(s.items[2]);
        out.conditional.push_back(std::move(ce));
        return;
    }
    out.direct.push_back(parse_literal(s));
}

inline void check_action_vars(const DomainAst& dom, const ActionAst& act) {
    std::set<std::string> params;
    for (const auto& p : act.params) params.insert(p.name);
    std::set<std::string> constants;
    for (const auto& c : dom.constants) constants.insert(c.name);

    auto check_lit = [&](const FormulaLiteral& lit) {
        for (const auto& t : lit.args) {
            if (t.is_variable && !params.count(t.name))
                throw ParseError(ParseErrorKind::Syntax,
                                 "free variable '?" + t.name + "' in action '" + act.name + "'");
            if (!t.is_variable && !constants.count(t.name))
                throw ParseError(ParseErrorKind::UnknownObject,
                                 "unknown constant '" + t.name + "' in action '" + act.name + "'");
        }
        if (lit.kind == FormulaLiteral::Kind::Atom) {
            const auto* sig = dom.find_predicate(lit.pred);
            if (!sig)
                throw ParseError(ParseErrorKind::UnknownPredicate,
                                 "unknown predicate '" + lit.pred + "'");
            if (static_cast<int>(lit.args.size()) != sig->arity())
                throw ParseError(ParseErrorKind::ArityMismatch,
                                 "predicate '" + lit.pred + "' expects " +
                                     std::to_string(sig->arity()) + " arguments");
        }
    };
    for (const auto& cl : act.precondition.clauses)
        for (const auto& lit : cl.literals) check_lit(lit);
    for (const auto& lit : act.effect.direct) check_lit(lit);
    for (const auto& ce : act.effect.conditional) {
        for (const auto& lit : ce.condition) check_lit(lit);
        for (const auto& lit : ce.effects) check_lit(lit);
    }
}

}  // namespace detail

inline DomainAst parse_domain(std::string_view text) {
    using namespace detail;
    Sexpr root = read_single_sexpr(text);
    if (!root.head_is("define"))
        throw ParseError(ParseErrorKind::Syntax, "expected (define ...)", root.line, root.col);
    if (root.items.size() < 2 || !root.items[1].head_is("domain") ||
        root.items[1].items.size() != 2)
        throw ParseError(ParseErrorKind::Syntax, "expected (domain <name>)", root.line, root.col);

    DomainAst dom;
    dom.name = atom_or_fail(root.items[1].items[1], "domain name");

    for (std::size_t i = 2; i < root.items.size(); ++i) {
        const Sexpr& sec = root.items[i];
        if (!sec.is_list || sec.items.empty() || !sec.items[0].is_atom())
            throw ParseError(ParseErrorKind::Syntax, "expected domain section", sec.line, sec.col);
        const std::string& key = sec.items[0].atom;

        if (key == ":requirements") {
            for (std::size_t j = 1; j < sec.items.size(); ++j) {
                const std::string& req = atom_or_fail(sec.items[j], "requirement");
                if (!supported_requirements().count(req))
                    throw ParseError(ParseErrorKind::UnsupportedRequirement,
                                     "unsupported requirement '" + req + "'",
                                     sec.items[j].line, sec.items[j].col);
                dom.requirements.push_back(req);
            }
        } else if (key == ":types") {
            // typed list of type names; parent defaults to the root type
            auto typed = parse_typed_list(sec.items, 1, sec.items.size());
            for (auto& t : typed) dom.types.push_back({t.name, t.type});
            for (const auto& t : dom.types)
                if (t.parent != kRootType) check_type_declared(dom, t.parent, sec);
        } else if (key == ":constants") {
            dom.constants = parse_typed_list(sec.items, 1, sec.items.size());
            for (const auto& c : dom.constants) check_type_declared(dom, c.type, sec);
        } else if (key == ":predicates") {
            for (std::size_t j = 1; j < sec.items.size(); ++j) {
                const Sexpr& ps = sec.items[j];
                if (!ps.is_list || ps.items.empty())
                    throw ParseError(ParseErrorKind::Syntax, "expected predicate declaration",
                                     ps.line, ps.col);
                PredicateSignature sig;
                sig.name = atom_or_fail(ps.items[0], "predicate name");
                sig.params = parse_typed_list(ps.items, 1, ps.items.size());
                for (const auto& p : sig.params) check_type_declared(dom, p.type, ps);
                for (const auto& other : dom.predicates)
                    if (other.name == sig.name)
                        throw ParseError(ParseErrorKind::Syntax,
                                         "duplicate predicate '" + sig.name + "'", ps.line, ps.col);
                dom.predicates.push_back(std::move(sig));
            }
        } else if (key == ":action") {
            if (sec.items.size() < 2)
                throw ParseError(ParseErrorKind::Syntax, "action needs a name", sec.line, sec.col);
            ActionAst act;
            act.name = atom_or_fail(sec.items[1], "action name");
            for (const auto& other : dom.actions)
                if (other.name == act.name)
                    throw ParseError(ParseErrorKind::Syntax,
                                     "duplicate action '" + act.name + "'", sec.line, sec.col);
            std::size_t j = 2;
            while (j < sec.items.size()) {
                const std::string& field = atom_or_fail(sec.items[j], "action field");
                if (j + 1 >= sec.items.size())
                    throw ParseError(ParseErrorKind::Syntax, "missing value for " + field,
                                     sec.items[j].line, sec.items[j].col);
                const Sexpr& val = sec.items[j + 1];
                if (field == ":parameters") {
                    if (!val.is_list)
                        throw ParseError(ParseErrorKind::Syntax, "expected parameter list",
                                         val.line, val.col);
                    auto typed = parse_typed_list(val.items, 0, val.items.size());
                    for (auto& p : typed) {
                        if (p.name.empty() || p.name[0] != '?')
                            throw ParseError(ParseErrorKind::Syntax,
                                             "parameters must be variables", val.line, val.col);
                        p.name = p.name.substr(1);
                        check_type_declared(dom, p.type, val);
                        act.params.push_back(p);
                    }
                } else if (field == ":precondition") {
                    detail::parse_formula_into(val, act.precondition);
                } else if (field == ":effect") {
                    detail::parse_effect_into(val, act.effect);
                } else {
                    throw ParseError(ParseErrorKind::Syntax, "unknown action field " + field,
                                     sec.items[j].line, sec.items[j].col);
                }
                j += 2;
            }
            dom.actions.push_back(std::move(act));
        } else {
            throw ParseError(ParseErrorKind::Syntax, "unsupported domain section " + key,
                             sec.line, sec.col);
        }
    }

    for (const auto& act : dom.actions) detail::check_action_vars(dom, act);
    return dom;
}

namespace detail {

inline GroundAtom parse_ground_atom(const Sexpr& s, const DomainAst& dom,
                                    const std::map<std::string, std::string>& object_types) {
    if (!s.is_list || s.items.empty())
        throw ParseError(ParseErrorKind::Syntax, "expected ground atom", s.line, s.col);
    GroundAtom atom;
    atom.pred = atom_or_fail(s.items[0], "predicate name");
    const auto* sig = dom.find_predicate(atom.pred);
    if (!sig)
        throw ParseError(ParseErrorKind::UnknownPredicate,
                         "unknown predicate '" + atom.pred + "'", s.line, s.col);
    if (s.items.size() - 1 != static_cast<std::size_t>(sig->arity()))
        throw ParseError(ParseErrorKind::ArityMismatch,
                         "predicate '" + atom.pred + "' expects " +
                             std::to_string(sig->arity()) + " arguments",
                         s.line, s.col);
    for (std::size_t i = 1; i < s.items.size(); ++i) {
        const std::string& obj = atom_or_fail(s.items[i], "object name");
        auto it = object_types.find(obj);
        if (it == object_types.end())
            throw ParseError(ParseErrorKind::UnknownObject, "unknown object '" + obj + "'",
                             s.items[i].line, s.items[i].col);
        if (!dom.is_subtype(it->second, sig->params[i - 1].type))
            throw ParseError(ParseErrorKind::TypeMismatch,
                             "object '" + obj + "' has type '" + it->second +
                                 "', predicate '" + atom.pred + "' expects '" +
                                 sig->params[i - 1].type + "'",
                             s.items[i].line, s.items[i].col);
        atom.args.push_back(obj);
    }
    return atom;
}

inline void sort_unique(std::vector<GroundAtom>& atoms) {
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
}

}  // namespace detail

inline ProblemAst parse_problem(std::string_view text, const DomainAst& dom) {
    using namespace detail;
    Sexpr root = read_single_sexpr(text);
    if (!root.head_is("define"))
        throw ParseError(ParseErrorKind::Syntax, "expected (define ...)", root.line, root.col);
    if (root.items.size() < 2 || !root.items[1].head_is("problem") ||
        root.items[1].items.size() != 2)
        throw ParseError(ParseErrorKind::Syntax, "expected (problem <name>)", root.line, root.col);

    ProblemAst prob;
    prob.name = atom_or_fail(root.items[1].items[1], "problem name");

    std::map<std::string, std::string> object_types;
    for (const auto& c : dom.constants) object_types[c.name] = c.type;

    // objects must be registered before :init / :goal are read
    std::vector<const Sexpr*> deferred;
    for (std::size_t i = 2; i < root.items.size(); ++i) {
        const Sexpr& sec = root.items[i];
        if (!sec.is_list || sec.items.empty() || !sec.items[0].is_atom())
            throw ParseError(ParseErrorKind::Syntax, "expected problem section", sec.line, sec.col);
        const std::string& key = sec.items[0].atom;
        if (key == ":domain") {
            if (sec.items.size() != 2)
                throw ParseError(ParseErrorKind::Syntax, "expected (:domain <name>)",
                                 sec.line, sec.col);
            prob.domain_name = atom_or_fail(sec.items[1], "domain name");
            if (prob.domain_name != dom.name)
                throw ParseError(ParseErrorKind::Syntax,
                                 "problem references domain '" + prob.domain_name +
                                     "', expected '" + dom.name + "'",
                                 sec.line, sec.col);
        } else if (key == ":objects") {
            prob.objects = parse_typed_list(sec.items, 1, sec.items.size());
            for (const auto& o : prob.objects) {
                check_type_declared(dom, o.type, sec);
                if (object_types.count(o.name))
                    throw ParseError(ParseErrorKind::Syntax,
                                     "duplicate object '" + o.name + "'", sec.line, sec.col);
                object_types[o.name] = o.type;
            }
        } else if (key == ":init" || key == ":goal") {
            deferred.push_back(&sec);
        } else {
            throw ParseError(ParseErrorKind::Syntax, "unsupported problem section " + key,
                             sec.line, sec.col);
        }
    }

    for (const Sexpr* secp : deferred) {
        const Sexpr& sec = *secp;
        if (sec.items[0].atom == ":init") {
            for (std::size_t j = 1; j < sec.items.size(); ++j)
                prob.init.push_back(parse_ground_atom(sec.items[j], dom, object_types));
        } else {
            if (sec.items.size() != 2)
                throw ParseError(ParseErrorKind::Syntax, "expected (:goal <formula>)",
                                 sec.line, sec.col);
            const Sexpr& g = sec.items[1];
            // goals are restricted to positive ground conjunctions
            if (g.head_is("and")) {
                for (std::size_t j = 1; j < g.items.size(); ++j)
                    prob.goal.push_back(parse_ground_atom(g.items[j], dom, object_types));
            } else {
                prob.goal.push_back(parse_ground_atom(g, dom, object_types));
            }
        }
    }
    detail::sort_unique(prob.init);
    detail::sort_unique(prob.goal);
    return prob;
}

// Index used to resolve plan lines against a ground task.
class GroundActionIndex {
public:
    void add(const std::string& name, const std::vector<std::string>& args, int id) {
        by_name_[name].push_back({args, id});
    }

    int resolve(const std::string& name, const std::vector<std::string>& args,
                int line) const {
        auto it = by_name_.find(name);
        if (it == by_name_.end())
            throw ParseError(ParseErrorKind::UnknownAction, "unknown action '" + name + "'",
                             line, 1);
        bool arity_seen = false;
        for (const auto& [cand_args, id] : it->second) {
            if (cand_args.size() == args.size()) {
                arity_seen = true;
                if (cand_args == args) return id;
            }
        }
        if (!arity_seen)
            throw ParseError(ParseErrorKind::ArityMismatch,
                             "action '" + name + "' called with " +
                                 std::to_string(args.size()) + " arguments",
                             line, 1);
        throw ParseError(ParseErrorKind::UnknownAction,
                         "no ground action '(" + name + " ...)' with these arguments", line, 1);
    }

private:
    std::map<std::string, std::vector<std::pair<std::vector<std::string>, int>>> by_name_;
};

// Reads an IPC-format plan: one `(name obj1 ... objn)` per line, `;` comments.
inline std::vector<int> parse_plan(std::string_view text, const GroundActionIndex& index) {
    std::vector<int> plan;
    std::size_t pos = 0;
    int line_no = 1;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        if (auto c = line.find(';'); c != std::string_view::npos) line = line.substr(0, c);
        bool blank = true;
        for (char ch : line)
            if (!std::isspace(static_cast<unsigned char>(ch))) { blank = false; break; }
        if (!blank) {
            Sexpr s = read_single_sexpr(line);
            if (!s.is_list || s.items.empty() || !s.items[0].is_atom())
                throw ParseError(ParseErrorKind::Syntax, "expected (name args...)", line_no, 1);
            std::vector<std::string> args;
            for (std::size_t i = 1; i < s.items.size(); ++i) {
                if (!s.items[i].is_atom())
                    throw ParseError(ParseErrorKind::Syntax, "expected object name", line_no, 1);
                args.push_back(s.items[i].atom);
            }
            plan.push_back(index.resolve(s.items[0].atom, args, line_no));
        }
        pos = eol + 1;
        ++line_no;
    }
    return plan;
}

}  // namespace udam
