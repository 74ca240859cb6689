#pragma once

#include <sstream>
#include <string>

#include "udam/pddl_ast.hpp"

namespace udam {
namespace detail {

// Typed lists print with explicit `- type` runs so that re-parsing cannot
// reassign names to a later type. Fully root-typed lists stay bare.
inline void print_typed_names(std::ostream& os, const std::vector<TypedName>& names,
                              bool variables) {
    bool all_root = true;
    for (const auto& n : names)
        if (n.type != kRootType) { all_root = false; break; }
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i > 0) os << " ";
        if (variables) os << "?";
        os << names[i].name;
        if (!all_root) {
            bool run_end = (i + 1 == names.size()) || (names[i + 1].type != names[i].type);
            if (run_end) os << " - " << names[i].type;
        }
    }
}

inline void print_literal(std::ostream& os, const FormulaLiteral& lit) {
    if (!lit.positive) os << "(not ";
    if (lit.kind == FormulaLiteral::Kind::Equality) {
        os << "(= ";
        for (std::size_t i = 0; i < lit.args.size(); ++i) {
            if (i > 0) os << " ";
            os << (lit.args[i].is_variable ? "?" : "") << lit.args[i].name;
        }
        os << ")";
    } else {
        os << "(" << lit.pred;
        for (const auto& t : lit.args) os << " " << (t.is_variable ? "?" : "") << t.name;
        os << ")";
    }
    if (!lit.positive) os << ")";
}

inline void print_formula(std::ostream& os, const Formula& f) {
    os << "(and";
    for (const auto& clause : f.clauses) {
        os << " ";
        if (clause.literals.size() == 1) {
            print_literal(os, clause.literals[0]);
        } else {
            os << "(or";
            for (const auto& lit : clause.literals) {
                os << " ";
                print_literal(os, lit);
            }
            os << ")";
        }
    }
    os << ")";
}

inline void print_literal_conjunction(std::ostream& os, const std::vector<FormulaLiteral>& lits) {
    if (lits.size() == 1) {
        print_literal(os, lits[0]);
        return;
    }
    os << "(and";
    for (const auto& lit : lits) {
        os << " ";
        print_literal(os, lit);
    }
    os << ")";
}

inline void print_effect(std::ostream& os, const EffectFormula& eff) {
    os << "(and";
    for (const auto& lit : eff.direct) {
        os << " ";
        print_literal(os, lit);
    }
    for (const auto& ce : eff.conditional) {
        os << "\n      (when ";
        print_literal_conjunction(os, ce.condition);
        os << " ";
        print_literal_conjunction(os, ce.effects);
        os << ")";
    }
    os << ")";
}

inline void print_ground_atom(std::ostream& os, const GroundAtom& atom) {
    os << "(" << atom.pred;
    for (const auto& a : atom.args) os << " " << a;
    os << ")";
}

}  // namespace detail

inline std::string print_domain(const DomainAst& dom) {
    std::ostringstream os;
    os << "(define (domain " << dom.name << ")\n";
    if (!dom.requirements.empty()) {
        os << "  (:requirements";
        for (const auto& r : dom.requirements) os << " " << r;
        os << ")\n";
    }
    if (!dom.types.empty()) {
        os << "  (:types";
        for (const auto& t : dom.types) os << " " << t.name << " - " << t.parent;
        os << ")\n";
    }
    if (!dom.constants.empty()) {
        os << "  (:constants ";
        detail::print_typed_names(os, dom.constants, false);
        os << ")\n";
    }
    os << "  (:predicates";
    for (const auto& p : dom.predicates) {
        os << "\n    (" << p.name;
        if (!p.params.empty()) {
            os << " ";
            detail::print_typed_names(os, p.params, true);
        }
        os << ")";
    }
    os << ")\n";
    for (const auto& act : dom.actions) {
        os << "  (:action " << act.name << "\n";
        os << "    :parameters (";
        detail::print_typed_names(os, act.params, true);
        os << ")\n";
        os << "    :precondition ";
        detail::print_formula(os, act.precondition);
        os << "\n    :effect ";
        detail::print_effect(os, act.effect);
        os << ")\n";
    }
    os << ")\n";
    return os.str();
}

inline std::string print_problem(const ProblemAst& prob) {
    std::ostringstream os;
    os << "(define (problem " << prob.name << ")\n";
    os << "  (:domain " << prob.domain_name << ")\n";
    if (!prob.objects.empty()) {
        os << "  (:objects ";
        detail::print_typed_names(os, prob.objects, false);
        os << ")\n";
    }
    os << "  (:init";
    for (const auto& atom : prob.init) {
        os << "\n    ";
        detail::print_ground_atom(os, atom);
    }
    os << ")\n";
    os << "  (:goal (and";
    for (const auto& atom : prob.goal) {
        os << "\n    ";
        detail::print_ground_atom(os, atom);
    }
    os << "))\n";
    os << ")\n";
    return os.str();
}

}  // namespace udam
