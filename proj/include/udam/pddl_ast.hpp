#pragma once

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace udam {

inline constexpr const char* kRootType = "object";

struct TypedName {
    std::string name;
    std::string type = kRootType;
    friend bool operator==(const TypedName&, const TypedName&) = default;
};

struct TypeDecl {
    std::string name;
    std::string parent = kRootType;
    friend bool operator==(const TypeDecl&, const TypeDecl&) = default;
};

struct PredicateSignature {
    std::string name;
    std::vector<TypedName> params;
    int arity() const { return static_cast<int>(params.size()); }
    friend bool operator==(const PredicateSignature&, const PredicateSignature&) = default;
};

// A term in a formula: either a variable (leading '?' stripped) or a constant.
struct Term {
    std::string name;
    bool is_variable = false;
    friend bool operator==(const Term&, const Term&) = default;
};

// Signed atom or (in)equality between two terms. Equalities are evaluated at
// grounding time and never stored as fluents.
struct FormulaLiteral {
    enum class Kind { Atom, Equality } kind = Kind::Atom;
    bool positive = true;
    std::string pred;         // Kind::Atom only
    std::vector<Term> args;   // 2 terms for Kind::Equality
    friend bool operator==(const FormulaLiteral&, const FormulaLiteral&) = default;
};

struct FormulaClause {
    std::vector<FormulaLiteral> literals;  // disjunction
    friend bool operator==(const FormulaClause&, const FormulaClause&) = default;
};

// Conjunction of disjunctive clauses (CNF over literals).
struct Formula {
    std::vector<FormulaClause> clauses;
    friend bool operator==(const Formula&, const Formula&) = default;
};

struct CondEffectAst {
    std::vector<FormulaLiteral> condition;  // conjunction of literals
    std::vector<FormulaLiteral> effects;
    friend bool operator==(const CondEffectAst&, const CondEffectAst&) = default;
};

struct EffectFormula {
    std::vector<FormulaLiteral> direct;        // unconditional effect literals
    std::vector<CondEffectAst> conditional;    // when-clauses
    friend bool operator==(const EffectFormula&, const EffectFormula&) = default;
};

struct ActionAst {
    std::string name;
    std::vector<TypedName> params;
    Formula precondition;
    EffectFormula effect;
    friend bool operator==(const ActionAst&, const ActionAst&) = default;
};

struct GroundAtom {
    std::string pred;
    std::vector<std::string> args;
    friend auto operator<=>(const GroundAtom&, const GroundAtom&) = default;
};

struct DomainAst {
    std::string name;
    std::vector<std::string> requirements;
    std::vector<TypeDecl> types;
    std::vector<TypedName> constants;
    std::vector<PredicateSignature> predicates;
    std::vector<ActionAst> actions;
    friend bool operator==(const DomainAst&, const DomainAst&) = default;

    const PredicateSignature* find_predicate(const std::string& name) const {
        for (const auto& p : predicates)
            if (p.name == name) return &p;
        return nullptr;
    }

    // true if sub is equal to or derived from super. The root type is an
    // implicit ancestor of everything.
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
};

struct ProblemAst {
    std::string name;
    std::string domain_name;
    std::vector<TypedName> objects;
    std::vector<GroundAtom> init;  // sorted, deduplicated
    std::vector<GroundAtom> goal;  // positive conjunction, sorted, deduplicated
    friend bool operator==(const ProblemAst&, const ProblemAst&) = default;
};

}  // namespace udam
