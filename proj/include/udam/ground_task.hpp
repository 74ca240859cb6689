#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "udam/util.hpp"

namespace udam {

// Fixed-width bitset over fluent ids.
class State {
public:
    State() = default;
    explicit State(int nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

    int size() const { return nbits_; }
    bool test(int i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
    void set(int i) { words_[i >> 6] |= (uint64_t{1} << (i & 63)); }
    void reset(int i) { words_[i >> 6] &= ~(uint64_t{1} << (i & 63)); }

    bool contains_all(const std::vector<int>& fluents) const {
        for (int f : fluents)
            if (!test(f)) return false;
        return true;
    }

    int popcount() const {
        int n = 0;
        for (uint64_t w : words_) n += static_cast<int>(__builtin_popcountll(w));
        return n;
    }

    std::vector<int> to_fluents() const {
        std::vector<int> out;
        for (int i = 0; i < nbits_; ++i)
            if (test(i)) out.push_back(i);
        return out;
    }

    friend bool operator==(const State&, const State&) = default;

    std::size_t hash() const {
        std::size_t h = 0xcbf29ce484222325ull;
        for (uint64_t w : words_) {
            h ^= w;
            h *= 0x100000001b3ull;
        }
        return h;
    }

    std::size_t memory_bytes() const { return words_.size() * sizeof(uint64_t); }

private:
    int nbits_ = 0;
    std::vector<uint64_t> words_;
};

struct StateHash {
    std::size_t operator()(const State& s) const { return s.hash(); }
};

struct Literal {
    int fluent = -1;
    bool positive = true;
    friend bool operator==(const Literal&, const Literal&) = default;
    friend auto operator<=>(const Literal&, const Literal&) = default;
};

// Disjunction; a precondition is a conjunction of clauses.
struct GroundClause {
    std::vector<Literal> literals;
    friend bool operator==(const GroundClause&, const GroundClause&) = default;
};

struct GroundCondEffect {
    std::vector<Literal> condition;  // conjunction; empty = unconditional
    std::vector<Literal> effects;
    friend bool operator==(const GroundCondEffect&, const GroundCondEffect&) = default;
};

struct GroundAction {
    std::vector<GroundClause> pre;
    std::vector<GroundCondEffect> effects;
    friend bool operator==(const GroundAction&, const GroundAction&) = default;
};

struct GroundActionSig {
    std::string name;
    std::vector<std::string> args;
    std::string str() const {
        std::string s = "(" + name;
        for (const auto& a : args) s += " " + a;
        return s + ")";
    }
    friend bool operator==(const GroundActionSig&, const GroundActionSig&) = default;
};

using Plan = std::vector<int>;

struct GroundTask {
    int num_fluents = 0;
    std::vector<GroundAction> actions;
    std::vector<GroundActionSig> action_sigs;
    std::vector<std::string> fluent_names;
    State init;
    std::vector<int> goal;
    // search bias tags; 1 marks model-edit actions on compiled tasks
    std::vector<uint8_t> action_is_edit;

    bool literal_holds(const State& s, const Literal& l) const {
        return s.test(l.fluent) == l.positive;
    }

    bool clause_holds(const State& s, const GroundClause& c) const {
        for (const auto& l : c.literals)
            if (literal_holds(s, l)) return true;
        return false;
    }

    bool applicable(const State& s, int action) const {
        for (const auto& c : actions[action].pre)
            if (!clause_holds(s, c)) return false;
        return true;
    }

    // Transition function: triggered deletes are applied before triggered
    // adds, so an effect that is both added and deleted ends up true.
    State apply(const State& s, int action) const {
        std::vector<int> adds, dels;
        for (const auto& ce : actions[action].effects) {
            bool fire = true;
            for (const auto& c : ce.condition)
                if (!literal_holds(s, c)) { fire = false; break; }
            if (!fire) continue;
            for (const auto& e : ce.effects)
                (e.positive ? adds : dels).push_back(e.fluent);
        }
        State next = s;
        for (int f : dels) next.reset(f);
        for (int f : adds) next.set(f);
        return next;
    }

    bool goal_satisfied(const State& s) const { return s.contains_all(goal); }

    std::string plan_text(const Plan& plan) const {
        std::string out;
        for (int a : plan) out += action_sigs[a].str() + "\n";
        return out;
    }
};

struct Violation {
    int step = -1;            // 0-based index into the plan; -1 = goal failure
    std::string what;
};

struct ValidationOutcome {
    bool ok = false;
    std::vector<State> states;  // s_0..s_n when ok (and the prefix when not)
    Violation violation;
};

// Replays a plan from the initial state, checking every clause precondition
// and the goal. Returns the full state sequence on success.
inline ValidationOutcome validate_plan(const GroundTask& task, const Plan& plan) {
    ValidationOutcome out;
    out.states.push_back(task.init);
    for (std::size_t i = 0; i < plan.size(); ++i) {
        int a = plan[i];
        if (a < 0 || a >= static_cast<int>(task.actions.size())) {
            out.violation = {static_cast<int>(i), "action id out of range"};
            return out;
        }
        const State& s = out.states.back();
        for (std::size_t ci = 0; ci < task.actions[a].pre.size(); ++ci) {
            if (!task.clause_holds(s, task.actions[a].pre[ci])) {
                out.violation = {static_cast<int>(i),
                                 "precondition clause " + std::to_string(ci) + " of " +
                                     task.action_sigs[a].str() + " not satisfied"};
                return out;
            }
        }
        out.states.push_back(task.apply(s, a));
    }
    if (!task.goal_satisfied(out.states.back())) {
        out.violation = {-1, "goal not satisfied in final state"};
        return out;
    }
    out.ok = true;
    return out;
}

}  // namespace udam
