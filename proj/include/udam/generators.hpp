#pragma once

#include <random>
#include <string>
#include <vector>

#include "udam/pddl_ast.hpp"
#include "udam/pddl_parser.hpp"

namespace udam {

// The three reference domains are embedded so generators work without data
// files; the bundled .pddl copies must stay in sync (checked by tests).

inline const char* visitall_domain_text() {
    return R"((define (domain visitall)
  (:requirements :strips :typing)
  (:types place - object)
  (:predicates
    (agent-at ?x - place)
    (connected ?x - place ?y - place)
    (visited ?x - place))
  (:action move
    :parameters (?x - place ?y - place)
    :precondition (and (agent-at ?x) (connected ?x ?y))
    :effect (and (visited ?y) (not (agent-at ?x)) (agent-at ?y)))
)
)";
}

inline const char* blocksworld_domain_text() {
    return R"((define (domain blocksworld)
  (:requirements :strips :typing)
  (:types block - object)
  (:predicates
    (on ?x - block ?y - block)
    (ontable ?x - block)
    (clear ?x - block)
    (handempty)
    (holding ?x - block))
  (:action pick-up
    :parameters (?x - block)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (not (ontable ?x)) (not (clear ?x)) (not (handempty)) (holding ?x)))
  (:action put-down
    :parameters (?x - block)
    :precondition (and (holding ?x))
    :effect (and (not (holding ?x)) (clear ?x) (handempty) (ontable ?x)))
  (:action stack
    :parameters (?x - block ?y - block)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (not (holding ?x)) (not (clear ?y)) (clear ?x) (handempty) (on ?x ?y)))
  (:action unstack
    :parameters (?x - block ?y - block)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y) (not (clear ?x)) (not (handempty)) (not (on ?x ?y))))
)
)";
}

inline const char* hanoi_domain_text() {
    return R"((define (domain hanoi)
  (:requirements :strips)
  (:predicates
    (clear ?x)
    (on ?x ?y)
    (smaller ?x ?y))
  (:action move
    :parameters (?disc ?from ?to)
    :precondition (and (smaller ?to ?disc) (on ?disc ?from) (clear ?disc) (clear ?to))
    :effect (and (clear ?from) (on ?disc ?to) (not (on ?disc ?from)) (not (clear ?to))))
)
)";
}

inline DomainAst visitall_domain() { return parse_domain(visitall_domain_text()); }
inline DomainAst blocksworld_domain() { return parse_domain(blocksworld_domain_text()); }
inline DomainAst hanoi_domain() { return parse_domain(hanoi_domain_text()); }

// n x n grid, agent starts on a random cell, every cell must be visited.
// Solvable by construction: the grid is connected.
inline ProblemAst visitall_instance(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    ProblemAst prob;
    prob.name = "visitall-" + std::to_string(n) + "x" + std::to_string(n) + "-s" +
                std::to_string(seed);
    prob.domain_name = "visitall";
    auto cell = [&](int x, int y) {
        return "p" + std::to_string(x + 1) + std::to_string(y + 1);
    };
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) prob.objects.push_back({cell(x, y), "place"});
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            if (x + 1 < n) {
                prob.init.push_back({"connected", {cell(x, y), cell(x + 1, y)}});
                prob.init.push_back({"connected", {cell(x + 1, y), cell(x, y)}});
            }
            if (y + 1 < n) {
                prob.init.push_back({"connected", {cell(x, y), cell(x, y + 1)}});
                prob.init.push_back({"connected", {cell(x, y + 1), cell(x, y)}});
            }
        }
    }
    int start = static_cast<int>(rng() % (n * n));
    std::string start_cell = cell(start / n, start % n);
    prob.init.push_back({"agent-at", {start_cell}});
    prob.init.push_back({"visited", {start_cell}});
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) prob.goal.push_back({"visited", {cell(x, y)}});
    std::sort(prob.init.begin(), prob.init.end());
    prob.init.erase(std::unique(prob.init.begin(), prob.init.end()), prob.init.end());
    std::sort(prob.goal.begin(), prob.goal.end());
    return prob;
}

namespace detail {

// random stack layout: a permutation of blocks cut into stacks
inline std::vector<std::vector<int>> random_stacks(int n, std::mt19937_64& rng) {
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::vector<int>> stacks;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t len = 1 + rng() % (order.size() - i);
        stacks.push_back({order.begin() + i, order.begin() + i + len});
        i += len;
    }
    return stacks;
}

inline void stacks_to_atoms(const std::vector<std::vector<int>>& stacks,
                            std::vector<GroundAtom>& atoms, bool with_clear) {
    auto block = [](int i) { return "b" + std::to_string(i + 1); };
    for (const auto& stack : stacks) {
        atoms.push_back({"ontable", {block(stack[0])}});
        for (std::size_t i = 1; i < stack.size(); ++i)
            atoms.push_back({"on", {block(stack[i]), block(stack[i - 1])}});
        if (with_clear) atoms.push_back({"clear", {block(stack.back())}});
    }
}

}  // namespace detail

// n blocks, random initial and goal towers. Any configuration is reachable
// from any other, so instances are solvable by construction.
inline ProblemAst blocksworld_instance(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    ProblemAst prob;
    prob.name = "blocks-" + std::to_string(n) + "-s" + std::to_string(seed);
    prob.domain_name = "blocksworld";
    for (int i = 0; i < n; ++i) prob.objects.push_back({"b" + std::to_string(i + 1), "block"});

    auto init_stacks = detail::random_stacks(n, rng);
    auto goal_stacks = detail::random_stacks(n, rng);
    detail::stacks_to_atoms(init_stacks, prob.init, true);
    prob.init.push_back({"handempty", {}});
    detail::stacks_to_atoms(goal_stacks, prob.goal, false);

    std::sort(prob.init.begin(), prob.init.end());
    std::sort(prob.goal.begin(), prob.goal.end());
    return prob;
}

// n discs on 3 pegs; discs start scattered legally (seeded) and must all end
// up on the last peg. Any legal configuration can reach the goal tower.
inline ProblemAst hanoi_instance(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    ProblemAst prob;
    prob.name = "hanoi-" + std::to_string(n) + "-s" + std::to_string(seed);
    prob.domain_name = "hanoi";
    auto disc = [](int i) { return "d" + std::to_string(i + 1); };  // d1 smallest
    auto peg = [](int i) { return "peg" + std::to_string(i + 1); };
    for (int i = 0; i < n; ++i) prob.objects.push_back({disc(i), kRootType});
    for (int i = 0; i < 3; ++i) prob.objects.push_back({peg(i), kRootType});

    // every disc fits on every peg; a disc fits on any strictly larger disc
    for (int d = 0; d < n; ++d)
        for (int p = 0; p < 3; ++p) prob.init.push_back({"smaller", {peg(p), disc(d)}});
    for (int small = 0; small < n; ++small)
        for (int large = small + 1; large < n; ++large)
            prob.init.push_back({"smaller", {disc(large), disc(small)}});

    // scatter discs over pegs, largest first, each on top of the previous
    std::vector<std::string> top = {peg(0), peg(1), peg(2)};
    for (int d = n - 1; d >= 0; --d) {
        int p = static_cast<int>(rng() % 3);
        prob.init.push_back({"on", {disc(d), top[p]}});
        top[p] = disc(d);
    }
    for (const auto& t : top) prob.init.push_back({"clear", {t}});

    // goal: the full tower on the last peg
    prob.goal.push_back({"on", {disc(n - 1), peg(2)}});
    for (int d = n - 2; d >= 0; --d) prob.goal.push_back({"on", {disc(d), disc(d + 1)}});

    std::sort(prob.init.begin(), prob.init.end());
    prob.init.erase(std::unique(prob.init.begin(), prob.init.end()), prob.init.end());
    std::sort(prob.goal.begin(), prob.goal.end());
    return prob;
}

struct GeneratorSpec {
    std::string name;  // visitall | blocks | hanoi
    int size = 3;
    unsigned seed = 1;
};

inline DomainAst generator_domain(const std::string& name) {
    if (name == "visitall") return visitall_domain();
    if (name == "blocks" || name == "blocksworld") return blocksworld_domain();
    if (name == "hanoi") return hanoi_domain();
    throw std::runtime_error("unknown generator '" + name + "'");
}

inline ProblemAst generate_instance(const GeneratorSpec& spec) {
    if (spec.name == "visitall") return visitall_instance(spec.size, spec.seed);
    if (spec.name == "blocks" || spec.name == "blocksworld")
        return blocksworld_instance(spec.size, spec.seed);
    if (spec.name == "hanoi") return hanoi_instance(spec.size, spec.seed);
    throw std::runtime_error("unknown generator '" + spec.name + "'");
}

}  // namespace udam
