#pragma once

#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include <json.hpp>

#include "udam/compile.hpp"
#include "udam/external.hpp"
#include "udam/grounder.hpp"
#include "udam/induction.hpp"
#include "udam/planner.hpp"

namespace udam {

struct ConfigNode {
    int k = 1;
    int r = 0;
    long long operator_count = 0;
    std::shared_ptr<CompiledProblem> compiled;  // filled when the node is evaluated
};

struct NodeRecord {
    int k = 0;
    int r = 0;
    long long operators = 0;
    std::string outcome;  // solved | unsolvable | time-limit | memory-limit | capacity | failure
    int plan_length = -1;
    std::optional<Rational> cost;
    double wall_s = 0.0;
    int pop_index = -1;
};

struct SearchLedger {
    std::vector<NodeRecord> log;
    std::set<std::pair<int, int>> closed;

    struct Best {
        Rational cost;
        int k = 0;
        int r = 0;
        Plan plan;
        std::shared_ptr<CompiledProblem> compiled;
    };
    std::optional<Best> best;
    std::vector<Rational> accepted_costs;  // strictly decreasing by construction
    bool budget_exhausted = false;
};

struct UdamOptions {
    PlannerConfig planner;
    CompileOptions compile_opts;
    int max_k = -1;  // <= 0 means the theoretical bound 2|P|
    int max_r = -1;  // <= 0 means the theoretical bound |objects|
    enum class Strategy { Exhaust, FirstSat } strategy = Strategy::Exhaust;
    double global_budget_s = 1e18;
    int jobs = 1;
    std::vector<ActionSchema> seeds;
};

struct UdamResult {
    bool learned = false;
    InductionResult models;
    Rational cost;
    SearchLedger ledger;
    double wall_s = 0.0;
    double first_solution_s = -1.0;
    double best_solution_s = -1.0;
};

namespace detail {

inline LearningTask make_task(const Vocabulary& vocab, const std::vector<Trace>& traces,
                              int k, int r, const std::vector<ActionSchema>& seeds) {
    LearningTask task;
    task.vocab = vocab;
    task.traces = traces;
    task.k = k;
    task.r = r;
    task.seeds = seeds;
    return task;
}

inline long long ipow(long long base, int exp) {
    long long out = 1;
    for (int i = 0; i < exp; ++i) out *= base;
    return out;
}

// Exact grounded operator count of a configuration, without compiling it.
inline long long operator_count_for(const Vocabulary& vocab, int m, int k, int r,
                                    const std::vector<ActionSchema>& seeds,
                                    const CompileOptions& opts) {
    int usable = opts.usable_arity < 0 ? r : std::min(opts.usable_arity, r);

    long long aed = 0;
    for (const auto& p : vocab.predicates) aed += 3 * ipow(usable, p.arity());
    aed *= k;
    // seeded preconditions have no removal action
    for (const auto& seed : seeds)
        for (const auto& atom : seed.pre) {
            bool within = true;
            for (int v : atom.vars)
                if (v >= usable) within = false;
            if (within) --aed;
        }

    long long aapp = 0;
    GroundAtomTable table(vocab);
    for (int slot = 0; slot < k; ++slot) {
        std::vector<std::string> types(r, kRootType);
        const ActionSchema* seed =
            slot < static_cast<int>(seeds.size()) ? &seeds[slot] : nullptr;
        if (seed)
            for (int i = 0; i < seed->arity(); ++i) types[i] = seed->params[i].type;
        std::vector<std::vector<int>> cands(r);
        for (int i = 0; i < r; ++i) cands[i] = vocab.object_candidates(types[i]);
        if (!seed || seed->pre.empty()) {
            aapp += static_cast<long long>(m) * count_tuples(cands);
            continue;
        }
        // seeded preconditions can make some bindings statically impossible
        long long feasible = 0;
        auto count_fn = [&](const std::vector<int>& omega) {
            for (const auto& atom : seed->pre)
                if (table.atom_id(atom.pred, substitute(atom.vars, omega)) < 0) return;
            ++feasible;
        };
        if (r == 0) {
            count_fn({});
        } else {
            for_each_tuple(cands, count_fn);
        }
        aapp += static_cast<long long>(m) * feasible;
    }
    return aed + 1 + aapp;
}

struct OpenQueue {
    // ordered by (operator count, k, r)
    std::set<std::tuple<long long, int, int>> entries;

    bool contains(int k, int r) const {
        for (const auto& [ops, kk, rr] : entries)
            if (kk == k && rr == r) return true;
        return false;
    }
    void push(long long ops, int k, int r) { entries.insert({ops, k, r}); }
    std::tuple<long long, int, int> pop() {
        auto it = entries.begin();
        auto out = *it;
        entries.erase(it);
        return out;
    }
    bool empty() const { return entries.empty(); }
};

}  // namespace detail

// Appends the children (k+1, r) and (k, r+1) of a just-closed node to the
// open list, skipping configurations outside the bounds or already seen.
inline void expand_node(int k, int r, int max_k, int max_r, const Vocabulary& vocab, int m,
                        const std::vector<ActionSchema>& seeds, const CompileOptions& copts,
                        detail::OpenQueue& open, const std::set<std::pair<int, int>>& closed) {
    auto consider = [&](int ck, int cr) {
        if (ck > max_k || cr > max_r) return;
        if (closed.count({ck, cr}) || open.contains(ck, cr)) return;
        open.push(detail::operator_count_for(vocab, m, ck, cr, seeds, copts), ck, cr);
    };
    consider(k + 1, r);
    consider(k, r + 1);
}

namespace detail {

struct NodeEvaluation {
    NodeRecord record;
    std::shared_ptr<CompiledProblem> compiled;
    Plan plan;
    bool solved = false;
    std::optional<Rational> cost;
};

inline NodeEvaluation evaluate_node(const Vocabulary& vocab, const std::vector<Trace>& traces,
                                    int k, int r, long long ops, const UdamOptions& opts) {
    NodeEvaluation eval;
    eval.record.k = k;
    eval.record.r = r;
    eval.record.operators = ops;
    auto t0 = std::chrono::steady_clock::now();
    auto record_wall = [&] {
        eval.record.wall_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    std::shared_ptr<CompiledProblem> cp;
    try {
        cp = std::make_shared<CompiledProblem>(
            compile(make_task(vocab, traces, k, r, opts.seeds), opts.compile_opts));
    } catch (const CompileError&) {
        eval.record.outcome = "capacity";
        record_wall();
        return eval;
    }
    eval.compiled = cp;

    SolveResult res;
    if (opts.planner.engine == PlannerConfig::Engine::External) {
        auto scratch = fresh_scratch_dir();
        EmittedTask emitted = emit_pddl(*cp);
        auto dom_path = scratch / "domain.pddl";
        auto prob_path = scratch / "problem.pddl";
        spit(dom_path, emitted.domain_text);
        spit(prob_path, emitted.problem_text);
        res = solve_external(cp->task, make_action_index(cp->task), dom_path.string(),
                             prob_path.string(), opts.planner);
    } else {
        res = solve(cp->task, opts.planner);
    }

    record_wall();
    eval.record.outcome = to_string(res.status);
    if (res.solved()) {
        eval.solved = true;
        eval.plan = res.plan;
        eval.record.plan_length = static_cast<int>(res.plan.size());
        eval.cost = cost_from_plan(*cp, res.plan);
        eval.record.cost = eval.cost;
    }
    return eval;
}

}  // namespace detail

// Bounded lattice search over (action count, max arity): repeatedly evaluate
// the open configuration with the fewest grounded operators, keep the
// cheapest satisfiable model, expand neighbours, stop when the lattice (or
// the budget) is exhausted.
inline UdamResult udam_search(const Vocabulary& vocab, const std::vector<Trace>& traces,
                              const UdamOptions& opts) {
    auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    UdamResult result;
    SearchLedger& ledger = result.ledger;

    const int bound_k = 2 * static_cast<int>(vocab.predicates.size());
    const int bound_r = static_cast<int>(vocab.objects.size());
    const int max_k = opts.max_k > 0 ? std::min(opts.max_k, bound_k) : bound_k;
    const int max_r = opts.max_r >= 0 ? std::min(opts.max_r, bound_r) : bound_r;
    const int m = static_cast<int>(traces.size());

    detail::OpenQueue open;
    open.push(detail::operator_count_for(vocab, m, 1, 0, opts.seeds, opts.compile_opts), 1, 0);

    std::mutex mu;
    std::condition_variable cv;
    int in_flight = 0;
    int pop_counter = 0;
    bool stop = false;

    auto merge = [&](detail::NodeEvaluation&& eval) {
        // caller holds the lock
        ledger.log.push_back(eval.record);
        if (eval.solved) {
            if (result.first_solution_s < 0) result.first_solution_s = elapsed();
            bool strictly_better = !ledger.best || *eval.cost < ledger.best->cost;
            bool lex_better = ledger.best && *eval.cost == ledger.best->cost &&
                              std::make_pair(eval.record.k, eval.record.r) <
                                  std::make_pair(ledger.best->k, ledger.best->r);
            if (strictly_better || lex_better) {
                ledger.best = SearchLedger::Best{*eval.cost, eval.record.k, eval.record.r,
                                                 eval.plan, eval.compiled};
                result.best_solution_s = elapsed();
                if (strictly_better) ledger.accepted_costs.push_back(*eval.cost);
            }
            if (opts.strategy == UdamOptions::Strategy::FirstSat) stop = true;
        }
    };

    auto worker = [&] {
        std::unique_lock lock(mu);
        while (true) {
            cv.wait(lock, [&] { return stop || !open.empty() || in_flight == 0; });
            if (stop || (open.empty() && in_flight == 0)) return;
            if (open.empty()) continue;
            if (elapsed() > opts.global_budget_s) {
                ledger.budget_exhausted = true;
                stop = true;
                cv.notify_all();
                return;
            }
            auto [ops, k, r] = open.pop();
            int pop_index = pop_counter++;
            ledger.closed.insert({k, r});
            ++in_flight;
            lock.unlock();

            detail::NodeEvaluation eval =
                detail::evaluate_node(vocab, traces, k, r, ops, opts);
            eval.record.pop_index = pop_index;

            lock.lock();
            merge(std::move(eval));
            expand_node(k, r, max_k, max_r, vocab, m, opts.seeds, opts.compile_opts, open,
                        ledger.closed);
            --in_flight;
            cv.notify_all();
        }
    };

    if (opts.jobs <= 1) {
        // inline loop, same structure without threads
        while (!open.empty() && !stop) {
            if (elapsed() > opts.global_budget_s) {
                ledger.budget_exhausted = true;
                break;
            }
            auto [ops, k, r] = open.pop();
            ledger.closed.insert({k, r});
            detail::NodeEvaluation eval =
                detail::evaluate_node(vocab, traces, k, r, ops, opts);
            eval.record.pop_index = pop_counter++;
            std::unique_lock lock(mu);
            merge(std::move(eval));
            expand_node(k, r, max_k, max_r, vocab, m, opts.seeds, opts.compile_opts, open,
                        ledger.closed);
        }
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < opts.jobs; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::sort(ledger.log.begin(), ledger.log.end(),
              [](const NodeRecord& a, const NodeRecord& b) {
                  if (a.pop_index != b.pop_index) return a.pop_index < b.pop_index;
                  return std::make_pair(a.k, a.r) < std::make_pair(b.k, b.r);
              });

    result.wall_s = elapsed();
    if (ledger.best) {
        result.learned = true;
        result.cost = ledger.best->cost;
        result.models = induce_models(*ledger.best->compiled, ledger.best->plan);
    }
    return result;
}

inline nlohmann::json rational_json(const Rational& r) {
    return {{"num", r.num}, {"den", r.den}, {"value", r.value()}};
}

inline nlohmann::json ledger_json(const SearchLedger& ledger) {
    nlohmann::json j;
    auto& nodes = j["nodes"] = nlohmann::json::array();
    for (const auto& rec : ledger.log) {
        nlohmann::json e{{"k", rec.k},
                         {"r", rec.r},
                         {"operators", rec.operators},
                         {"outcome", rec.outcome},
                         {"wall_s", rec.wall_s},
                         {"pop_index", rec.pop_index}};
        if (rec.plan_length >= 0) e["plan_length"] = rec.plan_length;
        if (rec.cost) e["cost"] = rational_json(*rec.cost);
        nodes.push_back(std::move(e));
    }
    j["budget_exhausted"] = ledger.budget_exhausted;
    auto& accepted = j["accepted_costs"] = nlohmann::json::array();
    for (const auto& c : ledger.accepted_costs) accepted.push_back(rational_json(c));
    if (ledger.best) {
        j["best"] = {{"k", ledger.best->k},
                     {"r", ledger.best->r},
                     {"cost", rational_json(ledger.best->cost)},
                     {"plan_length", ledger.best->plan.size()}};
    }
    return j;
}

}  // namespace udam
