#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <limits>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include "udam/ground_task.hpp"

namespace udam {

struct PlannerConfig {
    enum class Engine { InternalGbfs, InternalBfs, External };
    Engine engine = Engine::InternalGbfs;
    double time_limit_s = 300.0;
    std::size_t mem_limit_bytes = std::size_t{4} * 1024 * 1024 * 1024;
    // external engine: command template with {domain} {problem} {plan-out}
    std::string external_cmd;
    std::vector<int> unsolvable_exit_codes = {10};
};

inline PlannerConfig::Engine parse_engine(const std::string& name) {
    if (name == "internal" || name == "internal-gbfs") return PlannerConfig::Engine::InternalGbfs;
    if (name == "internal-bfs") return PlannerConfig::Engine::InternalBfs;
    if (name == "external") return PlannerConfig::Engine::External;
    throw std::runtime_error("unknown engine '" + name + "'");
}

struct SolveStats {
    long long expanded = 0;
    long long generated = 0;
    double wall_s = 0.0;
};

struct SolveResult {
    enum class Status { Solved, Unsolvable, TimeLimit, MemoryLimit, Failure };
    Status status = Status::Failure;
    Plan plan;
    SolveStats stats;
    std::string message;

    bool solved() const { return status == Status::Solved; }
    bool resource_exhausted() const {
        return status == Status::TimeLimit || status == Status::MemoryLimit;
    }
};

inline const char* to_string(SolveResult::Status s) {
    switch (s) {
        case SolveResult::Status::Solved: return "solved";
        case SolveResult::Status::Unsolvable: return "unsolvable";
        case SolveResult::Status::TimeLimit: return "time-limit";
        case SolveResult::Status::MemoryLimit: return "memory-limit";
        case SolveResult::Status::Failure: return "failure";
    }
    return "?";
}

namespace detail {

constexpr int kInfCost = std::numeric_limits<int>::max() / 4;

// Additive delete-relaxation heuristic over clause preconditions and
// conditional effects. Clause cost is the cheapest disjunct; negative
// literals cost nothing in the relaxation; an effect's condition literals
// are charged on top of the action cost.
class AdditiveHeuristic {
public:
    explicit AdditiveHeuristic(const GroundTask& task) : task_(&task) {}

    int operator()(const State& s) {
        cost_.assign(task_->num_fluents, kInfCost);
        for (int f = 0; f < task_->num_fluents; ++f)
            if (s.test(f)) cost_[f] = 0;

        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& action : task_->actions) {
                int base = 0;
                for (const auto& clause : action.pre) {
                    int best = kInfCost;
                    for (const auto& l : clause.literals) {
                        int c = l.positive ? cost_[l.fluent] : 0;
                        if (c < best) best = c;
                    }
                    if (best >= kInfCost) { base = kInfCost; break; }
                    base += best;
                }
                if (base >= kInfCost) continue;
                for (const auto& ce : action.effects) {
                    int trigger = base;
                    for (const auto& c : ce.condition) {
                        int cc = c.positive ? cost_[c.fluent] : 0;
                        if (cc >= kInfCost) { trigger = kInfCost; break; }
                        trigger += cc;
                    }
                    if (trigger >= kInfCost) continue;
                    for (const auto& e : ce.effects) {
                        if (!e.positive) continue;
                        int val = trigger + 1;
                        if (val < cost_[e.fluent]) {
                            cost_[e.fluent] = val;
                            changed = true;
                        }
                    }
                }
            }
        }

        long long h = 0;
        for (int g : task_->goal) {
            if (cost_[g] >= kInfCost) return kInfCost;
            h += cost_[g];
        }
        return static_cast<int>(std::min<long long>(h, kInfCost - 1));
    }

private:
    const GroundTask* task_;
    std::vector<int> cost_;
};

class Budget {
public:
    Budget(double time_limit_s, std::size_t mem_limit_bytes)
        : start_(std::chrono::steady_clock::now()),
          time_limit_s_(time_limit_s),
          mem_limit_(mem_limit_bytes) {}

    double elapsed_s() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }
    bool time_exceeded() const { return elapsed_s() > time_limit_s_; }
    bool mem_exceeded(std::size_t bytes) const { return bytes > mem_limit_; }

private:
    std::chrono::steady_clock::time_point start_;
    double time_limit_s_;
    std::size_t mem_limit_;
};

struct SearchNode {
    int parent = -1;
    int action = -1;
};

}  // namespace detail

// Breadth-first search; returns a shortest plan. Meant for small tasks and
// as the optimality reference for the greedy engine.
inline SolveResult solve_bfs(const GroundTask& task, const PlannerConfig& cfg) {
    detail::Budget budget(cfg.time_limit_s, cfg.mem_limit_bytes);
    SolveResult res;

    std::unordered_map<State, int, StateHash> ids;
    std::vector<State> states;
    std::vector<detail::SearchNode> nodes;
    std::deque<int> queue;

    auto finish = [&](SolveResult::Status st) {
        res.status = st;
        res.stats.wall_s = budget.elapsed_s();
        res.stats.generated = static_cast<long long>(states.size());
        return res;
    };

    states.push_back(task.init);
    ids.emplace(task.init, 0);
    nodes.push_back({});
    queue.push_back(0);
    if (task.goal_satisfied(task.init)) return finish(SolveResult::Status::Solved);

    std::size_t state_bytes = task.init.memory_bytes() + 64;
    while (!queue.empty()) {
        if ((res.stats.expanded & 0xff) == 0) {
            if (budget.time_exceeded()) return finish(SolveResult::Status::TimeLimit);
            if (budget.mem_exceeded(states.size() * state_bytes))
                return finish(SolveResult::Status::MemoryLimit);
        }
        int cur = queue.front();
        queue.pop_front();
        ++res.stats.expanded;
        State s = states[cur];
        for (int a = 0; a < static_cast<int>(task.actions.size()); ++a) {
            if (!task.applicable(s, a)) continue;
            State next = task.apply(s, a);
            if (ids.count(next)) continue;
            int id = static_cast<int>(states.size());
            ids.emplace(next, id);
            states.push_back(next);
            nodes.push_back({cur, a});
            if (task.goal_satisfied(next)) {
                Plan plan;
                for (int n = id; nodes[n].parent >= 0; n = nodes[n].parent)
                    plan.push_back(nodes[n].action);
                std::reverse(plan.begin(), plan.end());
                res.plan = std::move(plan);
                return finish(SolveResult::Status::Solved);
            }
            queue.push_back(id);
        }
    }
    return finish(SolveResult::Status::Unsolvable);
}

// Greedy best-first search with the additive heuristic. Ties prefer states
// not reached by an edit action, which steers compiled tasks toward closing
// the edit prefix early. Successors are generated in action-id order.
inline SolveResult solve_gbfs(const GroundTask& task, const PlannerConfig& cfg) {
    detail::Budget budget(cfg.time_limit_s, cfg.mem_limit_bytes);
    detail::AdditiveHeuristic h(task);
    SolveResult res;

    std::unordered_map<State, int, StateHash> ids;
    std::vector<State> states;
    std::vector<detail::SearchNode> nodes;

    struct Entry {
        int h;
        int bias;
        long long seq;
        int id;
        bool operator>(const Entry& o) const {
            if (h != o.h) return h > o.h;
            if (bias != o.bias) return bias > o.bias;
            return seq > o.seq;
        }
    };
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> open;

    auto finish = [&](SolveResult::Status st) {
        res.status = st;
        res.stats.wall_s = budget.elapsed_s();
        res.stats.generated = static_cast<long long>(states.size());
        return res;
    };

    int h0 = h(task.init);
    states.push_back(task.init);
    ids.emplace(task.init, 0);
    nodes.push_back({});
    if (task.goal_satisfied(task.init)) return finish(SolveResult::Status::Solved);
    long long seq = 0;
    if (h0 < detail::kInfCost) open.push({h0, 0, seq++, 0});

    std::size_t state_bytes = task.init.memory_bytes() + 96;
    std::vector<uint8_t> closed;
    closed.push_back(0);

    while (!open.empty()) {
        if ((res.stats.expanded & 0x3f) == 0) {
            if (budget.time_exceeded()) return finish(SolveResult::Status::TimeLimit);
            if (budget.mem_exceeded(states.size() * state_bytes + open.size() * sizeof(Entry)))
                return finish(SolveResult::Status::MemoryLimit);
        }
        Entry top = open.top();
        open.pop();
        if (closed[top.id]) continue;
        closed[top.id] = 1;
        ++res.stats.expanded;
        State s = states[top.id];

        for (int a = 0; a < static_cast<int>(task.actions.size()); ++a) {
            if (!task.applicable(s, a)) continue;
            State next = task.apply(s, a);
            if (ids.count(next)) continue;
            int id = static_cast<int>(states.size());
            ids.emplace(next, id);
            states.push_back(next);
            nodes.push_back({top.id, a});
            closed.push_back(0);
            if (task.goal_satisfied(next)) {
                Plan plan;
                for (int n = id; nodes[n].parent >= 0; n = nodes[n].parent)
                    plan.push_back(nodes[n].action);
                std::reverse(plan.begin(), plan.end());
                res.plan = std::move(plan);
                return finish(SolveResult::Status::Solved);
            }
            int hv = h(next);
            if (hv >= detail::kInfCost) continue;  // relaxed-unreachable, safe to prune
            int bias = task.action_is_edit.empty() ? 0 : task.action_is_edit[a];
            open.push({hv, bias, seq++, id});
        }
    }
    return finish(SolveResult::Status::Unsolvable);
}

inline SolveResult solve(const GroundTask& task, const PlannerConfig& cfg) {
    switch (cfg.engine) {
        case PlannerConfig::Engine::InternalBfs: return solve_bfs(task, cfg);
        case PlannerConfig::Engine::InternalGbfs: return solve_gbfs(task, cfg);
        case PlannerConfig::Engine::External: {
            SolveResult res;
            res.status = SolveResult::Status::Failure;
            res.message = "external engine requires solve_external with task files";
            return res;
        }
    }
    return {};
}

}  // namespace udam
