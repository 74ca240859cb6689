#pragma once

#include <sys/wait.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "udam/pddl_parser.hpp"
#include "udam/planner.hpp"

namespace udam {

namespace detail {

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline std::filesystem::path fresh_scratch_dir() {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    auto base = std::filesystem::temp_directory_path();
    for (int attempt = 0; attempt < 64; ++attempt) {
        auto dir = base / ("udam-" + std::to_string(rd() % 1000000) + "-" +
                           std::to_string(counter.fetch_add(1)));
        std::error_code ec;
        if (std::filesystem::create_directories(dir, ec)) return dir;
    }
    throw std::runtime_error("cannot create scratch directory");
}

inline std::string replace_all(std::string s, const std::string& from, const std::string& to) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
    return s;
}

}  // namespace detail

struct ExternalRun {
    SolveResult::Status status = SolveResult::Status::Failure;
    std::string plan_text;
    std::string message;
    int exit_code = -1;
};

// Runs the configured external planner on already-emitted task files. The
// command template must contain {domain}, {problem} and {plan-out}
// placeholders. The process runs under the configured time and address-space
// limits; a missing or malformed plan is reported as a failure, never trusted.
inline ExternalRun run_external_planner(const std::string& domain_path,
                                        const std::string& problem_path,
                                        const PlannerConfig& cfg) {
    ExternalRun run;
    if (cfg.external_cmd.find("{domain}") == std::string::npos ||
        cfg.external_cmd.find("{problem}") == std::string::npos ||
        cfg.external_cmd.find("{plan-out}") == std::string::npos) {
        run.message = "external command template must contain {domain} {problem} {plan-out}";
        return run;
    }

    auto scratch = detail::fresh_scratch_dir();
    auto plan_path = scratch / "plan.txt";
    auto err_path = scratch / "stderr.txt";

    std::string cmd = cfg.external_cmd;
    cmd = detail::replace_all(cmd, "{domain}", domain_path);
    cmd = detail::replace_all(cmd, "{problem}", problem_path);
    cmd = detail::replace_all(cmd, "{plan-out}", plan_path.string());

    long timeout_s = static_cast<long>(cfg.time_limit_s) + 1;
    long mem_kb = static_cast<long>(cfg.mem_limit_bytes / 1024);
    std::ostringstream full;
    full << "ulimit -v " << mem_kb << " 2>/dev/null; "
         << "timeout " << timeout_s << "s " << cmd << " 2>" << err_path.string();

    std::string shell_cmd = "/bin/sh -c '" + detail::replace_all(full.str(), "'", "'\\''") + "'";
    int rc = std::system(shell_cmd.c_str());
    int code = -1;
    if (rc != -1 && WIFEXITED(rc)) code = WEXITSTATUS(rc);
    run.exit_code = code;

    if (code == 124) {  // coreutils timeout
        run.status = SolveResult::Status::TimeLimit;
        run.message = "external planner timed out";
        return run;
    }
    for (int unsolvable_code : cfg.unsolvable_exit_codes) {
        if (code == unsolvable_code) {
            run.status = SolveResult::Status::Unsolvable;
            return run;
        }
    }
    if (code != 0) {
        std::string err = detail::slurp(err_path);
        if (err.size() > 500) err.resize(500);
        run.message = "external planner exited with status " + std::to_string(code) +
                      (err.empty() ? "" : (": " + err));
        return run;
    }
    if (!std::filesystem::exists(plan_path)) {
        run.message = "external planner produced no plan file";
        return run;
    }
    run.plan_text = detail::slurp(plan_path);
    run.status = SolveResult::Status::Solved;
    return run;
}

// Full external solve against a ground task whose PDDL emission lives in the
// given files: runs the planner, decodes the plan against the task's action
// index and re-validates it before reporting success.
inline SolveResult solve_external(const GroundTask& task, const GroundActionIndex& index,
                                  const std::string& domain_path,
                                  const std::string& problem_path, const PlannerConfig& cfg) {
    SolveResult res;
    ExternalRun run = run_external_planner(domain_path, problem_path, cfg);
    if (run.status != SolveResult::Status::Solved) {
        res.status = run.status;
        res.message = run.message;
        return res;
    }
    Plan plan;
    try {
        plan = parse_plan(run.plan_text, index);
    } catch (const ParseError& e) {
        res.status = SolveResult::Status::Failure;
        res.message = std::string("cannot decode external plan: ") + e.what();
        return res;
    }
    auto check = validate_plan(task, plan);
    if (!check.ok) {
        res.status = SolveResult::Status::Failure;
        res.message = "external plan failed validation: " + check.violation.what;
        return res;
    }
    res.status = SolveResult::Status::Solved;
    res.plan = std::move(plan);
    return res;
}

}  // namespace udam
