#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "udam/compile.hpp"
#include "udam/external.hpp"
#include "udam/generators.hpp"
#include "udam/grounder.hpp"
#include "udam/induction.hpp"
#include "udam/pddl_parser.hpp"
#include "udam/pddl_printer.hpp"
#include "udam/search.hpp"
#include "udam/trace_io.hpp"
#include "udam/validation.hpp"

namespace udam::cli {

namespace fs = std::filesystem;

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    if (auto parent = fs::path(path).parent_path(); !parent.empty())
        fs::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

// Seed partial models come from :action blocks in the predicates file; only
// positive conjunctive preconditions and plain literal effects are allowed.
inline ActionSchema schema_from_ast(const ActionAst& act, const Vocabulary& vocab) {
    ActionSchema schema;
    schema.name = act.name;
    schema.params = act.params;
    auto var_index = [&](const Term& t) {
        if (!t.is_variable)
            throw std::runtime_error("seed action '" + act.name + "' uses constants");
        for (std::size_t i = 0; i < act.params.size(); ++i)
            if (act.params[i].name == t.name) return static_cast<int>(i);
        throw std::runtime_error("seed action '" + act.name + "' has a free variable");
    };
    auto to_atom = [&](const FormulaLiteral& lit) {
        if (lit.kind != FormulaLiteral::Kind::Atom)
            throw std::runtime_error("seed action '" + act.name + "' uses equality");
        LiftedAtom atom;
        atom.pred = vocab.pred_index(lit.pred);
        for (const auto& t : lit.args) atom.vars.push_back(var_index(t));
        return atom;
    };
    for (const auto& clause : act.precondition.clauses) {
        if (clause.literals.size() != 1 || !clause.literals[0].positive)
            throw std::runtime_error("seed action '" + act.name +
                                     "' needs a positive conjunctive precondition");
        schema.pre.push_back(to_atom(clause.literals[0]));
    }
    if (!act.effect.conditional.empty())
        throw std::runtime_error("seed action '" + act.name + "' uses conditional effects");
    for (const auto& lit : act.effect.direct)
        (lit.positive ? schema.add : schema.del).push_back(to_atom(lit));
    schema.sort_body();
    return schema;
}

struct AssembledTask {
    Vocabulary vocab;
    std::vector<Trace> traces;
    std::vector<ActionSchema> seeds;
    DomainAst predicates_dom;
};

// Gathers vocabulary + traces from a predicates file and trace files
// (JSON lines or one PDDL problem per trace).
inline AssembledTask assemble_task(const std::string& predicates_path,
                                   const std::vector<std::string>& trace_paths,
                                   bool use_seeds) {
    AssembledTask out;
    out.predicates_dom = parse_domain(read_file(predicates_path));
    out.vocab.types = out.predicates_dom.types;
    out.vocab.predicates = out.predicates_dom.predicates;

    std::vector<TypedName> objects = out.predicates_dom.constants;
    auto add_object = [&](const TypedName& o) {
        for (const auto& existing : objects)
            if (existing.name == o.name) return;
        objects.push_back(o);
    };

    for (const auto& path : trace_paths) {
        if (fs::path(path).extension() == ".jsonl" || fs::path(path).extension() == ".json") {
            TraceFile tf = read_traces_jsonl_file(path);
            for (const auto& o : tf.objects) add_object(o);
            for (auto& t : tf.traces) out.traces.push_back(std::move(t));
        } else {
            ProblemAst prob = parse_problem(read_file(path), out.predicates_dom);
            for (const auto& o : prob.objects) add_object(o);
            Trace t;
            t.id = prob.name;
            t.init = prob.init;
            t.goal = prob.goal;
            out.traces.push_back(std::move(t));
        }
    }
    out.vocab.objects = infer_objects(out.traces, out.vocab.predicates, objects);

    if (use_seeds)
        for (const auto& act : out.predicates_dom.actions)
            out.seeds.push_back(schema_from_ast(act, out.vocab));

    for (const auto& t : out.traces) validate_trace(t, out.vocab);
    return out;
}

inline std::vector<ProblemAst> load_instances(const std::vector<std::string>& paths,
                                              const DomainAst& dom) {
    std::vector<std::string> files;
    for (const auto& p : paths) {
        if (fs::is_directory(p)) {
            std::vector<std::string> inner;
            for (const auto& e : fs::directory_iterator(p))
                if (e.path().extension() == ".pddl") inner.push_back(e.path().string());
            std::sort(inner.begin(), inner.end());
            files.insert(files.end(), inner.begin(), inner.end());
        } else {
            files.push_back(p);
        }
    }
    std::vector<ProblemAst> out;
    for (const auto& f : files) out.push_back(parse_problem(read_file(f), dom));
    return out;
}

struct CommonFlags {
    std::string engine = "internal";
    std::string external_cmd;
    double time_limit = 300.0;
    double mem_limit_mb = 4096.0;
    unsigned seed = 1;

    PlannerConfig planner() const {
        PlannerConfig cfg;
        cfg.engine = parse_engine(engine);
        cfg.external_cmd = external_cmd;
        cfg.time_limit_s = time_limit;
        cfg.mem_limit_bytes = static_cast<std::size_t>(mem_limit_mb * 1024.0 * 1024.0);
        return cfg;
    }
};

inline void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--engine", flags.engine,
                    "internal | internal-gbfs | internal-bfs | external");
    cmd->add_option("--external-cmd", flags.external_cmd,
                    "external planner template with {domain} {problem} {plan-out}");
    cmd->add_option("--time-limit", flags.time_limit, "per-solve time limit in seconds");
    cmd->add_option("--mem-limit", flags.mem_limit_mb, "per-solve memory limit in MB");
    cmd->add_option("--seed", flags.seed, "random seed");
}

inline int run_cli(int argc, const char* const* argv) {
    CLI::App app{"STRIPS action-model discovery from goal-oriented traces"};
    app.require_subcommand(1);

    // ---- learn ----
    auto* learn = app.add_subcommand("learn", "learn action models from traces");
    CommonFlags learn_flags;
    std::vector<std::string> learn_traces;
    std::string learn_predicates, learn_out = "model.pddl", learn_report;
    std::string learn_strategy = "exhaust";
    int learn_max_k = -1, learn_max_r = -1, learn_jobs = 1;
    double learn_budget = 1e18;
    bool learn_no_seeds = false;
    learn->add_option("--traces", learn_traces, "trace files (.jsonl or PDDL problems)")
        ->required()
        ->expected(-1);
    learn->add_option("--predicates", learn_predicates,
                      "PDDL domain file with the predicate vocabulary (actions become seeds)")
        ->required();
    learn->add_option("--out", learn_out, "output PDDL domain for the learned model");
    learn->add_option("--report", learn_report, "JSON report (ledger, costs, provenance plan)");
    learn->add_option("--strategy", learn_strategy, "exhaust | first-sat");
    learn->add_option("--max-k", learn_max_k, "cap on the action count (default 2|P|)");
    learn->add_option("--max-r", learn_max_r, "cap on the max arity (default |objects|)");
    learn->add_option("--jobs", learn_jobs, "parallel configuration evaluations");
    learn->add_option("--global-budget", learn_budget, "overall wall-clock budget in seconds");
    learn->add_flag("--no-seeds", learn_no_seeds,
                    "ignore :action blocks in the predicates file");
    add_common_flags(learn, learn_flags);

    // ---- compile ----
    auto* compile_cmd = app.add_subcommand("compile", "emit the compiled planning task");
    std::vector<std::string> compile_traces;
    std::string compile_predicates, compile_out_dom = "dam-domain.pddl",
                                    compile_out_prob = "dam-problem.pddl", compile_backmap;
    int compile_k = 1, compile_r = 0;
    bool compile_no_seeds = false;
    compile_cmd->add_option("--traces", compile_traces, "trace files")->required()->expected(-1);
    compile_cmd->add_option("--predicates", compile_predicates, "PDDL domain file")->required();
    compile_cmd->add_option("--k", compile_k, "number of learnable actions")->required();
    compile_cmd->add_option("--r", compile_r, "max arity")->required();
    compile_cmd->add_option("--out-domain", compile_out_dom, "output domain file");
    compile_cmd->add_option("--out-problem", compile_out_prob, "output problem file");
    compile_cmd->add_option("--backmap", compile_backmap, "JSON back-map for plan decoding");
    compile_cmd->add_flag("--no-seeds", compile_no_seeds, "ignore :action blocks");

    // ---- solve ----
    auto* solve_cmd = app.add_subcommand("solve", "solve a PDDL task");
    CommonFlags solve_flags;
    std::string solve_domain, solve_problem, solve_plan_out;
    solve_cmd->add_option("--domain", solve_domain, "domain file")->required();
    solve_cmd->add_option("--problem", solve_problem, "problem file")->required();
    solve_cmd->add_option("--plan", solve_plan_out, "plan output file (IPC format)");
    add_common_flags(solve_cmd, solve_flags);

    // ---- validate ----
    auto* validate_cmd = app.add_subcommand("validate", "coverage of a model on instances");
    CommonFlags validate_flags;
    std::string validate_model, validate_report;
    std::vector<std::string> validate_instances;
    validate_cmd->add_option("--model", validate_model, "learned/reference domain file")
        ->required();
    validate_cmd->add_option("--instances", validate_instances, "instance files or directories")
        ->required()
        ->expected(-1);
    validate_cmd->add_option("--report", validate_report, "JSON coverage report");
    add_common_flags(validate_cmd, validate_flags);

    // ---- trace-gen ----
    auto* tracegen = app.add_subcommand("trace-gen", "generate traces from a reference domain");
    CommonFlags tracegen_flags;
    std::string tg_domain, tg_generator, tg_out = "traces.jsonl", tg_observability = "endpoints";
    std::string tg_instances_out, tg_domain_out;
    std::vector<std::string> tg_instances;
    int tg_size = 3, tg_count = 5;
    tracegen->add_option("--domain", tg_domain, "reference domain file");
    tracegen->add_option("--instances", tg_instances, "instance files")->expected(-1);
    tracegen->add_option("--generator", tg_generator, "visitall | blocks | hanoi");
    tracegen->add_option("--size", tg_size, "generator size parameter");
    tracegen->add_option("--count", tg_count, "number of instances to generate");
    tracegen->add_option("--observability", tg_observability, "endpoints | full-states");
    tracegen->add_option("--out", tg_out, "output traces (JSON lines)");
    tracegen->add_option("--instances-out", tg_instances_out,
                         "directory for generated instance files");
    tracegen->add_option("--domain-out", tg_domain_out, "write the reference domain here");
    add_common_flags(tracegen, tracegen_flags);

    // ---- split ----
    auto* split_cmd = app.add_subcommand("split", "split fully observed traces into transitions");
    std::string split_in, split_out = "split-traces.jsonl";
    split_cmd->add_option("--traces", split_in, "input traces (JSON lines)")->required();
    split_cmd->add_option("--out", split_out, "output traces (JSON lines)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (learn->parsed()) {
            AssembledTask at =
                assemble_task(learn_predicates, learn_traces, !learn_no_seeds);
            UdamOptions opts;
            opts.planner = learn_flags.planner();
            opts.max_k = learn_max_k;
            opts.max_r = learn_max_r;
            opts.jobs = learn_jobs;
            opts.global_budget_s = learn_budget;
            opts.seeds = at.seeds;
            opts.strategy = learn_strategy == "first-sat" ? UdamOptions::Strategy::FirstSat
                                                          : UdamOptions::Strategy::Exhaust;
            UdamResult result = udam_search(at.vocab, at.traces, opts);

            nlohmann::json report = ledger_json(result.ledger);
            report["summary"] = {
                {"learned", result.learned},
                {"total_wall_s", result.wall_s},
                {"first_solution_s", result.first_solution_s},
                {"best_solution_s", result.best_solution_s},
                {"traces", at.traces.size()},
            };
            if (result.learned) {
                report["summary"]["best_cost"] = rational_json(result.cost);
                auto& edits = report["edit_counts"] = nlohmann::json::array();
                for (const auto& s : result.models.schemas) {
                    edits.push_back({{"action", s.untrimmed.name},
                                     {"pre", s.untrimmed.pre.size()},
                                     {"add", s.untrimmed.add.size()},
                                     {"del", s.untrimmed.del.size()},
                                     {"effect_free", s.effect_free}});
                }
                auto& warn = report["warnings"] = nlohmann::json::array();
                for (const auto& w : result.models.warnings) warn.push_back(w);
                const auto& best = *result.ledger.best;
                auto& prov = report["provenance_plan"] = nlohmann::json::array();
                for (int a : best.plan) prov.push_back(best.compiled->task.action_sigs[a].str());

                DomainAst learned =
                    schemas_to_domain(result.models.kept_models(), at.vocab, "learned");
                write_file(learn_out, print_domain(learned));
            }
            if (!learn_report.empty()) write_file(learn_report, report.dump(2));

            std::cout << "nodes explored:  " << result.ledger.log.size() << "\n";
            std::cout << "total time:      " << result.wall_s << " s\n";
            std::cout << "first solution:  "
                      << (result.first_solution_s < 0
                              ? std::string("-")
                              : std::to_string(result.first_solution_s) + " s")
                      << "\n";
            if (result.learned) {
                std::cout << "best cost:       " << result.cost.str() << " (k="
                          << result.ledger.best->k << ", r=" << result.ledger.best->r << ")\n";
                std::cout << "model written:   " << learn_out << "\n";
                for (const auto& w : result.models.warnings)
                    std::cout << "warning: " << w << "\n";
            } else {
                std::cout << "no satisfiable configuration; nothing learned\n";
                return 1;
            }
            return 0;
        }

        if (compile_cmd->parsed()) {
            AssembledTask at =
                assemble_task(compile_predicates, compile_traces, !compile_no_seeds);
            LearningTask task;
            task.vocab = at.vocab;
            task.traces = at.traces;
            task.k = compile_k;
            task.r = compile_r;
            task.seeds = at.seeds;
            CompiledProblem cp = compile(task);
            EmittedTask emitted = emit_pddl(cp);
            write_file(compile_out_dom, emitted.domain_text);
            write_file(compile_out_prob, emitted.problem_text);
            if (!compile_backmap.empty()) write_file(compile_backmap, backmap_json(cp).dump(2));
            std::cout << "fluents: " << cp.task.num_fluents << " (edit " << cp.n_fed
                      << ", holds " << cp.n_fpred << ")\n";
            std::cout << "actions: " << cp.task.actions.size() << " (edit " << cp.n_aed
                      << ", apply " << cp.n_aapp << ")\n";
            return 0;
        }

        if (solve_cmd->parsed()) {
            DomainAst dom = parse_domain(read_file(solve_domain));
            ProblemAst prob = parse_problem(read_file(solve_problem), dom);
            GroundedInstance gi = ground_task(dom, prob);
            PlannerConfig cfg = solve_flags.planner();
            SolveResult res;
            if (cfg.engine == PlannerConfig::Engine::External) {
                res = solve_external(gi.task, make_action_index(gi.task), solve_domain,
                                     solve_problem, cfg);
            } else {
                res = solve(gi.task, cfg);
            }
            if (res.solved()) {
                std::string text = gi.task.plan_text(res.plan);
                text += "; cost = " + std::to_string(res.plan.size()) + "\n";
                if (!solve_plan_out.empty()) write_file(solve_plan_out, text);
                std::cout << text;
                return 0;
            }
            std::cerr << "no plan: " << to_string(res.status)
                      << (res.message.empty() ? "" : (" (" + res.message + ")")) << "\n";
            if (res.status == SolveResult::Status::Unsolvable) return 10;
            if (res.resource_exhausted()) return 11;
            return 1;
        }

        if (validate_cmd->parsed()) {
            DomainAst model = parse_domain(read_file(validate_model));
            std::vector<ProblemAst> instances = load_instances(validate_instances, model);
            CoverageReport report = coverage(model, instances, validate_flags.planner());
            if (!validate_report.empty())
                write_file(validate_report, coverage_json(report).dump(2));
            std::cout << "coverage: " << report.solved << "/" << report.total << "\n";
            return 0;
        }

        if (tracegen->parsed()) {
            DomainAst dom;
            std::vector<ProblemAst> instances;
            if (!tg_generator.empty()) {
                dom = generator_domain(tg_generator);
                for (int i = 0; i < tg_count; ++i) {
                    GeneratorSpec spec{tg_generator, tg_size, tracegen_flags.seed + i};
                    instances.push_back(generate_instance(spec));
                }
            } else {
                if (tg_domain.empty())
                    throw std::runtime_error("trace-gen needs --domain or --generator");
                dom = parse_domain(read_file(tg_domain));
                instances = load_instances(tg_instances, dom);
            }
            if (!tg_instances_out.empty()) {
                for (const auto& inst : instances)
                    write_file((fs::path(tg_instances_out) / (inst.name + ".pddl")).string(),
                               print_problem(inst));
            }
            if (!tg_domain_out.empty()) write_file(tg_domain_out, print_domain(dom));

            Observability mode = tg_observability == "full-states" ? Observability::FullStates
                                                                   : Observability::Endpoints;
            TraceGenResult gen = generate_traces(dom, instances, mode, tracegen_flags.planner());
            std::vector<TypedName> objects;
            for (const auto& inst : instances)
                for (const auto& o : inst.objects) {
                    bool known = false;
                    for (const auto& e : objects)
                        if (e.name == o.name) known = true;
                    if (!known) objects.push_back(o);
                }
            std::ofstream out(tg_out);
            write_traces_jsonl(out, gen.traces, objects);
            std::cout << "traces written: " << gen.traces.size() << " -> " << tg_out << "\n";
            for (const auto& [inst, why] : gen.skipped)
                std::cout << "skipped " << inst << ": " << why << "\n";
            return 0;
        }

        if (split_cmd->parsed()) {
            TraceFile tf = read_traces_jsonl_file(split_in);
            std::vector<Trace> splits;
            for (const auto& t : tf.traces) {
                if (t.observed_states.empty())
                    throw ModelError(ModelError::Kind::NotFullyObserved,
                                     "trace '" + t.id + "' has no observed states");
                auto parts = split_traces(t);
                splits.insert(splits.end(), parts.begin(), parts.end());
            }
            std::ofstream out(split_out);
            write_traces_jsonl(out, splits, tf.objects);
            std::cout << "transitions written: " << splits.size() << " -> " << split_out << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace udam::cli
