#include "initrack/cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "initrack/corpus.hpp"
#include "initrack/cues.hpp"
#include "initrack/errors.hpp"
#include "initrack/evalstats.hpp"
#include "initrack/synthetic.hpp"
#include "initrack/tracker.hpp"
#include "text_util.hpp"

namespace initrack::cli {
namespace {

struct Options {
    std::vector<std::string> corpora;
    std::string model_path;
    double delta = 0.35;
    std::string method = "const-counter";
    double default_x = 0.5;
    double reset_strength = 0.75;
    bool anchor_first_turn = false;
    bool allow_large_delta = false;
    std::string on_conflict = "error";
    std::optional<double> sweep_from;
    std::optional<double> sweep_to;
    std::optional<double> sweep_step;
    std::string sweep_mode = "train";
    std::vector<std::string> focus_agents;
    std::uint64_t seed = 1;
    std::string out_path;
    std::string trace_path;
    bool teacher_forcing = true;
    std::string format = "text";
    std::string dim;
    std::string ratings_path;
    std::string outcomes_path;
    // gen-synthetic
    std::string name = "synthetic";
    std::size_t dialogues = 8;
    std::size_t turns = 20;
    std::size_t pairs = 1;
    double cue_prob = 0.05;
    double shift_prob = 0.9;
    double task_noise = 0.0;
    double dialogue_noise = 0.0;
    std::string replica;
};

// Failure that maps to an exit code after a message on stderr.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Context {
public:
    Context(const Options& opt, std::ostream& out, std::ostream& err)
        : opt_(opt), out_(out), err_(err) {}

    const Options& opt() const { return opt_; }
    std::ostream& err() { return err_; }

    // Results go to --out when given, else stdout.
    void emit(const std::string& text) {
        if (opt_.out_path.empty()) {
            out_ << text;
            return;
        }
        std::ofstream f(opt_.out_path, std::ios::binary);
        if (!f) {
            throw std::runtime_error("cannot write " + opt_.out_path);
        }
        f << text;
    }

    bool csv() const { return opt_.format == "csv"; }

    const std::string& single_corpus_path() const {
        if (opt_.corpora.size() != 1) {
            throw UsageError("exactly one --corpus is required");
        }
        return opt_.corpora.front();
    }

    Corpus corpus() const { return load_corpus_file(single_corpus_path()); }

    TrackerConfig config() {
        TrackerConfig c;
        c.delta = opt_.delta;
        const auto m = parse_method(opt_.method);
        if (!m) {
            throw UsageError("unknown --method " + opt_.method);
        }
        c.method = *m;
        c.default_task_x = opt_.default_x;
        c.default_dialogue_x = opt_.default_x;
        c.reset_strength = opt_.reset_strength;
        c.anchor_first_turn = opt_.anchor_first_turn;
        c.teacher_forcing = opt_.teacher_forcing;
        c.allow_large_delta = opt_.allow_large_delta;
        c.on_total_conflict = parse_conflict_policy(opt_.on_conflict).value();
        if (c.allow_large_delta && c.delta >= 0.5) {
            err_ << fmt::format("warning: delta {} is outside the recommended range (0, 0.5)\n",
                                c.delta);
        }
        validate(c);
        return c;
    }

    std::vector<Dimension> dims() const {
        if (opt_.dim.empty()) {
            return {Dimension::Task, Dimension::Dialogue};
        }
        if (opt_.dim == "task") {
            return {Dimension::Task};
        }
        if (opt_.dim == "dialogue") {
            return {Dimension::Dialogue};
        }
        throw UsageError("--dim must be task or dialogue");
    }

private:
    const Options& opt_;
    std::ostream& out_;
    std::ostream& err_;
};

std::string accuracy_summary(Context& ctx, const std::string& label,
                             const std::vector<TurnRecord>& records) {
    const auto r = make_run_result(records);
    if (ctx.csv()) {
        std::string s = "run,dim,correct,total,accuracy\n";
        for (Dimension dim : {Dimension::Task, Dimension::Dialogue}) {
            s += fmt::format("{},{},{},{},{:.6f}\n", label, to_string(dim), r.correct(dim),
                             r.total(), r.total() ? double(r.correct(dim)) / r.total() : 0.0);
        }
        return s;
    }
    std::string s;
    for (Dimension dim : {Dimension::Task, Dimension::Dialogue}) {
        s += fmt::format("{} {:<8} accuracy: {}/{} ({:.1f}%)\n", label, to_string(dim),
                         r.correct(dim), r.total(),
                         round_pct(r.total() ? 100.0 * r.correct(dim) / r.total() : 0.0));
    }
    return s;
}

void write_trace(const std::string& path, const std::vector<TurnRecord>& records) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write " + path);
    }
    f << "dialogue,turn,cues,predicted_ti,actual_ti,ti_correct,predicted_di,actual_di,"
         "di_correct\n";
    for (const auto& r : records) {
        std::string cues;
        for (std::size_t i = 0; i < r.cues.size(); ++i) {
            cues += (i ? ";" : "") + std::string(to_string(r.cues[i]));
        }
        f << fmt::format("{},{},{},{},{},{},{},{},{}\n", r.dialogue_id, r.turn_index + 1,
                         cues.empty() ? "-" : cues, r.predicted_task_agent, r.actual_task_agent,
                         r.task_correct ? 1 : 0, r.predicted_dialogue_agent,
                         r.actual_dialogue_agent, r.dialogue_correct ? 1 : 0);
    }
}

// --- commands ------------------------------------------------------------

int cmd_validate(Context& ctx) {
    const auto corpus = ctx.corpus();
    ctx.emit(fmt::format("ok: corpus {} dialogues={} turns={} prediction_points={}\n", corpus.name,
                         corpus.dialogues.size(), corpus.turn_count(),
                         corpus.prediction_points()));
    return kExitOk;
}

int cmd_distribution(Context& ctx) {
    const auto corpus = ctx.corpus();
    const auto focus = ctx.opt().focus_agents.empty() ? std::string("system")
                                                      : ctx.opt().focus_agents.front();
    const auto r = distribution_report(corpus, focus, TurnScope::All);
    const auto pcts = r.percentages();
    const auto c = r.cells();
    if (ctx.csv()) {
        static constexpr std::array<const char*, 4> ti{"focus", "other", "focus", "other"};
        static constexpr std::array<const char*, 4> di{"focus", "focus", "other", "other"};
        std::string s = "ti,di,count,percent\n";
        for (std::size_t i = 0; i < 4; ++i) {
            s += fmt::format("{},{},{},{:.6f}\n", ti[i], di[i], c[i], pcts[i]);
        }
        ctx.emit(s);
        return kExitOk;
    }
    const auto cell = [&](std::size_t i) {
        return fmt::format("{} ({:.1f}%)", c[i], round_pct(pcts[i]));
    };
    ctx.emit(fmt::format("{} turns, focus agent {}\n{:<14}{:>16}{:>16}\n{:<14}{:>16}{:>16}\n"
                         "{:<14}{:>16}{:>16}\n",
                         r.total, focus, "", "TI: focus", "TI: other", "DI: focus", cell(0),
                         cell(1), "DI: other", cell(2), cell(3)));
    return kExitOk;
}

int cmd_train(Context& ctx) {
    if (ctx.opt().model_path.empty()) {
        throw UsageError("train requires --model PATH for the learned model");
    }
    const auto corpus = ctx.corpus();
    const auto result = train(corpus, ctx.config());
    save_model_file(result.model, ctx.opt().model_path);
    if (!ctx.opt().trace_path.empty()) {
        write_trace(ctx.opt().trace_path, result.trace);
    }
    ctx.emit(accuracy_summary(ctx, "train", result.trace));
    return kExitOk;
}

int cmd_eval(Context& ctx) {
    if (ctx.opt().model_path.empty()) {
        throw UsageError("eval requires --model PATH");
    }
    const auto corpus = ctx.corpus();
    const auto model = load_model_file(ctx.opt().model_path);
    const auto result = evaluate(corpus, model, ctx.config());
    if (!ctx.opt().trace_path.empty()) {
        write_trace(ctx.opt().trace_path, result.records);
    }
    ctx.emit(accuracy_summary(ctx, "eval", result.records));
    return kExitOk;
}

int cmd_baseline(Context& ctx) {
    const auto result = baseline_run(ctx.corpus());
    if (!ctx.opt().trace_path.empty()) {
        write_trace(ctx.opt().trace_path, result.records);
    }
    ctx.emit(accuracy_summary(ctx, "baseline", result.records));
    return kExitOk;
}

int cmd_xval(Context& ctx) {
    const auto cv = cross_validate(ctx.corpus(), ctx.config());
    if (ctx.csv()) {
        ctx.emit(folds_csv(cv));
        return kExitOk;
    }
    std::string s = fmt::format("{:<16}{:>8}{:>18}{:>18}\n", "fold", "points", "task", "dialogue");
    const auto line = [&](const std::string& key, const RunResult& r) {
        const auto pct = [&](Dimension d) {
            return fmt::format("{} ({:.1f}%)", r.correct(d),
                               round_pct(r.total() ? 100.0 * r.correct(d) / r.total() : 0.0));
        };
        s += fmt::format("{:<16}{:>8}{:>18}{:>18}\n", key, r.total(), pct(Dimension::Task),
                         pct(Dimension::Dialogue));
    };
    for (const auto& f : cv.folds) {
        line(f.key, f.result);
    }
    line("all", cv.aggregate);
    ctx.emit(s);
    return kExitOk;
}

int cmd_sweep(Context& ctx) {
    const auto& o = ctx.opt();
    std::vector<double> grid;
    if (o.sweep_from || o.sweep_to || o.sweep_step) {
        grid = delta_grid(o.sweep_from.value_or(0.025), o.sweep_to.value_or(0.475),
                          o.sweep_step.value_or(0.025));
    } else {
        grid = default_delta_grid();
    }
    SweepMode mode;
    if (o.sweep_mode == "train") {
        mode = SweepMode::Train;
    } else if (o.sweep_mode == "xval") {
        mode = SweepMode::CrossValidate;
    } else {
        throw UsageError("--mode must be train or xval");
    }
    auto config = ctx.config();
    config.allow_large_delta = config.allow_large_delta ||
                               std::any_of(grid.begin(), grid.end(), [](double d) { return d >= 0.5; });
    ctx.emit(sweep_csv(sweep(ctx.corpus(), config.method, grid, mode, config)));
    return kExitOk;
}

std::string error_text(const ErrorReport& report) {
    std::string s = fmt::format("{:<32}{:<10}{:>12}{:>12}\n", "cue", "dim", "shift", "no-shift");
    for (const auto& spec : canonical_specs()) {
        for (Dimension dim : {Dimension::Task, Dimension::Dialogue}) {
            if (!affects(spec.kind, dim)) {
                continue;
            }
            const auto& c = report.at(spec.kind, dim);
            s += fmt::format("{:<32}{:<10}{:>12}{:>12}\n", spec.name, to_string(dim),
                             fmt::format("{}/{}", c.shift_errors, c.shift_total),
                             fmt::format("{}/{}", c.no_shift_errors, c.no_shift_total));
        }
    }
    return s;
}

int cmd_report_errors(Context& ctx) {
    const auto corpus = ctx.corpus();
    const auto config = ctx.config();
    const RunResult run = ctx.opt().model_path.empty()
                              ? cross_validate(corpus, config).aggregate
                              : evaluate(corpus, load_model_file(ctx.opt().model_path), config);
    const auto report = error_report(run, corpus);
    ctx.emit(ctx.csv() ? error_report_csv(report) : error_text(report));
    return kExitOk;
}

int cmd_compare(Context& ctx) {
    const auto& o = ctx.opt();
    if (o.corpora.empty()) {
        throw UsageError("compare requires at least one --corpus");
    }
    if (!o.focus_agents.empty() && o.focus_agents.size() != 1 &&
        o.focus_agents.size() != o.corpora.size()) {
        throw UsageError("give one --focus-agent, or one per --corpus");
    }
    std::vector<Corpus> corpora;
    for (const auto& p : o.corpora) {
        corpora.push_back(load_corpus_file(p));
    }
    const auto config = ctx.config();
    const CueModel model = o.model_path.empty() ? train(corpora.front(), config).model
                                                : load_model_file(o.model_path);
    std::vector<ComparisonRow> rows;
    for (std::size_t i = 0; i < corpora.size(); ++i) {
        const auto& focus = o.focus_agents.empty()       ? std::string("system")
                            : o.focus_agents.size() == 1 ? o.focus_agents.front()
                                                         : o.focus_agents[i];
        rows.push_back({corpora[i].name, baseline_run(corpora[i]),
                        evaluate(corpora[i], model, config), expert_counts(corpora[i], focus),
                        true});
    }
    ctx.emit(ctx.csv() ? comparison_csv(rows) : comparison_text(rows));
    return kExitOk;
}

std::vector<std::vector<std::string>> read_csv_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path, 0, "cannot open file");
    }
    std::vector<std::vector<std::string>> rows;
    std::string raw;
    while (std::getline(in, raw)) {
        const auto line = detail::trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        auto& row = rows.emplace_back();
        for (auto cell : detail::split(line, ',')) {
            row.emplace_back(detail::trim(cell));
        }
    }
    return rows;
}

int cmd_kappa(Context& ctx) {
    const auto& o = ctx.opt();
    std::vector<std::pair<std::string, double>> results;
    if (!o.ratings_path.empty()) {
        results.emplace_back("ratings", kappa(RatingMatrix::from_labels(read_csv_rows(o.ratings_path))));
    } else {
        if (o.corpora.size() < 2) {
            throw UsageError("kappa needs --ratings PATH or at least two --corpus annotations");
        }
        std::vector<Corpus> coders;
        for (const auto& p : o.corpora) {
            coders.push_back(load_corpus_file(p));
        }
        for (Dimension dim : ctx.dims()) {
            results.emplace_back(to_string(dim), kappa(ratings_from_corpora(coders, dim)));
        }
    }
    std::string s = ctx.csv() ? "dim,kappa\n" : "";
    for (const auto& [label, k] : results) {
        s += ctx.csv() ? fmt::format("{},{:.6f}\n", label, k)
                       : fmt::format("{} kappa: {:.4f}\n", label, k);
    }
    ctx.emit(s);
    return kExitOk;
}

int cmd_cochran_q(Context& ctx) {
    const auto& o = ctx.opt();
    std::vector<std::pair<std::string, CochranResult>> results;
    if (!o.outcomes_path.empty()) {
        std::vector<std::vector<std::uint8_t>> rows;
        for (const auto& row : read_csv_rows(o.outcomes_path)) {
            auto& out = rows.emplace_back();
            for (const auto& cell : row) {
                if (cell != "0" && cell != "1") {
                    throw ParseError(o.outcomes_path, rows.size(), "outcomes must be 0 or 1");
                }
                out.push_back(cell == "1" ? 1 : 0);
            }
        }
        results.emplace_back("outcomes", cochran_q(OutcomeMatrix(std::move(rows))));
    } else {
        if (o.model_path.empty()) {
            throw UsageError("cochran-q needs --outcomes PATH or --corpus with --model");
        }
        const auto corpus = ctx.corpus();
        const auto base = baseline_run(corpus);
        const auto cue = evaluate(corpus, load_model_file(o.model_path), ctx.config());
        const std::array<const RunResult*, 2> runs{&base, &cue};
        for (Dimension dim : ctx.dims()) {
            results.emplace_back(to_string(dim), cochran_q(paired_outcomes(runs, dim)));
        }
    }
    std::string s = ctx.csv() ? "dim,q,df,p\n" : "";
    for (const auto& [label, r] : results) {
        s += ctx.csv() ? fmt::format("{},{:.6f},{},{:.6g}\n", label, r.q, r.df, r.p)
                       : fmt::format("{} Q={:.4f} df={} p={:.4g}\n", label, r.q, r.df, r.p);
    }
    ctx.emit(s);
    return kExitOk;
}

int cmd_gen_synthetic(Context& ctx) {
    const auto& o = ctx.opt();
    Corpus corpus;
    if (!o.replica.empty()) {
        ReplicaTargets targets;
        if (o.replica == "trains91") {
            targets = trains91_distribution_targets();
        } else if (o.replica == "trains91-baseline") {
            targets = trains91_baseline_targets();
        } else {
            throw UsageError("--replica must be trains91 or trains91-baseline");
        }
        corpus = construct_replica(targets, o.seed);
    } else {
        GeneratorConfig g;
        g.name = o.name;
        g.dialogues = o.dialogues;
        g.turns_per_dialogue = o.turns;
        g.pairs = o.pairs;
        g.cue_probability.fill(o.cue_prob);
        g.rules = table_rules(o.shift_prob);
        g.task_noise = o.task_noise;
        g.dialogue_noise = o.dialogue_noise;
        corpus = gen_synthetic(g, o.seed);
    }
    ctx.emit(corpus_to_string(corpus));
    return kExitOk;
}

// --- option wiring ---------------------------------------------------------

void add_corpus(CLI::App* sub, Options& o, bool many = false) {
    auto* opt = sub->add_option("--corpus", o.corpora,
                                many ? "Corpus file (repeatable)" : "Corpus file");
    if (!many) {
        opt->expected(1);
    }
}

void add_output(CLI::App* sub, Options& o) {
    sub->add_option("--out", o.out_path, "Write results to PATH instead of stdout");
    sub->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"csv", "text"}))
        ->capture_default_str();
}

void add_tracker(CLI::App* sub, Options& o) {
    sub->add_option("--delta", o.delta, "Increment constant")->capture_default_str();
    sub->add_option("--method", o.method, "Adjustment method")
        ->check(CLI::IsMember({"const", "const-counter", "var-counter"}))
        ->capture_default_str();
    sub->add_option("--default-x", o.default_x, "Default speaker mass of the initial indices")
        ->capture_default_str();
    sub->add_option("--reset-strength", o.reset_strength,
                    "Mass given to the actual holder when an index is reset")
        ->capture_default_str();
    sub->add_option("--teacher-forcing", o.teacher_forcing,
                    "Evaluation: reset indices from annotations after a misprediction")
        ->capture_default_str();
    sub->add_flag("--anchor-first-turn", o.anchor_first_turn,
                  "Start each dialogue from the first turn's annotated holders");
    sub->add_flag("--allow-large-delta", o.allow_large_delta, "Accept delta >= 0.5 with a warning");
    sub->add_option("--on-conflict", o.on_conflict,
                    "Total conflict between index and cue: error, or evidence (cue wins)")
        ->check(CLI::IsMember({"error", "evidence"}))
        ->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Initiative tracking with Dempster-Shafer cue evidence", "initrack"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every command");

    std::map<CLI::App*, std::function<int(Context&)>> handlers;
    const auto command = [&](const char* name, const char* desc, auto handler) {
        auto* sub = app.add_subcommand(name, desc);
        handlers[sub] = handler;
        return sub;
    };

    auto* validate_cmd = command("validate", "Check a corpus file", cmd_validate);
    add_corpus(validate_cmd, o);
    add_output(validate_cmd, o);

    auto* dist = command("distribution", "TI/DI holder distribution", cmd_distribution);
    add_corpus(dist, o);
    dist->add_option("--focus-agent", o.focus_agents, "Agent the table is relative to")
        ->expected(1);
    add_output(dist, o);

    auto* train_cmd = command("train", "Learn cue bpa's from a corpus", cmd_train);
    add_corpus(train_cmd, o);
    train_cmd->add_option("--model", o.model_path, "Where to write the model");
    train_cmd->add_option("--trace", o.trace_path, "Write the per-turn trace as CSV");
    add_tracker(train_cmd, o);
    add_output(train_cmd, o);

    auto* eval_cmd = command("eval", "Evaluate a frozen model on a corpus", cmd_eval);
    add_corpus(eval_cmd, o);
    eval_cmd->add_option("--model", o.model_path, "Model file");
    eval_cmd->add_option("--trace", o.trace_path, "Write the per-turn trace as CSV");
    add_tracker(eval_cmd, o);
    add_output(eval_cmd, o);

    auto* base = command("baseline", "Predict that initiative stays put", cmd_baseline);
    add_corpus(base, o);
    base->add_option("--trace", o.trace_path, "Write the per-turn trace as CSV");
    add_output(base, o);

    auto* xval = command("xval", "Leave-one-pair-out cross-validation", cmd_xval);
    add_corpus(xval, o);
    add_tracker(xval, o);
    add_output(xval, o);

    auto* sweep_cmd = command("sweep", "Accuracy over a grid of delta values", cmd_sweep);
    add_corpus(sweep_cmd, o);
    add_tracker(sweep_cmd, o);
    sweep_cmd->add_option("--sweep-from", o.sweep_from, "First delta (default 0.025)");
    sweep_cmd->add_option("--sweep-to", o.sweep_to, "Last delta (default 0.475)");
    sweep_cmd->add_option("--sweep-step", o.sweep_step, "Delta step (default 0.025)");
    sweep_cmd->add_option("--mode", o.sweep_mode, "train or xval")
        ->check(CLI::IsMember({"train", "xval"}))
        ->capture_default_str();
    add_output(sweep_cmd, o);

    auto* errors = command("report-errors", "Shift/no-shift errors per cue", cmd_report_errors);
    add_corpus(errors, o);
    errors->add_option("--model", o.model_path,
                       "Evaluate this model (default: cross-validate the corpus)");
    add_tracker(errors, o);
    add_output(errors, o);

    auto* compare = command("compare", "Baseline vs cue-based accuracy per corpus", cmd_compare);
    add_corpus(compare, o, true);
    compare->add_option("--model", o.model_path,
                        "Model to evaluate (default: train on the first corpus)");
    compare->add_option("--focus-agent", o.focus_agents, "Expert agent (once, or per corpus)");
    add_tracker(compare, o);
    add_output(compare, o);

    auto* kappa_cmd = command("kappa", "Inter-annotator agreement", cmd_kappa);
    add_corpus(kappa_cmd, o, true);
    kappa_cmd->add_option("--ratings", o.ratings_path,
                          "CSV, one item per line, one label per rater");
    kappa_cmd->add_option("--dim", o.dim, "task or dialogue (default both)");
    add_output(kappa_cmd, o);

    auto* cq = command("cochran-q", "Cochran's Q test", cmd_cochran_q);
    add_corpus(cq, o);
    cq->add_option("--model", o.model_path, "Compare this model against the baseline");
    cq->add_option("--outcomes", o.outcomes_path, "CSV of 0/1 outcomes, one subject per line");
    cq->add_option("--dim", o.dim, "task or dialogue (default both)");
    add_tracker(cq, o);
    add_output(cq, o);

    auto* gen = command("gen-synthetic", "Write a seeded synthetic corpus", cmd_gen_synthetic);
    gen->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    gen->add_option("--name", o.name, "Corpus name")->capture_default_str();
    gen->add_option("--dialogues", o.dialogues, "Number of dialogues")->capture_default_str();
    gen->add_option("--turns", o.turns, "Turns per dialogue")->capture_default_str();
    gen->add_option("--pairs", o.pairs, "Number of speaker/hearer pair groups")
        ->capture_default_str();
    gen->add_option("--cue-prob", o.cue_prob, "Emission probability of every cue")
        ->capture_default_str();
    gen->add_option("--shift-prob", o.shift_prob,
                    "Probability that a cue hands initiative to its expected holder")
        ->capture_default_str();
    gen->add_option("--task-noise", o.task_noise, "Background task shift probability")
        ->capture_default_str();
    gen->add_option("--dialogue-noise", o.dialogue_noise,
                    "Background dialogue shift probability")
        ->capture_default_str();
    gen->add_option("--replica", o.replica, "trains91 or trains91-baseline");
    add_output(gen, o);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        if (const auto subs = app.get_subcommands(); !subs.empty()) {
            err << subs.front()->help();
        } else {
            err << app.help();
        }
        return kExitUsage;
    }

    auto* sub = app.get_subcommands().front();
    Context ctx(o, out, err);
    try {
        return handlers.at(sub)(ctx);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n" << sub->help();
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const DegenerateStatisticError& e) {
        err << "error: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const TotalConflictError& e) {
        // Fully committed, contradictory evidence met on one turn.
        err << "error: " << e.what() << " (see --on-conflict)\n";
        return kExitDegenerate;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace initrack::cli
