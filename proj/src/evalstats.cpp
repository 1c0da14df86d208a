#include "initrack/evalstats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include <fmt/format.h>

#include "initrack/errors.hpp"
#include "initrack/special.hpp"

namespace initrack {

std::size_t RunResult::correct(Dimension dim) const noexcept {
    const auto& v = correctness(dim);
    return static_cast<std::size_t>(std::count(v.begin(), v.end(), std::uint8_t{1}));
}

RunResult make_run_result(std::vector<TurnRecord> records) {
    RunResult r;
    r.records = std::move(records);
    r.task_correct.reserve(r.records.size());
    r.dialogue_correct.reserve(r.records.size());
    for (const auto& rec : r.records) {
        r.task_correct.push_back(rec.task_correct ? 1 : 0);
        r.dialogue_correct.push_back(rec.dialogue_correct ? 1 : 0);
    }
    r.task_accuracy = accuracy(r.records, Dimension::Task);
    r.dialogue_accuracy = accuracy(r.records, Dimension::Dialogue);
    return r;
}

RunResult evaluate(const Corpus& corpus, const CueModel& model, const TrackerConfig& config) {
    CueModel frozen = model;
    return make_run_result(run_tracker(corpus, frozen, config, /*learn=*/false));
}

RunResult baseline_run(const Corpus& corpus) {
    std::vector<TurnRecord> records;
    records.reserve(corpus.prediction_points());
    for (const auto& d : corpus.dialogues) {
        for (std::size_t t = 0; t + 1 < d.turns.size(); ++t) {
            const auto& turn = d.turns[t];
            const auto& next = d.turns[t + 1];
            TurnRecord rec;
            rec.dialogue_id = d.id;
            rec.turn_index = t;
            rec.predicted_task_agent = turn.ti_holder;
            rec.predicted_dialogue_agent = turn.di_holder;
            rec.predicted_task_role = role_of(d, turn, turn.ti_holder);
            rec.predicted_dialogue_role = role_of(d, turn, turn.di_holder);
            rec.actual_task_agent = next.ti_holder;
            rec.actual_dialogue_agent = next.di_holder;
            rec.cues = turn.cues;
            rec.task_correct = rec.predicted_task_agent == rec.actual_task_agent;
            rec.dialogue_correct = rec.predicted_dialogue_agent == rec.actual_dialogue_agent;
            records.push_back(std::move(rec));
        }
    }
    return make_run_result(std::move(records));
}

CrossValidation cross_validate(const Corpus& corpus, const TrackerConfig& config) {
    const auto groups = partition_by_pair(corpus);
    if (groups.size() < 2) {
        throw DomainError(fmt::format(
            "cross-validation needs at least two speaker/hearer pair groups (found {})",
            groups.size()));
    }

    CrossValidation cv;
    std::vector<TurnRecord> all;
    for (std::size_t held = 0; held < groups.size(); ++held) {
        Corpus training;
        training.name = corpus.name;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            if (g == held) {
                continue;
            }
            const auto& ds = groups[g].second.dialogues;
            training.dialogues.insert(training.dialogues.end(), ds.begin(), ds.end());
        }
        const auto trained = train(training, config);
        Fold fold{groups[held].first, training.dialogues.size(),
                  evaluate(groups[held].second, trained.model, config)};
        all.insert(all.end(), fold.result.records.begin(), fold.result.records.end());
        cv.folds.push_back(std::move(fold));
    }
    cv.aggregate = make_run_result(std::move(all));
    return cv;
}

std::string folds_csv(const CrossValidation& cv) {
    std::string out = "fold,dim,correct,total,accuracy\n";
    const auto row = [&](const std::string& name, const RunResult& r) {
        for (Dimension dim : {Dimension::Task, Dimension::Dialogue}) {
            const auto total = r.total();
            const double acc = total ? static_cast<double>(r.correct(dim)) / total : 0.0;
            out += fmt::format("{},{},{},{},{:.6f}\n", name, to_string(dim), r.correct(dim), total,
                               acc);
        }
    };
    for (const auto& f : cv.folds) {
        row(f.key, f.result);
    }
    row("all", cv.aggregate);
    return out;
}

// ---------------------------------------------------------------------------

ErrorReport error_report(const RunResult& run, const Corpus& corpus) {
    if (run.records.size() != corpus.prediction_points()) {
        throw DomainError(fmt::format("run has {} records but the corpus has {} prediction points",
                                      run.records.size(), corpus.prediction_points()));
    }
    std::map<std::pair<std::string_view, std::size_t>, const TurnRecord*> by_point;
    for (const auto& r : run.records) {
        by_point[{r.dialogue_id, r.turn_index}] = &r;
    }

    ErrorReport report;
    for (const auto& d : corpus.dialogues) {
        for (std::size_t t = 0; t + 1 < d.turns.size(); ++t) {
            const auto it = by_point.find({d.id, t});
            if (it == by_point.end()) {
                throw DomainError(fmt::format("run has no record for dialogue {} turn {}", d.id, t));
            }
            const auto& turn = d.turns[t];
            const auto& next = d.turns[t + 1];
            for (CueKind c : turn.cues) {
                for (Dimension dim : {Dimension::Task, Dimension::Dialogue}) {
                    if (!affects(c, dim)) {
                        continue;
                    }
                    auto& cell = report.at(c, dim);
                    const bool error = !it->second->correct(dim);
                    if (next.holder(dim) != turn.holder(dim)) {
                        ++cell.shift_total;
                        cell.shift_errors += error ? 1 : 0;
                    } else {
                        ++cell.no_shift_total;
                        cell.no_shift_errors += error ? 1 : 0;
                    }
                }
            }
        }
    }
    return report;
}

std::string error_report_csv(const ErrorReport& report) {
    std::string out = "cue,dim,shift_err,shift_tot,noshift_err,noshift_tot\n";
    for (const auto& s : canonical_specs()) {
        for (Dimension dim : {Dimension::Task, Dimension::Dialogue}) {
            if (!affects(s.kind, dim)) {
                continue;
            }
            const auto& c = report.at(s.kind, dim);
            out += fmt::format("{},{},{},{},{},{}\n", s.name, to_string(dim), c.shift_errors,
                               c.shift_total, c.no_shift_errors, c.no_shift_total);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

ExpertCounts expert_counts(const Corpus& corpus, std::string_view expert) {
    const auto r = distribution_report(corpus, expert, TurnScope::Scored);
    return ExpertCounts{r.task_focus(), r.dialogue_focus(), r.total};
}

double round_pct(double pct) noexcept { return std::round(pct * 10.0) / 10.0; }

namespace {

double pct(std::size_t part, std::size_t whole) {
    return whole ? 100.0 * static_cast<double>(part) / static_cast<double>(whole) : 0.0;
}

}  // namespace

std::string comparison_text(std::span<const ComparisonRow> rows) {
    std::string out = fmt::format("{:<24} {:<9} {:>6} {:>16} {:>16} {:>16} {:>12}\n", "corpus",
                                  "dim", "turns", "expert", "no-cue", "cue-based", "improvement");
    for (const auto& row : rows) {
        for (Dimension dim : {Dimension::Task, Dimension::Dialogue}) {
            const auto total = row.trained.total();
            const auto expert = dim == Dimension::Task ? row.expert.task : row.expert.dialogue;
            if ((dim == Dimension::Task && !row.task_applicable)) {
                out += fmt::format("{:<24} {:<9} {:>6} {:>16} {:>16} {:>16} {:>12}\n", row.corpus,
                                   to_string(dim), total, "N/A", "N/A", "N/A", "N/A");
                continue;
            }
            const auto cell = [](std::size_t n, double p) {
                return fmt::format("{} ({:.1f}%)", n, round_pct(p));
            };
            const std::string expert_cell =
                expert ? cell(*expert, pct(*expert, row.expert.total)) : std::string("N/A");
            const double base = round_pct(pct(row.baseline.correct(dim), row.baseline.total()));
            const double cue = round_pct(pct(row.trained.correct(dim), total));
            out += fmt::format("{:<24} {:<9} {:>6} {:>16} {:>16} {:>16} {:>11.1f}%\n", row.corpus,
                               to_string(dim), total, expert_cell,
                               cell(row.baseline.correct(dim), base),
                               cell(row.trained.correct(dim), cue), cue - base);
        }
    }
    return out;
}

std::string comparison_csv(std::span<const ComparisonRow> rows) {
    std::string out = "corpus,dim,expert_pct,baseline_pct,trained_pct,improvement_pts\n";
    for (const auto& row : rows) {
        for (Dimension dim : {Dimension::Task, Dimension::Dialogue}) {
            if (dim == Dimension::Task && !row.task_applicable) {
                continue;
            }
            const auto expert = dim == Dimension::Task ? row.expert.task : row.expert.dialogue;
            const double base = pct(row.baseline.correct(dim), row.baseline.total());
            const double cue = pct(row.trained.correct(dim), row.trained.total());
            out += fmt::format("{},{},{},{:.6f},{:.6f},{:.6f}\n", row.corpus, to_string(dim),
                               expert ? fmt::format("{:.6f}", pct(*expert, row.expert.total))
                                      : std::string("NA"),
                               base, cue, cue - base);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

RatingMatrix::RatingMatrix(std::vector<std::vector<std::size_t>> ratings, std::size_t categories)
    : ratings_(std::move(ratings)), categories_(categories) {
    if (ratings_.empty()) {
        throw DomainError("rating matrix needs at least one item");
    }
    if (categories_ < 2) {
        throw DomainError("rating matrix needs at least two categories");
    }
    const auto m = ratings_.front().size();
    if (m < 2) {
        throw DomainError("rating matrix needs at least two raters");
    }
    for (const auto& row : ratings_) {
        if (row.size() != m) {
            throw DomainError("every item must be rated by every rater");
        }
        for (auto c : row) {
            if (c >= categories_) {
                throw DomainError(fmt::format("category index {} out of range", c));
            }
        }
    }
}

RatingMatrix RatingMatrix::from_labels(const std::vector<std::vector<std::string>>& labels) {
    std::set<std::string> distinct;
    for (const auto& row : labels) {
        distinct.insert(row.begin(), row.end());
    }
    const std::vector<std::string> order(distinct.begin(), distinct.end());
    std::vector<std::vector<std::size_t>> ratings;
    ratings.reserve(labels.size());
    for (const auto& row : labels) {
        auto& out = ratings.emplace_back();
        for (const auto& l : row) {
            out.push_back(static_cast<std::size_t>(
                std::lower_bound(order.begin(), order.end(), l) - order.begin()));
        }
    }
    return RatingMatrix(std::move(ratings), std::max<std::size_t>(order.size(), 2));
}

RatingMatrix ratings_from_corpora(std::span<const Corpus> coders, Dimension dim) {
    if (coders.size() < 2) {
        throw DomainError("agreement needs at least two annotations");
    }
    const auto& ref = coders.front();
    std::vector<std::vector<std::string>> labels;
    for (std::size_t di = 0; di < ref.dialogues.size(); ++di) {
        const auto& d = ref.dialogues[di];
        for (std::size_t t = 0; t < d.turns.size(); ++t) {
            auto& row = labels.emplace_back();
            for (const auto& coder : coders) {
                if (coder.dialogues.size() != ref.dialogues.size() ||
                    coder.dialogues[di].id != d.id ||
                    coder.dialogues[di].turns.size() != d.turns.size() ||
                    coder.dialogues[di].turns[t].speaker != d.turns[t].speaker) {
                    throw DomainError(fmt::format(
                        "annotation {} is not aligned with {} at dialogue {}", coder.name,
                        ref.name, d.id));
                }
                row.push_back(coder.dialogues[di].turns[t].holder(dim));
            }
        }
    }
    return RatingMatrix::from_labels(labels);
}

double kappa(const RatingMatrix& ratings) {
    const auto n_items = ratings.items();
    const auto m = ratings.raters();
    const auto c = ratings.categories();

    std::vector<double> category_totals(c, 0.0);
    double agreement_pairs = 0.0;
    std::vector<std::size_t> counts(c);
    for (std::size_t i = 0; i < n_items; ++i) {
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t r = 0; r < m; ++r) {
            ++counts[ratings.at(i, r)];
        }
        for (std::size_t j = 0; j < c; ++j) {
            const auto n = static_cast<double>(counts[j]);
            agreement_pairs += n * (n - 1.0);
            category_totals[j] += n;
        }
    }
    const double nm = static_cast<double>(n_items) * static_cast<double>(m);
    const double p_a = agreement_pairs / (nm * static_cast<double>(m - 1));
    double p_e = 0.0;
    for (double total : category_totals) {
        const double p = total / nm;
        p_e += p * p;
    }
    if (p_e >= 1.0) {
        throw DegenerateStatisticError("kappa undefined: every rating falls in one category");
    }
    return (p_a - p_e) / (1.0 - p_e);
}

OutcomeMatrix::OutcomeMatrix(std::vector<std::vector<std::uint8_t>> outcomes)
    : rows_(std::move(outcomes)) {
    if (rows_.empty()) {
        throw DomainError("outcome matrix needs at least one subject");
    }
    const auto k = rows_.front().size();
    if (k < 2) {
        throw DomainError("outcome matrix needs at least two treatments");
    }
    for (const auto& row : rows_) {
        if (row.size() != k) {
            throw DomainError("every subject needs an outcome for every treatment");
        }
        for (auto v : row) {
            if (v > 1) {
                throw DomainError("outcomes must be 0 or 1");
            }
        }
    }
}

OutcomeMatrix paired_outcomes(std::span<const RunResult* const> runs, Dimension dim) {
    if (runs.size() < 2) {
        throw DomainError("pairing needs at least two runs");
    }
    const auto& ref = runs.front()->records;
    for (const auto* run : runs) {
        if (run->records.size() != ref.size()) {
            throw DomainError("runs cover different numbers of prediction points");
        }
        for (std::size_t i = 0; i < ref.size(); ++i) {
            if (run->records[i].dialogue_id != ref[i].dialogue_id ||
                run->records[i].turn_index != ref[i].turn_index) {
                throw DomainError(fmt::format("runs disagree on prediction point {}", i));
            }
        }
    }
    std::vector<std::vector<std::uint8_t>> rows(ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
        for (const auto* run : runs) {
            rows[i].push_back(run->correctness(dim)[i]);
        }
    }
    return OutcomeMatrix(std::move(rows));
}

CochranResult cochran_q(const OutcomeMatrix& outcomes) {
    const auto n = outcomes.subjects();
    const auto k = outcomes.treatments();
    std::vector<double> column_totals(k, 0.0);
    double sum_rows = 0.0;
    double sum_rows_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            row += outcomes.at(i, j);
            column_totals[j] += outcomes.at(i, j);
        }
        sum_rows += row;
        sum_rows_sq += row * row;
    }
    double sum_cols_sq = 0.0;
    for (double g : column_totals) {
        sum_cols_sq += g * g;
    }
    const double kd = static_cast<double>(k);
    const double numerator = (kd - 1.0) * (kd * sum_cols_sq - sum_rows * sum_rows);
    const double denominator = kd * sum_rows - sum_rows_sq;
    const int df = static_cast<int>(k) - 1;
    if (denominator == 0.0) {
        // Only possible when every subject row is constant, which forces all
        // column totals equal as well: no discordant subjects, no effect.
        if (numerator != 0.0) {
            throw DegenerateStatisticError("Cochran's Q undefined: no variation among subjects");
        }
        return {0.0, df, 1.0};
    }
    const double q = numerator / denominator;
    return {q, df, chi_square_sf(q, df)};
}

}  // namespace initrack
