#include "provbench/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "provbench/canonical.hpp"
#include "provbench/errors.hpp"

namespace provbench {

double auroc(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores) {
    if (pos_scores.empty() || neg_scores.empty())
        throw Error(ErrorKind::EmptySide, "auroc needs scores on both sides");
    double credit = 0.0;
    for (double p : pos_scores)
        for (double n : neg_scores) {
            if (p > n) credit += 1.0;
            else if (p == n) credit += 0.5;
        }
    return credit / (static_cast<double>(pos_scores.size()) * neg_scores.size());
}

double matched_pair_accuracy(const std::vector<PairScores>& pairs) {
    if (pairs.empty()) throw Error(ErrorKind::EmptyPairs, "no pairs to evaluate");
    std::size_t correct = 0;
    for (const auto& p : pairs)
        if (p.positive > p.control) ++correct;
    return static_cast<double>(correct) / pairs.size();
}

namespace {

PermutationSummary summarize_null(double observed, const std::vector<double>& null_stats) {
    PermutationSummary out;
    out.observed = observed;
    out.draws = static_cast<int>(null_stats.size());
    std::size_t at_least = 0;
    double sum = 0.0;
    double max = null_stats.empty() ? 0.0 : null_stats.front();
    for (double s : null_stats) {
        if (s >= observed) ++at_least;
        sum += s;
        max = std::max(max, s);
    }
    out.p = (1.0 + at_least) / (1.0 + null_stats.size());
    out.null_mean = null_stats.empty() ? 0.0 : sum / null_stats.size();
    out.null_max = max;
    return out;
}

double auroc_by_labels(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels) {
    std::vector<double> pos, neg;
    for (std::size_t i = 0; i < scores.size(); ++i)
        (labels[i] ? pos : neg).push_back(scores[i]);
    return auroc(pos, neg);
}

double quantile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const double pos = q * (values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

} // namespace

PermutationSummary permutation_test(const std::vector<double>& scores,
                                    const std::vector<bool>& labels, int draws,
                                    const RandomSource& rng) {
    if (scores.size() != labels.size())
        throw Error(ErrorKind::DimensionMismatch, "scores and labels differ in length");
    std::vector<std::uint8_t> base(labels.size());
    std::size_t positives = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        base[i] = labels[i] ? 1 : 0;
        positives += base[i];
    }
    if (positives == 0 || positives == labels.size())
        throw Error(ErrorKind::SingleClass, "permutation test needs both classes");

    const double observed = auroc_by_labels(scores, base);
    std::vector<double> null_stats(static_cast<std::size_t>(draws));
    for (int d = 0; d < draws; ++d) {
        std::vector<std::uint8_t> perm = base;
        Substream stream = rng.substream(static_cast<std::uint64_t>(d));
        stream.shuffle(perm);
        null_stats[static_cast<std::size_t>(d)] = auroc_by_labels(scores, perm);
    }
    return summarize_null(observed, null_stats);
}

PermutationSummary permutation_test_within_pair(const std::vector<PairScores>& pairs, int draws,
                                                const RandomSource& rng) {
    if (pairs.empty()) throw Error(ErrorKind::EmptyPairs, "no pairs to permute");
    std::vector<double> pos, neg;
    for (const auto& p : pairs) {
        pos.push_back(p.positive);
        neg.push_back(p.control);
    }
    const double observed = auroc(pos, neg);
    std::vector<double> null_stats(static_cast<std::size_t>(draws));
    for (int d = 0; d < draws; ++d) {
        Substream stream = rng.substream(static_cast<std::uint64_t>(d));
        std::vector<double> p2 = pos, n2 = neg;
        for (std::size_t i = 0; i < pairs.size(); ++i)
            if (stream.next_u64() & 1) std::swap(p2[i], n2[i]);
        null_stats[static_cast<std::size_t>(d)] = auroc(p2, n2);
    }
    return summarize_null(observed, null_stats);
}

Interval bootstrap_ci(const std::function<double(const std::vector<double>&)>& metric,
                      const std::vector<double>& sample, int resamples, const RandomSource& rng,
                      double level) {
    if (sample.empty()) throw Error(ErrorKind::EmptySample, "bootstrap needs a non-empty sample");
    std::vector<double> stats(static_cast<std::size_t>(resamples));
    std::vector<double> draw(sample.size());
    for (int r = 0; r < resamples; ++r) {
        Substream stream = rng.substream(static_cast<std::uint64_t>(r));
        for (auto& v : draw) v = sample[stream.next_below(sample.size())];
        stats[static_cast<std::size_t>(r)] = metric(draw);
    }
    const double alpha = (1.0 - level) / 2.0;
    return {quantile(stats, alpha), quantile(stats, 1.0 - alpha)};
}

Interval bootstrap_auroc_ci(const std::vector<double>& pos_scores,
                            const std::vector<double>& neg_scores, int resamples,
                            const RandomSource& rng, double level) {
    if (pos_scores.empty() || neg_scores.empty())
        throw Error(ErrorKind::EmptySide, "auroc bootstrap needs scores on both sides");
    std::vector<double> stats(static_cast<std::size_t>(resamples));
    std::vector<double> pos(pos_scores.size()), neg(neg_scores.size());
    for (int r = 0; r < resamples; ++r) {
        Substream stream = rng.substream(static_cast<std::uint64_t>(r));
        for (auto& v : pos) v = pos_scores[stream.next_below(pos_scores.size())];
        for (auto& v : neg) v = neg_scores[stream.next_below(neg_scores.size())];
        stats[static_cast<std::size_t>(r)] = auroc(pos, neg);
    }
    const double alpha = (1.0 - level) / 2.0;
    return {quantile(stats, alpha), quantile(stats, 1.0 - alpha)};
}

PanelSummaryStats panel_summary(const Panel& panel, const ScoreTable& table, double threshold) {
    PanelSummaryStats out;
    std::size_t positives = 0, detected_positives = 0;
    std::size_t tp = 0, fp = 0;
    std::vector<double> leads;
    for (const auto& item : panel.items) {
        auto score_it = table.scores.find(item.item_id);
        if (score_it == table.scores.end())
            throw Error(ErrorKind::ChannelMismatch, "score table misses item " + item.item_id);
        const bool predicted = score_it->second >= threshold;
        if (item.label == Label::positive) {
            ++positives;
            bool detected = false;
            std::optional<int> earliest;
            for (const auto& [name, ev] : item.channels) {
                if (!ev.detected) continue;
                detected = true;
                if (ev.first_signal_year &&
                    (!earliest || *ev.first_signal_year < *earliest))
                    earliest = ev.first_signal_year;
            }
            if (panel.channels.empty() && item.kuhn_summary) {
                detected = item.kuhn_summary->detected;
                if (detected) leads.push_back(item.kuhn_summary->lead_years);
            } else if (detected) {
                leads.push_back(earliest ? static_cast<double>(item.recognition_year - *earliest)
                                         : 0.0);
            }
            if (detected) ++detected_positives;
            if (predicted) ++tp;
        } else if (predicted) {
            ++fp;
        }
    }
    if (positives == 0) throw Error(ErrorKind::NoPositives, "panel has no positive items");

    out.median_lead_years = leads.empty() ? 0.0 : median(leads);
    out.detection_rate = static_cast<double>(detected_positives) / positives;
    if (tp + fp == 0) {
        out.precision_at_threshold = 0.0;
        out.warnings.push_back("no item scores at or above the threshold; precision reported as 0");
    } else {
        out.precision_at_threshold = static_cast<double>(tp) / (tp + fp);
    }

    // ECE over 10 equal-width bins of min-max rescaled scores.
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto& item : panel.items) {
        const double s = table.scores.at(item.item_id);
        if (first) {
            lo = hi = s;
            first = false;
        } else {
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
    }
    std::array<double, 10> conf_sum{}, pos_sum{};
    std::array<std::size_t, 10> count{};
    for (const auto& item : panel.items) {
        const double s = table.scores.at(item.item_id);
        const double r = hi > lo ? (s - lo) / (hi - lo) : 0.5;
        const auto bin = std::min<std::size_t>(9, static_cast<std::size_t>(r * 10.0));
        conf_sum[bin] += r;
        pos_sum[bin] += item.label == Label::positive ? 1.0 : 0.0;
        ++count[bin];
    }
    double ece = 0.0;
    const double n = static_cast<double>(panel.items.size());
    for (std::size_t b = 0; b < 10; ++b) {
        if (!count[b]) continue;
        const double conf = conf_sum[b] / count[b];
        const double acc = pos_sum[b] / count[b];
        ece += (count[b] / n) * std::abs(acc - conf);
    }
    out.calibration_error = ece;
    return out;
}

namespace {

void fill_from_table(EvaluationReport& report, const Panel& panel, const ScoreTable& table,
                     const StatsConfig& config) {
    std::vector<double> pos, neg, scores;
    std::vector<bool> labels;
    for (const auto& item : panel.items) {
        const double s = table.scores.at(item.item_id);
        scores.push_back(s);
        labels.push_back(item.label == Label::positive);
        (item.label == Label::positive ? pos : neg).push_back(s);
    }
    report.auroc = auroc(pos, neg);
    report.matched_pair_accuracy = provbench::matched_pair_accuracy(table.pairs);

    const RandomSource base(config.seed, "eval/" + table.arm);
    const PermutationSummary perm =
        config.paired_permutation
            ? permutation_test_within_pair(table.pairs, config.permutation_draws,
                                           base.fork("permutation"))
            : permutation_test(scores, labels, config.permutation_draws,
                               base.fork("permutation"));
    report.permutation_p = perm.p;
    report.permutation_draws = perm.draws;
    report.bootstrap_ci = bootstrap_auroc_ci(pos, neg, config.bootstrap_resamples,
                                             base.fork("bootstrap"), config.ci_level);
    report.seed = config.seed;

    const PanelSummaryStats summary = panel_summary(panel, table, config.threshold);
    report.median_lead_years = summary.median_lead_years;
    report.detection_rate = summary.detection_rate;
    report.precision_at_threshold = summary.precision_at_threshold;
    report.calibration_error = summary.calibration_error;
    report.warnings = summary.warnings;
}

// Weight grid {0, 0.25, 0.5, 0.75, 1}^5 normalized to sum 1, all-zero
// skipped; enumeration order is lexicographic, which fixes tie-breaking.
const std::vector<std::array<double, 5>>& kuhn_grid() {
    static const std::vector<std::array<double, 5>> grid = [] {
        std::vector<std::array<double, 5>> out;
        const std::array<double, 5> steps = {0.0, 0.25, 0.5, 0.75, 1.0};
        for (double a : steps)
            for (double b : steps)
                for (double c : steps)
                    for (double d : steps)
                        for (double e : steps) {
                            const double sum = a + b + c + d + e;
                            if (sum == 0.0) continue;
                            out.push_back({a / sum, b / sum, c / sum, d / sum, e / sum});
                        }
        return out;
    }();
    return grid;
}

double dot5(const std::array<double, 5>& w, const std::array<double, 5>& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < 5; ++i) s += w[i] * x[i];
    return s;
}

// Midpoint between consecutive distinct sorted scores that best splits the
// training items; first best split wins when accuracy ties.
double best_split_threshold(const std::vector<double>& pos, const std::vector<double>& neg) {
    std::vector<double> all = pos;
    all.insert(all.end(), neg.begin(), neg.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    if (all.size() < 2) return all.empty() ? 0.0 : all.front();

    double best_threshold = 0.5 * (all[0] + all[1]);
    std::size_t best_correct = 0;
    bool first = true;
    for (std::size_t i = 0; i + 1 < all.size(); ++i) {
        const double threshold = 0.5 * (all[i] + all[i + 1]);
        std::size_t correct = 0;
        for (double p : pos) correct += p >= threshold ? 1 : 0;
        for (double n : neg) correct += n < threshold ? 1 : 0;
        if (first || correct > best_correct) {
            best_correct = correct;
            best_threshold = threshold;
            first = false;
        }
    }
    return best_threshold;
}

} // namespace

EvaluationReport evaluate_score_table(const Panel& panel, const ScoreTable& table,
                                      const StatsConfig& config) {
    EvaluationReport report;
    report.arm = table.arm;
    fill_from_table(report, panel, table, config);
    return report;
}

EvaluationReport lopo_evaluate(const Panel& panel, const ComparatorArm& arm, SelectionRule rule,
                               const StatsConfig& config) {
    if (panel.n_pairs < 2)
        throw Error(ErrorKind::TooFewPairs, "leave-one-pair-out needs at least 2 pairs");

    std::map<std::string, std::pair<const PanelItem*, const PanelItem*>> pairs;
    for (const auto& item : panel.items) {
        auto& entry = pairs[item.pair_id];
        (item.label == Label::positive ? entry.first : entry.second) = &item;
    }

    EvaluationReport report;
    report.arm = arm_label(arm);

    ScoreTable pooled;
    pooled.panel_id = panel.panel_id;
    pooled.arm = report.arm + "/lopo";

    if (rule == SelectionRule::fixed) {
        const ScoreTable whole = apply_arm(panel, arm, config.weights);
        for (const auto& [pair_id, members] : pairs) {
            FoldRecord fold;
            fold.pair_id = pair_id;
            std::vector<double> train_pos, train_neg;
            for (const auto& [other_id, other] : pairs) {
                if (other_id == pair_id) continue;
                train_pos.push_back(whole.scores.at(other.first->item_id));
                train_neg.push_back(whole.scores.at(other.second->item_id));
            }
            fold.threshold = best_split_threshold(train_pos, train_neg);
            fold.positive_score = whole.scores.at(members.first->item_id);
            fold.control_score = whole.scores.at(members.second->item_id);
            pooled.scores[members.first->item_id] = fold.positive_score;
            pooled.scores[members.second->item_id] = fold.control_score;
            pooled.pairs.push_back({pair_id, fold.positive_score, fold.control_score});
            report.fold_log.push_back(std::move(fold));
        }
    } else {
        std::map<std::string, std::array<double, 5>> features;
        for (const auto& item : panel.items) features[item.item_id] = kuhn_features(item);

        for (const auto& [pair_id, members] : pairs) {
            const std::array<double, 5>* best = nullptr;
            double best_auroc = -1.0;
            for (const auto& candidate : kuhn_grid()) {
                std::vector<double> train_pos, train_neg;
                for (const auto& [other_id, other] : pairs) {
                    if (other_id == pair_id) continue;
                    train_pos.push_back(dot5(candidate, features.at(other.first->item_id)));
                    train_neg.push_back(dot5(candidate, features.at(other.second->item_id)));
                }
                const double a = auroc(train_pos, train_neg);
                if (a > best_auroc) {
                    best_auroc = a;
                    best = &candidate;
                }
            }
            FoldRecord fold;
            fold.pair_id = pair_id;
            fold.weights.assign(best->begin(), best->end());
            std::vector<double> train_pos, train_neg;
            for (const auto& [other_id, other] : pairs) {
                if (other_id == pair_id) continue;
                train_pos.push_back(dot5(*best, features.at(other.first->item_id)));
                train_neg.push_back(dot5(*best, features.at(other.second->item_id)));
            }
            fold.threshold = best_split_threshold(train_pos, train_neg);
            fold.positive_score = dot5(*best, features.at(members.first->item_id));
            fold.control_score = dot5(*best, features.at(members.second->item_id));
            pooled.scores[members.first->item_id] = fold.positive_score;
            pooled.scores[members.second->item_id] = fold.control_score;
            pooled.pairs.push_back({pair_id, fold.positive_score, fold.control_score});
            report.fold_log.push_back(std::move(fold));
        }
    }

    fill_from_table(report, panel, pooled, config);
    return report;
}

Json report_to_json(const EvaluationReport& report) {
    Json doc = Json::object();
    doc["arm"] = report.arm;
    doc["auroc"] = report.auroc;
    doc["matched_pair_accuracy"] = report.matched_pair_accuracy;
    doc["median_lead_years"] = report.median_lead_years;
    doc["detection_rate"] = report.detection_rate;
    doc["precision_at_threshold"] = report.precision_at_threshold;
    doc["calibration_error"] = report.calibration_error;
    doc["permutation_p"] = report.permutation_p;
    doc["permutation_draws"] = report.permutation_draws;
    doc["bootstrap_ci"] = Json::array({report.bootstrap_ci.lo, report.bootstrap_ci.hi});
    doc["seed"] = report.seed;
    Json folds = Json::array();
    for (const auto& fold : report.fold_log) {
        Json f = Json::object();
        f["pair_id"] = fold.pair_id;
        f["weights"] = fold.weights;
        f["threshold"] = fold.threshold;
        f["positive_score"] = fold.positive_score;
        f["control_score"] = fold.control_score;
        folds.push_back(f);
    }
    doc["fold_log"] = folds;
    doc["warnings"] = report.warnings;
    return doc;
}

EvaluationReport report_from_json(const Json& doc) {
    EvaluationReport report;
    try {
        report.arm = doc.at("arm").get<std::string>();
        report.auroc = doc.at("auroc").get<double>();
        report.matched_pair_accuracy = doc.at("matched_pair_accuracy").get<double>();
        report.median_lead_years = doc.at("median_lead_years").get<double>();
        report.detection_rate = doc.at("detection_rate").get<double>();
        report.precision_at_threshold = doc.at("precision_at_threshold").get<double>();
        report.calibration_error = doc.at("calibration_error").get<double>();
        report.permutation_p = doc.at("permutation_p").get<double>();
        report.permutation_draws = doc.at("permutation_draws").get<int>();
        report.bootstrap_ci.lo = doc.at("bootstrap_ci").at(0).get<double>();
        report.bootstrap_ci.hi = doc.at("bootstrap_ci").at(1).get<double>();
        report.seed = doc.at("seed").get<std::uint64_t>();
        for (const auto& f : doc.at("fold_log")) {
            FoldRecord fold;
            fold.pair_id = f.at("pair_id").get<std::string>();
            fold.weights = f.at("weights").get<std::vector<double>>();
            fold.threshold = f.at("threshold").get<double>();
            fold.positive_score = f.at("positive_score").get<double>();
            fold.control_score = f.at("control_score").get<double>();
            report.fold_log.push_back(std::move(fold));
        }
        report.warnings = doc.at("warnings").get<std::vector<std::string>>();
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::SchemaError, std::string("malformed report: ") + e.what());
    }
    return report;
}

std::string report_csv_header() {
    return "arm,auroc,matched_pair_accuracy,median_lead_years,detection_rate,"
           "precision_at_threshold,calibration_error,permutation_p,permutation_draws,"
           "ci_lo,ci_hi,seed";
}

std::string report_csv_row(const EvaluationReport& report) {
    std::ostringstream out;
    out << report.arm << ',' << canonical_number(report.auroc) << ','
        << canonical_number(report.matched_pair_accuracy) << ','
        << canonical_number(report.median_lead_years) << ','
        << canonical_number(report.detection_rate) << ','
        << canonical_number(report.precision_at_threshold) << ','
        << canonical_number(report.calibration_error) << ','
        << canonical_number(report.permutation_p) << ',' << report.permutation_draws << ','
        << canonical_number(report.bootstrap_ci.lo) << ','
        << canonical_number(report.bootstrap_ci.hi) << ',' << report.seed;
    return out.str();
}

} // namespace provbench
