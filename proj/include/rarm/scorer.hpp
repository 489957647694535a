#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "context.hpp"
#include "csv.hpp"
#include "error.hpp"
#include "rules.hpp"

namespace rarm {

enum class InterestMode { lift_normalized, literal };
enum class Aggregation { sum, mean };
enum class MatchMode { satisfied_rare, violated_frequent };
enum class Detector { vr_arm, vf_arm, fpof, avf, od };
enum class Polarity { high_is_anomalous, low_is_anomalous };

inline std::string_view to_string(Detector d) {
    switch (d) {
    case Detector::vr_arm: return "vr-arm";
    case Detector::vf_arm: return "vf-arm";
    case Detector::fpof: return "fpof";
    case Detector::avf: return "avf";
    case Detector::od: return "od";
    }
    return "?";
}

struct MatchRecord {
    std::size_t rule = 0; ///< index into the RuleSet the ranking was scored with
    MatchMode mode = MatchMode::satisfied_rare;
    double weight = 0.0;
};

struct ScoredObject {
    Tid tid = 0;
    double score = 0.0;
    std::vector<MatchRecord> matches;
};

struct Ranking {
    std::vector<ScoredObject> entries; ///< most anomalous first
    Detector detector = Detector::vr_arm;
    Polarity polarity = Polarity::high_is_anomalous;
    bool degenerate = false; ///< detector had nothing to score with (e.g. no frequent patterns)
};

struct ScoringOptions {
    Aggregation aggregation = Aggregation::sum;
    InterestMode interest = InterestMode::lift_normalized;
};

/// Rare rule satisfied: all of its items are in the object.
inline bool matches_rare(const Itemset& obj, const Rule& r) {
    if (r.kind != RuleKind::rare) throw ContractError("matches_rare needs a rare rule");
    return obj.includes(r.antecedent) && obj.includes(r.consequent);
}

/// Frequent rule violated: antecedent present, consequent not fully present.
inline bool violates_freq(const Itemset& obj, const Rule& r) {
    if (r.kind != RuleKind::frequent) throw ContractError("violates_freq needs a frequent rule");
    return obj.includes(r.antecedent) && !obj.includes(r.consequent);
}

inline constexpr double lift_floor = 0x1p-30;
inline constexpr double lift_ceiling = 0x1p30;

/// |log2(1 - Interest)| * Length.
///
/// lift_normalized takes Interest = 1 - 1/lift, so the weight is
/// |log2(lift)| * Length with lift clamped to [2^-30, 2^30]. literal takes
/// Interest = lift and is only defined for lift < 1.
inline double rule_weight(const Rule& r, InterestMode mode) {
    const double length = static_cast<double>(r.length());
    if (mode == InterestMode::literal) {
        const double one_minus = 1.0 - r.lift;
        if (!(one_minus > 0.0)) {
            throw UndefinedMetricError("literal interest weight undefined for lift " + csv::format_double(r.lift));
        }
        return std::abs(std::log2(one_minus) * length);
    }
    const double lift = std::clamp(r.lift, lift_floor, lift_ceiling);
    return std::abs(std::log2(lift)) * length;
}

/// Orders entries most anomalous first; ties by ascending object name.
inline void sort_entries(std::vector<ScoredObject>& entries, const Context& c, Polarity polarity) {
    std::sort(entries.begin(), entries.end(), [&](const ScoredObject& a, const ScoredObject& b) {
        if (a.score != b.score) return polarity == Polarity::high_is_anomalous ? a.score > b.score : a.score < b.score;
        return c.tid_name(a.tid) < c.tid_name(b.tid);
    });
}

/// Matches every object against every rule; only objects with at least one
/// match are kept.
inline Ranking score_objects(const Context& c, const RuleSet& rules, MatchMode mode, const ScoringOptions& opts,
                             Detector detector) {
    std::vector<double> weights;
    weights.reserve(rules.size());
    for (const auto& r : rules.rules) weights.push_back(rule_weight(r, opts.interest));

    Ranking ranking;
    ranking.detector = detector;
    ranking.polarity = Polarity::high_is_anomalous;
    for (Tid t = 0; t < c.m(); ++t) {
        const Itemset& obj = c.object(t);
        ScoredObject so{t, 0.0, {}};
        for (std::size_t j = 0; j < rules.size(); ++j) {
            const Rule& r = rules.rules[j];
            const bool hit = mode == MatchMode::satisfied_rare ? matches_rare(obj, r) : violates_freq(obj, r);
            if (!hit) continue;
            so.matches.push_back(MatchRecord{j, mode, weights[j]});
            so.score += weights[j];
        }
        if (so.matches.empty()) continue;
        if (opts.aggregation == Aggregation::mean) so.score /= static_cast<double>(so.matches.size());
        ranking.entries.push_back(std::move(so));
    }
    sort_entries(ranking.entries, c, ranking.polarity);
    return ranking;
}

struct Detection {
    RuleSet rules;
    Ranking ranking;
};

/// Scores objects by the valid rare rules they satisfy.
inline Detection vr_arm(const Context& c, AbsSupport max_supp, Percent min_conf, std::size_t max_len,
                        const ScoringOptions& opts = {}) {
    Detection d;
    d.rules = get_rare_rules(c, max_supp, min_conf, max_len);
    d.ranking = score_objects(c, d.rules, MatchMode::satisfied_rare, opts, Detector::vr_arm);
    return d;
}

inline Detection vr_arm(const Context& c, Percent max_supp, Percent min_conf, std::size_t max_len,
                        const ScoringOptions& opts = {}) {
    Detection d;
    d.rules = get_rare_rules(c, max_supp, min_conf, max_len);
    d.ranking = score_objects(c, d.rules, MatchMode::satisfied_rare, opts, Detector::vr_arm);
    return d;
}

/// Scores objects by the valid frequent rules they violate.
inline Detection vf_arm(const Context& c, AbsSupport min_supp, Percent min_conf, std::size_t max_len,
                        const ScoringOptions& opts = {}) {
    Detection d;
    d.rules = get_freq_rules(c, min_supp, min_conf, max_len);
    d.ranking = score_objects(c, d.rules, MatchMode::violated_frequent, opts, Detector::vf_arm);
    return d;
}

inline Detection vf_arm(const Context& c, Percent min_supp, Percent min_conf, std::size_t max_len,
                        const ScoringOptions& opts = {}) {
    Detection d;
    d.rules = get_freq_rules(c, min_supp, min_conf, max_len);
    d.ranking = score_objects(c, d.rules, MatchMode::violated_frequent, opts, Detector::vf_arm);
    return d;
}

/// Appends every object missing from `r` with score 0, ordered by name, so the
/// ranking covers the whole context.
inline Ranking complete_ranking(Ranking r, const Context& c) {
    std::vector<char> present(c.m(), 0);
    for (const auto& e : r.entries) present.at(e.tid) = 1;
    std::vector<ScoredObject> rest;
    for (Tid t = 0; t < c.m(); ++t) {
        if (!present[t]) rest.push_back(ScoredObject{t, 0.0, {}});
    }
    std::sort(rest.begin(), rest.end(),
              [&](const ScoredObject& a, const ScoredObject& b) { return c.tid_name(a.tid) < c.tid_name(b.tid); });
    r.entries.insert(r.entries.end(), std::make_move_iterator(rest.begin()), std::make_move_iterator(rest.end()));
    return r;
}

inline std::string render_rule(const Rule& r, const Context& c) {
    return join_item_names(c, r.antecedent, ", ") + " → " + join_item_names(c, r.consequent, ", ");
}

/// Human readable justification of one ranking entry.
inline std::string explain(const ScoredObject& entry, const RuleSet& rules, const Context& c) {
    std::ostringstream out;
    out << c.tid_name(entry.tid) << "  score=" << csv::format_fixed(entry.score, 4) << '\n';
    if (entry.matches.empty()) {
        out << "  no matched rules\n";
        return out.str();
    }
    struct Line {
        double weight;
        std::string text;
    };
    std::vector<Line> lines;
    for (const auto& m : entry.matches) {
        const Rule& r = rules.rules.at(m.rule);
        std::string text = render_rule(r, c);
        text += " (supp=" + std::to_string(r.support_abs) + ", conf=" + csv::format_fixed(r.confidence, 4) +
                ", lift=" + csv::format_fixed(r.lift, 4) + ", weight=" + csv::format_fixed(m.weight, 4) + ")";
        lines.push_back(Line{m.weight, std::move(text)});
    }
    std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        return a.text < b.text;
    });
    out << "  " << (entry.matches.front().mode == MatchMode::satisfied_rare ? "satisfied rare rules" : "violated frequent rules")
        << ": " << lines.size() << '\n';
    for (const auto& l : lines) out << "  " << l.text << '\n';
    return out.str();
}

/// Ranking CSV. Rule-based detectors: rank,tid,score,n_matched_rules. Baselines
/// add a trailing detector column.
inline void write_ranking_csv(std::ostream& out, const Ranking& r, const Context& c) {
    const bool with_detector = r.detector != Detector::vr_arm && r.detector != Detector::vf_arm;
    out << "rank,tid,score,n_matched_rules" << (with_detector ? ",detector" : "") << '\n';
    std::size_t rank = 1;
    for (const auto& e : r.entries) {
        out << rank++ << ',' << csv::escape(c.tid_name(e.tid)) << ',' << csv::format_double(e.score) << ','
            << e.matches.size();
        if (with_detector) out << ',' << to_string(r.detector);
        out << '\n';
    }
}

} // namespace rarm
