#pragma once

#include <cstddef>
#include <vector>

#include "context.hpp"
#include "miner.hpp"
#include "rules.hpp"
#include "scorer.hpp"

namespace rarm {

// Comparison detectors over the same binary context. Each returns a ranking
// covering every object, most anomalous first.

/// Frequent-pattern outlier factor: mean relative support of the frequent
/// itemsets (|X| <= max_len) contained in each object. Low means anomalous.
inline Ranking fpof(const Context& c, AbsSupport min_supp, std::size_t max_len = 5) {
    const MinedSet frequent = frequent_itemsets(c, min_supp, max_len);
    Ranking r;
    r.detector = Detector::fpof;
    r.polarity = Polarity::low_is_anomalous;
    r.degenerate = frequent.empty();

    std::vector<double> sums(c.m(), 0.0);
    const double m = static_cast<double>(c.m());
    for (const auto& f : frequent) {
        const double rel = static_cast<double>(f.support_abs) / m;
        for (Tid t : support_set(c, f.itemset)) sums[t] += rel;
    }
    for (Tid t = 0; t < c.m(); ++t) {
        const double score = frequent.empty() ? 0.0 : sums[t] / static_cast<double>(frequent.size());
        r.entries.push_back(ScoredObject{t, score, {}});
    }
    sort_entries(r.entries, c, r.polarity);
    return r;
}

inline Ranking fpof(const Context& c, Percent min_supp, std::size_t max_len = 5) {
    return fpof(c, absolute_threshold(min_supp, c.m()), max_len);
}

/// Attribute value frequency over the presence/absence matrix: mean over items
/// of the frequency of the object's value for that item. Low means anomalous.
inline Ranking avf(const Context& c) {
    if (c.n() == 0) throw ConfigError("avf needs at least one item");
    Ranking r;
    r.detector = Detector::avf;
    r.polarity = Polarity::low_is_anomalous;

    const double m = static_cast<double>(c.m());
    // Start every object at the all-absent total and correct for present items.
    double absent_total = 0.0;
    std::vector<double> present_freq(c.n()), absent_freq(c.n());
    for (ItemId i = 0; i < c.n(); ++i) {
        present_freq[i] = static_cast<double>(c.column(i).size()) / m;
        absent_freq[i] = 1.0 - present_freq[i];
        absent_total += absent_freq[i];
    }
    for (Tid t = 0; t < c.m(); ++t) {
        double s = absent_total;
        for (ItemId i : c.object(t)) s += present_freq[i] - absent_freq[i];
        r.entries.push_back(ScoredObject{t, s / static_cast<double>(c.n()), {}});
    }
    sort_entries(r.entries, c, r.polarity);
    return r;
}

/// Outlier degree: confidence-weighted share of applicable frequent rules the
/// object violates, sum(conf of violated) / max(1, #applicable). High means anomalous.
inline Ranking od(const Context& c, AbsSupport min_supp, Percent min_conf, std::size_t max_len = 4) {
    const RuleSet rules = get_freq_rules(c, min_supp, min_conf, max_len);
    Ranking r;
    r.detector = Detector::od;
    r.polarity = Polarity::high_is_anomalous;
    r.degenerate = rules.empty();
    for (Tid t = 0; t < c.m(); ++t) {
        const Itemset& obj = c.object(t);
        double violated = 0.0;
        std::size_t applicable = 0;
        for (const auto& rule : rules.rules) {
            if (!obj.includes(rule.antecedent)) continue;
            ++applicable;
            if (!obj.includes(rule.consequent)) violated += rule.confidence;
        }
        const double denom = applicable == 0 ? 1.0 : static_cast<double>(applicable);
        r.entries.push_back(ScoredObject{t, violated / denom, {}});
    }
    sort_entries(r.entries, c, r.polarity);
    return r;
}

inline Ranking od(const Context& c, Percent min_supp, Percent min_conf, std::size_t max_len = 4) {
    return od(c, absolute_threshold(min_supp, c.m()), min_conf, max_len);
}

} // namespace rarm
