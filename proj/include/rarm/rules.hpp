#pragma once

#include <algorithm>
#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "context.hpp"
#include "csv.hpp"
#include "error.hpp"
#include "miner.hpp"

namespace rarm {

enum class RuleKind { frequent, rare };

inline std::string_view to_string(RuleKind k) { return k == RuleKind::frequent ? "frequent" : "rare"; }

struct Rule {
    Itemset antecedent;
    Itemset consequent;
    std::size_t support_abs = 0;
    double confidence = 0.0;
    double lift = 0.0;
    RuleKind kind = RuleKind::rare;

    std::size_t length() const noexcept { return antecedent.size() + consequent.size(); }
    Itemset items() const { return set_union(antecedent, consequent); }
};

struct RuleMetrics {
    std::size_t support_abs = 0;
    double confidence = 0.0;
    double lift = 0.0;
};

struct RuleSet {
    std::vector<Rule> rules; ///< ordered by (antecedent, consequent)
    MinerParams params;

    std::size_t size() const noexcept { return rules.size(); }
    bool empty() const noexcept { return rules.empty(); }
};

namespace detail {

inline RuleMetrics metrics_from_counts(std::size_t m, std::size_t joint, std::size_t ant, std::size_t cons) {
    RuleMetrics r;
    r.support_abs = joint;
    r.confidence = static_cast<double>(joint) / static_cast<double>(ant);
    // supp(XY) / (supp(X) supp(Y)) on relative supports == joint * m / (ant * cons).
    r.lift = (joint == 0 || cons == 0)
                 ? 0.0
                 : static_cast<double>(joint) * static_cast<double>(m) / (static_cast<double>(ant) * static_cast<double>(cons));
    return r;
}

/// conf >= min_conf, evaluated on the integer counts.
inline bool confident(std::size_t joint, std::size_t ant, Percent min_conf) {
    return static_cast<double>(joint) * 100.0 >= min_conf.value * static_cast<double>(ant) * (1.0 - 1e-12);
}

class SupportCache {
public:
    explicit SupportCache(const Context& c) : c_(c) {}

    std::size_t operator()(const Itemset& x) {
        auto it = cache_.find(x);
        if (it != cache_.end()) return it->second;
        const std::size_t s = support_set(c_, x).size();
        cache_.emplace(x, s);
        return s;
    }

    void seed(const Itemset& x, std::size_t s) { cache_.emplace(x, s); }

private:
    const Context& c_;
    std::unordered_map<Itemset, std::size_t> cache_;
};

inline void validate_rule_args(Percent min_conf, std::size_t max_len) {
    if (!(min_conf.value >= 0.0)) throw ConfigError("min_conf must be non-negative");
    if (max_len < 2) throw ConfigError("max_len must be at least 2");
}

/// Emits every confident split of `z` into `out`.
inline void split_rules(const Context& c, const Itemset& z, std::size_t supp_z, Percent min_conf, RuleKind kind,
                        SupportCache& supports, std::vector<Rule>& out) {
    for_each_split(z, [&](const Itemset& lhs, const Itemset& rhs) {
        const std::size_t supp_lhs = supports(lhs);
        if (!confident(supp_z, supp_lhs, min_conf)) return;
        const auto m = metrics_from_counts(c.m(), supp_z, supp_lhs, supports(rhs));
        out.push_back(Rule{lhs, rhs, m.support_abs, m.confidence, m.lift, kind});
    });
}

inline void canonicalize(std::vector<Rule>& rules) {
    auto key_less = [](const Rule& a, const Rule& b) {
        if (a.antecedent != b.antecedent) return a.antecedent < b.antecedent;
        return a.consequent < b.consequent;
    };
    std::sort(rules.begin(), rules.end(), key_less);
    rules.erase(std::unique(rules.begin(), rules.end(),
                            [](const Rule& a, const Rule& b) {
                                return a.antecedent == b.antecedent && a.consequent == b.consequent;
                            }),
                rules.end());
}

} // namespace detail

/// Support, confidence and lift of `ant -> cons`.
inline RuleMetrics rule_metrics(const Context& c, const Itemset& ant, const Itemset& cons) {
    if (ant.empty() || cons.empty()) throw ContractError("rule sides must be non-empty");
    if (intersects(ant, cons)) throw ContractError("rule sides must be disjoint");
    const std::size_t supp_ant = support_set(c, ant).size();
    if (supp_ant == 0) throw UndefinedMetricError("confidence undefined: antecedent has zero support");
    const std::size_t supp_cons = support_set(c, cons).size();
    const std::size_t joint = support_set(c, set_union(ant, cons)).size();
    return detail::metrics_from_counts(c.m(), joint, supp_ant, supp_cons);
}

/// Valid rare rules: every confident split of every rare itemset produced by
/// expand_rare above the minimal rare border.
inline RuleSet get_rare_rules(const Context& c, AbsSupport max_supp, Percent min_conf, std::size_t max_len) {
    detail::validate_rule_args(min_conf, max_len);
    RuleSet out;
    out.params.thresholds.max_supp = Percent{c.m() == 0 ? 0.0 : 100.0 * static_cast<double>(max_supp.value) / static_cast<double>(c.m())};
    out.params.thresholds.min_conf = min_conf;
    out.params.max_len = max_len;

    const MinedSet rare = expand_rare(c, minimal_rare_itemsets(c, max_supp), max_supp, max_len);
    detail::SupportCache supports(c);
    for (const auto& z : rare) supports.seed(z.itemset, z.support_abs);
    for (const auto& z : rare) detail::split_rules(c, z.itemset, z.support_abs, min_conf, RuleKind::rare, supports, out.rules);
    detail::canonicalize(out.rules);
    return out;
}

inline RuleSet get_rare_rules(const Context& c, Percent max_supp, Percent min_conf, std::size_t max_len) {
    RuleSet rs = get_rare_rules(c, absolute_threshold(max_supp, c.m()), min_conf, max_len);
    rs.params.thresholds.max_supp = max_supp;
    return rs;
}

/// Valid frequent rules: confident splits of the maximal frequent itemsets
/// having at most `max_len` items.
inline RuleSet get_freq_rules(const Context& c, AbsSupport min_supp, Percent min_conf, std::size_t max_len) {
    detail::validate_rule_args(min_conf, max_len);
    RuleSet out;
    out.params.thresholds.min_supp = Percent{c.m() == 0 ? 0.0 : 100.0 * static_cast<double>(min_supp.value) / static_cast<double>(c.m())};
    out.params.thresholds.min_conf = min_conf;
    out.params.max_len = max_len;

    detail::SupportCache supports(c);
    for (const auto& mfi : maximal_frequent_itemsets(c, min_supp)) {
        if (mfi.itemset.size() > max_len) continue;
        supports.seed(mfi.itemset, mfi.support_abs);
        detail::split_rules(c, mfi.itemset, mfi.support_abs, min_conf, RuleKind::frequent, supports, out.rules);
    }
    detail::canonicalize(out.rules);
    return out;
}

inline RuleSet get_freq_rules(const Context& c, Percent min_supp, Percent min_conf, std::size_t max_len) {
    RuleSet rs = get_freq_rules(c, absolute_threshold(min_supp, c.m()), min_conf, max_len);
    rs.params.thresholds.min_supp = min_supp;
    return rs;
}

inline std::string join_item_names(const Context& c, const Itemset& x, std::string_view sep = ";") {
    std::string out;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (k) out += sep;
        out += c.item_name(x[k]);
    }
    return out;
}

/// CSV dump: kind,antecedent,consequent,supp_abs,confidence,lift
inline void write_rules_csv(std::ostream& out, const RuleSet& rules, const Context& c) {
    out << "kind,antecedent,consequent,supp_abs,confidence,lift\n";
    for (const auto& r : rules.rules) {
        out << to_string(r.kind) << ',' << csv::escape(join_item_names(c, r.antecedent)) << ','
            << csv::escape(join_item_names(c, r.consequent)) << ',' << r.support_abs << ','
            << csv::format_double(r.confidence) << ',' << csv::format_double(r.lift) << '\n';
    }
}

/// Debug dump: `supp_abs<TAB>item1;item2;...` per line.
inline void write_itemsets(std::ostream& out, const MinedSet& sets, const Context& c) {
    for (const auto& s : sets) out << s.support_abs << '\t' << join_item_names(c, s.itemset) << '\n';
}

} // namespace rarm
