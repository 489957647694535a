#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "context.hpp"
#include "csv.hpp"
#include "error.hpp"
#include "io.hpp"
#include "json.hpp"
#include "scorer.hpp"

namespace rarm {

struct LabelSet {
    std::set<std::string> attack_tids;
    std::size_t total_objects = 0;
};

/// Ground truth restricted to `c`. Unknown names are an error unless
/// `drop_unknown` is set, in which case they are discarded.
inline LabelSet make_label_set(const std::vector<std::string>& names, const Context& c, bool drop_unknown = false) {
    LabelSet ls;
    ls.total_objects = c.m();
    for (const auto& name : names) {
        if (!c.find_tid(name)) {
            if (drop_unknown) continue;
            throw ConfigError("labelled object '" + name + "' is not in the context");
        }
        ls.attack_tids.insert(name);
    }
    return ls;
}

struct EvalReport {
    double ndcg = 0.0;
    double auc = 0.0;
    std::vector<std::size_t> attack_positions; ///< 1-based, ascending
    std::size_t n = 0;
};

/// DCG = sum rel_i / log2(i + 1) over 1-based positions.
inline double dcg(std::span<const int> relevance) {
    double s = 0.0;
    for (std::size_t i = 0; i < relevance.size(); ++i) {
        if (relevance[i]) s += static_cast<double>(relevance[i]) / std::log2(static_cast<double>(i) + 2.0);
    }
    return s;
}

/// nDCG of a binary relevance sequence with `relevant` relevant objects in
/// total (missed ones included), so the ideal puts that many 1s on top.
inline double ndcg(std::span<const int> relevance, std::size_t relevant) {
    if (relevant == 0) throw UndefinedMetricError("nDCG undefined without relevant objects");
    double ideal = 0.0;
    for (std::size_t i = 0; i < relevant; ++i) ideal += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    return dcg(relevance) / ideal;
}

/// Rank-statistic AUC with midranks for tied scores. `scores` are
/// higher-is-more-anomalous.
inline double auc(std::span<const double> scores, std::span<const int> is_attack) {
    const std::size_t n = scores.size();
    std::size_t pos = 0;
    for (int a : is_attack) pos += a ? 1 : 0;
    const std::size_t neg = n - pos;
    if (pos == 0 || neg == 0) throw UndefinedMetricError("AUC needs both attack and normal objects");

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) {
            if (is_attack[order[k]]) rank_sum += midrank;
        }
        i = j;
    }
    const double p = static_cast<double>(pos);
    return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

namespace detail {

/// Ranking entries in evaluation order: higher anomaly first, ties by name.
/// Low-is-anomalous scores are negated so both polarities share one ordering.
struct EvalView {
    std::vector<double> anomaly;
    std::vector<int> relevance;
};

inline EvalView eval_view(const Ranking& r, const Context& c, const LabelSet& labels) {
    if (labels.attack_tids.empty()) throw UndefinedMetricError("no labelled attacks");
    if (r.entries.size() != c.m()) {
        throw ConfigError("metrics need a ranking over all " + std::to_string(c.m()) + " objects, got " +
                          std::to_string(r.entries.size()));
    }
    std::vector<const ScoredObject*> order;
    order.reserve(r.entries.size());
    for (const auto& e : r.entries) order.push_back(&e);
    const double sign = r.polarity == Polarity::high_is_anomalous ? 1.0 : -1.0;
    std::stable_sort(order.begin(), order.end(), [&](const ScoredObject* a, const ScoredObject* b) {
        const double sa = sign * a->score, sb = sign * b->score;
        if (sa != sb) return sa > sb;
        return c.tid_name(a->tid) < c.tid_name(b->tid);
    });
    EvalView v;
    for (const auto* e : order) {
        v.anomaly.push_back(sign * e->score);
        v.relevance.push_back(labels.attack_tids.count(c.tid_name(e->tid)) ? 1 : 0);
    }
    return v;
}

} // namespace detail

inline double ndcg(const Ranking& r, const Context& c, const LabelSet& labels) {
    const auto v = detail::eval_view(r, c, labels);
    return ndcg(v.relevance, labels.attack_tids.size());
}

inline double auc(const Ranking& r, const Context& c, const LabelSet& labels) {
    const auto v = detail::eval_view(r, c, labels);
    return auc(v.anomaly, v.relevance);
}

inline EvalReport evaluate(const Ranking& r, const Context& c, const LabelSet& labels) {
    const auto v = detail::eval_view(r, c, labels);
    EvalReport rep;
    rep.n = v.relevance.size();
    rep.ndcg = ndcg(v.relevance, labels.attack_tids.size());
    rep.auc = auc(v.anomaly, v.relevance);
    for (std::size_t i = 0; i < v.relevance.size(); ++i) {
        if (v.relevance[i]) rep.attack_positions.push_back(i + 1);
    }
    return rep;
}

inline nlohmann::ordered_json to_json(const EvalReport& r) {
    nlohmann::ordered_json j;
    j["ndcg"] = r.ndcg;
    j["auc"] = r.auc;
    j["n"] = r.n;
    j["attack_positions"] = r.attack_positions;
    return j;
}

inline constexpr double band_width = 800.0;
inline constexpr double band_height = 40.0;

/// Horizontal band, top-ranked objects on the left, one red line per attack.
inline std::string band_diagram_svg(const EvalReport& r) {
    const double span = r.n > 1 ? static_cast<double>(r.n - 1) : 1.0;
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"40\" viewBox=\"0 0 800 40\">\n";
    out += "  <rect x=\"0\" y=\"0\" width=\"800\" height=\"40\" fill=\"#d9d9d9\"/>\n";
    for (std::size_t pos : r.attack_positions) {
        const std::string x = csv::format_double(band_width * static_cast<double>(pos - 1) / span);
        out += "  <line x1=\"" + x + "\" y1=\"0\" x2=\"" + x + "\" y2=\"40\" stroke=\"#ff0000\" stroke-width=\"1\"/>\n";
    }
    out += "  <text x=\"2\" y=\"38\" font-family=\"sans-serif\" font-size=\"8\" fill=\"#000000\">1</text>\n";
    out += "  <text x=\"798\" y=\"38\" font-family=\"sans-serif\" font-size=\"8\" fill=\"#000000\" text-anchor=\"end\">" +
           std::to_string(r.n) + "</text>\n";
    out += "</svg>\n";
    return out;
}

inline void write_band_diagram(const EvalReport& r, const std::filesystem::path& out) {
    write_file_atomic(out, band_diagram_svg(r));
}

} // namespace rarm
