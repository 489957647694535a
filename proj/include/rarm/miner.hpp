#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <unordered_set>
#include <utility>
#include <vector>

#include "bitmap.hpp"
#include "context.hpp"
#include "error.hpp"
#include "idset.hpp"

namespace rarm {

struct MinedItemset {
    Itemset itemset;
    std::size_t support_abs = 0;
    std::optional<Tidset> support_set;

    friend bool operator==(const MinedItemset& a, const MinedItemset& b) {
        return a.itemset == b.itemset && a.support_abs == b.support_abs;
    }
};

/// Mined itemsets in ascending lexicographic itemset order.
using MinedSet = std::vector<MinedItemset>;

inline constexpr std::size_t unbounded_length = std::numeric_limits<std::size_t>::max();

struct MinerParams {
    SupportThresholds thresholds;
    std::size_t max_len = 4;

    void validate() const {
        thresholds.validate();
        if (max_len < 2) throw ConfigError("max_len must be at least 2");
    }
};

namespace detail {

inline void canonicalize(MinedSet& s) {
    std::sort(s.begin(), s.end(), [](const MinedItemset& a, const MinedItemset& b) { return a.itemset < b.itemset; });
}

inline void require_positive(AbsSupport t, const char* name) {
    if (t.value < 1) throw ConfigError(std::string(name) + " must be at least 1");
}

struct EclatNode {
    ItemId item;
    Bitmap tids;
    std::size_t support;
};

inline void eclat(std::vector<ItemId>& prefix, const std::vector<EclatNode>& siblings, std::size_t min_supp,
                  std::size_t max_len, MinedSet& out) {
    for (std::size_t k = 0; k < siblings.size(); ++k) {
        prefix.push_back(siblings[k].item);
        out.push_back(MinedItemset{Itemset::from_sorted(prefix), siblings[k].support, std::nullopt});
        if (prefix.size() < max_len) {
            std::vector<EclatNode> children;
            for (std::size_t j = k + 1; j < siblings.size(); ++j) {
                const std::size_t s = intersection_count(siblings[k].tids, siblings[j].tids);
                if (s >= min_supp) children.push_back(EclatNode{siblings[j].item, siblings[k].tids & siblings[j].tids, s});
            }
            if (!children.empty()) eclat(prefix, children, min_supp, max_len, out);
        }
        prefix.pop_back();
    }
}

} // namespace detail

/// Every non-empty itemset with absolute support >= `min_supp`, optionally
/// capped at `max_len` items.
inline MinedSet frequent_itemsets(const Context& c, AbsSupport min_supp, std::size_t max_len = unbounded_length) {
    detail::require_positive(min_supp, "min_supp");
    MinedSet out;
    if (max_len == 0) return out;
    std::vector<detail::EclatNode> roots;
    for (ItemId i = 0; i < c.n(); ++i) {
        const auto& col = c.column(i);
        if (col.size() >= min_supp.value) roots.push_back(detail::EclatNode{i, Bitmap::from_tidset(col, c.m()), col.size()});
    }
    std::vector<ItemId> prefix;
    detail::eclat(prefix, roots, min_supp.value, max_len, out);
    detail::canonicalize(out);
    return out;
}

/// Frequent itemsets without a frequent strict superset. Because frequency is
/// downward closed it is enough to test single-item extensions.
inline MinedSet maximal_frequent_itemsets(const Context& c, AbsSupport min_supp) {
    MinedSet frequent = frequent_itemsets(c, min_supp);
    std::unordered_set<Itemset> index;
    index.reserve(frequent.size() * 2);
    for (const auto& f : frequent) index.insert(f.itemset);

    MinedSet out;
    for (auto& f : frequent) {
        bool maximal = true;
        for (ItemId i = 0; i < c.n() && maximal; ++i) {
            if (f.itemset.contains(i)) continue;
            if (index.count(f.itemset.with(i))) maximal = false;
        }
        if (maximal) out.push_back(std::move(f));
    }
    return out;
}

/// Minimal rare itemsets: support < `max_supp` with every strict non-empty
/// subset at support >= `max_supp`. Computed level by level (Apriori-Rare):
/// a candidate whose subsets are all frequent is either frequent or minimal rare.
/// Zero-support itemsets qualify when minimal.
inline MinedSet minimal_rare_itemsets(const Context& c, AbsSupport max_supp) {
    detail::require_positive(max_supp, "max_supp");
    MinedSet out;
    struct Entry {
        Itemset itemset;
        Bitmap tids;
    };
    std::vector<Entry> level;
    for (ItemId i = 0; i < c.n(); ++i) {
        const auto& col = c.column(i);
        if (col.size() < max_supp.value) {
            out.push_back(MinedItemset{Itemset{i}, col.size(), std::nullopt});
        } else {
            level.push_back(Entry{Itemset{i}, Bitmap::from_tidset(col, c.m())});
        }
    }

    while (level.size() > 1) {
        std::sort(level.begin(), level.end(), [](const Entry& a, const Entry& b) { return a.itemset < b.itemset; });
        std::unordered_set<Itemset> frequent;
        frequent.reserve(level.size() * 2);
        for (const auto& e : level) frequent.insert(e.itemset);

        const std::size_t k = level.front().itemset.size();
        std::vector<Entry> next;
        for (std::size_t a = 0; a < level.size(); ++a) {
            const auto& lhs = level[a].itemset.vec();
            for (std::size_t b = a + 1; b < level.size(); ++b) {
                const auto& rhs = level[b].itemset.vec();
                if (!std::equal(lhs.begin(), lhs.end() - 1, rhs.begin())) break;
                Itemset cand = level[a].itemset.with(rhs.back());
                bool all_frequent = true;
                // Dropping either of the last two items gives the two parents.
                for (std::size_t drop = 0; drop + 2 <= k && all_frequent; ++drop) {
                    std::vector<ItemId> sub;
                    sub.reserve(k);
                    for (std::size_t p = 0; p < cand.size(); ++p) {
                        if (p != drop) sub.push_back(cand[p]);
                    }
                    all_frequent = frequent.count(Itemset::from_sorted(std::move(sub))) > 0;
                }
                if (!all_frequent) continue;
                Bitmap tids = level[a].tids & level[b].tids;
                const std::size_t s = tids.count();
                if (s < max_supp.value) {
                    out.push_back(MinedItemset{std::move(cand), s, std::nullopt});
                } else {
                    next.push_back(Entry{std::move(cand), std::move(tids)});
                }
            }
        }
        level = std::move(next);
    }
    detail::canonicalize(out);
    return out;
}

/// Rare itemsets above the minimal rare border: every X with
/// 0 < supp(X) < `max_supp`, |X| <= `max_len`, X a superset of some MRI.
/// Grown upward from the non-empty MRIs using the rows of their (small)
/// support sets; support sets are cached on the results.
inline MinedSet expand_rare(const Context& c, const MinedSet& mris, AbsSupport max_supp, std::size_t max_len) {
    detail::require_positive(max_supp, "max_supp");
    MinedSet out;
    std::unordered_set<Itemset> visited;
    std::vector<std::pair<Itemset, Tidset>> stack;
    for (const auto& mri : mris) {
        if (mri.itemset.empty() || mri.itemset.size() > max_len) continue;
        Tidset tids = mri.support_set ? *mri.support_set : support_set(c, mri.itemset);
        if (tids.empty() || tids.size() >= max_supp.value) continue;
        if (visited.insert(mri.itemset).second) stack.emplace_back(mri.itemset, std::move(tids));
    }

    std::vector<std::size_t> counts(c.n(), 0);
    std::vector<ItemId> touched;
    while (!stack.empty()) {
        auto [x, tids] = std::move(stack.back());
        stack.pop_back();
        if (x.size() < max_len) {
            touched.clear();
            for (Tid t : tids) {
                for (ItemId i : c.object(t)) {
                    if (counts[i]++ == 0) touched.push_back(i);
                }
            }
            std::sort(touched.begin(), touched.end());
            for (ItemId i : touched) {
                counts[i] = 0;
                if (x.contains(i)) continue;
                Itemset child = x.with(i);
                if (!visited.insert(child).second) continue;
                std::vector<Tid> sub;
                for (Tid t : tids) {
                    if (c.object(t).contains(i)) sub.push_back(t);
                }
                stack.emplace_back(std::move(child), Tidset::from_sorted(std::move(sub)));
            }
        }
        const std::size_t s = tids.size();
        out.push_back(MinedItemset{std::move(x), s, std::move(tids)});
    }
    detail::canonicalize(out);
    return out;
}

} // namespace rarm
