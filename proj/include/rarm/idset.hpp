#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace rarm {

using ItemId = std::uint32_t;
using Tid = std::uint32_t;

/// Strictly ascending set of dense ids. The canonical form makes equality and
/// ordering structural, so sets can be used directly as map keys.
template <typename Tag>
class IdSet {
public:
    using value_type = std::uint32_t;
    using const_iterator = typename std::vector<value_type>::const_iterator;

    IdSet() = default;
    IdSet(std::initializer_list<value_type> ids) : IdSet(std::vector<value_type>(ids)) {}

    explicit IdSet(std::vector<value_type> ids) : ids_(std::move(ids)) {
        std::sort(ids_.begin(), ids_.end());
        ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
    }

    /// Adopts `ids` without sorting. Caller guarantees strict ascending order.
    static IdSet from_sorted(std::vector<value_type> ids) {
        IdSet s;
        s.ids_ = std::move(ids);
        return s;
    }

    std::size_t size() const noexcept { return ids_.size(); }
    bool empty() const noexcept { return ids_.empty(); }
    const_iterator begin() const noexcept { return ids_.begin(); }
    const_iterator end() const noexcept { return ids_.end(); }
    value_type operator[](std::size_t i) const { return ids_[i]; }
    value_type back() const { return ids_.back(); }
    std::span<const value_type> ids() const noexcept { return ids_; }
    const std::vector<value_type>& vec() const noexcept { return ids_; }

    bool contains(value_type id) const { return std::binary_search(ids_.begin(), ids_.end(), id); }

    /// True when `other` is a subset of this set.
    bool includes(const IdSet& other) const {
        return std::includes(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end());
    }

    IdSet with(value_type id) const {
        std::vector<value_type> out;
        out.reserve(ids_.size() + 1);
        auto pos = std::lower_bound(ids_.begin(), ids_.end(), id);
        out.insert(out.end(), ids_.begin(), pos);
        if (pos == ids_.end() || *pos != id) out.push_back(id);
        out.insert(out.end(), pos, ids_.end());
        return from_sorted(std::move(out));
    }

    friend IdSet set_union(const IdSet& a, const IdSet& b) {
        std::vector<value_type> out;
        out.reserve(a.size() + b.size());
        std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
        return from_sorted(std::move(out));
    }

    friend IdSet set_intersection(const IdSet& a, const IdSet& b) {
        std::vector<value_type> out;
        out.reserve(std::min(a.size(), b.size()));
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
        return from_sorted(std::move(out));
    }

    friend IdSet set_difference(const IdSet& a, const IdSet& b) {
        std::vector<value_type> out;
        out.reserve(a.size());
        std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
        return from_sorted(std::move(out));
    }

    friend bool intersects(const IdSet& a, const IdSet& b) {
        auto i = a.begin();
        auto j = b.begin();
        while (i != a.end() && j != b.end()) {
            if (*i == *j) return true;
            if (*i < *j) ++i; else ++j;
        }
        return false;
    }

    friend bool operator==(const IdSet&, const IdSet&) = default;
    friend auto operator<=>(const IdSet& a, const IdSet& b) { return a.ids_ <=> b.ids_; }

private:
    std::vector<value_type> ids_;
};

struct ItemTag;
struct TidTag;

using Itemset = IdSet<ItemTag>;
using Tidset = IdSet<TidTag>;

/// Enumerates the non-empty strict subsets of `set` as (subset, complement) pairs.
/// Only meant for small sets (rule bodies); 2^|set| - 2 calls.
template <typename Tag, typename Fn>
void for_each_split(const IdSet<Tag>& set, Fn&& fn) {
    const std::size_t k = set.size();
    if (k < 2 || k > 30) return;
    const std::uint32_t full = (std::uint32_t{1} << k) - 1;
    std::vector<typename IdSet<Tag>::value_type> lhs, rhs;
    for (std::uint32_t mask = 1; mask < full; ++mask) {
        lhs.clear();
        rhs.clear();
        for (std::size_t b = 0; b < k; ++b) {
            if (mask & (std::uint32_t{1} << b)) lhs.push_back(set[b]); else rhs.push_back(set[b]);
        }
        fn(IdSet<Tag>::from_sorted(lhs), IdSet<Tag>::from_sorted(rhs));
    }
}

} // namespace rarm

template <typename Tag>
struct std::hash<rarm::IdSet<Tag>> {
    std::size_t operator()(const rarm::IdSet<Tag>& s) const noexcept {
        std::size_t h = 0xcbf29ce484222325ULL;
        for (auto id : s) {
            h ^= id + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};
