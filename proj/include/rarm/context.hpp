#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "error.hpp"
#include "idset.hpp"

namespace rarm {

struct Item {
    ItemId id = 0;
    std::string name;
    std::optional<std::string> source_tag;

    friend bool operator==(const Item&, const Item&) = default;
};

/// Threshold expressed in percent of the object count (or of confidence).
struct Percent {
    double value = 0.0;
    friend auto operator<=>(const Percent&, const Percent&) = default;
};

/// Threshold expressed as an absolute object count.
struct AbsSupport {
    std::size_t value = 0;
    friend auto operator<=>(const AbsSupport&, const AbsSupport&) = default;
};

/// Relative-to-absolute conversion: ceil(pct/100 * m), never below 1.
/// The 1e-9 slack keeps exact products (5% of 100) from rounding up.
inline AbsSupport absolute_threshold(Percent pct, std::size_t m) {
    const double raw = pct.value / 100.0 * static_cast<double>(m);
    const double c = std::ceil(raw - 1e-9);
    return AbsSupport{c < 1.0 ? std::size_t{1} : static_cast<std::size_t>(c)};
}

struct SupportThresholds {
    std::optional<Percent> min_supp;
    std::optional<Percent> max_supp;
    std::optional<Percent> min_conf;

    void validate() const {
        auto check = [](const std::optional<Percent>& p, const char* name) {
            if (p && !(p->value > 0.0 && p->value <= 100.0)) {
                throw ConfigError(std::string(name) + " must be in (0, 100], got " + std::to_string(p->value));
            }
        };
        check(min_supp, "min_supp");
        check(max_supp, "max_supp");
        check(min_conf, "min_conf");
    }
};

/// Binary objects x items relation with both the horizontal (per object) and
/// vertical (per item) views. Immutable once built.
class Context {
public:
    Context() = default;

    /// Builds a context from per-object itemsets. `rows[t]` must only hold ids
    /// below `items.size()`; item ids are reassigned to their position.
    static Context from_rows(std::vector<std::string> tid_names, std::vector<Item> items, std::vector<Itemset> rows) {
        if (tid_names.size() != rows.size()) {
            throw ContractError("tid name count differs from row count");
        }
        Context c;
        c.tid_names_ = std::move(tid_names);
        c.items_ = std::move(items);
        c.rows_ = std::move(rows);
        for (std::size_t i = 0; i < c.items_.size(); ++i) {
            c.items_[i].id = static_cast<ItemId>(i);
            if (!c.item_index_.emplace(c.items_[i].name, static_cast<ItemId>(i)).second) {
                throw ConfigError("duplicate item name '" + c.items_[i].name + "'");
            }
        }
        for (std::size_t t = 0; t < c.tid_names_.size(); ++t) {
            if (!c.tid_index_.emplace(c.tid_names_[t], static_cast<Tid>(t)).second) {
                throw ConfigError("duplicate object name '" + c.tid_names_[t] + "'");
            }
        }
        c.rebuild_columns();
        return c;
    }

    static Context from_rows(std::vector<std::string> tid_names, const std::vector<std::string>& item_names,
                             std::vector<Itemset> rows) {
        std::vector<Item> items;
        items.reserve(item_names.size());
        for (const auto& name : item_names) items.push_back(Item{0, name, std::nullopt});
        return from_rows(std::move(tid_names), std::move(items), std::move(rows));
    }

    std::size_t m() const noexcept { return rows_.size(); }
    std::size_t n() const noexcept { return items_.size(); }

    const Itemset& object(Tid t) const { return rows_.at(t); }
    std::span<const Itemset> objects() const noexcept { return rows_; }
    const Tidset& column(ItemId i) const { return columns_.at(i); }
    std::span<const Tidset> columns() const noexcept { return columns_; }

    const std::vector<Item>& items() const noexcept { return items_; }
    const std::string& item_name(ItemId i) const { return items_.at(i).name; }
    const std::string& tid_name(Tid t) const { return tid_names_.at(t); }
    const std::vector<std::string>& tid_names() const noexcept { return tid_names_; }

    std::optional<Tid> find_tid(std::string_view name) const {
        auto it = tid_index_.find(std::string(name));
        if (it == tid_index_.end()) return std::nullopt;
        return it->second;
    }
    std::optional<ItemId> find_item(std::string_view name) const {
        auto it = item_index_.find(std::string(name));
        if (it == item_index_.end()) return std::nullopt;
        return it->second;
    }

    /// Itemset from item names; unknown names raise DomainError.
    Itemset itemset(std::initializer_list<std::string_view> names) const {
        std::vector<ItemId> ids;
        for (auto nm : names) {
            auto id = find_item(nm);
            if (!id) throw DomainError("unknown item '" + std::string(nm) + "'");
            ids.push_back(*id);
        }
        return Itemset(std::move(ids));
    }

    /// Same relation and names; index maps are derived and not compared.
    friend bool operator==(const Context& a, const Context& b) {
        return a.tid_names_ == b.tid_names_ && a.items_ == b.items_ && a.rows_ == b.rows_ &&
               a.columns_ == b.columns_;
    }

private:
    void rebuild_columns() {
        std::vector<std::vector<Tid>> cols(items_.size());
        for (std::size_t t = 0; t < rows_.size(); ++t) {
            for (ItemId i : rows_[t]) {
                if (i >= items_.size()) {
                    throw DomainError("row " + std::to_string(t) + " references item id " + std::to_string(i));
                }
                cols[i].push_back(static_cast<Tid>(t));
            }
        }
        columns_.clear();
        columns_.reserve(cols.size());
        for (auto& col : cols) columns_.push_back(Tidset::from_sorted(std::move(col)));
    }

    std::vector<std::string> tid_names_;
    std::vector<Item> items_;
    std::vector<Itemset> rows_;
    std::vector<Tidset> columns_;
    std::unordered_map<std::string, Tid> tid_index_;
    std::unordered_map<std::string, ItemId> item_index_;
};

/// Accumulates (object, item) pairs in first-appearance order. Duplicate pairs
/// collapse.
class ContextBuilder {
public:
    Tid add_object(const std::string& tid_name) {
        auto [it, inserted] = tid_index_.emplace(tid_name, static_cast<Tid>(tid_names_.size()));
        if (inserted) {
            tid_names_.push_back(tid_name);
            rows_.emplace_back();
        }
        return it->second;
    }

    ItemId add_item(const std::string& item_name, std::optional<std::string> source_tag = std::nullopt) {
        auto [it, inserted] = item_index_.emplace(item_name, static_cast<ItemId>(items_.size()));
        if (inserted) items_.push_back(Item{it->second, item_name, std::move(source_tag)});
        return it->second;
    }

    void add(const std::string& tid_name, const std::string& item_name) {
        const Tid t = add_object(tid_name);
        const ItemId i = add_item(item_name);
        rows_[t].push_back(i);
    }

    void add(Tid t, ItemId i) { rows_.at(t).push_back(i); }

    std::size_t object_count() const noexcept { return tid_names_.size(); }

    Context build() && {
        std::vector<Itemset> rows;
        rows.reserve(rows_.size());
        for (auto& r : rows_) rows.emplace_back(std::move(r));
        return Context::from_rows(std::move(tid_names_), std::move(items_), std::move(rows));
    }

private:
    std::vector<std::string> tid_names_;
    std::vector<Item> items_;
    std::vector<std::vector<ItemId>> rows_;
    std::unordered_map<std::string, Tid> tid_index_;
    std::unordered_map<std::string, ItemId> item_index_;
};

/// tau(X): objects containing every item of `x`. tau of the empty set is all objects.
inline Tidset support_set(const Context& c, const Itemset& x) {
    for (ItemId i : x) {
        if (i >= c.n()) throw DomainError("item id " + std::to_string(i) + " out of range (n=" + std::to_string(c.n()) + ")");
    }
    if (x.empty()) {
        std::vector<Tid> all(c.m());
        for (std::size_t t = 0; t < all.size(); ++t) all[t] = static_cast<Tid>(t);
        return Tidset::from_sorted(std::move(all));
    }
    // Start from the shortest column so every intersection stays small.
    std::vector<ItemId> order(x.begin(), x.end());
    std::sort(order.begin(), order.end(),
              [&](ItemId a, ItemId b) { return c.column(a).size() < c.column(b).size(); });
    Tidset acc = c.column(order.front());
    for (std::size_t k = 1; k < order.size() && !acc.empty(); ++k) acc = set_intersection(acc, c.column(order[k]));
    return acc;
}

/// iota(Y): items shared by every object of `y`. iota of the empty set is all items.
inline Itemset image(const Context& c, const Tidset& y) {
    for (Tid t : y) {
        if (t >= c.m()) throw DomainError("tid " + std::to_string(t) + " out of range (m=" + std::to_string(c.m()) + ")");
    }
    if (y.empty()) {
        std::vector<ItemId> all(c.n());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<ItemId>(i);
        return Itemset::from_sorted(std::move(all));
    }
    Itemset acc = c.object(y[0]);
    for (std::size_t k = 1; k < y.size() && !acc.empty(); ++k) acc = set_intersection(acc, c.object(y[k]));
    return acc;
}

inline Itemset closure(const Context& c, const Itemset& x) { return image(c, support_set(c, x)); }

struct Support {
    std::size_t absolute = 0;
    double relative = 0.0;
};

inline Support support(const Context& c, const Itemset& x) {
    const std::size_t a = support_set(c, x).size();
    return Support{a, c.m() == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(c.m())};
}

struct TaggedContext {
    std::string tag;
    Context context;
};

/// Outer join on object names. Items are renamed `tag:name` and remember their tag.
/// Objects are numbered in first appearance order across parts.
inline Context join_contexts(std::span<const TaggedContext> parts) {
    std::unordered_map<std::string, std::size_t> seen_tags;
    for (const auto& p : parts) {
        if (p.tag.empty()) throw ConfigError("context tag must not be empty");
        if (!seen_tags.emplace(p.tag, 0).second) throw ConfigError("duplicate context tag '" + p.tag + "'");
    }
    ContextBuilder b;
    for (const auto& p : parts) {
        std::vector<ItemId> remap(p.context.n());
        for (const auto& item : p.context.items()) remap[item.id] = b.add_item(p.tag + ":" + item.name, p.tag);
        for (Tid t = 0; t < p.context.m(); ++t) {
            const Tid joined = b.add_object(p.context.tid_name(t));
            for (ItemId i : p.context.object(t)) b.add(joined, remap[i]);
        }
    }
    return std::move(b).build();
}

} // namespace rarm
