#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "rarm/rules.hpp"

using namespace rarm;
using namespace fixtures;
using namespace fixtures::items;

namespace {

struct Key {
    std::vector<ItemId> ant, cons;
    friend auto operator<=>(const Key&, const Key&) = default;
};

std::set<Key> keys(const RuleSet& rs) {
    std::set<Key> k;
    for (const auto& r : rs.rules) k.insert(Key{r.antecedent.vec(), r.consequent.vec()});
    return k;
}

void expect_matches_oracle(const RuleSet& rs, const std::vector<oracle::OracleRule>& want) {
    ASSERT_EQ(rs.size(), want.size());
    for (std::size_t k = 0; k < want.size(); ++k) {
        const Rule& r = rs.rules[k];
        EXPECT_EQ(r.antecedent.vec(), want[k].ant);
        EXPECT_EQ(r.consequent.vec(), want[k].cons);
        EXPECT_EQ(r.support_abs, want[k].supp);
        EXPECT_NEAR(r.confidence, want[k].conf, 1e-12);
        EXPECT_NEAR(r.lift, want[k].lift, 1e-9);
    }
}

const Rule* find(const RuleSet& rs, const Itemset& ant, const Itemset& cons) {
    for (const auto& r : rs.rules) {
        if (r.antecedent == ant && r.consequent == cons) return &r;
    }
    return nullptr;
}

} // namespace

TEST(RuleMetrics, Table1) {
    const Context ctx = table1();
    auto m = rule_metrics(ctx, Itemset{a}, Itemset{c});
    EXPECT_EQ(m.support_abs, 4u);
    EXPECT_NEAR(m.confidence, 0.8, 1e-12);
    EXPECT_NEAR(m.lift, 0.96, 1e-9);
    m = rule_metrics(ctx, Itemset{a, b}, Itemset{d});
    EXPECT_EQ(m.support_abs, 2u);
    EXPECT_NEAR(m.confidence, 1.0, 1e-12);
    EXPECT_NEAR(m.lift, 1.2, 1e-9);
}

TEST(RuleMetrics, Errors) {
    const Context ctx = table1();
    // a and e never co-occur, so {a,e} has no support
    EXPECT_THROW(rule_metrics(ctx, Itemset{a, e}, Itemset{b}), UndefinedMetricError);
    EXPECT_THROW(rule_metrics(ctx, Itemset{a}, Itemset{a, c}), ContractError);
    EXPECT_THROW(rule_metrics(ctx, Itemset{}, Itemset{c}), ContractError);
}

TEST(RareRules, Table1) {
    const Context ctx = table1();
    const RuleSet rs = get_rare_rules(ctx, AbsSupport{3}, Percent{100}, 4);
    EXPECT_TRUE(find(rs, Itemset{a, b}, Itemset{d}));
    EXPECT_TRUE(find(rs, Itemset{b, d}, Itemset{a}));
    EXPECT_TRUE(find(rs, Itemset{e}, Itemset{b, c}));
    EXPECT_FALSE(find(rs, Itemset{b}, Itemset{a}));
    // frozen from brute-force enumeration of rare itemsets and their splits
    const std::set<Key> want{{{a, b}, {c}},    {{a, b}, {c, d}}, {{a, b}, {d}}, {{a, b, c}, {d}}, {{a, b, d}, {c}},
                             {{b, c, d}, {a}}, {{b, d}, {a}},    {{b, d}, {a, c}}, {{b, d}, {c}},  {{b, e}, {c}},
                             {{c, e}, {b}},    {{e}, {b}},       {{e}, {b, c}},    {{e}, {c}}};
    EXPECT_EQ(keys(rs), want);
    for (const auto& r : rs.rules) {
        EXPECT_EQ(r.kind, RuleKind::rare);
        EXPECT_DOUBLE_EQ(r.confidence, 1.0);
    }
}

TEST(RareRules, LengthTwo) {
    const Context ctx = table1();
    const RuleSet rs = get_rare_rules(ctx, AbsSupport{3}, Percent{100}, 2);
    EXPECT_EQ(keys(rs), (std::set<Key>{{{e}, {b}}, {{e}, {c}}}));
}

TEST(RareRules, EmptyWhenNothingConfident) {
    // Every rare itemset here is a pair of independent-ish items; no split reaches 100%.
    const Context ctx = Context::from_rows({"t1", "t2", "t3", "t4"}, std::vector<std::string>{"x", "y"},
                                           {Itemset{0}, Itemset{0, 1}, Itemset{1}, Itemset{0}});
    const RuleSet rs = get_rare_rules(ctx, AbsSupport{2}, Percent{100}, 4);
    EXPECT_TRUE(rs.empty());
    EXPECT_THROW(get_rare_rules(ctx, AbsSupport{2}, Percent{100}, 1), ConfigError);
}

TEST(RareRules, PercentOverload) {
    const Context ctx = table1();
    // 50% of 6 objects -> 3
    EXPECT_EQ(keys(get_rare_rules(ctx, Percent{50}, Percent{100}, 4)), keys(get_rare_rules(ctx, AbsSupport{3}, Percent{100}, 4)));
}

TEST(FreqRules, Table1) {
    const Context ctx = table1();
    const RuleSet rs = get_freq_rules(ctx, AbsSupport{3}, Percent{60}, 4);
    const Rule* r = find(rs, Itemset{a}, Itemset{c, d});
    ASSERT_TRUE(r);
    EXPECT_EQ(r->support_abs, 4u);
    EXPECT_NEAR(r->confidence, 0.8, 1e-12);
    r = find(rs, Itemset{c}, Itemset{b});
    ASSERT_TRUE(r);
    EXPECT_NEAR(r->confidence, 0.6, 1e-12);
    r = find(rs, Itemset{d}, Itemset{a, c});
    ASSERT_TRUE(r);
    EXPECT_NEAR(r->confidence, 0.8, 1e-12);
    const std::set<Key> want{{{a}, {c, d}}, {{a, c}, {d}}, {{a, d}, {c}}, {{b}, {c}},
                             {{c}, {a, d}}, {{c}, {b}},    {{c, d}, {a}}, {{d}, {a, c}}};
    EXPECT_EQ(keys(rs), want);
    for (const auto& x : rs.rules) EXPECT_EQ(x.kind, RuleKind::frequent);
}

TEST(FreqRules, DegenerateCases) {
    const Context ctx = table1();
    EXPECT_TRUE(get_freq_rules(ctx, AbsSupport{3}, Percent{101}, 4).empty());
    const Context single = Context::from_rows({"t1", "t2"}, std::vector<std::string>{"x"}, {Itemset{0}, Itemset{0}});
    EXPECT_TRUE(get_freq_rules(single, AbsSupport{1}, Percent{10}, 4).empty());
}

TEST(RuleOracle, RandomContexts) {
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<std::size_t> len(2, 5);
    std::uniform_real_distribution<double> conf(30.0, 100.0);
    std::size_t total = 0;
    for (int round = 0; round < 200; ++round) {
        const Context ctx = oracle::random_context(rng, 30, 12);
        const auto t = oracle::from_context(ctx);
        std::uniform_int_distribution<std::size_t> thr(1, ctx.m() + 1);
        const std::size_t s = thr(rng), l = len(rng);
        const double cf = round % 3 == 0 ? 100.0 : conf(rng);
        const RuleSet rare = get_rare_rules(ctx, AbsSupport{s}, Percent{cf}, l);
        expect_matches_oracle(rare, oracle::rare_rules(t, s, cf, l));
        const RuleSet freq = get_freq_rules(ctx, AbsSupport{s}, Percent{cf}, l);
        expect_matches_oracle(freq, oracle::freq_rules(t, s, cf, l));
        total += rare.size() + freq.size();
        if (HasFailure()) FAIL() << "round " << round;
    }
    EXPECT_GT(total, 1000u);
}

TEST(RuleInvariants, StoredMetricsAndBounds) {
    std::mt19937_64 rng(31);
    for (int round = 0; round < 60; ++round) {
        const Context ctx = oracle::random_context(rng, 30, 10);
        std::uniform_int_distribution<std::size_t> thr(1, ctx.m());
        const std::size_t s = thr(rng);
        for (const RuleSet& rs : {get_rare_rules(ctx, AbsSupport{s}, Percent{50}, 4), get_freq_rules(ctx, AbsSupport{s}, Percent{50}, 4)}) {
            for (const auto& r : rs.rules) {
                const auto m = rule_metrics(ctx, r.antecedent, r.consequent);
                EXPECT_EQ(m.support_abs, r.support_abs);
                EXPECT_NEAR(m.confidence, r.confidence, 1e-9);
                EXPECT_NEAR(m.lift, r.lift, 1e-9);
                EXPECT_GE(r.confidence, 0.5 - 1e-12);
                EXPECT_LE(r.confidence, 1.0);
                EXPECT_GE(r.lift, 0.0);
                if (r.kind == RuleKind::rare) {
                    EXPECT_GT(r.support_abs, 0u);
                    EXPECT_LT(r.support_abs, s);
                } else {
                    EXPECT_GE(r.support_abs, s);
                }
            }
        }
    }
}

TEST(RuleInvariants, MonotonePruning) {
    std::mt19937_64 rng(8);
    for (int round = 0; round < 60; ++round) {
        const Context ctx = oracle::random_context(rng, 30, 10);
        std::uniform_int_distribution<std::size_t> thr(1, ctx.m());
        const std::size_t s = thr(rng);
        // raising min_conf never adds rules
        const auto loose = keys(get_rare_rules(ctx, AbsSupport{s}, Percent{40}, 4));
        const auto strict = keys(get_rare_rules(ctx, AbsSupport{s}, Percent{80}, 4));
        EXPECT_TRUE(std::includes(loose.begin(), loose.end(), strict.begin(), strict.end()));
        // raising max_supp keeps rules whose support stays below the old bound
        const RuleSet low = get_rare_rules(ctx, AbsSupport{s}, Percent{60}, 4);
        const auto high = keys(get_rare_rules(ctx, AbsSupport{s + 2}, Percent{60}, 4));
        for (const auto& r : low.rules) EXPECT_TRUE(high.count(Key{r.antecedent.vec(), r.consequent.vec()}));
    }
}

TEST(RuleDump, CsvFormat) {
    const Context ctx = table1();
    const RuleSet rs = get_rare_rules(ctx, AbsSupport{3}, Percent{100}, 2);
    std::ostringstream out;
    write_rules_csv(out, rs, ctx);
    EXPECT_EQ(out.str(),
              "kind,antecedent,consequent,supp_abs,confidence,lift\n"
              "rare,e,b,1,1,2\n"
              "rare,e,c,1,1,1.2\n");
    std::ostringstream sets;
    write_itemsets(sets, minimal_rare_itemsets(ctx, AbsSupport{3}), ctx);
    EXPECT_EQ(sets.str(), "2\ta;b\n2\tb;d\n1\te\n");
}
