#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>

#include "fixtures.hpp"
#include "rarm/run.hpp"

using namespace rarm;
using namespace fixtures;

namespace {

// Second context keyed on the same objects: x on o1 and o3, y elsewhere.
const char* network_csv = "tid,item\no1,x\no2,y\no3,x\no4,y\no5,y\no6,y\n";

struct Workspace {
    TempDir dir;
    std::filesystem::path context, network, labels;

    Workspace() {
        context = dir.write("table1.csv", table1_csv);
        network = dir.write("net.csv", network_csv);
        labels = dir.write("labels.txt", "o1\no3\no5\n");
    }

    RunConfig vr_config() const {
        RunConfig cfg;
        cfg.contexts = {ContextSource{"", context}};
        cfg.max_supp_abs = AbsSupport{3};
        cfg.min_conf = Percent{100};
        cfg.labels = labels;
        return cfg;
    }
};

int cli(const std::string& args, const std::filesystem::path& log) {
    const std::string cmd = std::string("\"") + RARM_CLI_PATH + "\" " + args + " >\"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(Run, WritesAllArtifacts) {
    Workspace ws;
    RunConfig cfg = ws.vr_config();
    cfg.outputs.ranking_csv = ws.dir / "ranking.csv";
    cfg.outputs.rules_csv = ws.dir / "rules.csv";
    cfg.outputs.report_json = ws.dir / "report.json";
    cfg.outputs.band_svg = ws.dir / "band.svg";
    cfg.outputs.explain = ws.dir / "explain.txt";
    cfg.outputs.explain_top_k = 2;
    cfg.outputs.manifest = ws.dir / "manifest.json";
    const RunResult r = run(cfg);

    EXPECT_EQ(r.detection.rules.size(), 14u);
    EXPECT_EQ(r.flagged, 3u);
    ASSERT_TRUE(r.report);
    EXPECT_DOUBLE_EQ(r.report->ndcg, 1.0);

    const std::string ranking = slurp(ws.dir / "ranking.csv");
    EXPECT_EQ(ranking.substr(0, ranking.find('\n')), "rank,tid,score,n_matched_rules");
    EXPECT_NE(ranking.find("\n1,o3,10.99252574578"), std::string::npos);
    EXPECT_NE(ranking.find("\n6,o6,0,0\n"), std::string::npos);

    const auto report = nlohmann::json::parse(slurp(ws.dir / "report.json"));
    EXPECT_DOUBLE_EQ(report.at("ndcg").get<double>(), 1.0);
    EXPECT_EQ(report.at("attack_positions"), nlohmann::json({1, 2, 3}));

    const auto manifest = nlohmann::json::parse(slurp(ws.dir / "manifest.json"));
    EXPECT_EQ(manifest.at("rules").get<std::size_t>(), 14u);
    EXPECT_EQ(manifest.at("context").at("m").get<std::size_t>(), 6u);
    EXPECT_TRUE(manifest.contains("wall_clock_seconds"));

    const std::string explain = slurp(ws.dir / "explain.txt");
    EXPECT_EQ(explain.rfind("#1 o3", 0), 0u);
    EXPECT_NE(explain.find("#2 o5"), std::string::npos);
    EXPECT_EQ(explain.find("#3"), std::string::npos);
    EXPECT_EQ(slurp(ws.dir / "band.svg"), band_diagram_svg(*r.report));
}

TEST(Run, JoinPrefixesItems) {
    Workspace ws;
    RunConfig cfg = ws.vr_config();
    cfg.contexts = {ContextSource{"PE", ws.context}, ContextSource{"PN", ws.network}};
    cfg.join = true;
    cfg.outputs.rules_csv = ws.dir / "rules.csv";
    const RunResult r = run(cfg);
    EXPECT_EQ(r.context.n(), 7u);
    const std::string rules = slurp(ws.dir / "rules.csv");
    EXPECT_NE(rules.find("PE:"), std::string::npos);
    EXPECT_NE(rules.find("rare,PN:x,PE:b,2,1,"), std::string::npos);

    cfg.join = false;
    EXPECT_THROW(run(cfg), ConfigError);
    cfg.join = true;
    cfg.contexts[1].tag.clear();
    EXPECT_THROW(run(cfg), ConfigError);
}

TEST(Run, ValidationFailures) {
    Workspace ws;
    RunConfig cfg = ws.vr_config();
    cfg.labels.reset();
    cfg.outputs.report_json = ws.dir / "report.json";
    EXPECT_THROW(run(cfg), ConfigError);
    EXPECT_FALSE(std::filesystem::exists(ws.dir / "report.json"));

    cfg = ws.vr_config();
    cfg.max_supp_abs.reset();
    EXPECT_THROW(run(cfg), ConfigError);
    cfg.max_supp = Percent{150};
    EXPECT_THROW(run(cfg), ConfigError);
    cfg = ws.vr_config();
    cfg.max_supp = Percent{50};
    EXPECT_THROW(run(cfg), ConfigError);
    cfg = ws.vr_config();
    cfg.max_len = 1;
    EXPECT_THROW(run(cfg), ConfigError);
    cfg = ws.vr_config();
    cfg.detector = Detector::fpof;
    EXPECT_THROW(run(cfg), ConfigError);
    cfg.min_supp = Percent{50};
    EXPECT_NO_THROW(run(cfg));
    EXPECT_EQ(cfg.effective_max_len(), 5u);
}

TEST(Run, FailureLeavesNoPartialOutputs) {
    Workspace ws;
    RunConfig cfg = ws.vr_config();
    cfg.outputs.ranking_csv = ws.dir / "ranking.csv";
    cfg.outputs.rules_csv = ws.dir / "rules.csv";
    cfg.outputs.band_svg = (ws.dir / "no_such_dir") / "band.svg";
    EXPECT_THROW(run(cfg), IoError);
    EXPECT_FALSE(std::filesystem::exists(ws.dir / "ranking.csv"));
    EXPECT_FALSE(std::filesystem::exists(ws.dir / "rules.csv"));
}

TEST(Run, AllDetectorsProduceFullRankings) {
    Workspace ws;
    for (Detector d : {Detector::vr_arm, Detector::vf_arm, Detector::fpof, Detector::avf, Detector::od}) {
        RunConfig cfg = ws.vr_config();
        cfg.detector = d;
        cfg.min_conf = Percent{60};
        if (d != Detector::vr_arm) {
            cfg.max_supp_abs.reset();
            cfg.min_supp_abs = AbsSupport{3};
        }
        const RunResult r = run(cfg);
        EXPECT_EQ(r.detection.ranking.entries.size(), 6u) << to_string(d);
        EXPECT_EQ(r.detection.ranking.detector, d);
        ASSERT_TRUE(r.report);
    }
}

TEST(RunConfigJson, RoundTrip) {
    RunConfig cfg;
    cfg.contexts = {ContextSource{"PE", "pe.csv"}, ContextSource{"PN", "pn.csv"}};
    cfg.join = true;
    cfg.detector = Detector::vf_arm;
    cfg.min_supp = Percent{5};
    cfg.min_conf = Percent{80};
    cfg.max_len = 3;
    cfg.aggregation = Aggregation::mean;
    cfg.interest_mode = InterestMode::literal;
    cfg.labels = "labels.txt";
    cfg.drop_unknown_labels = true;
    cfg.outputs.ranking_csv = "r.csv";
    cfg.outputs.explain_top_k = 4;
    const auto j = to_json(cfg);
    const RunConfig back = run_config_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(to_json(back), j);
    EXPECT_EQ(back.detector, Detector::vf_arm);
    EXPECT_EQ(back.contexts[1].tag, "PN");
    EXPECT_THROW(run_config_from_json(nlohmann::json::parse(R"({"detector": 3})")), ConfigError);
    EXPECT_THROW(run_config_from_json(nlohmann::json::parse(R"({"detector": "nope"})")), ConfigError);
}

TEST(Parsing, Arguments) {
    EXPECT_EQ(parse_context_source("PE=a/b.csv").tag, "PE");
    EXPECT_EQ(parse_context_source("PE=a/b.csv").path, "a/b.csv");
    EXPECT_EQ(parse_context_source("plain.csv").tag, "");
    const GridCell g = parse_grid_cell("0.05x100");
    EXPECT_DOUBLE_EQ(g.supp.value, 0.05);
    EXPECT_DOUBLE_EQ(g.conf.value, 100.0);
    EXPECT_THROW(parse_grid_cell("0.05"), ConfigError);
    EXPECT_THROW(parse_grid_cell("ax1"), ConfigError);
    EXPECT_THROW(parse_aggregation("max"), ConfigError);
    EXPECT_THROW(parse_interest_mode("raw"), ConfigError);
}

TEST(Sweep, PicksOneWinnerAndMatchesSingleRuns) {
    Workspace ws;
    RunConfig base = ws.vr_config();
    base.max_supp_abs.reset();
    const std::vector<GridCell> grid{{Percent{20}, Percent{100}}, {Percent{50}, Percent{100}}, {Percent{50}, Percent{80}},
                                     {Percent{100}, Percent{100}}};
    const SweepResult res = sweep(base, grid, ws.dir / "sweep");
    ASSERT_EQ(res.cells.size(), grid.size());
    ASSERT_LT(res.best_ndcg, grid.size());
    for (const auto& c : res.cells) EXPECT_LE(c.report.ndcg, res.cells[res.best_ndcg].report.ndcg);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        EXPECT_TRUE(std::filesystem::exists(ws.dir / "sweep" / ("cell_" + std::to_string(k) + ".json")));
    }
    const auto summary = nlohmann::json::parse(slurp(ws.dir / "sweep" / "summary.json"));
    EXPECT_EQ(summary.at("best_ndcg").at("index").get<std::size_t>(), res.best_ndcg);
    EXPECT_EQ(summary.at("cells").size(), grid.size());

    for (std::size_t k = 0; k < grid.size(); ++k) {
        RunConfig one = base;
        one.max_supp = grid[k].supp;
        one.min_conf = grid[k].conf;
        const RunResult r = run(one);
        EXPECT_EQ(to_json(*r.report), to_json(res.cells[k].report)) << k;
        const SweepResult single = sweep(base, std::span(grid).subspan(k, 1));
        EXPECT_EQ(single.best_ndcg, 0u);
        EXPECT_EQ(to_json(single.cells[0].report), to_json(res.cells[k].report));
    }
}

TEST(Sweep, TiesGoToSmallerSupport) {
    Workspace ws;
    RunConfig base = ws.vr_config();
    base.max_supp_abs.reset();
    // identical cells: the first smallest one wins
    const std::vector<GridCell> grid{{Percent{60}, Percent{100}}, {Percent{50}, Percent{100}}, {Percent{50}, Percent{100}}};
    const SweepResult res = sweep(base, grid);
    EXPECT_EQ(res.best_ndcg, 1u);
    EXPECT_EQ(res.best_auc, 1u);
}

TEST(Sweep, Errors) {
    Workspace ws;
    RunConfig base = ws.vr_config();
    EXPECT_THROW(sweep(base, std::vector<GridCell>{}), ConfigError);
    base.labels.reset();
    EXPECT_THROW(sweep(base, std::vector<GridCell>{{Percent{50}, Percent{100}}}), ConfigError);
}

TEST(Cli, RunHappyPath) {
    Workspace ws;
    const std::string args = "run --context " + ws.context.string() + " --max-supp 50 --labels " + ws.labels.string() +
                             " --ranking " + (ws.dir / "r.csv").string() + " --report " + (ws.dir / "rep.json").string() +
                             " --band " + (ws.dir / "b.svg").string() + " --manifest " + (ws.dir / "m.json").string();
    ASSERT_EQ(cli(args, ws.dir / "log"), 0) << slurp(ws.dir / "log");
    EXPECT_NE(slurp(ws.dir / "rep.json").find("\"ndcg\""), std::string::npos);
    EXPECT_NE(slurp(ws.dir / "log").find("rules=14"), std::string::npos);
    const std::string first = slurp(ws.dir / "r.csv"), band = slurp(ws.dir / "b.svg");
    ASSERT_EQ(cli(args, ws.dir / "log"), 0);
    EXPECT_EQ(slurp(ws.dir / "r.csv"), first);
    EXPECT_EQ(slurp(ws.dir / "b.svg"), band);
}

TEST(Cli, ConfigFileWithOverrides) {
    Workspace ws;
    RunConfig cfg = ws.vr_config();
    cfg.max_supp_abs = AbsSupport{1};
    const auto cfg_path = ws.dir.write("cfg.json", to_json(cfg).dump());
    // --max-supp-abs overrides the file value; with 1 there would be no rules
    ASSERT_EQ(cli("run --config " + cfg_path.string() + " --max-supp-abs 3 --rules " + (ws.dir / "rules.csv").string(),
                  ws.dir / "log"),
              0)
        << slurp(ws.dir / "log");
    EXPECT_NE(slurp(ws.dir / "log").find("rules=14"), std::string::npos);
}

TEST(Cli, JoinedContexts) {
    Workspace ws;
    const std::string args = "run --context PE=" + ws.context.string() + " --context PN=" + ws.network.string() +
                             " --join --max-supp 50 --rules " + (ws.dir / "rules.csv").string();
    ASSERT_EQ(cli(args, ws.dir / "log"), 0) << slurp(ws.dir / "log");
    EXPECT_NE(slurp(ws.dir / "rules.csv").find("PN:x"), std::string::npos);
}

TEST(Cli, ExitCodes) {
    Workspace ws;
    const std::string ctx = " --context " + ws.context.string();
    // validation
    EXPECT_EQ(cli("run" + ctx + " --max-supp 50 --report " + (ws.dir / "rep.json").string(), ws.dir / "log"), 2);
    EXPECT_FALSE(std::filesystem::exists(ws.dir / "rep.json"));
    EXPECT_EQ(cli("run" + ctx, ws.dir / "log"), 2);
    EXPECT_EQ(cli("run" + ctx + " --max-supp 50 --detector bogus", ws.dir / "log"), 2);
    EXPECT_EQ(cli("run" + ctx + " --max-supp 50 --no-such-flag", ws.dir / "log"), 2);
    EXPECT_EQ(cli("", ws.dir / "log"), 2);
    const auto stranger = ws.dir.write("stranger.txt", "o1\nzz\n");
    EXPECT_EQ(cli("run" + ctx + " --max-supp 50 --labels " + stranger.string(), ws.dir / "log"), 2);
    EXPECT_EQ(cli("run" + ctx + " --max-supp 50 --drop-unknown-labels --labels " + stranger.string(), ws.dir / "log"), 0);
    // input
    EXPECT_EQ(cli("run --context " + (ws.dir / "missing.csv").string() + " --max-supp 50", ws.dir / "log"), 3);
    const auto bad = ws.dir.write("bad.csv", "tid,item\no1,a,b\n");
    EXPECT_EQ(cli("run --context " + bad.string() + " --max-supp 50", ws.dir / "log"), 3);
    EXPECT_NE(slurp(ws.dir / "log").find("line 2"), std::string::npos);
    const auto empty = ws.dir.write("empty.csv", "tid,item\n");
    EXPECT_EQ(cli("run --context " + empty.string() + " --max-supp 50", ws.dir / "log"), 3);
    // undefined metric: every object is an attack
    const auto everyone = ws.dir.write("all.txt", "o1\no2\no3\no4\no5\no6\n");
    EXPECT_EQ(cli("run" + ctx + " --max-supp 50 --labels " + everyone.string(), ws.dir / "log"), 4);
    // literal interest with a lift >= 1 rule
    EXPECT_EQ(cli("run" + ctx + " --max-supp 50 --interest literal", ws.dir / "log"), 4);
}

TEST(Cli, SweepCommand) {
    Workspace ws;
    const std::string args = "sweep --context " + ws.context.string() + " --labels " + ws.labels.string() +
                             " --grid 20x100 --grid 50x100 --out-dir " + (ws.dir / "out").string();
    ASSERT_EQ(cli(args, ws.dir / "log"), 0) << slurp(ws.dir / "log");
    EXPECT_TRUE(std::filesystem::exists(ws.dir / "out" / "summary.json"));
    EXPECT_TRUE(std::filesystem::exists(ws.dir / "out" / "cell_1.json"));
    EXPECT_EQ(cli("sweep --context " + ws.context.string() + " --labels " + ws.labels.string(), ws.dir / "log"), 2);
}

TEST(Cli, ConvertAndMine) {
    Workspace ws;
    const auto matrix = ws.dir.write("m.csv", "host,a,b\nh1,1,0\nh2,0,1\nh3,true,1\n");
    ASSERT_EQ(cli("convert --from matrix --in " + matrix.string() + " --out " + (ws.dir / "pairs.csv").string(), ws.dir / "log"), 0)
        << slurp(ws.dir / "log");
    const Context converted = load_context(ws.dir / "pairs.csv");
    EXPECT_EQ(converted.m(), 3u);
    EXPECT_EQ(converted.object(*converted.find_tid("h3")).size(), 2u);

    const auto basket = ws.dir.write("b.csv", "h1,a,b\nh2,b\n");
    ASSERT_EQ(cli("convert --from basket --in " + basket.string() + " --out " + (ws.dir / "pairs2.csv").string(), ws.dir / "log"), 0)
        << slurp(ws.dir / "log");
    EXPECT_EQ(load_context(ws.dir / "pairs2.csv").m(), 2u);
    EXPECT_EQ(cli("convert --from xml --in " + basket.string(), ws.dir / "log"), 2);

    ASSERT_EQ(cli("mine --context " + ws.context.string() + " --kind mri --supp-abs 3 --out " + (ws.dir / "mri.txt").string(),
                  ws.dir / "log"),
              0);
    EXPECT_EQ(slurp(ws.dir / "mri.txt"), "2\tb;a\n2\tb;d\n1\te\n");  // ids follow first appearance in the file
    ASSERT_EQ(cli("mine --context " + ws.context.string() + " --kind mfi --supp 50 --out " + (ws.dir / "mfi.txt").string(),
                  ws.dir / "log"),
              0);
    EXPECT_EQ(slurp(ws.dir / "mfi.txt"), "3\tb;c\n4\tc;a;d\n");
    EXPECT_EQ(cli("mine --context " + ws.context.string() + " --kind mri", ws.dir / "log"), 2);
}
