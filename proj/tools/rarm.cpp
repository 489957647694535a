// rarm: rank anomalous objects of a categorical context by rare and frequent
// association rules, evaluate the ranking, and draw band diagrams.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rarm/io.hpp"
#include "rarm/miner.hpp"
#include "rarm/rules.hpp"
#include "rarm/run.hpp"

namespace {

constexpr int exit_validation = 2;
constexpr int exit_io = 3;
constexpr int exit_metric = 4;

struct RunFlags {
    std::string config_file;
    std::vector<std::string> contexts;
    bool join = false;
    std::string detector;
    std::optional<double> min_supp, max_supp, min_conf;
    std::optional<std::size_t> min_supp_abs, max_supp_abs, max_len;
    std::string aggregation, interest;
    std::string labels;
    bool drop_unknown_labels = false;
    std::string ranking, rules, report, band, explain, manifest;
    std::optional<std::size_t> explain_top_k;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
    cmd->add_option("--config", f.config_file, "JSON run configuration; flags override its values");
    cmd->add_option("--context", f.contexts, "Context file as TAG=PATH (or PATH for a single context)");
    cmd->add_flag("--join", f.join, "Outer-join all contexts, prefixing items with TAG:");
    cmd->add_option("--detector", f.detector, "vr-arm | vf-arm | fpof | avf | od");
    cmd->add_option("--min-supp", f.min_supp, "Frequent-side support threshold, percent");
    cmd->add_option("--max-supp", f.max_supp, "Rare-side support threshold, percent");
    cmd->add_option("--min-supp-abs", f.min_supp_abs, "Frequent-side support threshold, object count");
    cmd->add_option("--max-supp-abs", f.max_supp_abs, "Rare-side support threshold, object count");
    cmd->add_option("--min-conf", f.min_conf, "Confidence threshold, percent (default 100)");
    cmd->add_option("--max-len", f.max_len, "Itemset size cap (default 4, fpof 5)");
    cmd->add_option("--aggregation", f.aggregation, "sum | mean");
    cmd->add_option("--interest", f.interest, "lift-normalized | literal");
    cmd->add_option("--labels", f.labels, "Ground truth: one anomalous object name per line");
    cmd->add_flag("--drop-unknown-labels", f.drop_unknown_labels, "Ignore labels naming objects absent from the context");
    cmd->add_option("--ranking", f.ranking, "Write the ranking CSV here");
    cmd->add_option("--rules", f.rules, "Write the rule CSV here");
    cmd->add_option("--report", f.report, "Write the evaluation report JSON here");
    cmd->add_option("--band", f.band, "Write the band diagram SVG here");
    cmd->add_option("--explain", f.explain, "Write explanations of the top entries here");
    cmd->add_option("--explain-top-k", f.explain_top_k, "Number of entries to explain (default 0)");
    cmd->add_option("--manifest", f.manifest, "Write the run manifest here (default: stderr)");
}

rarm::RunConfig build_config(const RunFlags& f) {
    rarm::RunConfig cfg;
    if (!f.config_file.empty()) {
        std::ifstream in(f.config_file);
        if (!in) throw rarm::IoError("cannot open config " + f.config_file);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw rarm::ConfigError(std::string("bad config: ") + e.what());
        }
        cfg = rarm::run_config_from_json(j);
    }
    if (!f.contexts.empty()) {
        cfg.contexts.clear();
        for (const auto& c : f.contexts) cfg.contexts.push_back(rarm::parse_context_source(c));
    }
    if (f.join) cfg.join = true;
    if (!f.detector.empty()) cfg.detector = rarm::parse_detector(f.detector);
    if (f.min_supp) cfg.min_supp = rarm::Percent{*f.min_supp};
    if (f.max_supp) cfg.max_supp = rarm::Percent{*f.max_supp};
    if (f.min_supp_abs) cfg.min_supp_abs = rarm::AbsSupport{*f.min_supp_abs};
    if (f.max_supp_abs) cfg.max_supp_abs = rarm::AbsSupport{*f.max_supp_abs};
    if (f.min_conf) cfg.min_conf = rarm::Percent{*f.min_conf};
    if (f.max_len) cfg.max_len = *f.max_len;
    if (!f.aggregation.empty()) cfg.aggregation = rarm::parse_aggregation(f.aggregation);
    if (!f.interest.empty()) cfg.interest_mode = rarm::parse_interest_mode(f.interest);
    if (!f.labels.empty()) cfg.labels = f.labels;
    if (f.drop_unknown_labels) cfg.drop_unknown_labels = true;
    auto set = [](std::optional<std::filesystem::path>& dst, const std::string& v) {
        if (!v.empty()) dst = v;
    };
    set(cfg.outputs.ranking_csv, f.ranking);
    set(cfg.outputs.rules_csv, f.rules);
    set(cfg.outputs.report_json, f.report);
    set(cfg.outputs.band_svg, f.band);
    set(cfg.outputs.explain, f.explain);
    set(cfg.outputs.manifest, f.manifest);
    if (f.explain_top_k) cfg.outputs.explain_top_k = *f.explain_top_k;
    return cfg;
}

int cmd_run(const RunFlags& f) {
    const auto cfg = build_config(f);
    const auto result = rarm::run(cfg);
    if (!cfg.outputs.manifest) std::cerr << result.manifest.dump() << '\n';
    std::cout << "objects=" << result.context.m() << " items=" << result.context.n()
              << " rules=" << result.detection.rules.size() << " flagged=" << result.flagged;
    if (result.report) std::cout << " ndcg=" << result.report->ndcg << " auc=" << result.report->auc;
    std::cout << '\n';
    return 0;
}

int cmd_sweep(const RunFlags& f, const std::vector<std::string>& grid_args, const std::string& out_dir) {
    const auto cfg = build_config(f);
    std::vector<rarm::GridCell> grid;
    for (const auto& g : grid_args) grid.push_back(rarm::parse_grid_cell(g));
    std::optional<std::filesystem::path> dir;
    if (!out_dir.empty()) dir = out_dir;
    const auto res = rarm::sweep(cfg, grid, dir);
    std::cout << res.summary.dump(2) << '\n';
    return 0;
}

int cmd_convert(const std::string& from, const std::string& in_path, const std::string& out_path) {
    std::ifstream in(in_path, std::ios::binary);
    if (!in) throw rarm::IoError("cannot open " + in_path);
    std::ostringstream out;
    if (from == "matrix") {
        rarm::convert_matrix_csv(in, out);
    } else if (from == "basket") {
        rarm::convert_basket_csv(in, out);
    } else {
        throw rarm::ConfigError("unknown source format '" + from + "' (matrix | basket)");
    }
    if (out_path.empty() || out_path == "-") {
        std::cout << out.str();
    } else {
        rarm::write_file_atomic(out_path, out.str());
    }
    return 0;
}

int cmd_mine(const std::string& context_path, const std::string& kind, std::optional<double> supp,
             std::optional<std::size_t> supp_abs, std::size_t max_len, const std::string& out_path) {
    const auto c = rarm::load_context(context_path);
    if (supp.has_value() == supp_abs.has_value()) throw rarm::ConfigError("give exactly one of --supp or --supp-abs");
    if (supp && !(*supp > 0.0 && *supp <= 100.0)) throw rarm::ConfigError("--supp must be in (0, 100]");
    const rarm::AbsSupport t = supp_abs ? rarm::AbsSupport{*supp_abs} : rarm::absolute_threshold(rarm::Percent{*supp}, c.m());
    rarm::MinedSet sets;
    if (kind == "frequent") {
        sets = rarm::frequent_itemsets(c, t);
    } else if (kind == "mfi") {
        sets = rarm::maximal_frequent_itemsets(c, t);
    } else if (kind == "mri") {
        sets = rarm::minimal_rare_itemsets(c, t);
    } else if (kind == "rare") {
        sets = rarm::expand_rare(c, rarm::minimal_rare_itemsets(c, t), t, max_len);
    } else {
        throw rarm::ConfigError("unknown itemset kind '" + kind + "' (frequent | mfi | mri | rare)");
    }
    std::ostringstream out;
    rarm::write_itemsets(out, sets, c);
    if (out_path.empty() || out_path == "-") {
        std::cout << out.str();
    } else {
        rarm::write_file_atomic(out_path, out.str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rule-mining anomaly ranking for categorical transaction databases"};
    app.require_subcommand(1);

    RunFlags run_flags;
    auto* run = app.add_subcommand("run", "Detect, rank, evaluate and report");
    add_run_flags(run, run_flags);

    RunFlags sweep_flags;
    std::vector<std::string> grid;
    std::string out_dir;
    auto* sweep = app.add_subcommand("sweep", "Evaluate a (supp x conf) grid and pick the best cell");
    add_run_flags(sweep, sweep_flags);
    sweep->add_option("--grid", grid, "Grid cell SUPPxCONF in percent, e.g. 0.05x100 (repeatable)");
    sweep->add_option("--out-dir", out_dir, "Directory for cell_<k>.json and summary.json");

    std::string from, in_path, out_path;
    auto* convert = app.add_subcommand("convert", "Convert a third-party export into tid,item pairs");
    convert->add_option("--from", from, "matrix (0/1 table with header) | basket (tid,item,item,...)")->required();
    convert->add_option("--in", in_path, "Input file")->required();
    convert->add_option("--out", out_path, "Output pair CSV (default stdout)");

    std::string mine_context, mine_kind = "mri", mine_out;
    std::optional<double> mine_supp;
    std::optional<std::size_t> mine_supp_abs;
    std::size_t mine_max_len = 4;
    auto* mine = app.add_subcommand("mine", "Dump frequent, maximal frequent, minimal rare or rare itemsets");
    mine->add_option("--context", mine_context, "Pair CSV context")->required();
    mine->add_option("--kind", mine_kind, "frequent | mfi | mri | rare");
    mine->add_option("--supp", mine_supp, "Threshold in percent");
    mine->add_option("--supp-abs", mine_supp_abs, "Threshold as object count");
    mine->add_option("--max-len", mine_max_len, "Size cap for --kind rare");
    mine->add_option("--out", mine_out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_validation;
    }

    try {
        if (*run) return cmd_run(run_flags);
        if (*sweep) return cmd_sweep(sweep_flags, grid, out_dir);
        if (*convert) return cmd_convert(from, in_path, out_path);
        if (*mine) return cmd_mine(mine_context, mine_kind, mine_supp, mine_supp_abs, mine_max_len, mine_out);
    } catch (const rarm::UndefinedMetricError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_metric;
    } catch (const rarm::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const rarm::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const rarm::EmptyContextError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const rarm::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const rarm::ContractError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_validation;
    }
    return 0;
}
