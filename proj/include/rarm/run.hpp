#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "baselines.hpp"
#include "context.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "io.hpp"
#include "json.hpp"
#include "rules.hpp"
#include "scorer.hpp"

namespace rarm {

struct ContextSource {
    std::string tag; ///< may be empty for a single, un-joined context
    std::filesystem::path path;
};

struct RunOutputs {
    std::optional<std::filesystem::path> ranking_csv;
    std::optional<std::filesystem::path> rules_csv;
    std::optional<std::filesystem::path> report_json;
    std::optional<std::filesystem::path> band_svg;
    std::optional<std::filesystem::path> explain;
    std::size_t explain_top_k = 0;
    std::optional<std::filesystem::path> manifest;
};

struct RunConfig {
    std::vector<ContextSource> contexts;
    bool join = false;
    Detector detector = Detector::vr_arm;
    std::optional<Percent> min_supp;
    std::optional<Percent> max_supp;
    std::optional<AbsSupport> min_supp_abs;
    std::optional<AbsSupport> max_supp_abs;
    Percent min_conf{100.0};
    std::optional<std::size_t> max_len;
    Aggregation aggregation = Aggregation::sum;
    InterestMode interest_mode = InterestMode::lift_normalized;
    std::optional<std::filesystem::path> labels;
    bool drop_unknown_labels = false;
    RunOutputs outputs;

    bool uses_rules() const { return detector == Detector::vr_arm || detector == Detector::vf_arm || detector == Detector::od; }

    std::size_t effective_max_len() const {
        if (max_len) return *max_len;
        return detector == Detector::fpof ? 5 : 4;
    }

    void validate() const {
        if (contexts.empty()) throw ConfigError("at least one --context is required");
        if (contexts.size() > 1 && !join) throw ConfigError("several contexts given without --join");
        if (join) {
            for (const auto& s : contexts) {
                if (s.tag.empty()) throw ConfigError("--join needs TAG=PATH for every context");
            }
        }
        auto pct_ok = [](const std::optional<Percent>& p, const char* name) {
            if (p && !(p->value > 0.0 && p->value <= 100.0)) throw ConfigError(std::string(name) + " must be in (0, 100]");
        };
        pct_ok(min_supp, "min_supp");
        pct_ok(max_supp, "max_supp");
        pct_ok(Percent{min_conf}, "min_conf");
        if (min_supp && min_supp_abs) throw ConfigError("give either min_supp or min_supp_abs, not both");
        if (max_supp && max_supp_abs) throw ConfigError("give either max_supp or max_supp_abs, not both");
        if ((min_supp_abs && min_supp_abs->value < 1) || (max_supp_abs && max_supp_abs->value < 1)) {
            throw ConfigError("absolute supports must be at least 1");
        }
        switch (detector) {
        case Detector::vr_arm:
            if (!max_supp && !max_supp_abs) throw ConfigError("vr-arm needs max_supp");
            break;
        case Detector::vf_arm:
        case Detector::fpof:
        case Detector::od:
            if (!min_supp && !min_supp_abs) throw ConfigError(std::string(to_string(detector)) + " needs min_supp");
            break;
        case Detector::avf:
            break;
        }
        if (max_len && *max_len < 2) throw ConfigError("max_len must be at least 2");
        const bool wants_metrics = outputs.report_json || outputs.band_svg;
        if (wants_metrics && !labels) throw ConfigError("--report/--band need --labels");
    }
};

inline Detector parse_detector(std::string_view s) {
    if (s == "vr-arm") return Detector::vr_arm;
    if (s == "vf-arm") return Detector::vf_arm;
    if (s == "fpof") return Detector::fpof;
    if (s == "avf") return Detector::avf;
    if (s == "od") return Detector::od;
    throw ConfigError("unknown detector '" + std::string(s) + "'");
}

inline Aggregation parse_aggregation(std::string_view s) {
    if (s == "sum") return Aggregation::sum;
    if (s == "mean") return Aggregation::mean;
    throw ConfigError("unknown aggregation '" + std::string(s) + "'");
}

inline InterestMode parse_interest_mode(std::string_view s) {
    if (s == "lift-normalized") return InterestMode::lift_normalized;
    if (s == "literal") return InterestMode::literal;
    throw ConfigError("unknown interest mode '" + std::string(s) + "'");
}

inline std::string_view to_string(Aggregation a) { return a == Aggregation::sum ? "sum" : "mean"; }
inline std::string_view to_string(InterestMode m) { return m == InterestMode::literal ? "literal" : "lift-normalized"; }

/// Parses `TAG=PATH`, or a bare PATH with an empty tag.
inline ContextSource parse_context_source(std::string_view arg) {
    const auto eq = arg.find('=');
    if (eq == std::string_view::npos) return ContextSource{"", std::filesystem::path(std::string(arg))};
    if (eq == 0 || eq + 1 == arg.size()) throw ConfigError("malformed --context '" + std::string(arg) + "'");
    return ContextSource{std::string(arg.substr(0, eq)), std::filesystem::path(std::string(arg.substr(eq + 1)))};
}

inline nlohmann::ordered_json to_json(const RunConfig& c) {
    using nlohmann::ordered_json;
    ordered_json j;
    ordered_json ctx = ordered_json::array();
    for (const auto& s : c.contexts) ctx.push_back({{"tag", s.tag}, {"path", s.path.string()}});
    j["contexts"] = ctx;
    j["join"] = c.join;
    j["detector"] = std::string(to_string(c.detector));
    if (c.min_supp) j["min_supp"] = c.min_supp->value;
    if (c.max_supp) j["max_supp"] = c.max_supp->value;
    if (c.min_supp_abs) j["min_supp_abs"] = c.min_supp_abs->value;
    if (c.max_supp_abs) j["max_supp_abs"] = c.max_supp_abs->value;
    j["min_conf"] = c.min_conf.value;
    j["max_len"] = c.effective_max_len();
    j["aggregation"] = std::string(to_string(c.aggregation));
    j["interest_mode"] = std::string(to_string(c.interest_mode));
    if (c.labels) j["labels"] = c.labels->string();
    j["drop_unknown_labels"] = c.drop_unknown_labels;
    ordered_json out;
    auto put = [&](const char* key, const std::optional<std::filesystem::path>& p) {
        if (p) out[key] = p->string();
    };
    put("ranking_csv", c.outputs.ranking_csv);
    put("rules_csv", c.outputs.rules_csv);
    put("report_json", c.outputs.report_json);
    put("band_svg", c.outputs.band_svg);
    put("explain", c.outputs.explain);
    out["explain_top_k"] = c.outputs.explain_top_k;
    put("manifest", c.outputs.manifest);
    j["outputs"] = out;
    return j;
}

/// Reads a JSON config with the keys written by to_json(RunConfig). Relative
/// paths are kept as written.
inline RunConfig run_config_from_json(const nlohmann::json& j) {
    RunConfig c;
    try {
        if (j.contains("contexts")) {
            for (const auto& s : j.at("contexts")) {
                c.contexts.push_back(ContextSource{s.value("tag", std::string{}), s.at("path").get<std::string>()});
            }
        }
        c.join = j.value("join", false);
        if (j.contains("detector")) c.detector = parse_detector(j.at("detector").get<std::string>());
        if (j.contains("min_supp")) c.min_supp = Percent{j.at("min_supp").get<double>()};
        if (j.contains("max_supp")) c.max_supp = Percent{j.at("max_supp").get<double>()};
        if (j.contains("min_supp_abs")) c.min_supp_abs = AbsSupport{j.at("min_supp_abs").get<std::size_t>()};
        if (j.contains("max_supp_abs")) c.max_supp_abs = AbsSupport{j.at("max_supp_abs").get<std::size_t>()};
        if (j.contains("min_conf")) c.min_conf = Percent{j.at("min_conf").get<double>()};
        if (j.contains("max_len")) c.max_len = j.at("max_len").get<std::size_t>();
        if (j.contains("aggregation")) c.aggregation = parse_aggregation(j.at("aggregation").get<std::string>());
        if (j.contains("interest_mode")) c.interest_mode = parse_interest_mode(j.at("interest_mode").get<std::string>());
        if (j.contains("labels")) c.labels = j.at("labels").get<std::string>();
        c.drop_unknown_labels = j.value("drop_unknown_labels", false);
        if (j.contains("outputs")) {
            const auto& o = j.at("outputs");
            auto get = [&](const char* key, std::optional<std::filesystem::path>& dst) {
                if (o.contains(key)) dst = o.at(key).get<std::string>();
            };
            get("ranking_csv", c.outputs.ranking_csv);
            get("rules_csv", c.outputs.rules_csv);
            get("report_json", c.outputs.report_json);
            get("band_svg", c.outputs.band_svg);
            get("explain", c.outputs.explain);
            c.outputs.explain_top_k = o.value("explain_top_k", std::size_t{0});
            get("manifest", c.outputs.manifest);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config: ") + e.what());
    }
    return c;
}

inline Context load_run_context(const RunConfig& cfg) {
    if (!cfg.join) return load_context(cfg.contexts.front().path);
    std::vector<TaggedContext> parts;
    for (const auto& s : cfg.contexts) parts.push_back(TaggedContext{s.tag, load_context(s.path)});
    return join_contexts(parts);
}

/// Runs the configured detector. The ranking is completed to cover every object.
inline Detection detect(const RunConfig& cfg, const Context& c) {
    const ScoringOptions opts{cfg.aggregation, cfg.interest_mode};
    const std::size_t max_len = cfg.effective_max_len();
    auto min_abs = [&] { return cfg.min_supp_abs ? *cfg.min_supp_abs : absolute_threshold(*cfg.min_supp, c.m()); };
    Detection d;
    switch (cfg.detector) {
    case Detector::vr_arm: {
        const AbsSupport max_abs = cfg.max_supp_abs ? *cfg.max_supp_abs : absolute_threshold(*cfg.max_supp, c.m());
        d = vr_arm(c, max_abs, cfg.min_conf, max_len, opts);
        break;
    }
    case Detector::vf_arm: d = vf_arm(c, min_abs(), cfg.min_conf, max_len, opts); break;
    case Detector::fpof: d.ranking = fpof(c, min_abs(), max_len); break;
    case Detector::avf: d.ranking = avf(c); break;
    case Detector::od: d.ranking = od(c, min_abs(), cfg.min_conf, max_len); break;
    }
    d.ranking = complete_ranking(std::move(d.ranking), c);
    return d;
}

struct RunResult {
    Context context;
    Detection detection;
    std::size_t flagged = 0;
    std::optional<EvalReport> report;
    double seconds = 0.0;
    nlohmann::ordered_json manifest;
};

namespace detail {

/// Removes files written so far unless released.
class OutputTransaction {
public:
    OutputTransaction() = default;
    OutputTransaction(const OutputTransaction&) = delete;
    OutputTransaction& operator=(const OutputTransaction&) = delete;
    ~OutputTransaction() {
        if (committed_) return;
        std::error_code ec;
        for (const auto& p : written_) std::filesystem::remove(p, ec);
    }

    void write(const std::filesystem::path& p, const std::string& content) {
        write_file_atomic(p, content);
        written_.push_back(p);
    }
    void commit() { committed_ = true; }

private:
    std::vector<std::filesystem::path> written_;
    bool committed_ = false;
};

inline std::string explain_top(const RunResult& r, std::size_t k) {
    std::string out;
    const auto& entries = r.detection.ranking.entries;
    for (std::size_t i = 0; i < k && i < entries.size(); ++i) {
        out += "#" + std::to_string(i + 1) + " " + explain(entries[i], r.detection.rules, r.context);
    }
    return out;
}

} // namespace detail

/// Loads, detects, evaluates and writes every requested artifact. On failure
/// nothing written by this call is left behind.
inline RunResult run(const RunConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    RunResult r;
    r.context = load_run_context(cfg);
    std::optional<LabelSet> labels;
    if (cfg.labels) labels = make_label_set(load_labels(*cfg.labels), r.context, cfg.drop_unknown_labels);

    r.detection = detect(cfg, r.context);
    for (const auto& e : r.detection.ranking.entries) {
        if (!e.matches.empty()) ++r.flagged;
    }
    if (labels) r.report = evaluate(r.detection.ranking, r.context, *labels);

    detail::OutputTransaction tx;
    const auto& out = cfg.outputs;
    if (out.ranking_csv) {
        std::ostringstream s;
        write_ranking_csv(s, r.detection.ranking, r.context);
        tx.write(*out.ranking_csv, s.str());
    }
    if (out.rules_csv) {
        std::ostringstream s;
        write_rules_csv(s, r.detection.rules, r.context);
        tx.write(*out.rules_csv, s.str());
    }
    if (out.report_json) tx.write(*out.report_json, to_json(*r.report).dump(2) + "\n");
    if (out.band_svg) tx.write(*out.band_svg, band_diagram_svg(*r.report));
    if (out.explain) tx.write(*out.explain, detail::explain_top(r, out.explain_top_k));

    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.manifest["config"] = to_json(cfg);
    r.manifest["context"] = {{"m", r.context.m()}, {"n", r.context.n()}};
    r.manifest["rules"] = r.detection.rules.size();
    r.manifest["flagged"] = r.flagged;
    r.manifest["degenerate"] = r.detection.ranking.degenerate;
    r.manifest["wall_clock_seconds"] = r.seconds;
    if (out.manifest) tx.write(*out.manifest, r.manifest.dump(2) + "\n");
    tx.commit();
    return r;
}

struct GridCell {
    Percent supp;
    Percent conf;
};

struct SweepCell {
    GridCell cell;
    EvalReport report;
    std::size_t rules = 0;
    std::size_t flagged = 0;
};

struct SweepResult {
    std::vector<SweepCell> cells;
    std::size_t best_ndcg = 0; ///< index into cells
    std::size_t best_auc = 0;
    nlohmann::ordered_json summary;
};

/// Parses `SUPPxCONF`, e.g. `0.05x100`.
inline GridCell parse_grid_cell(std::string_view s) {
    const auto x = s.find('x');
    if (x == std::string_view::npos) throw ConfigError("grid cell must be SUPPxCONF, got '" + std::string(s) + "'");
    try {
        return GridCell{Percent{std::stod(std::string(s.substr(0, x)))}, Percent{std::stod(std::string(s.substr(x + 1)))}};
    } catch (const std::exception&) {
        throw ConfigError("grid cell must be SUPPxCONF, got '" + std::string(s) + "'");
    }
}

namespace detail {

/// argmax of `metric`; ties go to the smaller support, then the smaller confidence.
template <typename Metric>
std::size_t best_cell(const std::vector<SweepCell>& cells, Metric metric) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < cells.size(); ++i) {
        const double a = metric(cells[i]), b = metric(cells[best]);
        const auto& ci = cells[i].cell;
        const auto& cb = cells[best].cell;
        if (a > b || (a == b && (ci.supp < cb.supp || (ci.supp == cb.supp && ci.conf < cb.conf)))) best = i;
    }
    return best;
}

inline nlohmann::ordered_json cell_json(const SweepCell& c) {
    nlohmann::ordered_json j;
    j["supp"] = c.cell.supp.value;
    j["conf"] = c.cell.conf.value;
    j["rules"] = c.rules;
    j["flagged"] = c.flagged;
    j["report"] = to_json(c.report);
    return j;
}

} // namespace detail

/// Evaluates the detector over a (supp, conf) grid. The support value is
/// max_supp for vr-arm and min_supp for the other detectors. Per-cell reports
/// (`cell_<k>.json`) and `summary.json` go to `out_dir` when given.
inline SweepResult sweep(const RunConfig& base, std::span<const GridCell> grid,
                         const std::optional<std::filesystem::path>& out_dir = std::nullopt) {
    if (grid.empty()) throw ConfigError("sweep grid is empty");
    if (!base.labels) throw ConfigError("sweep needs --labels");
    RunConfig probe = base;
    probe.outputs = RunOutputs{};
    probe.min_supp_abs.reset();
    probe.max_supp_abs.reset();
    if (probe.detector == Detector::vr_arm) probe.max_supp = grid.front().supp; else probe.min_supp = grid.front().supp;
    probe.min_conf = grid.front().conf;
    probe.validate();

    const Context c = load_run_context(probe);
    const LabelSet labels = make_label_set(load_labels(*base.labels), c, base.drop_unknown_labels);

    SweepResult res;
    for (const auto& cell : grid) {
        RunConfig cfg = probe;
        if (cfg.detector == Detector::vr_arm) cfg.max_supp = cell.supp; else cfg.min_supp = cell.supp;
        cfg.min_conf = cell.conf;
        cfg.validate();
        const Detection d = detect(cfg, c);
        SweepCell sc{cell, evaluate(d.ranking, c, labels), d.rules.size(), 0};
        for (const auto& e : d.ranking.entries) {
            if (!e.matches.empty()) ++sc.flagged;
        }
        res.cells.push_back(std::move(sc));
    }
    res.best_ndcg = detail::best_cell(res.cells, [](const SweepCell& s) { return s.report.ndcg; });
    res.best_auc = detail::best_cell(res.cells, [](const SweepCell& s) { return s.report.auc; });

    auto& sum = res.summary;
    sum["detector"] = std::string(to_string(base.detector));
    sum["best_ndcg"] = detail::cell_json(res.cells[res.best_ndcg]);
    sum["best_ndcg"]["index"] = res.best_ndcg;
    sum["best_auc"] = detail::cell_json(res.cells[res.best_auc]);
    sum["best_auc"]["index"] = res.best_auc;
    nlohmann::ordered_json all = nlohmann::ordered_json::array();
    for (const auto& s : res.cells) all.push_back(detail::cell_json(s));
    sum["cells"] = all;

    if (out_dir) {
        std::error_code ec;
        std::filesystem::create_directories(*out_dir, ec);
        if (ec) throw IoError("cannot create " + out_dir->string());
        detail::OutputTransaction tx;
        for (std::size_t k = 0; k < res.cells.size(); ++k) {
            tx.write(*out_dir / ("cell_" + std::to_string(k) + ".json"), detail::cell_json(res.cells[k]).dump(2) + "\n");
        }
        tx.write(*out_dir / "summary.json", sum.dump(2) + "\n");
        tx.commit();
    }
    return res;
}

} // namespace rarm
