// pdm: cost-sensitive predictive-maintenance experiments from one JSON config.
//
//   pdm simulate --config run.json
//   pdm features --config run.json
//   pdm tune     --config run.json
//   pdm evaluate --config run.json
//   pdm roc | surface | sweep --config run.json
//   pdm project --weekly 21483 --weeks 53
//
// Exit codes: 0 ok, 1 runtime failure, 2 config or usage error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "pdm/analysis.hpp"
#include "pdm/config.hpp"
#include "pdm/econ.hpp"
#include "pdm/error.hpp"
#include "pdm/forest.hpp"
#include "pdm/io.hpp"
#include "pdm/metrics.hpp"
#include "pdm/parallel.hpp"
#include "pdm/simfleet.hpp"
#include "pdm/tuner.hpp"
#include "pdm/windowing.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Options {
    std::string config_path;
    std::string format = "text";
    unsigned threads = 0;

    std::string fleet_path;
    std::string events_path;
    std::string dataset_path;
    std::string model_path;
    std::optional<double> cutoff;
    std::optional<double> s0;
    std::optional<std::int64_t> positives;
    std::optional<std::int64_t> negatives;
    std::optional<std::int64_t> stride_tp;
    std::optional<std::int64_t> stride_fp;
    int bound_samples = 101;

    double weekly = 0.0;
    double weeks = 1.0;
    double scale = 1.0;
};

fs::path resolve(const std::string& given, const fs::path& dir, const char* fallback) {
    return given.empty() ? dir / fallback : fs::path(given);
}

/// Records a command run in <output_dir>/manifest.json. No wall-clock
/// fields, so re-running a command rewrites the file identically.
void update_manifest(const pdm::RunConfig& config, const std::string& command,
                     const std::vector<fs::path>& inputs, const std::vector<fs::path>& outputs) {
    const fs::path path = fs::path(config.output_dir) / "manifest.json";
    json manifest = json::object();
    if (fs::exists(path)) {
        try {
            std::ifstream in(path);
            manifest = json::parse(in);
        } catch (const json::exception&) {
            manifest = json::object();
        }
    }
    manifest["tool"] = "pdm";
    manifest["version"] = kVersion;
    manifest["config_hash"] = pdm::config_hash(config);
    manifest["seed"] = config.seed;
    manifest["config"] = config.to_json();
    json run;
    run["inputs"] = json::array();
    for (const auto& p : inputs) run["inputs"].push_back(p.string());
    run["outputs"] = json::array();
    for (const auto& p : outputs) run["outputs"].push_back(p.string());
    manifest["commands"][command] = run;
    auto out = pdm::io::open_output(path);
    out << manifest.dump(2) << '\n';
}

pdm::Fleet make_fleet(const pdm::RunConfig& config, std::ostream* log) {
    pdm::SimConfig sim = config.sim;
    if (sim.target_positive_rate && sim.n_devices > 0) {
        sim = pdm::calibrate_hazard(sim);
        if (log != nullptr) {
            *log << "calibrated hazard range [" << pdm::io::format_double(sim.hazard_min) << ", "
                 << pdm::io::format_double(sim.hazard_max) << "] for target positive rate "
                 << pdm::io::format_double(*sim.target_positive_rate) << '\n';
        }
    }
    return pdm::generate_fleet(sim);
}

pdm::WindowedDataset load_dataset(const fs::path& path) {
    auto in = pdm::io::open_input(path);
    return pdm::io::read_dataset_csv(in);
}

struct LoadedModel {
    pdm::ForestModel model;
    std::optional<double> cutoff;
};

LoadedModel load_model_file(const fs::path& path) {
    auto in = pdm::io::open_input(path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw pdm::DataError(path.string() + ": " + e.what());
    }
    LoadedModel m{pdm::ForestModel::from_json(j), std::nullopt};
    if (j.contains("cutoff")) m.cutoff = j.at("cutoff").get<double>();
    return m;
}

double pick_cutoff(const Options& opt, const LoadedModel& m) {
    if (opt.cutoff) return *opt.cutoff;
    if (m.cutoff) return *m.cutoff;
    throw pdm::ConfigError("model has no tuned cutoff; pass --cutoff");
}

int cmd_simulate(const pdm::RunConfig& config) {
    const fs::path dir = config.output_dir;
    const auto fleet = make_fleet(config, &std::cout);
    const fs::path fleet_csv = dir / "fleet.csv";
    const fs::path events_csv = dir / "events.csv";
    {
        auto out = pdm::io::open_output(fleet_csv);
        pdm::io::write_fleet_csv(out, fleet.profiles);
    }
    {
        auto out = pdm::io::open_output(events_csv);
        pdm::io::write_events_csv(out, fleet.logs);
    }
    std::size_t records = 0;
    for (const auto& log : fleet.logs) records += log.records.size();
    std::cout << "simulated " << fleet.profiles.size() << " devices, " << records
              << " records -> " << fleet_csv.string() << ", " << events_csv.string() << '\n';
    update_manifest(config, "simulate", {}, {fleet_csv, events_csv});
    return 0;
}

int cmd_features(const pdm::RunConfig& config, const Options& opt) {
    const fs::path dir = config.output_dir;
    const auto fleet_csv = resolve(opt.fleet_path, dir, "fleet.csv");
    const auto events_csv = resolve(opt.events_path, dir, "events.csv");
    std::vector<pdm::DeviceProfile> profiles;
    std::vector<pdm::EventLog> logs;
    {
        auto in = pdm::io::open_input(fleet_csv);
        profiles = pdm::io::read_fleet_csv(in);
    }
    {
        auto in = pdm::io::open_input(events_csv);
        logs = pdm::io::read_events_csv(in);
    }
    const auto spec = config.window.to_spec();
    const auto horizon = config.window.horizon_hours();
    const auto split = pdm::split_horizon(logs, horizon);
    const auto train = pdm::training_dataset(split, profiles, spec, horizon);
    const auto test = pdm::test_dataset(split, profiles, spec, horizon);

    const fs::path train_csv = dir / "dataset.csv";
    const fs::path test_csv = dir / "dataset_test.csv";
    {
        auto out = pdm::io::open_output(train_csv);
        pdm::io::write_dataset_csv(out, train);
    }
    {
        auto out = pdm::io::open_output(test_csv);
        pdm::io::write_dataset_csv(out, test);
    }
    std::cout << "training windows: " << train.rows.size() << " rows (P=" << train.positives
              << ", N=" << train.negatives << ") -> " << train_csv.string() << '\n'
              << "test window:      " << test.rows.size() << " rows (P=" << test.positives
              << ", N=" << test.negatives << ") -> " << test_csv.string() << '\n';
    update_manifest(config, "features", {fleet_csv, events_csv}, {train_csv, test_csv});
    return 0;
}

int cmd_tune(const pdm::RunConfig& config, const Options& opt) {
    const fs::path dir = config.output_dir;
    const auto dataset_csv = resolve(opt.dataset_path, dir, "dataset.csv");
    const auto train = load_dataset(dataset_csv);
    const auto spec = config.window.to_spec();
    const auto cost = pdm::affine_coefficients(config.cost, static_cast<double>(spec.t_gap),
                                               static_cast<double>(spec.t_pred));
    const auto grid = pdm::expand_grid(train.schema.size(), train.positives, train.negatives,
                                       config.grid, config.objective);
    pdm::TuneOptions options;
    options.seed = config.seed;
    options.holdout_fraction = config.holdout_fraction;
    const auto result = pdm::tune(train, grid, cost, options);
    const auto model = pdm::fit_best(train, result);

    const fs::path model_json = dir / "model.json";
    const fs::path trace_csv = dir / "tune_trace.csv";
    {
        json j = model.to_json();
        j["cutoff"] = result.best.cutoff;
        j["objective"] = std::string(pdm::to_string(result.objective));
        auto out = pdm::io::open_output(model_json);
        out << j.dump() << '\n';
    }
    {
        auto out = pdm::io::open_output(trace_csv);
        pdm::io::write_trace_csv(out, result.trace);
    }

    const auto& b = result.best;
    if (opt.format == "json") {
        std::cout << json{{"objective", pdm::to_string(result.objective)},
                          {"ntree", b.ntree}, {"mtry", b.mtry}, {"samp", b.samp},
                          {"cutoff", b.cutoff}, {"f1", b.f1}, {"s", b.savings},
                          {"cells", result.trace.size()}}
                         .dump(2)
                  << '\n';
    } else if (opt.format == "csv") {
        std::cout << "objective,ntree,mtry,samp,cutoff,f1,s\n"
                  << pdm::to_string(result.objective) << ',' << b.ntree << ',' << b.mtry << ','
                  << b.samp << ',' << pdm::io::format_double(b.cutoff) << ','
                  << pdm::io::format_double(b.f1) << ',' << pdm::io::format_double(b.savings)
                  << '\n';
    } else {
        std::cout << "evaluated " << result.trace.size() << " grid cells, objective "
                  << pdm::to_string(result.objective) << '\n'
                  << "best: ntree=" << b.ntree << " mtry=" << b.mtry << " samp=" << b.samp
                  << " cutoff=" << pdm::io::format_double(b.cutoff) << " F1="
                  << pdm::io::format_double(b.f1) << " S=" << pdm::io::format_double(b.savings)
                  << '\n';
    }
    update_manifest(config, "tune", {dataset_csv}, {model_json, trace_csv});
    return 0;
}

std::string money(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

int cmd_evaluate(const pdm::RunConfig& config, const Options& opt) {
    const fs::path dir = config.output_dir;
    const auto model_json = resolve(opt.model_path, dir, "model.json");
    const auto dataset_csv = resolve(opt.dataset_path, dir, "dataset_test.csv");
    const auto loaded = load_model_file(model_json);
    const double cutoff = pick_cutoff(opt, loaded);
    const auto ds = load_dataset(dataset_csv);
    const auto scores = pdm::vote_scores(loaded.model, ds);
    const auto counts = pdm::confusion(pdm::classify(scores, cutoff), ds.labels());

    const auto spec = config.window.to_spec();
    const auto t_gap = static_cast<double>(spec.t_gap);
    const auto t_pred = static_cast<double>(spec.t_pred);
    const auto ac = pdm::affine_coefficients(config.cost, t_gap, t_pred);
    const double s = pdm::savings(counts, ac);
    const double reactive = pdm::reactive_cost(counts.positives(), config.cost);
    const double pdm_total = pdm::pdm_cost(counts, config.cost, t_gap, t_pred);
    const auto lines = pdm::itemize(counts, config.cost, t_gap, t_pred);
    const auto re = pdm::recall(counts);
    const auto pr = pdm::precision(counts);
    const auto f = pdm::f1(counts);
    const bool has_pct = reactive > 0.0;
    const double pct = has_pct ? pdm::percent_of(pdm_total, reactive) : 0.0;

    std::ostringstream report;
    if (opt.format == "json") {
        json j{{"cutoff", cutoff},
               {"tp", counts.tp}, {"fp", counts.fp}, {"tn", counts.tn}, {"fn", counts.fn},
               {"recall", re.value}, {"precision", pr.value}, {"f1", f.value},
               {"a", ac.a}, {"b", ac.b}, {"c", ac.c}, {"savings", s},
               {"reactive_cost", reactive}, {"pdm_cost", pdm_total},
               {"pdm_pct", has_pct ? json(pct) : json(nullptr)}};
        for (const auto& l : lines) {
            j["costs"].push_back({{"component", l.component}, {"current", l.current},
                                  {"future", l.future}, {"delta", l.delta()}});
        }
        report << j.dump(2) << '\n';
    } else if (opt.format == "csv") {
        report << "cutoff,tp,fp,tn,fn,recall,precision,f1,savings,reactive_cost,pdm_cost,pdm_pct\n"
               << pdm::io::format_double(cutoff) << ',' << counts.tp << ',' << counts.fp << ','
               << counts.tn << ',' << counts.fn << ',' << pdm::io::format_double(re.value) << ','
               << pdm::io::format_double(pr.value) << ',' << pdm::io::format_double(f.value)
               << ',' << pdm::io::format_double(s) << ',' << pdm::io::format_double(reactive)
               << ',' << pdm::io::format_double(pdm_total) << ','
               << (has_pct ? pdm::io::format_double(pct) : "") << '\n';
    } else {
        auto flag = [](const pdm::Measure& m) { return m.degenerate ? " (degenerate)" : ""; };
        report << "cutoff            " << pdm::io::format_double(cutoff) << '\n'
               << "confusion         TP=" << counts.tp << " FP=" << counts.fp
               << " TN=" << counts.tn << " FN=" << counts.fn << '\n'
               << "recall            " << re.value << flag(re) << '\n'
               << "precision         " << pr.value << flag(pr) << '\n'
               << "F1                " << f.value << flag(f) << '\n'
               << "cost function     S = " << pdm::io::format_double(ac.a) << " * TP - "
               << pdm::io::format_double(ac.b) << " * FP\n"
               << "savings S         $" << money(s) << '\n'
               << "reactive cost     $" << money(reactive) << '\n'
               << "PdM cost          $" << money(pdm_total);
        if (has_pct) report << " = " << money(pct) << "% of reactive";
        report << "\n\n";
        char row[128];
        std::snprintf(row, sizeof row, "%-12s %14s %14s %14s\n", "component", "reactive",
                      "predictive", "savings");
        report << row;
        for (const auto& l : lines) {
            std::snprintf(row, sizeof row, "%-12s %14.2f %14.2f %14.2f\n", l.component.c_str(),
                          l.current, l.future, l.delta());
            report << row;
        }
    }

    const fs::path report_txt = dir / "report.txt";
    const fs::path costs_csv = dir / "costs.csv";
    {
        auto out = pdm::io::open_output(report_txt);
        out << report.str();
    }
    {
        auto out = pdm::io::open_output(costs_csv);
        pdm::io::write_costs_csv(out, lines);
    }
    std::cout << report.str();
    update_manifest(config, "evaluate", {model_json, dataset_csv}, {report_txt, costs_csv});
    return 0;
}

int cmd_roc(const pdm::RunConfig& config, const Options& opt) {
    const fs::path dir = config.output_dir;
    const auto model_json = resolve(opt.model_path, dir, "model.json");
    const auto dataset_csv = resolve(opt.dataset_path, dir, "dataset_test.csv");
    const auto loaded = load_model_file(model_json);
    const auto ds = load_dataset(dataset_csv);
    const auto scores = pdm::vote_scores(loaded.model, ds);
    const auto labels = ds.labels();
    const auto curve = pdm::roc(scores, labels);

    const auto spec = config.window.to_spec();
    const auto ac = pdm::affine_coefficients(config.cost, static_cast<double>(spec.t_gap),
                                             static_cast<double>(spec.t_pred));
    double upper = 0.0;
    if (opt.s0) {
        upper = *opt.s0;
    } else if (opt.cutoff || loaded.cutoff) {
        upper = pdm::savings(pdm::confusion_at(scores, labels, pick_cutoff(opt, loaded)), ac);
    }
    std::vector<std::pair<double, std::vector<pdm::BoundPoint>>> bounds;
    for (double s0 : {0.0, upper}) {
        const auto line = pdm::iso_savings_line(s0, ac, ds.positives, ds.negatives);
        bounds.emplace_back(s0, pdm::sample_iso_line(line, opt.bound_samples));
    }

    const fs::path roc_csv = dir / "roc.csv";
    const fs::path bounds_csv = dir / "bounds.csv";
    {
        auto out = pdm::io::open_output(roc_csv);
        pdm::io::write_roc_csv(out, curve);
    }
    {
        auto out = pdm::io::open_output(bounds_csv);
        pdm::io::write_bounds_csv(out, bounds);
    }
    const auto zero = pdm::iso_savings_line(0.0, ac, ds.positives, ds.negatives);
    if (opt.format == "json") {
        std::cout << json{{"auc", curve.auc}, {"points", curve.points.size()},
                          {"zero_slope", zero.slope}, {"upper_s0", upper}}
                         .dump(2)
                  << '\n';
    } else if (opt.format == "csv") {
        std::cout << "auc,points,zero_slope,upper_s0\n"
                  << pdm::io::format_double(curve.auc) << ',' << curve.points.size() << ','
                  << pdm::io::format_double(zero.slope) << ',' << pdm::io::format_double(upper)
                  << '\n';
    } else {
        std::cout << "AUC " << curve.auc << " over " << curve.points.size() << " points\n"
                  << "zero-savings line: TPR = " << zero.slope << " * FPR\n"
                  << "upper bound at S0 = $" << money(upper) << '\n';
    }
    update_manifest(config, "roc", {model_json, dataset_csv}, {roc_csv, bounds_csv});
    return 0;
}

int cmd_surface(const pdm::RunConfig& config, const Options& opt) {
    const fs::path dir = config.output_dir;
    const auto p = opt.positives.value_or(config.surface.positives);
    const auto n = opt.negatives.value_or(config.surface.negatives);
    const auto stride_tp = opt.stride_tp.value_or(config.surface.stride_tp);
    const auto stride_fp = opt.stride_fp.value_or(config.surface.stride_fp);
    const auto spec = config.window.to_spec();
    const auto ac = pdm::affine_coefficients(config.cost, static_cast<double>(spec.t_gap),
                                             static_cast<double>(spec.t_pred));
    const auto grid = pdm::surface(p, n, stride_tp, stride_fp, ac);

    const fs::path surface_csv = dir / "surface.csv";
    {
        auto out = pdm::io::open_output(surface_csv);
        pdm::io::write_surface_csv(out, grid);
    }
    const auto conflict = pdm::find_f1_savings_conflict(grid, 0.005);
    std::cout << "surface " << grid.tp_levels.size() << " x " << grid.fp_levels.size()
              << " cells -> " << surface_csv.string() << '\n';
    if (conflict) {
        const auto& [a, b] = *conflict;
        std::cout << "equal-F1 cells with opposite savings: (TP=" << a.tp << ", FP=" << a.fp
                  << ", F1=" << a.f1 << ", S=" << money(a.s) << ") vs (TP=" << b.tp
                  << ", FP=" << b.fp << ", F1=" << b.f1 << ", S=" << money(b.s) << ")\n";
    }
    update_manifest(config, "surface", {}, {surface_csv});
    return 0;
}

int cmd_sweep(const pdm::RunConfig& config, const Options& opt) {
    const fs::path dir = config.output_dir;
    const auto fleet = make_fleet(config, &std::cerr);
    const auto base = config.window.to_spec();
    pdm::SweepSettings settings;
    for (double g : config.sweep.gap_days) {
        for (double p : config.sweep.pred_days) settings.geometries.emplace_back(g, p);
    }
    settings.t_obs = base.t_obs;
    settings.step = base.step;
    settings.k_periods = base.k_periods;
    settings.horizon = config.window.horizon_hours();
    settings.grid = config.grid;
    settings.cost = config.cost;
    settings.tune.seed = config.seed;
    settings.tune.holdout_fraction = config.holdout_fraction;
    const auto rows = pdm::sweep(fleet, settings);

    const fs::path sweep_csv = dir / "sweep.csv";
    {
        auto out = pdm::io::open_output(sweep_csv);
        pdm::io::write_sweep_csv(out, rows);
    }
    if (opt.format == "csv") {
        pdm::io::write_sweep_csv(std::cout, rows);
    } else if (opt.format == "json") {
        json j = json::array();
        for (const auto& r : rows) {
            j.push_back({{"t_gap_days", r.t_gap_days}, {"t_pred_days", r.t_pred_days},
                         {"reactive", r.reactive}, {"pdm_f1", r.pdm_f1}, {"pdm_s", r.pdm_s},
                         {"f1_pct", r.f1_pct}, {"s_pct", r.s_pct}, {"delta_pct", r.delta_pct},
                         {"error", r.error}});
        }
        std::cout << j.dump(2) << '\n';
    } else {
        char line[160];
        std::snprintf(line, sizeof line, "%-9s %12s %20s %20s %8s\n", "(TG,TP)", "reactive",
                      "PdM F1", "PdM S", "delta");
        std::cout << line;
        for (const auto& r : rows) {
            char geo[32];
            std::snprintf(geo, sizeof geo, "(%g,%g)", r.t_gap_days, r.t_pred_days);
            if (!r.ok()) {
                std::cout << geo << "  error: " << r.error << '\n';
                continue;
            }
            std::snprintf(line, sizeof line, "%-9s %12.0f %11.0f=%6.2f%% %11.0f=%6.2f%% %7.2f%%\n",
                          geo, r.reactive, r.pdm_f1, r.f1_pct, r.pdm_s, r.s_pct, r.delta_pct);
            std::cout << line;
        }
    }
    update_manifest(config, "sweep", {}, {sweep_csv});
    bool any_ok = false;
    for (const auto& r : rows) any_ok = any_ok || r.ok();
    return any_ok ? 0 : 1;
}

int cmd_project(const Options& opt) {
    const double total = pdm::project_savings(opt.weekly, opt.weeks, opt.scale);
    if (opt.format == "json") {
        std::cout << json{{"weekly", opt.weekly}, {"weeks", opt.weeks}, {"scale", opt.scale},
                          {"projected_savings", total}}
                         .dump()
                  << '\n';
    } else if (opt.format == "csv") {
        std::cout << "weekly,weeks,scale,projected_savings\n"
                  << pdm::io::format_double(opt.weekly) << ',' << pdm::io::format_double(opt.weeks)
                  << ',' << pdm::io::format_double(opt.scale) << ','
                  << pdm::io::format_double(total) << '\n';
    } else {
        std::cout << pdm::io::format_double(total) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cost-sensitive predictive maintenance toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Options opt;
    app.add_option("--threads", opt.threads, "Worker thread cap (0 = all cores)");

    auto add_config = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "Experiment JSON config")
            ->required()
            ->check(CLI::ExistingFile);
    };
    auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", opt.format, "Report format")
            ->check(CLI::IsMember({"text", "csv", "json"}));
    };

    auto* simulate = app.add_subcommand("simulate", "Generate fleet.csv and events.csv");
    add_config(simulate);

    auto* features = app.add_subcommand("features", "Window the logs into dataset.csv / dataset_test.csv");
    add_config(features);
    features->add_option("--fleet", opt.fleet_path, "fleet.csv (default <output_dir>/fleet.csv)");
    features->add_option("--events", opt.events_path, "events.csv (default <output_dir>/events.csv)");

    auto* tune = app.add_subcommand("tune", "Grid-search forest settings and cutoff");
    add_config(tune);
    add_format(tune);
    tune->add_option("--dataset", opt.dataset_path, "Training dataset (default <output_dir>/dataset.csv)");

    auto* evaluate = app.add_subcommand("evaluate", "Confusion, F1, savings and cost table on the test window");
    add_config(evaluate);
    add_format(evaluate);
    evaluate->add_option("--model", opt.model_path, "model.json (default <output_dir>/model.json)");
    evaluate->add_option("--dataset", opt.dataset_path, "Dataset (default <output_dir>/dataset_test.csv)");
    evaluate->add_option("--cutoff", opt.cutoff, "Override the tuned cutoff")
        ->check(CLI::Range(0.0, 1.0));

    auto* roc = app.add_subcommand("roc", "ROC curve plus zero and upper iso-savings lines");
    add_config(roc);
    add_format(roc);
    roc->add_option("--model", opt.model_path, "model.json (default <output_dir>/model.json)");
    roc->add_option("--dataset", opt.dataset_path, "Dataset (default <output_dir>/dataset_test.csv)");
    roc->add_option("--cutoff", opt.cutoff, "Cutoff whose savings set the upper line")
        ->check(CLI::Range(0.0, 1.0));
    roc->add_option("--s0", opt.s0, "Savings level of the upper line");
    roc->add_option("--samples", opt.bound_samples, "Points per bound line")
        ->check(CLI::PositiveNumber);

    auto* surface = app.add_subcommand("surface", "F1 and savings over the TP x FP lattice");
    add_config(surface);
    surface->add_option("--positives", opt.positives, "P");
    surface->add_option("--negatives", opt.negatives, "N");
    surface->add_option("--stride-tp", opt.stride_tp, "TP lattice stride");
    surface->add_option("--stride-fp", opt.stride_fp, "FP lattice stride");

    auto* sweep = app.add_subcommand("sweep", "Reactive vs PdM-F1 vs PdM-S over gap/prediction lengths");
    add_config(sweep);
    add_format(sweep);

    auto* project = app.add_subcommand("project", "Scale weekly savings by weeks and fleet size");
    add_format(project);
    project->add_option("--weekly", opt.weekly, "Weekly savings in $")->required();
    project->add_option("--weeks", opt.weeks, "Number of weeks")->check(CLI::NonNegativeNumber);
    project->add_option("--scale", opt.scale, "Device-count multiplier")->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        pdm::set_thread_count(opt.threads);
        if (project->parsed()) return cmd_project(opt);

        const auto config = pdm::load_run_config(opt.config_path);
        if (simulate->parsed()) return cmd_simulate(config);
        if (features->parsed()) return cmd_features(config, opt);
        if (tune->parsed()) return cmd_tune(config, opt);
        if (evaluate->parsed()) return cmd_evaluate(config, opt);
        if (roc->parsed()) return cmd_roc(config, opt);
        if (surface->parsed()) return cmd_surface(config, opt);
        if (sweep->parsed()) return cmd_sweep(config, opt);
    } catch (const pdm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
