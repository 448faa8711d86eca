// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pdm/analysis.hpp"
#include "pdm/config.hpp"
#include "pdm/econ.hpp"
#include "pdm/forest.hpp"
#include "pdm/metrics.hpp"
#include "pdm/simfleet.hpp"
#include "pdm/tuner.hpp"
#include "pdm/windowing.hpp"

using namespace pdm;

namespace {

constexpr double kWeek = 168.0;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail << " [exception: " << e.what() << "]";
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > limit_s) {
        o.pass = false;
        o.detail << " [over time limit " << limit_s << " s]";
    }
    std::printf("%s  %d. %s (%.2f s)%s\n", o.pass ? "PASS" : "FAIL", id, title, secs,
                o.detail.str().c_str());
    std::fflush(stdout);
    failures += !o.pass;
}

WindowedDataset noisy_dataset(std::size_t rows, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    WindowedDataset ds;
    ds.schema.names = {"x0", "x1", "x2", "x3", "cat_a", "cat_b"};
    ds.schema.kinds = {FeatureKind::Numeric, FeatureKind::Numeric, FeatureKind::Numeric,
                       FeatureKind::Numeric, FeatureKind::Categorical, FeatureKind::Categorical};
    for (std::size_t r = 0; r < rows; ++r) {
        DatasetRow row;
        for (int c = 0; c < 4; ++c) row.features.push_back(std::round(u(gen) * 40.0) / 4.0);
        row.features.push_back(static_cast<double>(gen() % 5));
        row.features.push_back(static_cast<double>(gen() % 3));
        row.label = u(gen) < 0.15 + 0.07 * row.features[0] ? 1 : 0;
        ds.rows.push_back(row);
    }
    ds.rows[0].label = 1;
    ds.rows[1].label = 0;
    ds.recount();
    return ds;
}

double walk(const DecisionTree& tree, const std::vector<double>& row) {
    std::size_t at = 0;
    while (tree.nodes[at].feature >= 0) {
        const auto& n = tree.nodes[at];
        const double v = row[static_cast<std::size_t>(n.feature)];
        at = static_cast<std::size_t>((n.categorical ? v == n.threshold : v <= n.threshold) ? n.left
                                                                                            : n.right);
    }
    return tree.nodes[at].value;
}

void c1(Outcome& o) {
    const CostModel cm;
    o.require(reactive_cost(5445, cm) == 539055.0, "reactive_cost(5445) == 539055");
    o.require(reactive_cost(3498, cm) == 346302.0, "reactive_cost(3498) == 346302");
    const auto ac = affine_coefficients(cm, kWeek, kWeek);
    o.require(ac.a == 44.0 && ac.b == 55.0 && ac.c == 0.0, "a=44, b=55");
    o.require(expected_downtime(0, 0, cm) == 8.0, "expected_downtime(0,0) == 8");
    o.detail << " reactive 539055/346302, S = " << ac.a << " TP - " << ac.b << " FP";
}

void c2(Outcome& o) {
    struct Row {
        double gap, pred, reactive, f1, s, f1_pct, s_pct, delta;
    };
    const Row rows[] = {
        {4, 4, 346302, 462682, 343559, 133.61, 99.21, 34.40},
        {4, 7, 534699, 610392, 516475, 114.16, 96.59, 17.56},
        {4, 10, 653598, 692966, 610696, 106.02, 93.44, 12.59},
        {7, 4, 388476, 525105, 384685, 135.17, 99.02, 36.15},
        {7, 7, 539055, 648749, 517985, 120.35, 96.09, 24.26},
        {7, 10, 674487, 714741, 623421, 105.97, 92.43, 13.54},
        {10, 4, 350163, 462652, 345976, 132.12, 98.80, 33.32},
        {10, 7, 532521, 617586, 511966, 115.97, 96.14, 19.83},
        {10, 10, 666963, 709105, 617779, 106.32, 92.63, 13.69},
    };
    double worst = 0.0;
    for (const auto& r : rows) {
        const auto row = sweep_row_from_costs(r.gap, r.pred, r.reactive, r.f1, r.s);
        worst = std::max({worst, std::abs(row.f1_pct - r.f1_pct), std::abs(row.s_pct - r.s_pct),
                          std::abs(row.delta_pct - r.delta)});
    }
    o.require(worst <= 0.01, "all 27 percentages within 0.01 points");
    o.detail << " max deviation " << worst << " points";
}

void c3(Outcome& o) {
    const double year = project_savings(21483, 53, 1);
    const double doubled = project_savings(21483, 1, 2);
    o.require(year == 1138599.0, "21483 x 53 == 1138599");
    o.require(doubled == 42966.0, "21483 x 2 == 42966");
    o.detail << " " << static_cast<long long>(year) << ", " << static_cast<long long>(doubled);
}

void c4(Outcome& o) {
    const auto grid = expand_grid(30, 100, 200, GridConfig{}, Objective::Savings);
    o.require(grid.mtry_values == std::vector<int>{2, 3, 5, 7, 10, 15}, "mtry {2,3,5,7,10,15}");
    o.detail << " mtry {";
    for (std::size_t i = 0; i < grid.mtry_values.size(); ++i) {
        o.detail << (i ? "," : "") << grid.mtry_values[i];
    }
    o.detail << "}";
}

void c5(Outcome& o) {
    // Forest scores vs per-tree path walk.
    const auto ds = noisy_dataset(200, 1);
    ForestParams p;
    p.ntree = 40;
    p.mtry = 3;
    p.samp = 60;
    p.min_leaf = 2;
    const auto model = train(ds, p);
    const auto scores = vote_scores(model, ds);
    double forest_err = 0.0;
    for (std::size_t r = 0; r < ds.rows.size(); ++r) {
        double sum = 0.0;
        for (const auto& t : model.trees()) sum += walk(t, ds.rows[r].features);
        forest_err = std::max(forest_err, std::abs(scores[r] - sum / model.trees().size()));
    }
    o.require(forest_err <= 1e-12, "forest scores vs path walk within 1e-12");

    // AUC vs pairwise concordance.
    const auto labels = ds.labels();
    double conc = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!labels[i]) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j]) continue;
            pairs += 1.0;
            conc += scores[i] > scores[j] ? 1.0 : scores[i] == scores[j] ? 0.5 : 0.0;
        }
    }
    const double auc_err = std::abs(roc(scores, labels).auc - conc / pairs);
    o.require(auc_err <= 1e-12, "AUC vs pairwise oracle within 1e-12");

    // Confusion vs recount, savings vs itemized ledger.
    const CostModel cm;
    const auto ac = affine_coefficients(cm, kWeek, kWeek);
    bool counts_ok = true, ledger_ok = true;
    for (int k = 1; k < 20; ++k) {
        const double cutoff = k / 20.0;
        ConfusionCounts oracle;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            const bool hit = scores[i] >= cutoff;
            (hit ? (labels[i] ? oracle.tp : oracle.fp) : (labels[i] ? oracle.fn : oracle.tn)) += 1;
        }
        const auto c = confusion_at(scores, labels, cutoff);
        counts_ok = counts_ok && c == oracle;
        // Per incident: TP skips the ticket and 6 of 8 downtime hours;
        // FP pays a service visit with 2 h downtime.
        const double ledger = oracle.tp * (32.0 + 51.0 + 16.0) -
                              oracle.tp * (51.0 + 4.0) - oracle.fp * (51.0 + 4.0);
        ledger_ok = ledger_ok && savings(c, ac) == ledger &&
                    itemize(c, cm, kWeek, kWeek).back().delta() == ledger;
    }
    o.require(counts_ok, "confusion vs recount");
    o.require(ledger_ok, "savings vs itemized ledger");

    // Tuner vs exhaustive re-run on a 2x2x1 grid with 3 cutoffs.
    const auto tds = noisy_dataset(300, 2);
    GridConfig g;
    g.ntree_values = {5, 15};
    g.mtry_exponents = {0.4, 0.8};
    g.samp_multipliers = {1.0};
    g.cutoff_min = 0.3;
    g.cutoff_max = 0.7;
    g.cutoff_step = 0.2;
    const auto grid = expand_grid(tds.schema.size(), tds.positives, tds.negatives, g, Objective::Savings);
    const bool shape = grid.ntree_values.size() == 2 && grid.mtry_values.size() == 2 &&
                       grid.samp_values.size() == 1 && grid.cutoff_values.size() == 3;
    o.require(shape, "grid is 2x2x1x3");
    const auto tuned = tune(tds, grid, ac, {5, 0.0});
    const auto tl = tds.labels();
    double best_s = -1e300, best_cut = 0;
    int best_nt = 0, best_m = 0;
    for (int m : grid.mtry_values) {
        for (int nt : grid.ntree_values) {
            ForestParams fp;
            fp.ntree = nt;
            fp.mtry = m;
            fp.samp = grid.samp_values[0];
            fp.seed = 5;
            const auto sc = vote_scores(train(tds, fp), tds);
            for (double cut : grid.cutoff_values) {
                double s = 0;
                for (std::size_t i = 0; i < sc.size(); ++i) {
                    if (sc[i] >= cut) s += tl[i] ? 44.0 : -55.0;
                }
                const bool better = s > best_s ||
                                    (s == best_s && (cut > best_cut ||
                                                     (cut == best_cut && (nt < best_nt ||
                                                                          (nt == best_nt && m < best_m)))));
                if (better) {
                    best_s = s;
                    best_cut = cut;
                    best_nt = nt;
                    best_m = m;
                }
            }
        }
    }
    o.require(tuned.best.savings == best_s && tuned.best.cutoff == best_cut &&
                  tuned.best.ntree == best_nt && tuned.best.mtry == best_m,
              "tuner best cell vs exhaustive re-run");
    o.detail << " forest err " << forest_err << ", AUC err " << auc_err << ", tuner best (ntree="
             << best_nt << ", mtry=" << best_m << ", cutoff=" << best_cut << ", S=" << best_s << ")";
}

void c6(Outcome& o) {
    const AffineCost ac{44, 55, 0, kWeek, kWeek};
    const auto grid = surface(5445, 10479, 100, 100, ac);
    const auto nonzero_tp = std::count_if(grid.tp_levels.begin(), grid.tp_levels.end(),
                                          [](auto v) { return v > 0; });
    const auto nonzero_fp = std::count_if(grid.fp_levels.begin(), grid.fp_levels.end(),
                                          [](auto v) { return v > 0; });
    o.require(nonzero_tp == 55 && nonzero_fp == 105, "55 x 105 lattice plus origin");
    const auto best = std::max_element(grid.cells.begin(), grid.cells.end(),
                                       [](const auto& a, const auto& b) { return a.s < b.s; });
    std::size_t at_max = 0;
    for (const auto& c : grid.cells) at_max += c.s == best->s;
    o.require(best->tp == 5445 && best->fp == 0 && at_max == 1, "S maximal exactly at (P, 0)");
    const auto pair = find_f1_savings_conflict(grid, 0.005);
    o.require(pair.has_value() && std::abs(pair->first.f1 - pair->second.f1) <= 0.005 &&
                  pair->first.s * pair->second.s < 0,
              "two cells with |dF1| <= 0.005 and opposite-sign S");
    o.detail << " lattice " << nonzero_tp << "x" << nonzero_fp << ", max S " << best->s;
    if (pair) {
        o.detail << ", (TP=" << pair->first.tp << ",FP=" << pair->first.fp << ",F1=" << pair->first.f1
                 << ",S=" << pair->first.s << ") vs (TP=" << pair->second.tp << ",FP="
                 << pair->second.fp << ",F1=" << pair->second.f1 << ",S=" << pair->second.s << ")";
    }
}

void c7(Outcome& o) {
    const AffineCost ac{44, 55, 0, kWeek, kWeek};
    const double expect = (55.0 * 10479) / (44.0 * 5445);
    const auto zero = iso_savings_line(0.0, ac, 5445, 10479);
    o.require(std::abs(zero.slope - expect) <= 1e-9, "zero-savings slope");
    double worst = 0.0;
    std::size_t points = 0;
    for (double s0 : {0.0, 21483.0}) {
        for (const auto& p : sample_iso_line(iso_savings_line(s0, ac, 5445, 10479), 101)) {
            worst = std::max(worst, std::abs(ac(p.tpr * 5445, p.fpr * 10479) - s0));
            ++points;
        }
    }
    o.require(points == 202 && worst <= 1e-6, "bound points satisfy S = S0");
    o.detail << " slope " << zero.slope << ", " << points << " bound points, max |S - S0| " << worst;
}

struct Experiment {
    RunConfig config;
    WindowedDataset train;
    WindowedDataset test;
    AffineCost cost;
};

Experiment load_experiment() {
    Experiment e;
    e.config = load_run_config(PDM_SOURCE_DIR "/configs/default.json");
    auto sim = e.config.sim;
    if (sim.target_positive_rate) sim = calibrate_hazard(sim);
    const auto fleet = generate_fleet(sim);
    const auto spec = e.config.window.to_spec();
    const auto horizon = e.config.window.horizon_hours();
    const auto split = split_horizon(fleet.logs, horizon);
    e.train = training_dataset(split, fleet.profiles, spec, horizon);
    e.test = test_dataset(split, fleet.profiles, spec, horizon);
    e.cost = affine_coefficients(e.config.cost, static_cast<double>(spec.t_gap),
                                 static_cast<double>(spec.t_pred));
    return e;
}

void c8(Outcome& o) {
    const auto e = load_experiment();
    const auto& c = e.config;
    const auto spec = c.window.to_spec();
    o.require(c.sim.n_devices == 2000 && c.sim.n_weeks == 24, "2000 devices, 24 weeks");
    o.require(spec.t_obs == 10 * 168 && spec.t_gap == 168 && spec.t_pred == 168, "10/1/1 weeks");
    o.require(c.grid.ntree_values == std::vector<int>{50, 100}, "ntree {50,100}");
    const double rate = static_cast<double>(e.train.positives) / e.train.rows.size();
    o.require(std::abs(rate - 1.0 / 3.0) <= 0.05, "positive rate 1/3 +- 0.05");

    const auto grid = expand_grid(e.train.schema.size(), e.train.positives, e.train.negatives,
                                  c.grid, Objective::Savings);
    o.require(grid.mtry_values.size() == 6 && grid.cutoff_values.size() == 91, "full mtry/cutoff sets");
    TuneOptions opt{c.seed, c.holdout_fraction};
    const auto by_s = tune(e.train, grid, e.cost, opt);
    const auto by_f1 = reselect(by_s, Objective::F1);
    o.require(by_s.best.savings >= by_f1.best.savings, "(a) training S: savings-tuned >= F1-tuned");

    const auto test_labels = e.test.labels();
    auto test_s = [&](const TuneResult& r) {
        const auto model = fit_best(e.train, r);
        return savings(confusion_at(vote_scores(model, e.test), test_labels, r.best.cutoff), e.cost);
    };
    const double s_s = test_s(by_s);
    const double s_f1 = test_s(by_f1);
    o.require(s_s > 0.0 && s_s > s_f1, "(b) test S: savings-tuned > 0 and > F1-tuned");
    o.require(by_s.best.cutoff >= by_f1.best.cutoff, "(c) savings cutoff >= F1 cutoff");
    o.detail << " P:N " << e.train.positives << ":" << e.train.negatives << ", training S "
             << by_s.best.savings << " vs " << by_f1.best.savings << ", test S " << s_s << " vs "
             << s_f1 << ", cutoff " << by_s.best.cutoff << " vs " << by_f1.best.cutoff;
}

void c9(Outcome& o) {
    auto e = load_experiment();
    auto labels = e.train.labels();
    std::mt19937_64 gen(e.config.seed);
    std::shuffle(labels.begin(), labels.end(), gen);
    for (std::size_t i = 0; i < labels.size(); ++i) e.train.rows[i].label = labels[i];
    e.train.recount();

    const auto grid = expand_grid(e.train.schema.size(), e.train.positives, e.train.negatives,
                                  e.config.grid, Objective::Savings);
    const auto by_s = tune(e.train, grid, e.cost, {e.config.seed, e.config.holdout_fraction});
    const auto by_f1 = reselect(by_s, Objective::F1);
    const bool passive_exists = std::any_of(by_s.trace.begin(), by_s.trace.end(), [](const auto& t) {
        return t.counts.tp + t.counts.fp == 0;
    });
    if (passive_exists) o.require(by_s.best.savings >= 0.0, "savings-tuned training S >= 0");
    o.detail << " zero-positive cutoff " << (passive_exists ? "present" : "absent")
             << ", savings-tuned S " << by_s.best.savings << " at cutoff " << by_s.best.cutoff
             << ", F1-tuned S " << by_f1.best.savings << " at cutoff " << by_f1.best.cutoff;
}

}  // namespace

int main() {
    criterion(1, "cost arithmetic", 1.0, c1);
    criterion(2, "reactive vs PdM percentage identities", 1.0, c2);
    criterion(3, "savings projection", 1.0, c3);
    criterion(4, "grid expansion", 1.0, c4);
    criterion(5, "oracle equivalences", 30.0, c5);
    criterion(6, "cost surface properties", 10.0, c6);
    criterion(7, "iso-savings geometry", 1.0, c7);
    criterion(8, "end-to-end seeded experiment", 300.0, c8);
    criterion(9, "fail-safe on shuffled labels", 120.0, c9);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
