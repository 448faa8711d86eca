#include "pdm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pdm/error.hpp"
#include "pdm/forest.hpp"
#include "pdm/metrics.hpp"

namespace pdm {

std::vector<std::int64_t> lattice_levels(std::int64_t limit, std::int64_t stride) {
    std::vector<std::int64_t> levels;
    for (std::int64_t v = 0; v < limit; v += stride) levels.push_back(v);
    levels.push_back(limit);
    return levels;
}

SurfaceGrid surface(std::int64_t p, std::int64_t n, std::int64_t stride_tp,
                    std::int64_t stride_fp, const AffineCost& ac) {
    if (stride_tp < 1 || stride_fp < 1) throw ConfigError("surface strides must be >= 1");
    if (p < 0 || n < 0) throw ConfigError("surface class sizes must be >= 0");

    SurfaceGrid grid;
    grid.positives = p;
    grid.negatives = n;
    grid.cost = ac;
    grid.tp_levels = lattice_levels(p, stride_tp);
    grid.fp_levels = lattice_levels(n, stride_fp);
    grid.cells.reserve(grid.tp_levels.size() * grid.fp_levels.size());

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (auto tp : grid.tp_levels) {
        for (auto fp : grid.fp_levels) {
            const ConfusionCounts c{tp, fp, n - fp, p - tp};
            SurfaceCell cell{tp, fp, f1(c).value, savings(c, ac), 0.0};
            lo = std::min(lo, cell.s);
            hi = std::max(hi, cell.s);
            grid.cells.push_back(cell);
        }
    }
    for (auto& cell : grid.cells) cell.s_normalized = hi > lo ? (cell.s - lo) / (hi - lo) : 0.0;
    return grid;
}

std::optional<std::pair<SurfaceCell, SurfaceCell>> find_f1_savings_conflict(
    const SurfaceGrid& grid, double tolerance) {
    std::vector<const SurfaceCell*> sorted;
    sorted.reserve(grid.cells.size());
    for (const auto& c : grid.cells) sorted.push_back(&c);
    std::sort(sorted.begin(), sorted.end(),
              [](const SurfaceCell* a, const SurfaceCell* b) { return a->f1 < b->f1; });

    // Most recent cell of each savings sign seen so far in F1 order.
    const SurfaceCell* last_pos = nullptr;
    const SurfaceCell* last_neg = nullptr;
    for (const SurfaceCell* c : sorted) {
        if (c->s > 0.0) {
            if (last_neg != nullptr && c->f1 - last_neg->f1 <= tolerance) {
                return std::pair{*last_neg, *c};
            }
            last_pos = c;
        } else if (c->s < 0.0) {
            if (last_pos != nullptr && c->f1 - last_pos->f1 <= tolerance) {
                return std::pair{*last_pos, *c};
            }
            last_neg = c;
        }
    }
    return std::nullopt;
}

SweepRow sweep_row_from_costs(double t_gap_days, double t_pred_days, double reactive,
                              double pdm_f1, double pdm_s) {
    SweepRow row;
    row.t_gap_days = t_gap_days;
    row.t_pred_days = t_pred_days;
    row.reactive = reactive;
    row.pdm_f1 = pdm_f1;
    row.pdm_s = pdm_s;
    row.f1_pct = percent_of(pdm_f1, reactive);
    row.s_pct = percent_of(pdm_s, reactive);
    row.delta_pct = row.f1_pct - row.s_pct;
    return row;
}

std::vector<SweepRow> sweep(const Fleet& fleet, const SweepSettings& settings) {
    std::vector<SweepRow> rows;
    const HorizonSplit split = split_horizon(fleet.logs, settings.horizon);

    for (const auto& [gap_days, pred_days] : settings.geometries) {
        SweepRow row;
        row.t_gap_days = gap_days;
        row.t_pred_days = pred_days;
        try {
            WindowSpec spec;
            spec.t_obs = settings.t_obs;
            spec.t_gap = static_cast<std::int64_t>(std::llround(gap_days * kHoursPerDay));
            spec.t_pred = static_cast<std::int64_t>(std::llround(pred_days * kHoursPerDay));
            spec.step = settings.step;
            spec.k_periods = settings.k_periods;
            spec.validate();

            const auto train = training_dataset(split, fleet.profiles, spec, settings.horizon);
            const auto test = test_dataset(split, fleet.profiles, spec, settings.horizon);
            const auto t_gap = static_cast<double>(spec.t_gap);
            const auto t_pred = static_cast<double>(spec.t_pred);
            const auto cost = affine_coefficients(settings.cost, t_gap, t_pred);

            const auto grid = expand_grid(train.schema.size(), train.positives, train.negatives,
                                          settings.grid, Objective::Savings);
            const auto by_s = tune(train, grid, cost, settings.tune);
            const auto by_f1 = reselect(by_s, Objective::F1);

            const auto labels = test.labels();
            auto evaluate = [&](const TuneResult& tuned) {
                const auto model = fit_best(train, tuned);
                return confusion_at(vote_scores(model, test), labels, tuned.best.cutoff);
            };
            row.s_counts = evaluate(by_s);
            row.f1_counts = evaluate(by_f1);
            row.s_cutoff = by_s.best.cutoff;
            row.f1_cutoff = by_f1.best.cutoff;

            const double reactive = reactive_cost(test.positives, settings.cost);
            auto filled = sweep_row_from_costs(
                gap_days, pred_days, reactive,
                pdm_cost(row.f1_counts, settings.cost, t_gap, t_pred),
                pdm_cost(row.s_counts, settings.cost, t_gap, t_pred));
            filled.s_counts = row.s_counts;
            filled.f1_counts = row.f1_counts;
            filled.s_cutoff = row.s_cutoff;
            filled.f1_cutoff = row.f1_cutoff;
            row = filled;
        } catch (const Error& e) {
            row.error = e.what();
        }
        rows.push_back(row);
    }
    return rows;
}

double project_savings(double weekly_savings, double n_weeks, double device_scale) {
    if (!(n_weeks >= 0.0)) throw ConfigError("weeks must be >= 0");
    if (!(device_scale >= 0.0)) throw ConfigError("device scale must be >= 0");
    return weekly_savings * n_weeks * device_scale;
}

}  // namespace pdm
