#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pdm/econ.hpp"
#include "pdm/simfleet.hpp"
#include "pdm/tuner.hpp"
#include "pdm/windowing.hpp"

namespace pdm {

struct SurfaceCell {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    double f1 = 0.0;
    double s = 0.0;
    double s_normalized = 0.0;  ///< (s - min s) / (max s - min s) over the grid
};

struct SurfaceGrid {
    std::int64_t positives = 0;
    std::int64_t negatives = 0;
    AffineCost cost;
    std::vector<std::int64_t> tp_levels;  ///< 0, stride, 2*stride, ..., plus P
    std::vector<std::int64_t> fp_levels;  ///< 0, stride, 2*stride, ..., plus N
    std::vector<SurfaceCell> cells;       ///< tp-major: cells[i * fp_levels.size() + j]

    const SurfaceCell& at(std::size_t tp_index, std::size_t fp_index) const {
        return cells[tp_index * fp_levels.size() + fp_index];
    }
};

/// F1 and savings over the TP x FP lattice. Both corners P and N are always
/// included even when the strides do not divide them. Throws ConfigError for
/// strides < 1 or negative class sizes.
SurfaceGrid surface(std::int64_t p, std::int64_t n, std::int64_t stride_tp,
                    std::int64_t stride_fp, const AffineCost& ac);

/// Lattice values 0, stride, ... below `limit`, then `limit` itself.
std::vector<std::int64_t> lattice_levels(std::int64_t limit, std::int64_t stride);

/// A pair of cells whose F1 differs by at most `tolerance` while one has
/// positive and the other negative savings, if the grid holds one.
std::optional<std::pair<SurfaceCell, SurfaceCell>> find_f1_savings_conflict(
    const SurfaceGrid& grid, double tolerance);

/// One row of the gap/prediction sweep. Durations in days, money in $.
struct SweepRow {
    double t_gap_days = 0.0;
    double t_pred_days = 0.0;
    double reactive = 0.0;
    double pdm_f1 = 0.0;
    double pdm_s = 0.0;
    double f1_pct = 0.0;
    double s_pct = 0.0;
    double delta_pct = 0.0;

    double f1_cutoff = 0.0;
    double s_cutoff = 0.0;
    ConfusionCounts f1_counts;
    ConfusionCounts s_counts;
    std::string error;  ///< non-empty when the row could not be computed

    bool ok() const { return error.empty(); }
};

/// Fills the percentage columns from the three dollar figures.
SweepRow sweep_row_from_costs(double t_gap_days, double t_pred_days, double reactive,
                              double pdm_f1, double pdm_s);

struct SweepSettings {
    std::vector<std::pair<double, double>> geometries;  ///< (gap days, prediction days)
    std::int64_t t_obs = 10 * kHoursPerWeek;
    std::int64_t step = kHoursPerWeek;
    int k_periods = 10;
    std::int64_t horizon = 12 * kHoursPerWeek;
    GridConfig grid;
    CostModel cost;
    TuneOptions tune;
};

/// For each geometry: rebuild the windows on the same fleet, tune once
/// (the trace carries F1 and savings), pick the best cell for each
/// objective, fit both forests and price them on the test window. A
/// failing row records its error and the remaining rows still run.
std::vector<SweepRow> sweep(const Fleet& fleet, const SweepSettings& settings);

/// weekly * weeks * device scale. Throws ConfigError for negative weeks or scale.
double project_savings(double weekly_savings, double n_weeks, double device_scale);

}  // namespace pdm
