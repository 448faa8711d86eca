#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "pdm/econ.hpp"
#include "pdm/forest.hpp"
#include "pdm/metrics.hpp"
#include "pdm/windowing.hpp"

namespace pdm {

enum class Objective { F1, Savings };

std::string_view to_string(Objective o);
Objective parse_objective(std::string_view text);

/// Grid as configured, before it is resolved against a dataset.
struct GridConfig {
    std::vector<int> ntree_values = {200, 400, 600, 800};
    std::vector<double> mtry_exponents = {0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
    /// Multipliers k of the positive count; empty means 1.0, 1.5, 2.0, ...
    /// for as long as floor(p * k) <= n.
    std::vector<double> samp_multipliers;
    double cutoff_min = 0.05;
    double cutoff_max = 0.95;
    double cutoff_step = 0.01;
    int min_leaf = 5;
    int max_depth = 0;

    void validate() const;
};

struct TunerGrid {
    std::vector<int> ntree_values;
    std::vector<int> mtry_values;
    std::vector<std::int64_t> samp_values;
    std::vector<double> cutoff_values;
    Objective objective = Objective::Savings;
    int min_leaf = 5;
    int max_depth = 0;

    std::size_t cell_count() const {
        return ntree_values.size() * mtry_values.size() * samp_values.size() *
               cutoff_values.size();
    }
};

/// Resolves mtry = unique floor(n_features^e), samp = {floor(p*k) <= n} U {n}
/// and the cutoff range. Throws ConfigError when any list comes out empty.
TunerGrid expand_grid(std::size_t n_features, std::int64_t p, std::int64_t n,
                      const GridConfig& config, Objective objective);

/// Cutoffs lo, lo+step, ..., hi, rounded to 1e-9 so 0.62 prints as 0.62.
std::vector<double> cutoff_range(double lo, double hi, double step);

struct TraceEntry {
    int ntree = 0;
    int mtry = 0;
    std::int64_t samp = 0;
    double cutoff = 0.0;
    ConfusionCounts counts;
    double f1 = 0.0;
    bool f1_degenerate = false;
    double savings = 0.0;

    double objective(Objective o) const { return o == Objective::F1 ? f1 : savings; }
};

/// True when `a` beats `b` under the objective: higher value, then higher
/// cutoff, smaller ntree, smaller mtry, smaller samp.
bool better_than(const TraceEntry& a, const TraceEntry& b, Objective o);

/// Index of the best entry in `trace`. Throws ConfigError on an empty trace.
std::size_t select_best(const std::vector<TraceEntry>& trace, Objective o);

struct TuneOptions {
    std::uint64_t seed = 42;
    /// Fraction of training rows held out to score the grid; 0 evaluates on
    /// the training rows themselves.
    double holdout_fraction = 0.0;
};

struct TuneResult {
    TraceEntry best;
    Objective objective = Objective::Savings;
    std::vector<TraceEntry> trace;  ///< grid order: samp, mtry, ntree, cutoff (outer to inner)
    ForestParams params;            ///< forest settings of the best cell
};

/// For every (mtry, samp) cell one forest of max(ntree) trees is trained;
/// smaller ntree values use its leading trees, which is exactly the forest
/// that ntree and the same seed would produce. Each forest scores the
/// evaluation rows once and every cutoff is applied to the cached scores.
/// TrainingError from a cell is rethrown with the cell identity attached.
TuneResult tune(const WindowedDataset& train, const TunerGrid& grid, const AffineCost& cost,
                const TuneOptions& options = {});

/// Convenience form deriving the cost function from a cost model and geometry (hours).
TuneResult tune(const WindowedDataset& train, const TunerGrid& grid, const CostModel& cm,
                double t_gap, double t_pred, std::uint64_t seed);

/// Same trace, best cell chosen for another objective.
TuneResult reselect(const TuneResult& result, Objective objective);

/// Trains the forest described by a tune result on the full training set.
ForestModel fit_best(const WindowedDataset& train, const TuneResult& result);

/// TPR = slope * FPR + intercept on which a * TPR * P - b * FPR * N + c = s0.
struct IsoLine {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Throws ConfigError when a <= 0 or P <= 0.
IsoLine iso_savings_line(double s0, const AffineCost& ac, std::int64_t p, std::int64_t n);

struct BoundPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

/// `samples` evenly spaced points of the line restricted to the unit square.
std::vector<BoundPoint> sample_iso_line(const IsoLine& line, int samples);

}  // namespace pdm
