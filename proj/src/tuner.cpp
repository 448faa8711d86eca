#include "pdm/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "pdm/error.hpp"
#include "pdm/rng.hpp"

namespace pdm {

namespace {

constexpr std::uint64_t kHoldoutStream = 0x686f6c64;  // "hold"

struct EvaluationSplit {
    WindowedDataset fit;
    WindowedDataset eval;
};

EvaluationSplit holdout_split(const WindowedDataset& ds, double fraction, std::uint64_t seed) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < ds.rows.size(); ++i) {
        (ds.rows[i].label == 1 ? pos : neg).push_back(i);
    }
    auto rng = make_stream({seed, kHoldoutStream});
    std::vector<bool> held(ds.rows.size(), false);
    for (auto* cls : {&pos, &neg}) {
        for (std::size_t i = cls->size(); i > 1; --i) {
            std::swap((*cls)[i - 1], (*cls)[uniform_index(rng, i)]);
        }
        const auto take = static_cast<std::size_t>(
            std::llround(fraction * static_cast<double>(cls->size())));
        for (std::size_t i = 0; i < take; ++i) held[(*cls)[i]] = true;
    }
    EvaluationSplit split;
    split.fit.schema = split.eval.schema = ds.schema;
    for (std::size_t i = 0; i < ds.rows.size(); ++i) {
        (held[i] ? split.eval : split.fit).rows.push_back(ds.rows[i]);
    }
    split.fit.recount();
    split.eval.recount();
    return split;
}

ForestParams params_for(const TunerGrid& grid, int ntree, int mtry, std::int64_t samp,
                        std::uint64_t seed) {
    ForestParams p;
    p.ntree = ntree;
    p.mtry = mtry;
    p.samp = samp;
    p.seed = seed;
    p.min_leaf = grid.min_leaf;
    p.max_depth = grid.max_depth;
    return p;
}

std::string cell_name(int ntree, int mtry, std::int64_t samp) {
    return "(ntree=" + std::to_string(ntree) + ", mtry=" + std::to_string(mtry) +
           ", samp=" + std::to_string(samp) + ")";
}

}  // namespace

std::string_view to_string(Objective o) { return o == Objective::F1 ? "f1" : "savings"; }

Objective parse_objective(std::string_view text) {
    if (text == "f1" || text == "F1") return Objective::F1;
    if (text == "savings" || text == "S") return Objective::Savings;
    throw ConfigError("objective must be 'f1' or 'savings', got '" + std::string(text) + "'");
}

void GridConfig::validate() const {
    if (ntree_values.empty()) throw ConfigError("grid.ntree must not be empty");
    for (int v : ntree_values) {
        if (v < 1) throw ConfigError("grid.ntree values must be >= 1");
    }
    if (mtry_exponents.empty()) throw ConfigError("grid.mtry_exponents must not be empty");
    for (double e : mtry_exponents) {
        if (!(e >= 0.0 && e <= 1.0)) throw ConfigError("grid.mtry_exponents must lie in [0,1]");
    }
    for (double k : samp_multipliers) {
        if (!(k > 0.0)) throw ConfigError("grid.samp_multipliers must be > 0");
    }
    if (!(cutoff_min > 0.0 && cutoff_min <= cutoff_max && cutoff_max < 1.0)) {
        throw ConfigError("grid cutoffs must satisfy 0 < min <= max < 1");
    }
    if (!(cutoff_step > 0.0)) throw ConfigError("grid.cutoff_step must be > 0");
    if (min_leaf < 1) throw ConfigError("grid.min_leaf must be >= 1");
    if (max_depth < 0) throw ConfigError("grid.max_depth must be >= 0");
}

std::vector<double> cutoff_range(double lo, double hi, double step) {
    std::vector<double> out;
    const auto count = static_cast<long long>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (long long i = 0; i < count; ++i) {
        out.push_back(std::round((lo + static_cast<double>(i) * step) * 1e9) / 1e9);
    }
    return out;
}

TunerGrid expand_grid(std::size_t n_features, std::int64_t p, std::int64_t n,
                      const GridConfig& config, Objective objective) {
    config.validate();
    if (n_features < 1 || p < 1 || n < 1) {
        throw ConfigError("grid expansion needs n_features, p and n all >= 1");
    }
    TunerGrid grid;
    grid.objective = objective;
    grid.min_leaf = config.min_leaf;
    grid.max_depth = config.max_depth;

    std::set<int> ntrees(config.ntree_values.begin(), config.ntree_values.end());
    grid.ntree_values.assign(ntrees.begin(), ntrees.end());

    std::set<int> mtry;
    for (double e : config.mtry_exponents) {
        const auto m = static_cast<long long>(
            std::floor(std::pow(static_cast<double>(n_features), e) + 1e-9));
        mtry.insert(static_cast<int>(std::clamp<long long>(m, 1, static_cast<long long>(n_features))));
    }
    grid.mtry_values.assign(mtry.begin(), mtry.end());

    std::set<std::int64_t> samp;
    auto admit = [&](double k) {
        const auto s = static_cast<std::int64_t>(std::floor(static_cast<double>(p) * k + 1e-9));
        if (s >= 1 && s <= n) samp.insert(s);
        return s <= n;
    };
    if (config.samp_multipliers.empty()) {
        for (int i = 0; admit(1.0 + 0.5 * i); ++i) {
        }
    } else {
        for (double k : config.samp_multipliers) admit(k);
    }
    samp.insert(n);
    grid.samp_values.assign(samp.begin(), samp.end());

    grid.cutoff_values = cutoff_range(config.cutoff_min, config.cutoff_max, config.cutoff_step);
    if (grid.cutoff_values.empty()) throw ConfigError("cutoff grid is empty");
    return grid;
}

bool better_than(const TraceEntry& a, const TraceEntry& b, Objective o) {
    const double va = a.objective(o);
    const double vb = b.objective(o);
    if (va != vb) return va > vb;
    if (a.cutoff != b.cutoff) return a.cutoff > b.cutoff;
    if (a.ntree != b.ntree) return a.ntree < b.ntree;
    if (a.mtry != b.mtry) return a.mtry < b.mtry;
    return a.samp < b.samp;
}

std::size_t select_best(const std::vector<TraceEntry>& trace, Objective o) {
    if (trace.empty()) throw ConfigError("cannot select from an empty trace");
    std::size_t best = 0;
    for (std::size_t i = 1; i < trace.size(); ++i) {
        if (better_than(trace[i], trace[best], o)) best = i;
    }
    return best;
}

TuneResult tune(const WindowedDataset& train, const TunerGrid& grid, const AffineCost& cost,
                const TuneOptions& options) {
    if (grid.cell_count() == 0) throw ConfigError("tuner grid is empty");
    for (double c : grid.cutoff_values) {
        if (!(c > 0.0 && c < 1.0)) throw ConfigError("grid cutoffs must lie in (0,1)");
    }
    if (!(options.holdout_fraction >= 0.0 && options.holdout_fraction < 1.0)) {
        throw ConfigError("holdout fraction must lie in [0,1)");
    }

    EvaluationSplit split;
    const WindowedDataset* fit = &train;
    const WindowedDataset* eval = &train;
    if (options.holdout_fraction > 0.0) {
        split = holdout_split(train, options.holdout_fraction, options.seed);
        fit = &split.fit;
        eval = &split.eval;
    }

    const FeatureMatrix x(*fit);
    const auto fit_labels = fit->labels();
    const auto eval_labels = eval->labels();
    const int max_ntree = grid.ntree_values.back();

    TuneResult result;
    result.objective = grid.objective;
    result.trace.reserve(grid.cell_count());
    for (std::int64_t samp : grid.samp_values) {
        for (int mtry : grid.mtry_values) {
            const auto params = params_for(grid, max_ntree, mtry, samp, options.seed);
            ForestModel forest;
            try {
                forest = pdm::train(x, fit_labels, fit->schema, params);
            } catch (const TrainingError& e) {
                throw TrainingError("tuning cell " + cell_name(max_ntree, mtry, samp) + ": " +
                                    e.what());
            }
            const auto scores = prefix_scores(forest, *eval, grid.ntree_values);
            for (std::size_t t = 0; t < grid.ntree_values.size(); ++t) {
                for (double cutoff : grid.cutoff_values) {
                    TraceEntry e;
                    e.ntree = grid.ntree_values[t];
                    e.mtry = mtry;
                    e.samp = samp;
                    e.cutoff = cutoff;
                    e.counts = confusion_at(scores[t], eval_labels, cutoff);
                    const auto f = f1(e.counts);
                    e.f1 = f.value;
                    e.f1_degenerate = f.degenerate;
                    e.savings = savings(e.counts, cost);
                    result.trace.push_back(e);
                }
            }
        }
    }

    result.best = result.trace[select_best(result.trace, grid.objective)];
    result.params = params_for(grid, result.best.ntree, result.best.mtry, result.best.samp,
                               options.seed);
    return result;
}

TuneResult tune(const WindowedDataset& train, const TunerGrid& grid, const CostModel& cm,
                double t_gap, double t_pred, std::uint64_t seed) {
    TuneOptions options;
    options.seed = seed;
    return tune(train, grid, affine_coefficients(cm, t_gap, t_pred), options);
}

TuneResult reselect(const TuneResult& result, Objective objective) {
    TuneResult out = result;
    out.objective = objective;
    out.best = out.trace[select_best(out.trace, objective)];
    out.params.ntree = out.best.ntree;
    out.params.mtry = out.best.mtry;
    out.params.samp = out.best.samp;
    return out;
}

ForestModel fit_best(const WindowedDataset& train, const TuneResult& result) {
    return pdm::train(train, result.params);
}

IsoLine iso_savings_line(double s0, const AffineCost& ac, std::int64_t p, std::int64_t n) {
    if (!(ac.a > 0.0)) throw ConfigError("iso-savings line needs a > 0");
    if (p <= 0) throw ConfigError("iso-savings line needs P > 0");
    const double ap = ac.a * static_cast<double>(p);
    return {ac.b * static_cast<double>(n) / ap, (s0 - ac.c) / ap};
}

std::vector<BoundPoint> sample_iso_line(const IsoLine& line, int samples) {
    double lo = 0.0;
    double hi = 1.0;
    if (line.slope > 0.0) {
        lo = std::max(lo, -line.intercept / line.slope);
        hi = std::min(hi, (1.0 - line.intercept) / line.slope);
    } else if (line.intercept < 0.0 || line.intercept > 1.0) {
        return {};
    }
    std::vector<BoundPoint> pts;
    if (lo > hi || samples < 1) return pts;
    for (int i = 0; i < samples; ++i) {
        const double fpr =
            samples == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (samples - 1);
        pts.push_back({fpr, line.slope * fpr + line.intercept});
    }
    return pts;
}

}  // namespace pdm
