#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pdm/metrics.hpp"

namespace pdm {

/// Per-incident economics of a maintenance operation. Money in $, time in hours.
///
/// The defaults describe the reference business case: $32 ticket, $51
/// service, $2 per hour of downtime, 6 h preparation and travel, 2 h repair,
/// and no component value loss. with_value_loss() adds the component
/// depreciation term of the generalized cost family.
struct CostModel {
    double ticket_cost = 32.0;
    double service_cost = 51.0;
    double downtime_rate = 2.0;
    double travel_time = 6.0;
    double repair_time = 2.0;
    double component_cost = 0.0;
    double expected_life = 0.0;

    /// C / expected life in $/h; 0 when no life is given.
    double value_loss_rate() const {
        return expected_life > 0.0 ? component_cost / expected_life : 0.0;
    }
    void validate() const;

    /// Reference case plus C = $1051.20 over a one-year (8760 h) life, i.e. 0.12 $/h.
    static CostModel with_value_loss();
};

/// pi(TP, FP) = a * TP - b * FP + c, derived for one (gap, prediction) geometry.
struct AffineCost {
    double a = 0.0;
    double b = 0.0;  ///< positive magnitude of the false-positive penalty
    double c = 0.0;
    double t_gap = 0.0;
    double t_pred = 0.0;

    double operator()(double tp, double fp) const { return a * tp - b * fp + c; }
};

/// max(0, T_T - T_G - T_P / 2) + T_R, with failure time uniform over the
/// prediction interval. Throws ConfigError for negative durations.
double expected_downtime(double t_gap, double t_pred, const CostModel& cm);

AffineCost affine_coefficients(const CostModel& cm, double t_gap, double t_pred);

double savings(const ConfusionCounts& counts, const AffineCost& ac);

/// Cost of handling `incidents` failures reactively.
double reactive_cost(std::int64_t incidents, const CostModel& cm);

/// Reactive cost of all actual failures minus the savings of the predictor.
double pdm_cost(const ConfusionCounts& counts, const CostModel& cm, double t_gap, double t_pred);

/// One line of the itemized reactive-vs-predictive cost table.
struct CostLine {
    std::string component;
    double current = 0.0;  ///< reactive maintenance
    double future = 0.0;   ///< predictive maintenance
    double delta() const { return current - future; }
};

/// Ticket, service, downtime and component value-loss totals for reactive
/// vs predictive maintenance, plus a "total" line. The total delta equals
/// savings(counts, affine_coefficients(cm, t_gap, t_pred)).
std::vector<CostLine> itemize(const ConfusionCounts& counts, const CostModel& cm, double t_gap,
                              double t_pred);

/// 100 * cost / reactive.
double percent_of(double cost, double reactive);

}  // namespace pdm
