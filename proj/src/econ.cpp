#include "pdm/econ.hpp"

#include <algorithm>

#include "pdm/error.hpp"

namespace pdm {

void CostModel::validate() const {
    for (double v : {ticket_cost, service_cost, downtime_rate, travel_time, repair_time,
                     component_cost, expected_life}) {
        if (!(v >= 0.0)) throw ConfigError("cost model values must be >= 0");
    }
    if (component_cost > 0.0 && expected_life <= 0.0) {
        throw ConfigError("cost.expected_life_h must be > 0 when component_cost is set");
    }
}

CostModel CostModel::with_value_loss() {
    CostModel cm;
    cm.component_cost = 1051.2;
    cm.expected_life = 8760.0;
    return cm;
}

double expected_downtime(double t_gap, double t_pred, const CostModel& cm) {
    if (!(t_gap >= 0.0 && t_pred >= 0.0)) throw ConfigError("gap and prediction must be >= 0");
    return std::max(0.0, cm.travel_time - t_gap - t_pred / 2.0) + cm.repair_time;
}

AffineCost affine_coefficients(const CostModel& cm, double t_gap, double t_pred) {
    const double reactive_downtime = expected_downtime(0.0, 0.0, cm);
    const double downtime = expected_downtime(t_gap, t_pred, cm);
    AffineCost ac;
    ac.a = cm.ticket_cost + cm.downtime_rate * (reactive_downtime - downtime);
    ac.b = cm.service_cost + cm.downtime_rate * downtime + cm.value_loss_rate() * t_pred / 2.0;
    ac.c = 0.0;
    ac.t_gap = t_gap;
    ac.t_pred = t_pred;
    return ac;
}

double savings(const ConfusionCounts& counts, const AffineCost& ac) {
    return ac(static_cast<double>(counts.tp), static_cast<double>(counts.fp));
}

double reactive_cost(std::int64_t incidents, const CostModel& cm) {
    if (incidents < 0) throw ConfigError("incident count must be >= 0");
    return static_cast<double>(incidents) *
           (cm.ticket_cost + cm.service_cost + cm.downtime_rate * expected_downtime(0.0, 0.0, cm));
}

double pdm_cost(const ConfusionCounts& counts, const CostModel& cm, double t_gap, double t_pred) {
    return reactive_cost(counts.positives(), cm) -
           savings(counts, affine_coefficients(cm, t_gap, t_pred));
}

std::vector<CostLine> itemize(const ConfusionCounts& counts, const CostModel& cm, double t_gap,
                              double t_pred) {
    const auto tp = static_cast<double>(counts.tp);
    const auto fp = static_cast<double>(counts.fp);
    const auto fn = static_cast<double>(counts.fn);
    const auto failures = static_cast<double>(counts.positives());
    const double reactive_downtime = expected_downtime(0.0, 0.0, cm);
    const double downtime = expected_downtime(t_gap, t_pred, cm);

    // Predicted failures (TP) skip the ticket and only wait out the residual
    // downtime; false alarms pay a service visit, its downtime and the early
    // replacement; missed failures (FN) are handled reactively.
    std::vector<CostLine> lines = {
        {"ticket", failures * cm.ticket_cost, fn * cm.ticket_cost},
        {"service", failures * cm.service_cost, (fn + tp + fp) * cm.service_cost},
        {"downtime", failures * cm.downtime_rate * reactive_downtime,
         fn * cm.downtime_rate * reactive_downtime + (tp + fp) * cm.downtime_rate * downtime},
        {"value_loss", 0.0, fp * cm.value_loss_rate() * t_pred / 2.0},
    };
    CostLine total{"total", 0.0, 0.0};
    for (const auto& l : lines) {
        total.current += l.current;
        total.future += l.future;
    }
    lines.push_back(total);
    return lines;
}

double percent_of(double cost, double reactive) {
    if (reactive == 0.0) throw DataError("percentage of a zero reactive cost is undefined");
    return 100.0 * cost / reactive;
}

}  // namespace pdm
