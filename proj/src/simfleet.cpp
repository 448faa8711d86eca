#include "pdm/simfleet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include "pdm/error.hpp"
#include "pdm/parallel.hpp"
#include "pdm/rng.hpp"

namespace pdm {

namespace {

// Stream purposes within one device.
constexpr std::uint64_t kAttrStream = 0;
constexpr std::uint64_t kFailureStream = 1;
constexpr std::uint64_t kActivityStream = 2;

constexpr double kSensorBaseMean = 50.0;
constexpr double kSensorMeanSpread = 1.0;
constexpr double kHazardFloor = 1e-6;

// Knuth's product method; intensities here are small (a few per week).
int draw_poisson(std::mt19937_64& gen, double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    int k = 0;
    double prod = uniform01(gen);
    while (prod > limit) {
        ++k;
        prod *= uniform01(gen);
    }
    return k;
}

double draw_normal(std::mt19937_64& gen) {
    double u1 = uniform01(gen);
    while (u1 <= 0.0) u1 = uniform01(gen);
    const double u2 = uniform01(gen);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::int64_t draw_hour(std::mt19937_64& gen, std::int64_t week, std::int64_t offset,
                       std::int64_t span) {
    return week * kHoursPerWeek + offset +
           static_cast<std::int64_t>(uniform_index(gen, static_cast<std::uint64_t>(span)));
}

DeviceProfile make_profile(const SimConfig& config, std::int64_t device_id) {
    DeviceProfile p;
    p.device_id = device_id;
    auto gen = make_stream({config.seed, static_cast<std::uint64_t>(device_id), kAttrStream});
    const auto& card = categorical_cardinalities();
    for (std::size_t a = 0; a < kCategoricalAttrs; ++a) {
        p.categorical[a] = static_cast<int>(uniform_index(gen, static_cast<std::uint64_t>(card[a])));
    }
    p.base_hazard = draw_device_hazard(config, device_id);
    return p;
}

EventLog make_log(const SimConfig& config, const DeviceProfile& profile) {
    EventLog log;
    log.device_id = profile.device_id;
    const auto failures = simulate_failure_weeks(config, profile.device_id, profile.base_hazard);
    const auto weeks = static_cast<std::size_t>(config.n_weeks);

    std::vector<bool> precursor(weeks, false);
    for (std::size_t w = 0; w < weeks; ++w) {
        if (!failures[w]) continue;
        for (int back = 1; back <= kPrecursorWeeks; ++back) {
            if (w >= static_cast<std::size_t>(back)) precursor[w - back] = true;
        }
    }

    auto gen = make_stream(
        {config.seed, static_cast<std::uint64_t>(profile.device_id), kActivityStream});
    const double sensor_mean = kSensorBaseMean + kSensorMeanSpread * draw_normal(gen);
    const int readings = config.sensor_readings_per_week;
    const std::int64_t slot = readings > 0 ? kHoursPerWeek / readings : kHoursPerWeek;

    for (std::size_t w = 0; w < weeks; ++w) {
        const auto week = static_cast<std::int64_t>(w);
        const double boost = precursor[w] ? config.precursor_strength : 0.0;
        const int n_events = draw_poisson(gen, config.events_per_week * (1.0 + boost));
        for (int e = 0; e < n_events; ++e) {
            log.records.push_back({draw_hour(gen, week, 0, kHoursPerWeek), RecordKind::Event, {}});
        }
        if (failures[w]) {
            log.records.push_back(
                {draw_hour(gen, week, 0, kHoursPerWeek), RecordKind::Failure, {}});
        }
        for (int r = 0; r < readings; ++r) {
            const std::int64_t t = draw_hour(gen, week, r * slot, slot);
            const double value =
                sensor_mean + config.sensor_sigma * (boost + draw_normal(gen));
            log.records.push_back({t, RecordKind::Sensor, value});
        }
    }

    std::sort(log.records.begin(), log.records.end(), [](const Record& a, const Record& b) {
        return std::tuple(a.timestamp_h, a.kind, a.value.value_or(0.0)) <
               std::tuple(b.timestamp_h, b.kind, b.value.value_or(0.0));
    });
    return log;
}

}  // namespace

const std::array<std::string_view, kCategoricalAttrs>& categorical_attr_names() {
    static const std::array<std::string_view, kCategoricalAttrs> names = {
        "vendor",  "model",   "configuration", "install_method", "sw_version", "location",
        "working_hours", "attr_8",  "attr_9",  "attr_10", "attr_11", "attr_12",
        "attr_13", "attr_14", "attr_15", "attr_16", "attr_17", "attr_18",
        "attr_19", "attr_20", "attr_21", "attr_22", "attr_23"};
    return names;
}

const std::array<int, kCategoricalAttrs>& categorical_cardinalities() {
    static const std::array<int, kCategoricalAttrs> card = {
        6, 14, 8, 3, 9, 25, 4, 2, 3, 4, 5, 6, 7, 8, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    return card;
}

std::string_view to_string(RecordKind kind) {
    switch (kind) {
        case RecordKind::Event: return "EVENT";
        case RecordKind::Failure: return "FAILURE";
        case RecordKind::Sensor: return "SENSOR";
    }
    return "EVENT";
}

RecordKind parse_record_kind(std::string_view text) {
    if (text == "EVENT") return RecordKind::Event;
    if (text == "FAILURE") return RecordKind::Failure;
    if (text == "SENSOR") return RecordKind::Sensor;
    throw DataError("unknown record kind '" + std::string(text) + "'");
}

void SimConfig::validate() const {
    if (n_devices < 0) throw ConfigError("sim.n_devices must be >= 0");
    if (n_weeks < 1) throw ConfigError("sim.n_weeks must be >= 1");
    if (!(hazard_min > 0.0 && hazard_min <= hazard_max && hazard_max < 1.0)) {
        throw ConfigError("sim hazard range must satisfy 0 < min <= max < 1");
    }
    if (!(precursor_strength >= 0.0)) throw ConfigError("sim.precursor_strength must be >= 0");
    if (target_positive_rate &&
        !(*target_positive_rate > 0.0 && *target_positive_rate < 1.0)) {
        throw ConfigError("sim.target_positive_rate must lie in (0,1)");
    }
    if (!(events_per_week >= 0.0)) throw ConfigError("sim.events_per_week must be >= 0");
    if (sensor_readings_per_week < 0 || sensor_readings_per_week > kHoursPerWeek) {
        throw ConfigError("sim.sensor_readings_per_week must lie in [0,168]");
    }
    if (!(sensor_sigma >= 0.0)) throw ConfigError("sim.sensor_sigma must be >= 0");
    if (pilot_devices < 1) throw ConfigError("sim.pilot_devices must be >= 1");
}

double draw_device_hazard(const SimConfig& config, std::int64_t device_id) {
    auto gen = make_stream({config.seed, static_cast<std::uint64_t>(device_id), kFailureStream});
    return config.hazard_min + (config.hazard_max - config.hazard_min) * uniform01(gen);
}

std::vector<bool> simulate_failure_weeks(const SimConfig& config, std::int64_t device_id,
                                         double hazard) {
    auto gen = make_stream({config.seed, static_cast<std::uint64_t>(device_id), kFailureStream});
    (void)uniform01(gen);  // hazard draw, see draw_device_hazard
    std::vector<bool> failed(static_cast<std::size_t>(config.n_weeks));
    for (std::size_t w = 0; w < failed.size(); ++w) failed[w] = uniform01(gen) < hazard;
    return failed;
}

Fleet generate_fleet(const SimConfig& config) {
    config.validate();
    Fleet fleet;
    const auto n = static_cast<std::size_t>(config.n_devices);
    fleet.profiles.resize(n);
    fleet.logs.resize(n);
    parallel_for(n, [&](std::size_t i) {
        fleet.profiles[i] = make_profile(config, static_cast<std::int64_t>(i));
        fleet.logs[i] = make_log(config, fleet.profiles[i]);
    });
    return fleet;
}

double pilot_positive_rate(const SimConfig& config) {
    const std::int64_t devices = std::min(config.pilot_devices, config.n_devices);
    if (devices <= 0) throw CalibrationError("pilot simulation needs at least one device");
    std::int64_t positives = 0;
    for (std::int64_t id = 0; id < devices; ++id) {
        const auto weeks = simulate_failure_weeks(config, id, draw_device_hazard(config, id));
        positives += std::count(weeks.begin(), weeks.end(), true);
    }
    return static_cast<double>(positives) / static_cast<double>(devices * config.n_weeks);
}

std::pair<double, double> hazard_range_for_mean(const SimConfig& config, double mean) {
    const double half = 0.5 * (config.hazard_max - config.hazard_min);
    const double lo = std::max(kHazardFloor, mean - half);
    const double hi = std::min(1.0 - kHazardFloor, mean + half);
    return {std::min(lo, hi), hi};
}

SimConfig calibrate_hazard(const SimConfig& config, double tolerance) {
    config.validate();
    if (!config.target_positive_rate) {
        throw ConfigError("calibrate_hazard requires sim.target_positive_rate");
    }
    const double target = *config.target_positive_rate;
    if (std::abs(pilot_positive_rate(config) - target) <= tolerance) return config;

    SimConfig trial = config;
    double lo = kHazardFloor;
    double hi = 1.0 - kHazardFloor;
    for (int step = 0; step < 50; ++step) {
        const double mid = 0.5 * (lo + hi);
        std::tie(trial.hazard_min, trial.hazard_max) = hazard_range_for_mean(config, mid);
        const double rate = pilot_positive_rate(trial);
        if (std::abs(rate - target) <= tolerance) return trial;
        (rate < target ? lo : hi) = mid;
    }
    throw CalibrationError("hazard calibration did not converge within 50 bisection steps");
}

}  // namespace pdm
