#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pdm {

inline constexpr std::int64_t kHoursPerDay = 24;
inline constexpr std::int64_t kHoursPerWeek = 168;
inline constexpr std::size_t kCategoricalAttrs = 23;
/// Weeks before a failure during which its precursor signal is active.
inline constexpr int kPrecursorWeeks = 2;

/// Names of the 23 categorical device attributes, in column order.
const std::array<std::string_view, kCategoricalAttrs>& categorical_attr_names();
/// Number of categories each attribute draws from.
const std::array<int, kCategoricalAttrs>& categorical_cardinalities();

struct DeviceProfile {
    std::int64_t device_id = 0;
    std::array<int, kCategoricalAttrs> categorical{};
    double base_hazard = 0.0;  ///< weekly failure probability
};

enum class RecordKind { Event, Failure, Sensor };

std::string_view to_string(RecordKind kind);
RecordKind parse_record_kind(std::string_view text);

struct Record {
    std::int64_t timestamp_h = 0;
    RecordKind kind = RecordKind::Event;
    std::optional<double> value;  ///< set for Sensor records only

    friend bool operator==(const Record&, const Record&) = default;
};

struct EventLog {
    std::int64_t device_id = 0;
    std::vector<Record> records;  ///< sorted by timestamp

    friend bool operator==(const EventLog&, const EventLog&) = default;
};

struct SimConfig {
    std::int64_t n_devices = 2000;
    std::int64_t n_weeks = 24;
    std::uint64_t seed = 42;
    double hazard_min = 0.25;
    double hazard_max = 0.41;
    /// Multiplies event intensity by (1 + strength) and shifts the sensor mean
    /// by strength * sigma during the precursor weeks.
    double precursor_strength = 2.0;
    /// Fraction of (device, week) cells with a failure that calibrate_hazard aims at.
    std::optional<double> target_positive_rate;

    double events_per_week = 3.0;
    int sensor_readings_per_week = 7;
    double sensor_sigma = 1.0;
    /// Devices used by calibrate_hazard's pilot simulation (capped at n_devices).
    std::int64_t pilot_devices = 2000;

    std::int64_t horizon_end_h() const { return n_weeks * kHoursPerWeek; }
    /// Throws ConfigError on violated invariants.
    void validate() const;
};

struct Fleet {
    std::vector<DeviceProfile> profiles;
    std::vector<EventLog> logs;  ///< logs[i] belongs to profiles[i]
};

/// Deterministic synthetic fleet. Each device draws its attributes, hazard,
/// failure weeks and readings from RNG streams keyed by (seed, device_id), so
/// the output does not depend on how devices are scheduled across threads.
Fleet generate_fleet(const SimConfig& config);

/// Weekly failure indicators for one device; the same draws generate_fleet
/// uses, without events or sensor readings.
std::vector<bool> simulate_failure_weeks(const SimConfig& config, std::int64_t device_id,
                                         double hazard);

/// Draws the device hazard the same way generate_fleet does.
double draw_device_hazard(const SimConfig& config, std::int64_t device_id);

/// Fraction of (device, week) cells with at least one failure on a pilot
/// fleet of min(pilot_devices, n_devices) devices. This equals the positive
/// rate of a 1-week prediction interval.
double pilot_positive_rate(const SimConfig& config);

/// Shifts the hazard range (keeping its width where possible) so that the
/// pilot positive rate lands within `tolerance` of target_positive_rate.
/// Returns the config unchanged when it already does. Throws
/// CalibrationError after 50 bisection steps without convergence.
SimConfig calibrate_hazard(const SimConfig& config, double tolerance = 0.01);

/// Hazard range centred on `mean` with the config's width, clipped to (0,1).
std::pair<double, double> hazard_range_for_mean(const SimConfig& config, double mean);

}  // namespace pdm
