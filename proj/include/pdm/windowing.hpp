#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pdm/simfleet.hpp"

namespace pdm {

/// Sliding-window geometry, all lengths in hours.
struct WindowSpec {
    std::int64_t t_obs = 10 * kHoursPerWeek;
    std::int64_t t_gap = kHoursPerWeek;
    std::int64_t t_pred = kHoursPerWeek;
    std::int64_t step = kHoursPerWeek;
    int k_periods = 10;

    std::int64_t total() const { return t_obs + t_gap + t_pred; }
    std::int64_t bin_length() const { return t_obs / k_periods; }
    void validate() const;
};

enum class FeatureKind { Numeric, Categorical };

struct FeatureSchema {
    std::vector<std::string> names;
    std::vector<FeatureKind> kinds;

    std::size_t size() const { return names.size(); }
    friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;
};

/// Column layout produced by extract_features for k bins: per bin
/// event_count, failure_count, sensor_mean, sensor_present; then the seven
/// window statistics; then the 23 categorical attributes (prefixed "cat_").
FeatureSchema feature_schema(int k_periods);

struct DatasetRow {
    std::int64_t device_id = 0;
    std::int64_t window_start = 0;
    std::vector<double> features;
    int label = 0;
};

struct WindowedDataset {
    FeatureSchema schema;
    std::vector<DatasetRow> rows;
    std::int64_t positives = 0;
    std::int64_t negatives = 0;

    std::vector<int> labels() const;
    /// Recomputes positives/negatives from the row labels.
    void recount();
};

struct HorizonSplit {
    std::vector<EventLog> train;  ///< records with timestamp < horizon
    std::vector<EventLog> test;   ///< all records
};

/// Throws DataError unless 0 < horizon < max timestamp over all logs.
HorizonSplit split_horizon(std::span<const EventLog> logs, std::int64_t horizon);

/// Window starts start, start+step, ... whose full window ends at or before end.
std::vector<std::int64_t> slide_windows(const WindowSpec& spec, std::int64_t start,
                                        std::int64_t end);

/// Sentinel used for days_since_last_failure and mtbf_days when the
/// observation interval holds too few failures: (t_obs + 1 h) in days.
double missing_failure_days(const WindowSpec& spec);

/// One row per profile for a single window. Logs are matched to profiles by
/// device_id; a device without a log gets all-zero activity. Only records
/// before window_start + t_obs contribute to features.
std::vector<DatasetRow> extract_features(std::span<const EventLog> logs,
                                         std::span<const DeviceProfile> profiles,
                                         std::int64_t window_start, const WindowSpec& spec);

/// Rows for every (device, window_start), sorted by (device_id, window_start).
WindowedDataset build_dataset(std::span<const EventLog> logs,
                              std::span<const DeviceProfile> profiles,
                              std::span<const std::int64_t> window_starts,
                              const WindowSpec& spec);

/// Training windows slide over [0, horizon) on the truncated logs.
WindowedDataset training_dataset(const HorizonSplit& split,
                                 std::span<const DeviceProfile> profiles,
                                 const WindowSpec& spec, std::int64_t horizon);

/// The single test window whose prediction interval starts at the horizon.
WindowedDataset test_dataset(const HorizonSplit& split, std::span<const DeviceProfile> profiles,
                             const WindowSpec& spec, std::int64_t horizon);

}  // namespace pdm
