#include "pdm/windowing.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "pdm/error.hpp"
#include "pdm/parallel.hpp"

namespace pdm {

namespace {

constexpr std::size_t kPerBinFeatures = 4;
constexpr std::size_t kWindowStats = 7;

auto lower_at(const std::vector<Record>& records, std::int64_t t) {
    return std::lower_bound(records.begin(), records.end(), t,
                            [](const Record& r, std::int64_t v) { return r.timestamp_h < v; });
}

DatasetRow make_row(const EventLog* log, const DeviceProfile& profile, std::int64_t window_start,
                    const WindowSpec& spec) {
    const auto k = static_cast<std::size_t>(spec.k_periods);
    const std::int64_t bin = spec.bin_length();
    const std::int64_t obs_end = window_start + spec.t_obs;
    const std::int64_t pred_begin = obs_end + spec.t_gap;
    const std::int64_t pred_end = pred_begin + spec.t_pred;

    std::vector<double> events(k, 0.0), failures(k, 0.0), sensor_sum(k, 0.0), sensor_n(k, 0.0);
    std::vector<std::int64_t> failure_times;
    double sensor_min = std::numeric_limits<double>::infinity();
    double sensor_max = -std::numeric_limits<double>::infinity();
    int label = 0;

    if (log != nullptr) {
        const auto& recs = log->records;
        for (auto it = lower_at(recs, window_start); it != recs.end() && it->timestamp_h < obs_end;
             ++it) {
            const auto i = static_cast<std::size_t>((it->timestamp_h - window_start) / bin);
            switch (it->kind) {
                case RecordKind::Event: events[i] += 1.0; break;
                case RecordKind::Failure:
                    failures[i] += 1.0;
                    failure_times.push_back(it->timestamp_h);
                    break;
                case RecordKind::Sensor: {
                    const double v = it->value.value_or(0.0);
                    sensor_sum[i] += v;
                    sensor_n[i] += 1.0;
                    sensor_min = std::min(sensor_min, v);
                    sensor_max = std::max(sensor_max, v);
                    break;
                }
            }
        }
        for (auto it = lower_at(recs, pred_begin); it != recs.end() && it->timestamp_h < pred_end;
             ++it) {
            if (it->kind == RecordKind::Failure) {
                label = 1;
                break;
            }
        }
    }

    DatasetRow row;
    row.device_id = profile.device_id;
    row.window_start = window_start;
    row.label = label;
    auto& f = row.features;
    f.reserve(k * kPerBinFeatures + kWindowStats + kCategoricalAttrs);

    double total_events = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const bool present = sensor_n[i] > 0.0;
        f.push_back(events[i]);
        f.push_back(failures[i]);
        f.push_back(present ? sensor_sum[i] / sensor_n[i] : 0.0);
        f.push_back(present ? 1.0 : 0.0);
        total_events += events[i];
    }

    const double sentinel = missing_failure_days(spec);
    const double hours_per_day = static_cast<double>(kHoursPerDay);
    double since_last = sentinel;
    double mtbf = sentinel;
    if (!failure_times.empty()) {
        since_last = static_cast<double>(obs_end - failure_times.back()) / hours_per_day;
    }
    if (failure_times.size() >= 2) {
        const auto span = failure_times.back() - failure_times.front();
        mtbf = static_cast<double>(span) / hours_per_day /
               static_cast<double>(failure_times.size() - 1);
    }

    double slope = 0.0;
    if (k > 1) {
        const double mean_i = static_cast<double>(k - 1) / 2.0;
        const double mean_c = total_events / static_cast<double>(k);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double di = static_cast<double>(i) - mean_i;
            num += di * (events[i] - mean_c);
            den += di * di;
        }
        slope = num / den;
    }

    const bool any_sensor = sensor_min <= sensor_max;
    f.push_back(static_cast<double>(failure_times.size()));
    f.push_back(since_last);
    f.push_back(mtbf);
    f.push_back(any_sensor ? sensor_min : 0.0);
    f.push_back(any_sensor ? sensor_max : 0.0);
    f.push_back(total_events);
    f.push_back(slope);

    for (int c : profile.categorical) f.push_back(static_cast<double>(c));
    return row;
}

std::map<std::int64_t, const EventLog*> index_logs(std::span<const EventLog> logs) {
    std::map<std::int64_t, const EventLog*> by_id;
    for (const auto& log : logs) by_id[log.device_id] = &log;
    return by_id;
}

}  // namespace

void WindowSpec::validate() const {
    if (t_obs <= 0) throw ConfigError("window observation length must be > 0");
    if (t_pred <= 0) throw ConfigError("window prediction length must be > 0");
    if (t_gap < 0) throw ConfigError("window gap must be >= 0");
    if (step <= 0) throw ConfigError("window step must be > 0");
    if (k_periods < 1) throw ConfigError("window k_periods must be >= 1");
    if (t_obs % k_periods != 0) {
        throw ConfigError("window observation length must be divisible by k_periods");
    }
}

FeatureSchema feature_schema(int k_periods) {
    FeatureSchema s;
    auto add = [&](std::string name, FeatureKind kind) {
        s.names.push_back(std::move(name));
        s.kinds.push_back(kind);
    };
    for (int i = 1; i <= k_periods; ++i) {
        const auto n = std::to_string(i);
        add("event_count_" + n, FeatureKind::Numeric);
        add("failure_count_" + n, FeatureKind::Numeric);
        add("sensor_mean_" + n, FeatureKind::Numeric);
        add("sensor_present_" + n, FeatureKind::Numeric);
    }
    for (const char* name : {"total_incidents", "days_since_last_failure", "mtbf_days",
                             "sensor_min", "sensor_max", "total_events", "event_slope"}) {
        add(name, FeatureKind::Numeric);
    }
    for (auto name : categorical_attr_names()) {
        add("cat_" + std::string(name), FeatureKind::Categorical);
    }
    return s;
}

std::vector<int> WindowedDataset::labels() const {
    std::vector<int> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.label);
    return out;
}

void WindowedDataset::recount() {
    positives = 0;
    for (const auto& r : rows) positives += r.label;
    negatives = static_cast<std::int64_t>(rows.size()) - positives;
}

HorizonSplit split_horizon(std::span<const EventLog> logs, std::int64_t horizon) {
    std::int64_t max_ts = std::numeric_limits<std::int64_t>::min();
    for (const auto& log : logs) {
        if (!log.records.empty()) max_ts = std::max(max_ts, log.records.back().timestamp_h);
    }
    if (max_ts == std::numeric_limits<std::int64_t>::min()) {
        throw DataError("cannot split empty logs at a horizon");
    }
    if (horizon <= 0 || horizon >= max_ts) {
        throw DataError("horizon " + std::to_string(horizon) + " h outside data range (0, " +
                        std::to_string(max_ts) + ")");
    }

    HorizonSplit split;
    split.test.assign(logs.begin(), logs.end());
    split.train.reserve(logs.size());
    for (const auto& log : logs) {
        EventLog t{log.device_id, {}};
        t.records.assign(log.records.begin(), lower_at(log.records, horizon));
        split.train.push_back(std::move(t));
    }
    return split;
}

std::vector<std::int64_t> slide_windows(const WindowSpec& spec, std::int64_t start,
                                        std::int64_t end) {
    spec.validate();
    std::vector<std::int64_t> starts;
    for (std::int64_t s = start; s + spec.total() <= end; s += spec.step) starts.push_back(s);
    return starts;
}

double missing_failure_days(const WindowSpec& spec) {
    return static_cast<double>(spec.t_obs + 1) / static_cast<double>(kHoursPerDay);
}

std::vector<DatasetRow> extract_features(std::span<const EventLog> logs,
                                         std::span<const DeviceProfile> profiles,
                                         std::int64_t window_start, const WindowSpec& spec) {
    spec.validate();
    const auto by_id = index_logs(logs);
    std::vector<DatasetRow> rows(profiles.size());
    parallel_for(profiles.size(), [&](std::size_t i) {
        const auto it = by_id.find(profiles[i].device_id);
        rows[i] = make_row(it == by_id.end() ? nullptr : it->second, profiles[i], window_start,
                           spec);
    });
    return rows;
}

WindowedDataset build_dataset(std::span<const EventLog> logs,
                              std::span<const DeviceProfile> profiles,
                              std::span<const std::int64_t> window_starts,
                              const WindowSpec& spec) {
    spec.validate();
    WindowedDataset ds;
    ds.schema = feature_schema(spec.k_periods);
    const auto by_id = index_logs(logs);

    std::vector<const DeviceProfile*> order;
    order.reserve(profiles.size());
    for (const auto& p : profiles) order.push_back(&p);
    std::stable_sort(order.begin(), order.end(),
                     [](const DeviceProfile* a, const DeviceProfile* b) {
                         return a->device_id < b->device_id;
                     });
    std::vector<std::int64_t> starts(window_starts.begin(), window_starts.end());
    std::sort(starts.begin(), starts.end());

    const std::size_t per_device = starts.size();
    ds.rows.resize(order.size() * per_device);
    parallel_for(order.size(), [&](std::size_t d) {
        const auto it = by_id.find(order[d]->device_id);
        const EventLog* log = it == by_id.end() ? nullptr : it->second;
        for (std::size_t w = 0; w < per_device; ++w) {
            ds.rows[d * per_device + w] = make_row(log, *order[d], starts[w], spec);
        }
    });
    ds.recount();
    return ds;
}

WindowedDataset training_dataset(const HorizonSplit& split,
                                 std::span<const DeviceProfile> profiles,
                                 const WindowSpec& spec, std::int64_t horizon) {
    const auto starts = slide_windows(spec, 0, horizon);
    if (starts.empty()) {
        throw DataError("no training window of " + std::to_string(spec.total()) +
                        " h fits before the horizon at " + std::to_string(horizon) + " h");
    }
    return build_dataset(split.train, profiles, starts, spec);
}

WindowedDataset test_dataset(const HorizonSplit& split, std::span<const DeviceProfile> profiles,
                             const WindowSpec& spec, std::int64_t horizon) {
    spec.validate();
    const std::int64_t start = horizon - spec.t_obs - spec.t_gap;
    if (start < 0) {
        throw DataError("test window observation interval would start before time 0");
    }
    const std::int64_t starts[] = {start};
    return build_dataset(split.test, profiles, starts, spec);
}

}  // namespace pdm
