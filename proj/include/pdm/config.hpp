#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "pdm/econ.hpp"
#include "pdm/simfleet.hpp"
#include "pdm/tuner.hpp"
#include "pdm/windowing.hpp"

namespace pdm {

/// Window geometry as written in the config file, in days.
struct WindowDays {
    double obs = 70.0;
    double gap = 7.0;
    double pred = 7.0;
    double step = 7.0;
    int k_periods = 10;
    double horizon = 84.0;

    /// Converts to hours; throws ConfigError for fractional hours.
    WindowSpec to_spec() const;
    std::int64_t horizon_hours() const;
};

struct SweepConfig {
    std::vector<double> gap_days = {4, 7, 10};
    std::vector<double> pred_days = {4, 7, 10};
};

struct SurfaceConfig {
    std::int64_t positives = 5445;
    std::int64_t negatives = 10479;
    std::int64_t stride_tp = 100;
    std::int64_t stride_fp = 100;
};

/// Everything an experiment needs. Every section is optional in the file;
/// missing keys keep their defaults, unknown keys are rejected.
struct RunConfig {
    SimConfig sim = [] {
        SimConfig s;
        s.target_positive_rate = 1.0 / 3.0;
        return s;
    }();
    WindowDays window;
    CostModel cost;
    GridConfig grid;
    Objective objective = Objective::Savings;
    double holdout_fraction = 0.0;
    SweepConfig sweep;
    SurfaceConfig surface;
    std::string output_dir = "out";
    std::uint64_t seed = 42;

    void validate() const;
    nlohmann::json to_json() const;
};

/// Parses and validates. Syntax errors report line and column; every
/// failure is a ConfigError.
RunConfig parse_run_config(std::string_view text, std::string_view source = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);

/// 1-based (line, column) of a byte offset into `text`.
std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset);

/// FNV-1a 64 of the canonical JSON form, as 16 hex digits.
std::string config_hash(const RunConfig& config);

}  // namespace pdm
