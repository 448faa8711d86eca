#include "pdm/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "pdm/error.hpp"

namespace pdm {

namespace {

using nlohmann::json;

/// Reads one JSON object section, tracking which keys were consumed.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + " must be an object");
    }

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        const auto it = j_.find(key);
        if (it == j_.end()) return;
        try {
            out = it->template get<T>();
        } catch (const json::exception&) {
            throw ConfigError(where(key) + " has the wrong type (" + it->dump() + ")");
        }
    }

    void get_optional(const char* key, std::optional<double>& out) {
        seen_.insert(key);
        const auto it = j_.find(key);
        if (it == j_.end()) return;
        if (it->is_null()) {
            out.reset();
        } else if (it->is_number()) {
            out = it->get<double>();
        } else {
            throw ConfigError(where(key) + " must be a number or null");
        }
    }

    bool has(const char* key) const { return j_.contains(key); }

    Section child(const char* key) {
        seen_.insert(key);
        return Section(j_.at(key), path_.empty() ? key : path_ + "." + key);
    }

    /// Throws on any key that no get()/child() call asked for.
    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) throw ConfigError("unknown key " + where(key.c_str()));
        }
    }

private:
    std::string where(const char* key = nullptr) const {
        std::string p = path_;
        if (key != nullptr) p += (p.empty() ? "" : ".") + std::string(key);
        return "'" + (p.empty() ? std::string("<root>") : p) + "'";
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

std::int64_t whole_hours(double days, const char* what) {
    const double hours = days * static_cast<double>(kHoursPerDay);
    const double rounded = std::round(hours);
    if (std::abs(hours - rounded) > 1e-6) {
        throw ConfigError(std::string("window.") + what + " must be a whole number of hours");
    }
    return static_cast<std::int64_t>(rounded);
}

}  // namespace

WindowSpec WindowDays::to_spec() const {
    WindowSpec spec;
    spec.t_obs = whole_hours(obs, "obs_days");
    spec.t_gap = whole_hours(gap, "gap_days");
    spec.t_pred = whole_hours(pred, "pred_days");
    spec.step = whole_hours(step, "step_days");
    spec.k_periods = k_periods;
    spec.validate();
    return spec;
}

std::int64_t WindowDays::horizon_hours() const { return whole_hours(horizon, "horizon_days"); }

void RunConfig::validate() const {
    sim.validate();
    (void)window.to_spec();
    if (window.horizon_hours() <= 0) throw ConfigError("window.horizon_days must be > 0");
    if (window.horizon_hours() >= sim.horizon_end_h()) {
        throw ConfigError("window.horizon_days must lie before the end of the simulated period");
    }
    cost.validate();
    grid.validate();
    if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) {
        throw ConfigError("holdout_fraction must lie in [0,1)");
    }
    if (sweep.gap_days.empty() || sweep.pred_days.empty()) {
        throw ConfigError("sweep.gap_days and sweep.pred_days must not be empty");
    }
    for (double d : sweep.gap_days) {
        if (!(d >= 0.0)) throw ConfigError("sweep.gap_days must be >= 0");
    }
    for (double d : sweep.pred_days) {
        if (!(d > 0.0)) throw ConfigError("sweep.pred_days must be > 0");
    }
    if (surface.positives < 0 || surface.negatives < 0 || surface.stride_tp < 1 ||
        surface.stride_fp < 1) {
        throw ConfigError("surface needs non-negative class sizes and strides >= 1");
    }
    if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

nlohmann::json RunConfig::to_json() const {
    json j;
    j["seed"] = seed;
    j["output_dir"] = output_dir;
    j["objective"] = std::string(pdm::to_string(objective));
    j["holdout_fraction"] = holdout_fraction;
    j["sim"] = {{"n_devices", sim.n_devices},
                {"n_weeks", sim.n_weeks},
                {"hazard_min", sim.hazard_min},
                {"hazard_max", sim.hazard_max},
                {"precursor_strength", sim.precursor_strength},
                {"target_positive_rate", sim.target_positive_rate
                                             ? json(*sim.target_positive_rate)
                                             : json(nullptr)},
                {"events_per_week", sim.events_per_week},
                {"sensor_readings_per_week", sim.sensor_readings_per_week},
                {"sensor_sigma", sim.sensor_sigma},
                {"pilot_devices", sim.pilot_devices}};
    j["window"] = {{"obs_days", window.obs},   {"gap_days", window.gap},
                   {"pred_days", window.pred}, {"step_days", window.step},
                   {"k_periods", window.k_periods}, {"horizon_days", window.horizon}};
    j["cost"] = {{"ticket", cost.ticket_cost},
                 {"service", cost.service_cost},
                 {"downtime_rate", cost.downtime_rate},
                 {"travel_h", cost.travel_time},
                 {"repair_h", cost.repair_time},
                 {"component_cost", cost.component_cost},
                 {"expected_life_h", cost.expected_life}};
    j["grid"] = {{"ntree", grid.ntree_values},
                 {"mtry_exponents", grid.mtry_exponents},
                 {"samp_multipliers", grid.samp_multipliers},
                 {"cutoff_min", grid.cutoff_min},
                 {"cutoff_max", grid.cutoff_max},
                 {"cutoff_step", grid.cutoff_step},
                 {"min_leaf", grid.min_leaf},
                 {"max_depth", grid.max_depth}};
    j["sweep"] = {{"gap_days", sweep.gap_days}, {"pred_days", sweep.pred_days}};
    j["surface"] = {{"positives", surface.positives},
                    {"negatives", surface.negatives},
                    {"stride_tp", surface.stride_tp},
                    {"stride_fp", surface.stride_fp}};
    return j;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

RunConfig parse_run_config(std::string_view text, std::string_view source) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // e.byte is the 1-based index of the offending character.
        const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ConfigError(std::string(source) + ":" + std::to_string(line) + ":" +
                          std::to_string(col) + ": invalid JSON: " + e.what());
    }

    RunConfig c;
    Section root(j, "");
    root.get("seed", c.seed);
    root.get("output_dir", c.output_dir);
    std::string objective = std::string(to_string(c.objective));
    root.get("objective", objective);
    c.objective = parse_objective(objective);
    root.get("holdout_fraction", c.holdout_fraction);

    if (root.has("sim")) {
        auto s = root.child("sim");
        s.get("n_devices", c.sim.n_devices);
        s.get("n_weeks", c.sim.n_weeks);
        s.get("hazard_min", c.sim.hazard_min);
        s.get("hazard_max", c.sim.hazard_max);
        s.get("precursor_strength", c.sim.precursor_strength);
        s.get_optional("target_positive_rate", c.sim.target_positive_rate);
        s.get("events_per_week", c.sim.events_per_week);
        s.get("sensor_readings_per_week", c.sim.sensor_readings_per_week);
        s.get("sensor_sigma", c.sim.sensor_sigma);
        s.get("pilot_devices", c.sim.pilot_devices);
        s.finish();
    }

    if (root.has("window")) {
        auto w = root.child("window");
        w.get("obs_days", c.window.obs);
        w.get("gap_days", c.window.gap);
        w.get("pred_days", c.window.pred);
        w.get("step_days", c.window.step);
        w.get("k_periods", c.window.k_periods);
        w.get("horizon_days", c.window.horizon);
        w.finish();
    }
    if (root.has("cost")) {
        auto k = root.child("cost");
        k.get("ticket", c.cost.ticket_cost);
        k.get("service", c.cost.service_cost);
        k.get("downtime_rate", c.cost.downtime_rate);
        k.get("travel_h", c.cost.travel_time);
        k.get("repair_h", c.cost.repair_time);
        k.get("component_cost", c.cost.component_cost);
        k.get("expected_life_h", c.cost.expected_life);
        k.finish();
    }
    if (root.has("grid")) {
        auto g = root.child("grid");
        g.get("ntree", c.grid.ntree_values);
        g.get("mtry_exponents", c.grid.mtry_exponents);
        g.get("samp_multipliers", c.grid.samp_multipliers);
        g.get("cutoff_min", c.grid.cutoff_min);
        g.get("cutoff_max", c.grid.cutoff_max);
        g.get("cutoff_step", c.grid.cutoff_step);
        g.get("min_leaf", c.grid.min_leaf);
        g.get("max_depth", c.grid.max_depth);
        g.finish();
    }
    if (root.has("sweep")) {
        auto s = root.child("sweep");
        s.get("gap_days", c.sweep.gap_days);
        s.get("pred_days", c.sweep.pred_days);
        s.finish();
    }
    if (root.has("surface")) {
        auto s = root.child("surface");
        s.get("positives", c.surface.positives);
        s.get("negatives", c.surface.negatives);
        s.get("stride_tp", c.surface.stride_tp);
        s.get("stride_fp", c.surface.stride_fp);
        s.finish();
    }
    root.finish();

    c.sim.seed = c.seed;
    c.validate();
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str(), path.string());
}

std::string config_hash(const RunConfig& config) {
    const std::string canonical = config.to_json().dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : canonical) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace pdm
