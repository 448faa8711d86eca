#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pdm/analysis.hpp"
#include "pdm/econ.hpp"
#include "pdm/metrics.hpp"
#include "pdm/simfleet.hpp"
#include "pdm/tuner.hpp"
#include "pdm/windowing.hpp"

namespace pdm::io {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

std::vector<std::string> split_csv_line(std::string_view line);

// fleet.csv: device_id,attr_1..attr_23,base_hazard
void write_fleet_csv(std::ostream& out, std::span<const DeviceProfile> profiles);
std::vector<DeviceProfile> read_fleet_csv(std::istream& in);

// events.csv: device_id,timestamp_h,kind,value (value empty unless SENSOR)
void write_events_csv(std::ostream& out, std::span<const EventLog> logs);
/// Groups rows per device in order of first appearance and sorts each log.
std::vector<EventLog> read_events_csv(std::istream& in);

// dataset.csv: device_id,<features...>,label,window_start_h
void write_dataset_csv(std::ostream& out, const WindowedDataset& ds);
/// Columns named cat_* are read back as categorical.
WindowedDataset read_dataset_csv(std::istream& in);

void write_roc_csv(std::ostream& out, const RocCurve& curve);
void write_trace_csv(std::ostream& out, const std::vector<TraceEntry>& trace);
/// Columns: bound,s0,fpr,tpr
void write_bounds_csv(std::ostream& out, std::span<const std::pair<double, std::vector<BoundPoint>>> bounds);
void write_surface_csv(std::ostream& out, const SurfaceGrid& grid);
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);
void write_costs_csv(std::ostream& out, std::span<const CostLine> lines);

/// Opens for writing, creating parent directories; throws Error on failure.
std::ofstream open_output(const std::filesystem::path& path);
std::ifstream open_input(const std::filesystem::path& path);

}  // namespace pdm::io
