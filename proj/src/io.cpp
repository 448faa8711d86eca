#include "pdm/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <tuple>

#include "pdm/error.hpp"

namespace pdm::io {

namespace {

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
    T value{};
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw DataError("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
    }
    return value;
}

double parse_double(std::string_view text, std::string_view what) {
    if (text == "inf") return INFINITY;
    if (text == "-inf") return -INFINITY;
    return parse_number<double>(text, what);
}

bool next_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

std::vector<std::string> read_header(std::istream& in, std::string_view file) {
    std::string line;
    if (!next_line(in, line)) throw DataError(std::string(file) + ": missing header row");
    return split_csv_line(line);
}

void expect_columns(const std::vector<std::string>& cells, std::size_t n, std::string_view file,
                    std::size_t line_no) {
    if (cells.size() != n) {
        throw DataError(std::string(file) + " line " + std::to_string(line_no) + ": expected " +
                        std::to_string(n) + " columns, got " + std::to_string(cells.size()));
    }
}

void write_counts(std::ostream& out, const ConfusionCounts& c) {
    out << c.tp << ',' << c.fp << ',' << c.tn << ',' << c.fn;
}

}  // namespace

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    if (v == 0.0) return "0";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        cells.emplace_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

void write_fleet_csv(std::ostream& out, std::span<const DeviceProfile> profiles) {
    out << "device_id";
    for (std::size_t a = 1; a <= kCategoricalAttrs; ++a) out << ",attr_" << a;
    out << ",base_hazard\n";
    for (const auto& p : profiles) {
        out << p.device_id;
        for (int c : p.categorical) out << ',' << c;
        out << ',' << format_double(p.base_hazard) << '\n';
    }
}

std::vector<DeviceProfile> read_fleet_csv(std::istream& in) {
    const auto header = read_header(in, "fleet.csv");
    const std::size_t width = kCategoricalAttrs + 2;
    expect_columns(header, width, "fleet.csv", 1);
    std::vector<DeviceProfile> out;
    std::string line;
    for (std::size_t no = 2; next_line(in, line); ++no) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        expect_columns(cells, width, "fleet.csv", no);
        DeviceProfile p;
        p.device_id = parse_number<std::int64_t>(cells[0], "device_id");
        for (std::size_t a = 0; a < kCategoricalAttrs; ++a) {
            p.categorical[a] = parse_number<int>(cells[a + 1], "categorical attribute");
        }
        p.base_hazard = parse_double(cells.back(), "base_hazard");
        out.push_back(p);
    }
    return out;
}

void write_events_csv(std::ostream& out, std::span<const EventLog> logs) {
    out << "device_id,timestamp_h,kind,value\n";
    for (const auto& log : logs) {
        for (const auto& r : log.records) {
            out << log.device_id << ',' << r.timestamp_h << ',' << to_string(r.kind) << ',';
            if (r.value) out << format_double(*r.value);
            out << '\n';
        }
    }
}

std::vector<EventLog> read_events_csv(std::istream& in) {
    read_header(in, "events.csv");
    std::vector<EventLog> logs;
    std::map<std::int64_t, std::size_t> index;
    std::string line;
    for (std::size_t no = 2; next_line(in, line); ++no) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        expect_columns(cells, 4, "events.csv", no);
        const auto id = parse_number<std::int64_t>(cells[0], "device_id");
        Record r;
        r.timestamp_h = parse_number<std::int64_t>(cells[1], "timestamp_h");
        r.kind = parse_record_kind(cells[2]);
        if (r.kind == RecordKind::Sensor) {
            r.value = parse_double(cells[3], "sensor value");
        } else if (!cells[3].empty()) {
            throw DataError("events.csv line " + std::to_string(no) +
                            ": only SENSOR rows carry a value");
        }
        auto [it, inserted] = index.try_emplace(id, logs.size());
        if (inserted) logs.push_back({id, {}});
        logs[it->second].records.push_back(r);
    }
    for (auto& log : logs) {
        std::stable_sort(log.records.begin(), log.records.end(),
                         [](const Record& a, const Record& b) {
                             return a.timestamp_h < b.timestamp_h;
                         });
    }
    return logs;
}

void write_dataset_csv(std::ostream& out, const WindowedDataset& ds) {
    out << "device_id";
    for (const auto& name : ds.schema.names) out << ',' << name;
    out << ",label,window_start_h\n";
    for (const auto& row : ds.rows) {
        out << row.device_id;
        for (double v : row.features) out << ',' << format_double(v);
        out << ',' << row.label << ',' << row.window_start << '\n';
    }
}

WindowedDataset read_dataset_csv(std::istream& in) {
    const auto header = read_header(in, "dataset.csv");
    if (header.size() < 4 || header.front() != "device_id" || header[header.size() - 2] != "label" ||
        header.back() != "window_start_h") {
        throw DataError("dataset.csv: header must be device_id,<features>,label,window_start_h");
    }
    WindowedDataset ds;
    for (std::size_t i = 1; i + 2 < header.size(); ++i) {
        ds.schema.names.push_back(header[i]);
        ds.schema.kinds.push_back(header[i].starts_with("cat_") ? FeatureKind::Categorical
                                                                 : FeatureKind::Numeric);
    }
    std::string line;
    for (std::size_t no = 2; next_line(in, line); ++no) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        expect_columns(cells, header.size(), "dataset.csv", no);
        DatasetRow row;
        row.device_id = parse_number<std::int64_t>(cells.front(), "device_id");
        for (std::size_t i = 1; i + 2 < cells.size(); ++i) {
            row.features.push_back(parse_double(cells[i], header[i]));
        }
        row.label = parse_number<int>(cells[cells.size() - 2], "label");
        if (row.label != 0 && row.label != 1) throw DataError("dataset.csv: label must be 0 or 1");
        row.window_start = parse_number<std::int64_t>(cells.back(), "window_start_h");
        ds.rows.push_back(std::move(row));
    }
    ds.recount();
    return ds;
}

void write_roc_csv(std::ostream& out, const RocCurve& curve) {
    out << "cutoff,fpr,tpr,tp,fp,tn,fn\n";
    for (const auto& p : curve.points) {
        out << format_double(p.cutoff) << ',' << format_double(p.fpr) << ','
            << format_double(p.tpr) << ',';
        write_counts(out, p.counts);
        out << '\n';
    }
}

void write_trace_csv(std::ostream& out, const std::vector<TraceEntry>& trace) {
    out << "ntree,mtry,samp,cutoff,tp,fp,tn,fn,f1,s\n";
    for (const auto& e : trace) {
        out << e.ntree << ',' << e.mtry << ',' << e.samp << ',' << format_double(e.cutoff) << ',';
        write_counts(out, e.counts);
        out << ',' << format_double(e.f1) << ',' << format_double(e.savings) << '\n';
    }
}

void write_bounds_csv(std::ostream& out,
                      std::span<const std::pair<double, std::vector<BoundPoint>>> bounds) {
    out << "bound,s0,fpr,tpr\n";
    for (std::size_t b = 0; b < bounds.size(); ++b) {
        for (const auto& p : bounds[b].second) {
            out << b << ',' << format_double(bounds[b].first) << ',' << format_double(p.fpr)
                << ',' << format_double(p.tpr) << '\n';
        }
    }
}

void write_surface_csv(std::ostream& out, const SurfaceGrid& grid) {
    out << "tp,fp,f1,s,s_normalized\n";
    for (const auto& c : grid.cells) {
        out << c.tp << ',' << c.fp << ',' << format_double(c.f1) << ',' << format_double(c.s)
            << ',' << format_double(c.s_normalized) << '\n';
    }
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << "t_gap_days,t_pred_days,reactive,pdm_f1,pdm_s,f1_pct,s_pct,delta_pct,"
           "f1_cutoff,s_cutoff,error\n";
    for (const auto& r : rows) {
        out << format_double(r.t_gap_days) << ',' << format_double(r.t_pred_days) << ',';
        if (r.ok()) {
            out << format_double(r.reactive) << ',' << format_double(r.pdm_f1) << ','
                << format_double(r.pdm_s) << ',' << format_double(r.f1_pct) << ','
                << format_double(r.s_pct) << ',' << format_double(r.delta_pct) << ','
                << format_double(r.f1_cutoff) << ',' << format_double(r.s_cutoff) << ",\n";
        } else {
            std::string msg = r.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            out << ",,,,,,,," << msg << '\n';
        }
    }
}

void write_costs_csv(std::ostream& out, std::span<const CostLine> lines) {
    out << "component,current,future,delta\n";
    for (const auto& l : lines) {
        out << l.component << ',' << format_double(l.current) << ',' << format_double(l.future)
            << ',' << format_double(l.delta()) << '\n';
    }
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path.string());
    return in;
}

}  // namespace pdm::io
