#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "prandtl/config.hpp"
#include "prandtl/error.hpp"
#include "prandtl/grid.hpp"
#include "prandtl/solver.hpp"

namespace prandtl {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Field snapshots: one JSON header line, then nx * nz little-endian binary64
// values, row-major with x outer.

inline constexpr int kSnapshotVersion = 1;
inline constexpr const char* kSnapshotSchema = "prandtl-field";

struct SnapshotMeta {
    std::string field = "g";
    double tau = 0.0;
};

namespace detail {

inline std::uint64_t to_little_endian(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::little) return v;
    std::uint64_t r = 0;
    for (int b = 0; b < 8; ++b) r |= ((v >> (8 * b)) & 0xffu) << (8 * (7 - b));
    return r;
}

inline Error io_error(const std::string& code, const std::string& what) { return Error(ErrorKind::Io, code, what); }

}  // namespace detail

inline void write_snapshot(std::ostream& out, const Field& f, const SnapshotMeta& meta = {}) {
    const Grid& g = f.grid();
    nlohmann::ordered_json h;
    h["schema"] = kSnapshotSchema;
    h["version"] = kSnapshotVersion;
    h["nx"] = g.nx();
    h["nz"] = g.nz();
    h["lx"] = g.lx();
    h["zmax"] = g.zmax();
    h["stretch"] = g.stretch();
    h["mode"] = to_string(g.mode());
    h["t"] = f.time();
    h["tau"] = meta.tau;
    h["field"] = meta.field;
    out << h.dump() << '\n';
    for (double v : f.values()) {
        const std::uint64_t bits = detail::to_little_endian(std::bit_cast<std::uint64_t>(v));
        char buf[8];
        std::memcpy(buf, &bits, 8);
        out.write(buf, 8);
    }
}

inline void save_snapshot(const fs::path& path, const Field& f, const SnapshotMeta& meta = {}) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw detail::io_error("snapshot-open", "cannot write " + path.string());
    write_snapshot(out, f, meta);
    if (!out) throw detail::io_error("snapshot-write", "short write to " + path.string());
}

struct LoadedSnapshot {
    Field field;
    SnapshotMeta meta;
};

/// Reads a snapshot. With `expected` set, the stored grid must equal it; a
/// coordinate mode mismatch is reported separately because the values would
/// be sampled on different physical nodes.
inline LoadedSnapshot read_snapshot(std::istream& in, const GridPtr& expected = nullptr) {
    std::string line;
    if (!std::getline(in, line)) throw detail::io_error("header", "snapshot has no header line");
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw detail::io_error("header", std::string("snapshot header is not JSON: ") + e.what());
    }
    GridConfig gc;
    LoadedSnapshot out;
    double t = 0.0;
    try {
        if (h.at("schema").get<std::string>() != kSnapshotSchema)
            throw detail::io_error("header", "not a prandtl field snapshot");
        if (h.at("version").get<int>() != kSnapshotVersion)
            throw detail::io_error("version", "snapshot version " + h.at("version").dump() + ", reader expects " +
                                                  std::to_string(kSnapshotVersion));
        gc.nx = h.at("nx").get<int>();
        gc.nz = h.at("nz").get<int>();
        gc.lx = h.at("lx").get<double>();
        gc.zmax = h.at("zmax").get<double>();
        gc.stretch = h.value("stretch", 0.0);
        gc.mode = coordinate_mode_from_string(h.at("mode").get<std::string>());
        t = h.at("t").get<double>();
        out.meta.tau = h.value("tau", 0.0);
        out.meta.field = h.value("field", std::string("g"));
    } catch (const nlohmann::json::exception& e) {
        throw detail::io_error("header", std::string("bad snapshot header: ") + e.what());
    }
    GridPtr grid;
    if (expected) {
        if (gc.mode != expected->mode())
            throw detail::io_error("mode-mismatch", "snapshot stored in " + to_string(gc.mode) +
                                                        " coordinates, current grid uses " + to_string(expected->mode()));
        if (!(Grid(gc) == *expected)) throw detail::io_error("grid-mismatch", "snapshot grid differs from the current grid");
        grid = expected;
    } else {
        try {
            grid = make_grid(gc);
        } catch (const Error& e) {
            throw detail::io_error("header", std::string("snapshot grid invalid: ") + e.what());
        }
    }
    Field f(grid, t);
    auto vals = f.values();
    const std::size_t want = vals.size() * 8;
    std::vector<char> buf(want);
    in.read(buf.data(), static_cast<std::streamsize>(want));
    const auto got = static_cast<std::size_t>(in.gcount());
    if (got != want || in.peek() != std::char_traits<char>::eof())
        throw detail::io_error("payload-length", "snapshot payload has " + std::string(got < want ? "fewer" : "more") +
                                                     " than nx * nz * 8 = " + std::to_string(want) + " bytes");
    for (std::size_t n = 0; n < vals.size(); ++n) {
        std::uint64_t bits = 0;
        std::memcpy(&bits, buf.data() + 8 * n, 8);
        vals[n] = std::bit_cast<double>(detail::to_little_endian(bits));
    }
    out.field = std::move(f);
    return out;
}

inline LoadedSnapshot load_snapshot(const fs::path& path, const GridPtr& expected = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw detail::io_error("snapshot-open", "cannot read " + path.string());
    return read_snapshot(in, expected);
}

// ---------------------------------------------------------------------------
// CSV tables

inline const std::vector<std::string>& norms_csv_columns() {
    static const std::vector<std::string> c = {"t",     "tau",   "X_sum",      "Y_sum",      "D_sum",
                                               "Z_sum", "B_sum", "tildeB_sum", "tail_ratio", "decay_compensated"};
    return c;
}

inline const std::vector<std::string>& radius_csv_columns() {
    static const std::vector<std::string> c = {"t", "tau", "tau_lower_bound", "B_norm", "holder_modulus_running_max"};
    return c;
}

/// Appends rows with full round-trip precision.
class CsvWriter {
public:
    CsvWriter(const fs::path& path, const std::vector<std::string>& columns) : path_(path), out_(path) {
        if (!out_) throw detail::io_error("csv-open", "cannot write " + path.string());
        for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
        out_ << '\n';
        width_ = columns.size();
    }

    void row(std::initializer_list<double> values) {
        if (values.size() != width_) throw detail::io_error("csv-width", "row width differs from header");
        std::size_t i = 0;
        for (double v : values) out_ << (i++ ? "," : "") << fmt_cell(v);
        out_ << '\n';
        if (!out_) throw detail::io_error("csv-write", "short write to " + path_.string());
    }

    void flush() { out_.flush(); }

    static std::string fmt_cell(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

private:
    fs::path path_;
    std::ofstream out_;
    std::size_t width_ = 0;
};

inline void write_norm_row(CsvWriter& w, const NormRow& n) {
    w.row({n.t, n.tau, n.X, n.Y, n.D, n.Z, n.B, n.tildeB, n.tail_ratio, n.decay_compensated});
}

inline void write_radius_row(CsvWriter& w, const RadiusRow& r) {
    w.row({r.t, r.tau, r.tau_lower_bound, r.B_norm, r.holder});
}

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw detail::io_error("csv-column", "no column " + name);
    }
};

/// Reads a numeric CSV with one header row.
inline CsvTable read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw detail::io_error("csv-open", "cannot read " + path.string());
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw detail::io_error("csv-parse", path.string() + " is empty");
    std::istringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) t.columns.push_back(cell);
    for (int lineno = 2; std::getline(in, line); ++lineno) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream rs(line);
        for (std::string cell; std::getline(rs, cell, ',');) {
            double v = 0.0;
            const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (r.ec != std::errc() || r.ptr != cell.data() + cell.size())
                throw detail::io_error("csv-parse", path.string() + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
            row.push_back(v);
        }
        if (row.size() != t.columns.size())
            throw detail::io_error("csv-parse", path.string() + ":" + std::to_string(lineno) + ": wrong column count");
        t.rows.push_back(std::move(row));
    }
    return t;
}

// ---------------------------------------------------------------------------
// key: value reports

/// Ordered `key: value` lines. Values never contain newlines.
class Report {
public:
    void set(const std::string& key, const std::string& value) {
        std::string v = value;
        for (char& c : v)
            if (c == '\n' || c == '\r') c = ' ';
        for (auto& [k, old] : entries_)
            if (k == key) {
                old = v;
                return;
            }
        entries_.emplace_back(key, v);
    }
    void set(const std::string& key, double value) { set(key, CsvWriter::fmt_cell(value)); }
    void set(const std::string& key, long value) { set(key, std::to_string(value)); }
    void set(const std::string& key, int value) { set(key, std::to_string(value)); }
    void set(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }
    void set(const std::string& key, const char* value) { set(key, std::string(value)); }

    std::string text() const {
        std::string out;
        for (const auto& [k, v] : entries_) out += k + ": " + v + "\n";
        return out;
    }

    const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

inline std::map<std::string, std::string> parse_report(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw detail::io_error("report-open", "cannot read " + path.string());
    std::map<std::string, std::string> out;
    for (std::string line; std::getline(in, line);) {
        const auto c = line.find(": ");
        if (c == std::string::npos) throw detail::io_error("report-parse", "bad report line '" + line + "'");
        out[line.substr(0, c)] = line.substr(c + 2);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Run directory

/// `<root>/run-<id>/` with config.echo, norms.csv, radius.csv, report.txt and snapshots/.
class RunDirectory {
public:
    RunDirectory(const fs::path& root, const LabConfig& cfg) : id_(run_id(cfg)), dir_(root / ("run-" + id_)) {
        std::error_code ec;
        fs::create_directories(dir_ / "snapshots", ec);
        if (ec) throw detail::io_error("run-dir", "cannot create " + dir_.string() + ": " + ec.message());
        std::ofstream echo(dir_ / "config.echo");
        echo << config_echo(cfg);
        if (!echo) throw detail::io_error("run-dir", "cannot write config.echo");
    }

    const std::string& id() const noexcept { return id_; }
    const fs::path& path() const noexcept { return dir_; }
    fs::path norms_csv() const { return dir_ / "norms.csv"; }
    fs::path radius_csv() const { return dir_ / "radius.csv"; }
    fs::path report_txt() const { return dir_ / "report.txt"; }

    /// Writes snapshots/g-<index>.fld and returns its path relative to the run directory.
    std::string add_snapshot(const Field& f, const SnapshotMeta& meta) {
        char name[32];
        std::snprintf(name, sizeof name, "snapshots/%s-%04zu.fld", meta.field.c_str(), snapshots_.size());
        save_snapshot(dir_ / name, f, meta);
        snapshots_.emplace_back(f.time(), name);
        return name;
    }

    const std::vector<std::pair<double, std::string>>& snapshots() const noexcept { return snapshots_; }

    void write_report(const Report& r) const {
        std::ofstream out(report_txt());
        out << r.text();
        if (!out) throw detail::io_error("report-write", "cannot write report.txt");
    }

private:
    std::string id_;
    fs::path dir_;
    std::vector<std::pair<double, std::string>> snapshots_;
};

}  // namespace prandtl
