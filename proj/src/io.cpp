#include "helivort/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "helivort/error.hpp"
#include "helivort/format.hpp"

namespace helivort::io {

namespace {

std::ifstream open_input(const std::string &path, const std::string &what) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + what + " '" + path + "'");
    return in;
}

std::ofstream open_output(const std::string &path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    return out;
}

std::vector<std::string> split(const std::string &line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    return cells;
}

double number(const std::string &text, const std::string &path) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception &) {
    }
    throw ConfigError("malformed number '" + text + "' in " + path);
}

bool same_time(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

void RunManifest::set(const std::string &key, const std::string &value) {
    for (auto &[k, v] : entries_) {
        if (k == key) {
            v = value;
            return;
        }
    }
    entries_.emplace_back(key, value);
}

void RunManifest::set(const std::string &key, double value) { set(key, shortest(value)); }

std::string RunManifest::text() const {
    std::ostringstream os;
    for (const auto &[k, v] : entries_) os << k << " = " << v << "\n";
    return os.str();
}

void write_manifest(const std::string &path, const RunManifest &manifest) {
    const std::string tmp = path + ".tmp";
    write_text(tmp, manifest.text());
    std::filesystem::rename(tmp, path);
}

std::map<std::string, std::string> read_key_values(const std::string &path) {
    std::ifstream in = open_input(path, "file");
    std::map<std::string, std::string> out;
    for (std::string line; std::getline(in, line);) {
        const auto eq = line.find(" = ");
        if (eq == std::string::npos) continue;
        out[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return out;
}

void write_text(const std::string &path, const std::string &text) {
    std::ofstream out = open_output(path);
    out << text;
    if (!out) throw ConfigError("failed writing '" + path + "'");
}

DiagnosticsWriter::DiagnosticsWriter(const std::string &path, int blob_count) : out_(open_output(path)) {
    out_ << diagnostics::csv_header(blob_count) << '\n' << std::flush;
}

void DiagnosticsWriter::write(const DiagnosticsRecord &record) {
    out_ << diagnostics::csv_row(record) << '\n' << std::flush;
}

std::vector<DiagnosticsRecord> read_diagnostics(const std::string &path) {
    std::ifstream in = open_input(path, "diagnostics");
    std::string header;
    if (!std::getline(in, header)) throw ConfigError("diagnostics file '" + path + "' is empty");
    const auto columns = split(header);
    // t, 7 per blob, E, support_ok, 1 per blob.
    const long blobs = (static_cast<long>(columns.size()) - 3) / 8;
    if (blobs < 1 || header != diagnostics::csv_header(static_cast<int>(blobs))) {
        throw ConfigError("'" + path + "' does not start with a diagnostics header");
    }
    std::vector<DiagnosticsRecord> out;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty()) out.push_back(diagnostics::parse_csv_row(line, static_cast<int>(blobs)));
    }
    return out;
}

SnapshotWriter::SnapshotWriter(const std::string &path) : out_(open_output(path)) {
    out_ << "t,index,blob,x1,x2,weight\n" << std::flush;
}

void SnapshotWriter::write(const ParticleSystem &sys, double t) {
    const std::string ts = shortest(t);
    for (std::size_t k = 0; k < sys.size(); ++k) {
        out_ << ts << ',' << k << ',' << sys.blob_id[k] << ',' << shortest(sys.positions[k].x) << ','
             << shortest(sys.positions[k].y) << ',' << shortest(sys.weights[k]) << '\n';
    }
    out_ << std::flush;
}

std::vector<double> snapshot_times(const std::string &path) {
    std::ifstream in = open_input(path, "particle snapshots");
    std::vector<double> times;
    std::string line;
    std::getline(in, line);
    std::string last;
    while (std::getline(in, line)) {
        const std::string t = line.substr(0, line.find(','));
        if (t != last) {
            times.push_back(number(t, path));
            last = t;
        }
    }
    return times;
}

ParticleSystem read_snapshot(const std::string &path, double t, const SimConfig &config) {
    const auto times = snapshot_times(path);
    const auto hit = std::find_if(times.begin(), times.end(), [&](double s) { return same_time(s, t); });
    if (hit == times.end()) {
        std::vector<double> nearest = times;
        std::sort(nearest.begin(), nearest.end(),
                  [&](double a, double b) { return std::abs(a - t) < std::abs(b - t); });
        nearest.resize(std::min<std::size_t>(3, nearest.size()));
        std::string list;
        for (double s : nearest) list += (list.empty() ? "" : ", ") + shortest(s);
        throw ConfigError("no particle snapshot at t=" + shortest(t) + " in '" + path +
                          "'; nearest available times: " + (list.empty() ? "none" : list));
    }
    ParticleSystem sys(HelixParams{config.h}, DiskDomain{config.r_u}, config.eps, config.delta);
    std::ifstream in = open_input(path, "particle snapshots");
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        const auto cells = split(line);
        if (cells.size() != 6) throw ConfigError("malformed snapshot row '" + line + "' in " + path);
        if (!same_time(number(cells[0], path), *hit)) continue;
        sys.add({number(cells[3], path), number(cells[4], path)}, number(cells[5], path),
                static_cast<int>(number(cells[2], path)));
    }
    return sys;
}

}  // namespace helivort::io
