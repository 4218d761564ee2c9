/// @file io.hpp
/// @brief Run directory files: manifest, diagnostics series, particle snapshots.
///
/// A run directory written by `helivort simulate` holds
///
///     manifest.txt      key = value lines, rewritten when the run ends
///     config.ini        the resolved configuration (dt is the step taken)
///     diagnostics.csv   one row per recorded time
///     particles.csv     snapshots: t,index,blob,x1,x2,weight

#pragma once

#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "helivort/config.hpp"
#include "helivort/diagnostics.hpp"
#include "helivort/particles.hpp"

namespace helivort::io {

inline constexpr const char *manifest_file = "manifest.txt";
inline constexpr const char *config_file = "config.ini";
inline constexpr const char *diagnostics_file = "diagnostics.csv";
inline constexpr const char *particles_file = "particles.csv";

/// Ordered key = value record of a run. Setting an existing key replaces it in place.
class RunManifest {
public:
    void set(const std::string &key, const std::string &value);
    void set(const std::string &key, double value);
    const std::vector<std::pair<std::string, std::string>> &entries() const { return entries_; }
    std::string text() const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// Writes through a temporary file and a rename, so readers never see half a manifest.
void write_manifest(const std::string &path, const RunManifest &manifest);

/// Parses `key = value` lines; ConfigError naming the path if unreadable.
std::map<std::string, std::string> read_key_values(const std::string &path);

void write_text(const std::string &path, const std::string &text);

/// Streams diagnostics rows, flushing each one so an aborted run keeps its history.
class DiagnosticsWriter {
public:
    DiagnosticsWriter(const std::string &path, int blob_count);
    void write(const DiagnosticsRecord &record);

private:
    std::ofstream out_;
};

/// ConfigError for a missing file, a bad header or a malformed row.
std::vector<DiagnosticsRecord> read_diagnostics(const std::string &path);

class SnapshotWriter {
public:
    explicit SnapshotWriter(const std::string &path);
    void write(const ParticleSystem &sys, double t);

private:
    std::ofstream out_;
};

/// Distinct snapshot times in file order.
std::vector<double> snapshot_times(const std::string &path);

/// The snapshot whose time equals t to 1e-9 relative. The returned system
/// takes params, domain, eps and delta from `config`. ConfigError listing
/// the nearest available times if there is none.
ParticleSystem read_snapshot(const std::string &path, double t, const SimConfig &config);

}  // namespace helivort::io
