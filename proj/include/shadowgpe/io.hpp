#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "shadowgpe/grid.hpp"
#include "shadowgpe/observables.hpp"

namespace shadowgpe {

namespace fs = std::filesystem;

struct SnapshotHeader {
  std::vector<Interval> bounds;
  std::vector<std::size_t> nodes;
  double time = 0.0;
  std::string kind = "psi";  // psi | phi | u0
  std::string config_hash;

  std::size_t interior_count() const;
};

struct Snapshot {
  SnapshotHeader header;
  ComplexField values;  // interior-index order
};

struct LoadedSnapshot {
  Snapshot snapshot;
  bool hash_matches = true;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text);

/// 64-bit FNV-1a of the compact JSON dump, as 16 hex digits.
std::string content_hash(const nlohmann::json& j);

/// Writes <base>.csv (one "re,im" row per interior node) and the <base>.json
/// header. Each file is written to a temporary name and renamed into place,
/// the header last, so a present header implies a complete payload.
void write_snapshot(const fs::path& base, const Snapshot& snapshot);

/// Throws on malformed header or payload length mismatch. A hash mismatch
/// against `expected_hash` is reported through the return value and a
/// warning on stderr.
LoadedSnapshot read_snapshot(const fs::path& base, const std::string& expected_hash = {});
bool snapshot_exists(const fs::path& base);

Snapshot make_snapshot(const Grid& grid, std::span<const cplx> values, double time, std::string kind,
                       std::string config_hash);
Grid grid_of(const SnapshotHeader& header);

/// |psi|^2 over the interior nodes as a matrix: one CSV row per y index, one
/// column per x index (a single row in 1D). A JSON sidecar <path>.json holds the
/// physical extent.
void write_density(const fs::path& path, const Grid& grid, std::span<const cplx> values, double time);

inline constexpr const char* kSeriesHeader =
    "n,t,mass,energy,eta,consistency_l2,consistency_h1,extended_energy";

/// CSV with kSeriesHeader; extended_energy is empty when absent.
void write_series(const fs::path& path, std::span<const ObservableRecord> rows);
std::vector<ObservableRecord> read_series(const fs::path& path);

/// Write `text` to `path` through a temporary file and rename.
void write_file_atomic(const fs::path& path, const std::string& text);

}  // namespace shadowgpe
