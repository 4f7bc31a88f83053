#include "shadowgpe/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace shadowgpe {

using nlohmann::json;

std::size_t SnapshotHeader::interior_count() const {
  std::size_t m = 1;
  for (auto n : nodes) m *= (n >= 2 ? n - 2 : 0);
  return m;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return {buf, end};
}

double parse_double(std::string_view text) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return INFINITY;
  if (text == "-inf") return -INFINITY;
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size())
    throw std::invalid_argument("cannot parse number '" + std::string(text) + "'");
  return v;
}

std::string content_hash(const json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_file_atomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

namespace {

fs::path with_suffix(const fs::path& base, const char* suffix) {
  fs::path p = base;
  p += suffix;
  return p;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto l : split(text, '\n')) {
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    if (!l.empty()) out.push_back(l);
  }
  return out;
}

json header_json(const SnapshotHeader& h) {
  json bounds = json::array();
  for (const auto& b : h.bounds) bounds.push_back({b.lo, b.hi});
  return {{"format", "shadowgpe-snapshot-1"},
          {"bounds", bounds},
          {"nodes", h.nodes},
          {"interior_count", h.interior_count()},
          {"time", h.time},
          {"kind", h.kind},
          {"config_hash", h.config_hash}};
}

}  // namespace

Snapshot make_snapshot(const Grid& grid, std::span<const cplx> values, double time, std::string kind,
                       std::string config_hash) {
  if (values.size() != grid.size()) throw std::invalid_argument("snapshot: field does not match grid");
  return {{grid.bounds_list(), grid.nodes_list(), time, std::move(kind), std::move(config_hash)},
          ComplexField(values.begin(), values.end())};
}

Grid grid_of(const SnapshotHeader& header) { return build_grid(header.bounds, header.nodes); }

void write_snapshot(const fs::path& base, const Snapshot& snapshot) {
  if (snapshot.values.size() != snapshot.header.interior_count())
    throw std::invalid_argument("snapshot: payload length does not match header grid");
  std::string csv;
  csv.reserve(snapshot.values.size() * 48);
  for (const auto& z : snapshot.values) {
    csv += format_double(z.real());
    csv += ',';
    csv += format_double(z.imag());
    csv += '\n';
  }
  write_file_atomic(with_suffix(base, ".csv"), csv);
  write_file_atomic(with_suffix(base, ".json"), header_json(snapshot.header).dump(2) + "\n");
}

bool snapshot_exists(const fs::path& base) {
  return fs::exists(with_suffix(base, ".json")) && fs::exists(with_suffix(base, ".csv"));
}

LoadedSnapshot read_snapshot(const fs::path& base, const std::string& expected_hash) {
  LoadedSnapshot out;
  auto& h = out.snapshot.header;
  try {
    const json j = json::parse(read_text(with_suffix(base, ".json")));
    for (const auto& b : j.at("bounds")) {
      const auto v = b.get<std::vector<double>>();
      if (v.size() != 2) throw std::invalid_argument("bad bounds entry");
      h.bounds.push_back({v[0], v[1]});
    }
    h.nodes = j.at("nodes").get<std::vector<std::size_t>>();
    h.time = j.at("time").get<double>();
    h.kind = j.at("kind").get<std::string>();
    h.config_hash = j.value("config_hash", std::string{});
    if (h.bounds.size() != h.nodes.size() || h.bounds.empty())
      throw std::invalid_argument("bounds and nodes disagree");
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed snapshot header " + with_suffix(base, ".json").string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error("malformed snapshot header " + with_suffix(base, ".json").string() + ": " + e.what());
  }

  const std::string text = read_text(with_suffix(base, ".csv"));
  const auto lines = lines_of(text);
  if (lines.size() != h.interior_count())
    throw std::runtime_error("snapshot payload has " + std::to_string(lines.size()) + " rows, header expects " +
                             std::to_string(h.interior_count()));
  out.snapshot.values.reserve(lines.size());
  for (auto line : lines) {
    const auto cols = split(line, ',');
    if (cols.size() != 2) throw std::runtime_error("snapshot payload row must be 're,im'");
    out.snapshot.values.emplace_back(parse_double(cols[0]), parse_double(cols[1]));
  }
  if (!expected_hash.empty() && expected_hash != h.config_hash) {
    out.hash_matches = false;
    std::cerr << "warning: snapshot " << base.string() << " config hash mismatch: stored " << h.config_hash
              << ", expected " << expected_hash << "\n";
  }
  return out;
}

void write_density(const fs::path& path, const Grid& grid, std::span<const cplx> values, double time) {
  if (values.size() != grid.size()) throw std::invalid_argument("density: field does not match grid");
  const std::size_t mx = grid.interior_extent(0), my = grid.interior_extent(1);
  std::string csv;
  for (std::size_t iy = 0; iy < my; ++iy) {
    for (std::size_t ix = 0; ix < mx; ++ix) {
      if (ix) csv += ',';
      csv += format_double(std::norm(values[grid.index(ix, iy)]));
    }
    csv += '\n';
  }
  write_file_atomic(path, csv);
  json meta = {{"format", "shadowgpe-density-1"},
               {"rows", my},
               {"cols", mx},
               {"x_range", {grid.coordinate(0, 1), grid.coordinate(0, grid.nodes(0) - 2)}},
               {"time", time}};
  if (grid.dim() == 2) meta["y_range"] = {grid.coordinate(1, 1), grid.coordinate(1, grid.nodes(1) - 2)};
  write_file_atomic(with_suffix(path, ".json"), meta.dump(2) + "\n");
}

void write_series(const fs::path& path, std::span<const ObservableRecord> rows) {
  std::string csv = kSeriesHeader;
  csv += '\n';
  for (const auto& r : rows) {
    csv += std::to_string(r.n);
    for (double v : {r.t, r.mass, r.energy, r.eta, r.consistency_l2, r.consistency_h1}) {
      csv += ',';
      csv += format_double(v);
    }
    csv += ',';
    if (r.extended_energy) csv += format_double(*r.extended_energy);
    csv += '\n';
  }
  write_file_atomic(path, csv);
}

std::vector<ObservableRecord> read_series(const fs::path& path) {
  const std::string text = read_text(path);
  const auto lines = lines_of(text);
  if (lines.empty() || lines.front() != kSeriesHeader)
    throw std::runtime_error("series file " + path.string() + " has an unexpected header");
  std::vector<ObservableRecord> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto c = split(lines[i], ',');
    if (c.size() != 8) throw std::runtime_error("series row " + std::to_string(i) + " needs 8 columns");
    ObservableRecord r;
    r.n = static_cast<std::size_t>(std::stoull(std::string(c[0])));
    r.t = parse_double(c[1]);
    r.mass = parse_double(c[2]);
    r.energy = parse_double(c[3]);
    r.eta = parse_double(c[4]);
    r.consistency_l2 = parse_double(c[5]);
    r.consistency_h1 = parse_double(c[6]);
    if (!c[7].empty()) r.extended_energy = parse_double(c[7]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace shadowgpe
