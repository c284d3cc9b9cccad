#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "conewave/cone.hpp"
#include "conewave/error.hpp"
#include "conewave/generator.hpp"
#include "conewave/grid.hpp"
#include "conewave/transform.hpp"
#include "conewave/window.hpp"

namespace conewave {

#ifndef CONEWAVE_VERSION
#define CONEWAVE_VERSION "0.1.0"
#endif

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------- SGRID1

enum class RasterKind { Real, Complex };

struct RasterFile {
  FrequencyGrid grid;
  RasterKind kind = RasterKind::Real;
  Raster<double> real;
  Raster<Complex> complex;
};

namespace detail {

inline void put_le(std::string& out, double v) {
  std::uint64_t u = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((u >> (8 * b)) & 0xffu));
}

inline double get_le(const unsigned char* p) {
  std::uint64_t u = 0;
  for (int b = 7; b >= 0; --b) u = (u << 8) | p[b];
  return std::bit_cast<double>(u);
}

inline std::string sgrid_header(const FrequencyGrid& g, RasterKind kind) {
  return "SGRID1 " + std::to_string(g.n1()) + " " + std::to_string(g.n2()) + " " + format_number(g.extent()) + " " +
         (kind == RasterKind::Real ? "real" : "complex") + "\n";
}

inline void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace detail

inline std::string encode_raster(const FrequencyGrid& g, const Raster<double>& r) {
  if (r.n1() != g.n1() || r.n2() != g.n2()) throw ContractViolation("raster does not match grid");
  std::string out = detail::sgrid_header(g, RasterKind::Real);
  out.reserve(out.size() + 8 * r.size());
  for (std::size_t k = 0; k < r.size(); ++k) detail::put_le(out, r[k]);
  return out;
}

inline std::string encode_raster(const FrequencyGrid& g, const Raster<Complex>& r) {
  if (r.n1() != g.n1() || r.n2() != g.n2()) throw ContractViolation("raster does not match grid");
  std::string out = detail::sgrid_header(g, RasterKind::Complex);
  out.reserve(out.size() + 16 * r.size());
  for (std::size_t k = 0; k < r.size(); ++k) {
    detail::put_le(out, r[k].real());
    detail::put_le(out, r[k].imag());
  }
  return out;
}

inline RasterFile decode_raster(const std::string& bytes, const std::string& origin = "<memory>") {
  const auto eol = bytes.find('\n');
  if (eol == std::string::npos) throw FormatError(origin + ": missing SGRID1 header line");
  std::istringstream head(bytes.substr(0, eol));
  std::string magic, kind, extra;
  long long n1 = 0, n2 = 0;
  double extent = 0.0;
  if (!(head >> magic >> n1 >> n2 >> extent >> kind) || (head >> extra))
    throw FormatError(origin + ": malformed header '" + bytes.substr(0, eol) + "'");
  if (magic != "SGRID1") throw FormatError(origin + ": bad magic '" + magic + "'");
  if (kind != "real" && kind != "complex") throw FormatError(origin + ": unknown kind '" + kind + "'");
  if (n1 < 2 || n2 < 2 || !(extent > 0.0)) throw FormatError(origin + ": invalid grid in header");
  RasterFile rf;
  rf.grid = FrequencyGrid(static_cast<std::size_t>(n1), static_cast<std::size_t>(n2), extent);
  rf.kind = kind == "real" ? RasterKind::Real : RasterKind::Complex;
  const std::size_t count = rf.grid.size() * (rf.kind == RasterKind::Real ? 1 : 2);
  const std::size_t payload = bytes.size() - eol - 1;
  if (payload < 8 * count)
    throw FormatError(origin + ": truncated payload (" + std::to_string(payload) + " bytes, expected " +
                      std::to_string(8 * count) + ")");
  if (payload > 8 * count)
    throw FormatError(origin + ": payload has " + std::to_string(payload - 8 * count) +
                      " trailing bytes; header kind '" + kind + "' does not match the data");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + eol + 1;
  std::vector<double> vals(count);
  for (std::size_t k = 0; k < count; ++k) {
    vals[k] = detail::get_le(p + 8 * k);
    if (!std::isfinite(vals[k]))
      throw FormatError(origin + ": non-finite value at byte offset " + std::to_string(eol + 1 + 8 * k));
  }
  if (rf.kind == RasterKind::Real) {
    rf.real = Raster<double>(rf.grid.n1(), rf.grid.n2());
    for (std::size_t k = 0; k < count; ++k) rf.real[k] = vals[k];
  } else {
    rf.complex = Raster<Complex>(rf.grid.n1(), rf.grid.n2());
    for (std::size_t k = 0; k < rf.grid.size(); ++k) rf.complex[k] = {vals[2 * k], vals[2 * k + 1]};
  }
  return rf;
}

inline void write_raster(const std::filesystem::path& path, const FrequencyGrid& g, const Raster<double>& r) {
  detail::write_bytes(path, encode_raster(g, r));
}
inline void write_raster(const std::filesystem::path& path, const FrequencyGrid& g, const Raster<Complex>& r) {
  detail::write_bytes(path, encode_raster(g, r));
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline RasterFile read_raster(const std::filesystem::path& path) { return decode_raster(read_file(path), path.string()); }

inline Raster<double> read_real_raster(const std::filesystem::path& path, FrequencyGrid* grid = nullptr) {
  RasterFile rf = read_raster(path);
  if (rf.kind != RasterKind::Real) throw FormatError(path.string() + ": expected a real raster");
  if (grid) *grid = rf.grid;
  return rf.real;
}

/// A real SGRID1 raster read as a spatial field.
inline SpatialField read_field(const std::filesystem::path& path) {
  FrequencyGrid g;
  Raster<double> r = read_real_raster(path, &g);
  return SpatialField(g, std::move(r));
}

// ---------------------------------------------------------------- key=value

/// Parsed `key=value` lines; `#` starts a comment.
struct KeyValues {
  std::vector<std::pair<std::string, std::string>> entries;
  std::map<std::string, int> line_of;
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline KeyValues parse_key_values(const std::string& text, const std::vector<std::string>& allowed,
                                  const std::string& origin = "config") {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError(origin + ":" + std::to_string(no) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw FormatError(origin + ":" + std::to_string(no) + ": empty key");
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw FormatError(origin + ":" + std::to_string(no) + ": unknown key '" + key + "'");
    if (kv.line_of.count(key)) throw FormatError(origin + ":" + std::to_string(no) + ": duplicate key '" + key + "'");
    kv.line_of[key] = no;
    kv.entries.emplace_back(key, value);
  }
  return kv;
}

namespace detail {

inline double parse_double(const std::string& v, const std::string& where) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (...) {
    used = 0;
  }
  if (used != v.size() || v.empty() || !std::isfinite(d)) throw FormatError(where + ": expected a number, got '" + v + "'");
  return d;
}

inline long parse_long(const std::string& v, const std::string& where) {
  std::size_t used = 0;
  long d = 0;
  try {
    d = std::stol(v, &used);
  } catch (...) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw FormatError(where + ": expected an integer, got '" + v + "'");
  return d;
}

inline Orientation parse_orientation(const std::string& v, const std::string& where) {
  if (v == "horizontal") return Orientation::Horizontal;
  if (v == "vertical") return Orientation::Vertical;
  throw FormatError(where + ": orientation must be horizontal or vertical");
}

}  // namespace detail

/// Generator description file: M, m1, m2, amplitude, orientation.
inline ShearletGenerator parse_generator(const std::string& text, const std::string& origin = "generator") {
  const KeyValues kv = parse_key_values(text, {"M", "m1", "m2", "amplitude", "orientation"}, origin);
  int M = 2, m1 = 6, m2 = 3;
  double amp = 1.0;
  Orientation o = Orientation::Horizontal;
  for (const auto& [k, v] : kv.entries) {
    const std::string where = origin + ":" + std::to_string(kv.line_of.at(k));
    if (k == "M") M = static_cast<int>(detail::parse_long(v, where));
    if (k == "m1") m1 = static_cast<int>(detail::parse_long(v, where));
    if (k == "m2") m2 = static_cast<int>(detail::parse_long(v, where));
    if (k == "amplitude") amp = detail::parse_double(v, where);
    if (k == "orientation") o = detail::parse_orientation(v, where);
  }
  ShearletGenerator g = make_spline_shearlet(M, m1, m2, amp);
  g.orientation = o;
  return g;
}

inline std::string generator_text(const ShearletGenerator& g) {
  return "M=" + std::to_string(g.M) + "\nm1=" + std::to_string(g.m1) + "\nm2=" + std::to_string(g.m2) +
         "\namplitude=" + format_number(g.amplitude) + "\norientation=" + to_string(g.orientation) + "\n";
}

/// Everything a CLI run depends on. Defaults reproduce the reference setup.
struct RunConfig {
  int M = 2, m1 = 6, m2 = 3;
  double amplitude = 1.0;
  Orientation orientation = Orientation::Horizontal;
  int bump_k = 0;  // 0: default order for the generator's N
  std::size_t grid_n = 256;
  double extent = 16.0;
  std::size_t bands = 8;
  std::size_t nodes_per_band = 4;
  std::size_t shear_nodes = 25;
  std::string field = "blob";  // blob | edge | cone_bandpass | file path of a real SGRID1 raster
  double edge_slope = 0.0;
  std::string output = "out";

  static const std::vector<std::string>& keys() {
    static const std::vector<std::string> k = {"preset", "M", "m1", "m2", "amplitude", "orientation", "bump_k",
                                               "grid_n", "extent", "bands", "nodes_per_band", "shear_nodes",
                                               "field", "edge_slope", "output"};
    return k;
  }

  ShearletGenerator generator() const {
    ShearletGenerator g = make_spline_shearlet(M, m1, m2, amplitude);
    g.orientation = orientation;
    return g;
  }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline RunConfig parse_run_config(const std::string& text, const std::string& origin = "config") {
  const KeyValues kv = parse_key_values(text, RunConfig::keys(), origin);
  RunConfig c;
  bool preset = false, explicit_gen = false;
  int preset_line = 0;
  for (const auto& [k, v] : kv.entries) {
    const std::string where = origin + ":" + std::to_string(kv.line_of.at(k));
    auto count = [&](long lo) {
      const long x = detail::parse_long(v, where);
      if (x < lo) throw FormatError(where + ": " + k + " must be at least " + std::to_string(lo));
      return static_cast<std::size_t>(x);
    };
    if (k == "preset") {
      const long p = detail::parse_long(v, where);
      if (p != 0 && p != 1) throw FormatError(where + ": preset must be 0 or 1");
      const ShearletGenerator g = preset_generator(static_cast<int>(p));
      c.M = g.M, c.m1 = g.m1, c.m2 = g.m2;
      preset = true;
      preset_line = kv.line_of.at(k);
    } else if (k == "M" || k == "m1" || k == "m2") {
      const int x = static_cast<int>(detail::parse_long(v, where));
      (k == "M" ? c.M : k == "m1" ? c.m1 : c.m2) = x;
      explicit_gen = true;
    } else if (k == "amplitude") {
      c.amplitude = detail::parse_double(v, where);
      if (!(c.amplitude > 0.0)) throw FormatError(where + ": amplitude must be positive");
    } else if (k == "orientation") {
      c.orientation = detail::parse_orientation(v, where);
    } else if (k == "bump_k") {
      c.bump_k = static_cast<int>(count(0));
    } else if (k == "grid_n") {
      c.grid_n = count(2);
    } else if (k == "extent") {
      c.extent = detail::parse_double(v, where);
      if (!(c.extent > 0.0)) throw FormatError(where + ": extent must be positive");
    } else if (k == "bands") {
      c.bands = count(0);
    } else if (k == "nodes_per_band") {
      c.nodes_per_band = count(2);
    } else if (k == "shear_nodes") {
      c.shear_nodes = count(3);
    } else if (k == "field") {
      c.field = v;
    } else if (k == "edge_slope") {
      c.edge_slope = detail::parse_double(v, where);
    } else if (k == "output") {
      c.output = v;
    }
  }
  if (preset && explicit_gen)
    throw FormatError(origin + ":" + std::to_string(preset_line) + ": preset conflicts with explicit M/m1/m2");
  try {
    validate_generator(c.M, c.m1, c.m2);
  } catch (const ConstraintViolation& e) {
    throw FormatError(origin + ": " + e.what());
  }
  return c;
}

inline std::string config_text(const RunConfig& c) {
  std::ostringstream o;
  o << "M=" << c.M << "\nm1=" << c.m1 << "\nm2=" << c.m2 << "\namplitude=" << format_number(c.amplitude)
    << "\norientation=" << to_string(c.orientation) << "\nbump_k=" << c.bump_k << "\ngrid_n=" << c.grid_n
    << "\nextent=" << format_number(c.extent) << "\nbands=" << c.bands << "\nnodes_per_band=" << c.nodes_per_band
    << "\nshear_nodes=" << c.shear_nodes << "\nfield=" << c.field << "\nedge_slope=" << format_number(c.edge_slope)
    << "\noutput=" << c.output << "\n";
  return o.str();
}

// ---------------------------------------------------------------- CSV

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) {
    if (row.size() != header.size()) throw ContractViolation("csv row width does not match header");
    rows.push_back(std::move(row));
  }

  std::string text() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t k = 0; k < cells.size(); ++k) {
        if (k) out += ',';
        const bool quote = cells[k].find_first_of(",\"\n") != std::string::npos;
        if (!quote) {
          out += cells[k];
          continue;
        }
        out += '"';
        for (char ch : cells[k]) {
          if (ch == '"') out += '"';
          out += ch;
        }
        out += '"';
      }
      out += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
  }
};

inline std::string csv_number(double v) { return format_number(v); }
inline std::string csv_bool(bool b) { return b ? "pass" : "fail"; }

// ---------------------------------------------------------------- manifest

inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Output directory that records every file it writes and their checksums.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root) : root_(std::move(root)) { std::filesystem::create_directories(root_); }

  const std::filesystem::path& root() const { return root_; }

  void write(const std::string& name, const std::string& bytes) {
    const std::filesystem::path p = root_ / name;
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    detail::write_bytes(p, bytes);
    files_.emplace_back(name, fnv1a64(bytes));
  }

  void raster(const std::string& name, const FrequencyGrid& g, const Raster<double>& r) { write(name, encode_raster(g, r)); }
  void raster(const std::string& name, const FrequencyGrid& g, const Raster<Complex>& r) {
    write(name, encode_raster(g, r));
  }

  void manifest(const std::string& command, const std::string& config) {
    std::ostringstream o;
    o << "command=" << command << "\nversion=" << CONEWAVE_VERSION << "\n# config\n" << config << "# files (fnv1a64)\n";
    for (const auto& [name, h] : files_) o << hex64(h) << "  " << name << "\n";
    detail::write_bytes(root_ / "manifest.txt", o.str());
  }

 private:
  std::filesystem::path root_;
  std::vector<std::pair<std::string, std::uint64_t>> files_;
};

inline std::string bump_sidecar(const BumpDescriptor& b) {
  return "k=" + std::to_string(b.k) + "\nsigma=" + format_number(b.sigma) + "\nline_integral=" +
         format_number(b.line_integral) + "\nc_k=" + format_number(b.c_k) + "\nsupport_radius=" +
         format_number(b.support_radius()) + "\ncone=|xi2|<=|xi1|\n";
}

inline void write_cone_projection(OutputDir& out, const ConeProjectionSet& set, const std::string& prefix = "") {
  out.raster(prefix + "p0.sgrid", set.grid, set.p0.values);
  out.raster(prefix + "p1.sgrid", set.grid, set.p1.values);
  out.raster(prefix + "q0.sgrid", set.grid, set.q0.values);
  out.raster(prefix + "q1.sgrid", set.grid, set.q1.values);
  out.write(prefix + "bump.txt", bump_sidecar(set.bump));
}

inline void write_frame_spectrum(OutputDir& out, const FrameSpectrum& fs, const std::string& sidecar,
                                 const std::string& prefix = "") {
  out.raster(prefix + "delta.sgrid", fs.grid, fs.delta.values);
  out.raster(prefix + "delta_nu.sgrid", fs.grid, fs.delta_nu.values);
  out.raster(prefix + "window0.sgrid", fs.grid, fs.win0.values);
  out.raster(prefix + "window1.sgrid", fs.grid, fs.win1.values);
  out.raster(prefix + "phi.sgrid", fs.grid, fs.phi.values);
  out.write(prefix + "frame.txt", "cpsi=" + format_number(fs.cpsi) + "\nclamped=" + std::to_string(fs.clamped) + "\n" + sidecar);
}

/// One complex raster per node plus index.csv.
inline void write_coefficients(OutputDir& out, const CoefficientField& c, const std::string& prefix = "coefficients/") {
  CsvTable index;
  index.header = {"node", "a", "s", "weight", "filter", "orientation", "file"};
  for (std::size_t n = 0; n < c.nodes.size(); ++n) {
    char name[32];
    std::snprintf(name, sizeof name, "node_%05zu.sgrid", n);
    out.raster(prefix + name, c.grid, c.nodes[n].values);
    index.add({std::to_string(n), csv_number(c.nodes[n].a), csv_number(c.nodes[n].s), csv_number(c.nodes[n].weight),
               to_string(c.filter), to_string(c.orientation), name});
  }
  out.write(prefix + "index.csv", index.text());
}

}  // namespace conewave
