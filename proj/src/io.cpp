#include "helicity/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace helicity::io {

namespace {

constexpr const char* kSnapshotMagic = "HELICITY-SNAPSHOT";
constexpr int kSnapshotVersion = 1;

std::string format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw IOError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IOError("write failed for " + path.string());
}

std::uint64_t to_little_endian(std::uint64_t bits) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int b = 0; b < 8; ++b) r |= ((bits >> (8 * b)) & 0xff) << (8 * (7 - b));
    return r;
  }
  return bits;
}

}  // namespace

std::vector<std::string> csv_columns(int dim) {
  std::vector<std::string> cols = {"t", "mass", "energy", "helicity_omega"};
  for (int i = 1; i <= dim; ++i) cols.push_back("helicity_E" + std::to_string(i));
  for (const char* c : {"ertel_range", "res_divE", "res_helmholtz", "res_flux", "res_euler_jacobi"})
    cols.push_back(c);
  return cols;
}

void write_csv(std::ostream& out, int dim, const std::vector<diagnostics::DiagnosticsRecord>& records) {
  out << kCsvVersionLine << '\n';
  const auto cols = csv_columns(dim);
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
  out << '\n';
  for (const auto& r : records) {
    if (static_cast<int>(r.helicity_E.size()) != dim)
      throw Error("diagnostics record has " + std::to_string(r.helicity_E.size()) +
                  " basis helicities, expected " + std::to_string(dim));
    out << format(r.t) << ',' << format(r.mass) << ',' << format(r.energy) << ','
        << format(r.helicity_omega);
    for (double h : r.helicity_E) out << ',' << format(h);
    for (double v : {r.ertel_range, r.res_divE, r.res_helmholtz, r.res_flux, r.res_euler_jacobi})
      out << ',' << format(v);
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, int dim,
               const std::vector<diagnostics::DiagnosticsRecord>& records) {
  auto out = open_out(path);
  write_csv(out, dim, records);
  finish(out, path);
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap) {
  if (snap.values.size() != snap.grid.size())
    throw GridMismatchError("snapshot of " + snap.field + " has " + std::to_string(snap.values.size()) +
                            " values, grid has " + std::to_string(snap.grid.size()));
  if (snap.field.find_first_of(" \n") != std::string::npos)
    throw ConfigError("snapshot field name may not contain whitespace: " + snap.field);
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out << kSnapshotMagic << '\n' << "version " << kSnapshotVersion << '\n' << "dim " << snap.grid.dim << '\n';
  out << "n";
  for (int a = 0; a < snap.grid.dim; ++a) out << ' ' << snap.grid.n[a];
  out << "\nlength";
  for (int a = 0; a < snap.grid.dim; ++a) out << ' ' << format(snap.grid.length[a]);
  out << "\nfield " << snap.field << "\ntime " << format(snap.time) << "\nendian little\nend\n";
  for (Index p = 0; p < snap.values.size(); ++p) {
    const auto bits = to_little_endian(std::bit_cast<std::uint64_t>(snap.values[p]));
    out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
  finish(out, path);
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot open " + path.string());
  auto bad = [&](const std::string& what) -> IOError {
    return IOError(path.string() + ": malformed snapshot (" + what + ")");
  };
  auto line = [&] {
    std::string s;
    if (!std::getline(in, s)) throw bad("truncated header");
    return s;
  };
  if (line() != kSnapshotMagic) throw bad("magic");
  Snapshot snap;
  snap.grid.n = {1, 1, 1};
  for (;;) {
    std::istringstream ls(line());
    std::string key;
    ls >> key;
    if (key == "end") break;
    if (key == "version") {
      int v = 0;
      ls >> v;
      if (v != kSnapshotVersion) throw bad("unsupported version");
    } else if (key == "dim") {
      ls >> snap.grid.dim;
    } else if (key == "n") {
      for (int a = 0; a < snap.grid.dim; ++a) ls >> snap.grid.n[a];
    } else if (key == "length") {
      for (int a = 0; a < snap.grid.dim; ++a) ls >> snap.grid.length[a];
    } else if (key == "field") {
      ls >> snap.field;
    } else if (key == "time") {
      ls >> snap.time;
    } else if (key == "endian") {
      std::string e;
      ls >> e;
      if (e != "little") throw bad("endianness");
    } else {
      throw bad("unknown header key " + key);
    }
    if (ls.fail()) throw bad("header line " + key);
  }
  snap.values.resize(snap.grid.size());
  for (Index p = 0; p < snap.values.size(); ++p) {
    std::uint64_t bits = 0;
    if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits)) throw bad("truncated payload");
    snap.values[p] = std::bit_cast<double>(to_little_endian(bits));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw bad("trailing bytes");
  return snap;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
  finish(out, path);
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IOError("cannot create directory " + dir.string() + ": " + ec.message());
}

}  // namespace helicity::io
