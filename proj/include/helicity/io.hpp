#pragma once

// Output files: the diagnostics CSV, raw field snapshots and the run manifest.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "helicity/diagnostics.hpp"

namespace helicity::io {

/// I/O failures; the message names the path.
class IOError : public Error {
 public:
  using Error::Error;
};

inline constexpr const char* kCsvVersionLine = "# helicity-diagnostics-csv v1";

std::vector<std::string> csv_columns(int dim);

/// Version line, header row and one row per record (%.17g).
void write_csv(std::ostream& out, int dim, const std::vector<diagnostics::DiagnosticsRecord>& records);
void write_csv(const std::filesystem::path& path, int dim,
               const std::vector<diagnostics::DiagnosticsRecord>& records);

struct Snapshot {
  Grid grid;
  std::string field;
  double time = 0;
  ScalarField values;
};

/// Text header terminated by "end\n", then little-endian doubles, x1 fastest.
void write_snapshot(const std::filesystem::path& path, const Snapshot& snap);
Snapshot read_snapshot(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// Creates the directory (and parents) if needed.
void ensure_directory(const std::filesystem::path& dir);

}  // namespace helicity::io
