#pragma once

// The run / verify / converge subcommands. Each returns a process exit code.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "helicity/fields.hpp"
#include "helicity/mutation.hpp"
#include "helicity/scenario.hpp"

namespace helicity::commands {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumerical = 2, kVerification = 3 };

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

/// Runs a scenario; writes diagnostics.csv, manifest.json and, if requested,
/// final-state snapshots. `output` overrides the scenario's output directory.
int run_command(const std::filesystem::path& scenario_path,
                const std::optional<std::filesystem::path>& output, Streams io);

int verify_command(std::uint64_t seed, Backend backend,
                   const std::optional<std::filesystem::path>& output, Streams io,
                   mutation::Defect defect = mutation::Defect::None);

/// One invariant's drift at each refinement level.
struct DriftRow {
  std::string quantity;
  std::vector<double> drift;  // NaN where the level failed
};

/// Drifts below this count as roundoff.
inline constexpr double kDriftFloor = 1e-12;

/// max_t |q(t) - q(0)| / max(|q(0)|, 1e-8) for each invariant of a run:
/// mass, energy net of the potential source, helicity_omega (3D), helicity_E*.
std::vector<std::pair<std::string, double>> invariant_drifts(
    const std::vector<diagnostics::DiagnosticsRecord>& records, int dim);

/// log2 of successive drift ratios, or "n/a at floor" when either is at floor.
std::string observed_order(double coarse, double fine);

int converge_command(const std::filesystem::path& scenario_path, int levels,
                     const std::optional<std::filesystem::path>& output, Streams io);

}  // namespace helicity::commands
