// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fermat/scenes.hpp"
#include "fermat/solver.hpp"

namespace fermat {

enum class SolverKind { Ours, Ours64, Gd, Newton, Image };

std::string_view to_string(SolverKind kind);
/// Accepts "ours", "ours-64", "gd", "newton", "image".
SolverKind parse_solver(std::string_view text);
std::string_view to_string(Precision precision);
/// Accepts "single" and "double".
Precision parse_precision(std::string_view text);

struct BenchConfig {
  std::uint64_t seed = 0;
  std::size_t batch = 1000;
  std::vector<std::size_t> n_range{1, 2, 3, 4, 5};
  SceneKinds kinds = SceneKinds::ReflectionsOnly;
  std::vector<SolverKind> solvers{SolverKind::Ours};
  int iterations = 100;
  /// Fixed-point updates for "ours"; "ours-64" always uses 64.
  int fp_iters = 1;
  Precision precision = Precision::Single;
  SceneParams scene{};
  /// Timed runs per record (median reported), after `warmup` untimed runs.
  int repetitions = 5;
  int warmup = 1;
  std::size_t threads = 0;

  /// Throws InvalidArgument; "image" needs ReflectionsOnly.
  void validate() const;
};

/// A failed record carries NaN in mean_error and wall_time_ms.
struct BenchRecord {
  std::string solver;
  int n = 0;
  std::string kinds;
  /// Parameters per interaction point. Every solver here works in the
  /// two-coordinate form, so this is 2.
  int d = 2;
  int iterations = 0;
  int fixed_point_iters = 0;
  std::string precision;
  double mean_error = 0;
  double wall_time_ms = 0;

  bool failed() const;
  bool operator==(const BenchRecord&) const = default;
};

/// Records are ordered by solver (config order), then by n (config order).
std::vector<BenchRecord> run_bench(const BenchConfig& config);

/// Mean Euclidean distance over every interaction point of every path.
double mean_point_error(const std::vector<std::vector<Vec3d>>& estimate,
                        const std::vector<std::vector<Vec3d>>& truth);

inline constexpr std::string_view kCsvHeader =
    "solver,n,kinds,d,iterations,fp_iters,precision,mean_error,wall_time_ms";

void write_csv(std::ostream& out, const std::vector<BenchRecord>& records);
/// Throws ParseError on a wrong header or malformed row.
std::vector<BenchRecord> parse_csv(std::istream& in);

/// One ordinal check between solvers for a given n.
struct GateResult {
  std::string name;
  int n = 0;
  bool pass = false;
  double lhs = 0;
  double rhs = 0;
};

inline constexpr double kGdRatio = 10.0;
inline constexpr double kOursErrorCeiling = 1e-3;

/// Gates whose solvers are all present, per n:
///   gd-vs-ours       gd error >= 10 * ours error
///   image-faster     image wall time < ours wall time
///   ours-accurate    ours error <= 1e-3 (only alongside image)
///   ours64-vs-ours   ours-64 error <= ours error
/// A failed record fails every gate it takes part in.
std::vector<GateResult> evaluate_gates(const std::vector<BenchRecord>& records);

void write_gates_csv(std::ostream& out, const std::vector<GateResult>& gates);

}  // namespace fermat
