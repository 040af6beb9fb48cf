// SPDX-License-Identifier: Apache-2.0
#include "fermat/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "fermat/baselines.hpp"
#include "fermat/error.hpp"
#include "fermat/parallel.hpp"

namespace fermat {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kOurs64FixedPoint = 64;

using PointSets = std::vector<std::vector<Vec3d>>;

/// Median wall time in milliseconds of `reps` timed calls after `warmup`.
template <typename Fn>
double median_time_ms(int warmup, int reps, Fn&& fn) {
  for (int i = 0; i < warmup; ++i) fn();
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(reps));
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  std::sort(times.begin(), times.end());
  const std::size_t m = times.size() / 2;
  return times.size() % 2 ? times[m] : 0.5 * (times[m - 1] + times[m]);
}

template <typename Scalar>
struct Cell {
  std::vector<BasicPathSpec<Scalar>> specs;
  std::vector<ParamVector<Scalar>> T0s;
};

template <typename Scalar>
Cell<Scalar> prepare(const std::vector<PathSpec>& scenes) {
  Cell<Scalar> cell;
  cell.specs.reserve(scenes.size());
  cell.T0s.reserve(scenes.size());
  for (const auto& s : scenes) {
    cell.specs.push_back(s.template cast<Scalar>());
    cell.T0s.push_back(init_params(cell.specs.back()));
  }
  return cell;
}

template <typename Scalar>
PointSets points_of(const Cell<Scalar>& cell, const std::vector<ParamVector<Scalar>>& solutions) {
  PointSets out(cell.specs.size());
  for (std::size_t i = 0; i < cell.specs.size(); ++i) {
    out[i] = to_double(interaction_points(cell.specs[i], solutions[i]));
  }
  return out;
}

template <typename Scalar>
std::pair<PointSets, double> run_solver(SolverKind kind, const BenchConfig& config,
                                        const Cell<Scalar>& cell) {
  const std::size_t count = cell.specs.size();
  std::vector<ParamVector<Scalar>> solutions(count);
  PointSets image_points;

  auto iterative = [&](auto&& solve_one) {
    return median_time_ms(config.warmup, config.repetitions, [&] {
      detail::parallel_for(count, config.threads,
                           [&](std::size_t i) { solutions[i] = solve_one(i); });
    });
  };

  double ms = 0;
  switch (kind) {
    case SolverKind::Ours:
    case SolverKind::Ours64: {
      SolveOptions opts;
      opts.iterations = config.iterations;
      opts.fixed_point_iters = kind == SolverKind::Ours ? config.fp_iters : kOurs64FixedPoint;
      ms = median_time_ms(config.warmup, config.repetitions, [&] {
        auto reports = batch_solve<Scalar>(cell.specs, cell.T0s, opts, config.threads);
        for (std::size_t i = 0; i < count; ++i) solutions[i] = std::move(reports[i].solution);
      });
      break;
    }
    case SolverKind::Gd: {
      GdOptions opts;
      opts.iterations = config.iterations;
      ms = iterative([&](std::size_t i) {
        return gradient_descent(cell.specs[i], cell.T0s[i], opts).solution;
      });
      break;
    }
    case SolverKind::Newton: {
      NewtonOptions opts;
      opts.iterations = config.iterations;
      ms = iterative(
          [&](std::size_t i) { return newton_solve(cell.specs[i], cell.T0s[i], opts).solution; });
      break;
    }
    case SolverKind::Image: {
      std::vector<std::vector<Vec3<Scalar>>> pts(count);
      ms = median_time_ms(config.warmup, config.repetitions, [&] {
        detail::parallel_for(count, config.threads,
                             [&](std::size_t i) { pts[i] = image_method(cell.specs[i]); });
      });
      image_points.resize(count);
      for (std::size_t i = 0; i < count; ++i) image_points[i] = to_double(pts[i]);
      return {std::move(image_points), ms};
    }
  }
  return {points_of(cell, solutions), ms};
}

}  // namespace

std::string_view to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::Ours: return "ours";
    case SolverKind::Ours64: return "ours-64";
    case SolverKind::Gd: return "gd";
    case SolverKind::Newton: return "newton";
    case SolverKind::Image: return "image";
  }
  return "?";
}

SolverKind parse_solver(std::string_view text) {
  for (auto k : {SolverKind::Ours, SolverKind::Ours64, SolverKind::Gd, SolverKind::Newton,
                 SolverKind::Image}) {
    if (text == to_string(k)) return k;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown solver '" + std::string(text) + "'");
}

std::string_view to_string(Precision precision) {
  return precision == Precision::Single ? "single" : "double";
}

Precision parse_precision(std::string_view text) {
  if (text == "single") return Precision::Single;
  if (text == "double") return Precision::Double;
  throw Error(ErrorCode::InvalidArgument, "unknown precision '" + std::string(text) + "'");
}

void BenchConfig::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (batch < 1) bad("batch must be >= 1");
  if (n_range.empty()) bad("n range is empty");
  for (auto n : n_range) {
    if (n < 1 || n > kDefaultMaxInteractions) {
      bad("n must be in [1, " + std::to_string(kDefaultMaxInteractions) + "]");
    }
  }
  if (solvers.empty()) bad("no solvers requested");
  for (std::size_t i = 0; i < solvers.size(); ++i) {
    if (std::find(solvers.begin(), solvers.begin() + static_cast<std::ptrdiff_t>(i),
                  solvers[i]) != solvers.begin() + static_cast<std::ptrdiff_t>(i)) {
      bad("solver '" + std::string(to_string(solvers[i])) + "' listed twice");
    }
    if (solvers[i] == SolverKind::Image && kinds != SceneKinds::ReflectionsOnly) {
      bad("the image method needs reflection-only scenes");
    }
  }
  if (iterations < 1) bad("iterations must be >= 1");
  if (fp_iters < 1) bad("fp_iters must be >= 1");
  if (repetitions < 1) bad("repetitions must be >= 1");
  if (warmup < 0) bad("warmup must be >= 0");
}

bool BenchRecord::failed() const { return std::isnan(mean_error); }

double mean_point_error(const PointSets& estimate, const PointSets& truth) {
  if (estimate.size() != truth.size()) {
    throw Error(ErrorCode::ShapeMismatch, "estimate and truth differ in path count");
  }
  double sum = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (estimate[i].size() != truth[i].size()) {
      throw Error(ErrorCode::ShapeMismatch, "path " + std::to_string(i) + " point count differs");
    }
    for (std::size_t j = 0; j < truth[i].size(); ++j) {
      sum += (estimate[i][j] - truth[i][j]).norm();
      ++count;
    }
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

std::vector<BenchRecord> run_bench(const BenchConfig& config) {
  config.validate();
  const bool single = config.precision == Precision::Single;

  struct Ground {
    std::vector<PathSpec> scenes;
    PointSets truth;
  };
  std::vector<Ground> grounds;
  grounds.reserve(config.n_range.size());
  for (auto n : config.n_range) {
    Ground g;
    g.scenes = gen_scenes(config.seed, n, config.kinds, config.batch, config.scene);
    g.truth.resize(g.scenes.size());
    detail::parallel_for(g.scenes.size(), config.threads, [&](std::size_t i) {
      const auto ref = try_reference_solve(g.scenes[i]);
      g.truth[i] = to_double(interaction_points(g.scenes[i], ref.solution));
    });
    grounds.push_back(std::move(g));
  }

  std::vector<BenchRecord> records;
  for (auto solver : config.solvers) {
    for (std::size_t c = 0; c < config.n_range.size(); ++c) {
      BenchRecord rec;
      rec.solver = std::string(to_string(solver));
      rec.n = static_cast<int>(config.n_range[c]);
      rec.kinds = std::string(to_string(config.kinds));
      rec.d = 2;
      rec.iterations = solver == SolverKind::Image ? 0 : config.iterations;
      rec.fixed_point_iters = solver == SolverKind::Ours     ? config.fp_iters
                              : solver == SolverKind::Ours64 ? kOurs64FixedPoint
                                                             : 0;
      rec.precision = std::string(to_string(config.precision));
      try {
        const auto& scenes = grounds[c].scenes;
        auto [points, ms] = single ? run_solver(solver, config, prepare<float>(scenes))
                                   : run_solver(solver, config, prepare<double>(scenes));
        rec.mean_error = mean_point_error(points, grounds[c].truth);
        rec.wall_time_ms = std::max(ms, std::numeric_limits<double>::min());
      } catch (const Error&) {
        rec.mean_error = kNaN;
        rec.wall_time_ms = kNaN;
      }
      records.push_back(std::move(rec));
    }
  }
  return records;
}

namespace {

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
T parse_number(const std::string& text, std::size_t row) {
  try {
    std::size_t used = 0;
    T v;
    if constexpr (std::is_same_v<T, int>) {
      v = std::stoi(text, &used);
    } else {
      v = std::stod(text, &used);
    }
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError,
                "row " + std::to_string(row) + ": '" + text + "' is not a number");
  }
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.solver << ',' << r.n << ',' << r.kinds << ',' << r.d << ',' << r.iterations << ','
        << r.fixed_point_iters << ',' << r.precision << ',' << format_real(r.mean_error) << ','
        << format_real(r.wall_time_ms) << '\n';
  }
}

std::vector<BenchRecord> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw Error(ErrorCode::ParseError, "missing or unexpected CSV header");
  }
  std::vector<BenchRecord> records;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 9) {
      throw Error(ErrorCode::ParseError, "row " + std::to_string(row) + " has " +
                                             std::to_string(cells.size()) + " fields, expected 9");
    }
    BenchRecord r;
    r.solver = cells[0];
    r.n = parse_number<int>(cells[1], row);
    r.kinds = cells[2];
    r.d = parse_number<int>(cells[3], row);
    r.iterations = parse_number<int>(cells[4], row);
    r.fixed_point_iters = parse_number<int>(cells[5], row);
    r.precision = cells[6];
    r.mean_error = parse_number<double>(cells[7], row);
    r.wall_time_ms = parse_number<double>(cells[8], row);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<GateResult> evaluate_gates(const std::vector<BenchRecord>& records) {
  std::map<int, std::map<std::string, const BenchRecord*>> by_n;
  for (const auto& r : records) by_n[r.n][r.solver] = &r;

  std::vector<GateResult> gates;
  for (const auto& [n, solvers] : by_n) {
    auto find = [&](const char* name) -> const BenchRecord* {
      const auto it = solvers.find(name);
      return it == solvers.end() ? nullptr : it->second;
    };
    const BenchRecord* ours = find("ours");
    if (!ours) continue;
    auto add = [&](const char* name, double lhs, double rhs, bool pass) {
      // NaN comparisons are false, so failed records fail their gates.
      gates.push_back({name, n, pass, lhs, rhs});
    };
    if (const auto* gd = find("gd")) {
      const double rhs = kGdRatio * ours->mean_error;
      add("gd-vs-ours", gd->mean_error, rhs, gd->mean_error >= rhs);
    }
    if (const auto* image = find("image")) {
      add("image-faster", image->wall_time_ms, ours->wall_time_ms,
          image->wall_time_ms < ours->wall_time_ms);
      add("ours-accurate", ours->mean_error, kOursErrorCeiling,
          ours->mean_error <= kOursErrorCeiling);
    }
    if (const auto* o64 = find("ours-64")) {
      add("ours64-vs-ours", o64->mean_error, ours->mean_error,
          o64->mean_error <= ours->mean_error);
    }
  }
  return gates;
}

void write_gates_csv(std::ostream& out, const std::vector<GateResult>& gates) {
  out << "gate,n,pass,lhs,rhs\n";
  for (const auto& g : gates) {
    out << g.name << ',' << g.n << ',' << (g.pass ? 1 : 0) << ',' << format_real(g.lhs) << ','
        << format_real(g.rhs) << '\n';
  }
}

}  // namespace fermat
