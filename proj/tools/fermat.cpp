// SPDX-License-Identifier: Apache-2.0
// Command-line front end: bench, solve, grad-check, gen.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fermat/baselines.hpp"
#include "fermat/bench.hpp"
#include "fermat/error.hpp"
#include "fermat/scene_io.hpp"
#include "fermat/scenes.hpp"
#include "fermat/solver.hpp"
#include "fermat/validation.hpp"

namespace {

constexpr int kUsage = 1;
constexpr int kFailure = 2;

/// "1-5", "3", "1,3,5" or a mix such as "1-3,5".
std::vector<std::size_t> parse_n_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    const auto dash = part.find('-');
    try {
      std::size_t used = 0;
      if (dash == std::string::npos) {
        out.push_back(std::stoul(part, &used));
        if (used != part.size()) throw std::invalid_argument(part);
      } else {
        const std::string a = part.substr(0, dash);
        const std::string b = part.substr(dash + 1);
        const std::size_t lo = std::stoul(a, &used);
        if (used != a.size()) throw std::invalid_argument(part);
        const std::size_t hi = std::stoul(b, &used);
        if (used != b.size() || hi < lo) throw std::invalid_argument(part);
        for (std::size_t n = lo; n <= hi; ++n) out.push_back(n);
      }
    } catch (const std::logic_error&) {
      throw fermat::Error(fermat::ErrorCode::InvalidArgument, "bad n list '" + text + "'");
    }
  }
  if (out.empty()) throw fermat::Error(fermat::ErrorCode::InvalidArgument, "empty n list");
  return out;
}

std::vector<fermat::SolverKind> parse_solvers(const std::string& text) {
  std::vector<fermat::SolverKind> out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) out.push_back(fermat::parse_solver(part));
  return out;
}

struct BenchArgs {
  std::uint64_t seed = 0;
  std::size_t batch = 1000;
  std::string n = "1-5";
  std::string kinds = "reflections";
  std::string solvers = "ours";
  int iterations = 100;
  int fp_iters = 1;
  std::string precision = "single";
  int reps = 5;
  std::size_t threads = 0;
  std::string out;
  std::string gate_out;
};

int run_bench_cmd(const BenchArgs& a) {
  fermat::BenchConfig config;
  config.seed = a.seed;
  config.batch = a.batch;
  config.n_range = parse_n_list(a.n);
  config.kinds = fermat::parse_scene_kinds(a.kinds);
  config.solvers = parse_solvers(a.solvers);
  config.iterations = a.iterations;
  config.fp_iters = a.fp_iters;
  config.precision = fermat::parse_precision(a.precision);
  config.repetitions = a.reps;
  config.threads = a.threads;
  config.validate();

  const auto records = fermat::run_bench(config);
  if (a.out.empty()) {
    fermat::write_csv(std::cout, records);
  } else {
    std::ofstream out(a.out);
    if (!out) throw fermat::Error(fermat::ErrorCode::InvalidArgument, "cannot write " + a.out);
    fermat::write_csv(out, records);
  }
  if (!a.gate_out.empty()) {
    const auto gates = fermat::evaluate_gates(records);
    std::ofstream out(a.gate_out);
    if (!out) {
      throw fermat::Error(fermat::ErrorCode::InvalidArgument, "cannot write " + a.gate_out);
    }
    fermat::write_gates_csv(out, gates);
    for (const auto& g : gates) {
      std::fprintf(stderr, "%s n=%d %s (%.6g vs %.6g)\n", g.name.c_str(), g.n,
                   g.pass ? "PASS" : "FAIL", g.lhs, g.rhs);
    }
  }
  return 0;
}

struct SolveArgs {
  std::string file;
  std::string solver = "ours";
  int iterations = 100;
  int fp_iters = 1;
  std::string precision = "double";
};

int run_solve_cmd(const SolveArgs& a) {
  // Input problems are usage errors; anything thrown while solving is a
  // solver failure.
  fermat::PathSpec spec = fermat::read_scene_file(a.file);
  const bool reference = a.solver == "reference";
  const fermat::SolverKind kind =
      reference ? fermat::SolverKind::Newton : fermat::parse_solver(a.solver);
  const fermat::Precision precision = fermat::parse_precision(a.precision);
  if (a.iterations < 1 || a.fp_iters < 1) {
    throw fermat::Error(fermat::ErrorCode::InvalidArgument, "iterations must be >= 1");
  }

  std::vector<fermat::Vec3d> points;
  try {
    if (reference) {
      const auto T = fermat::reference_solve(spec);
      points = fermat::interaction_points(spec, T);
    } else if (kind == fermat::SolverKind::Image) {
      points = precision == fermat::Precision::Single
                   ? fermat::to_double(fermat::image_method(spec.cast<float>()))
                   : fermat::image_method(spec);
    } else if (kind == fermat::SolverKind::Ours || kind == fermat::SolverKind::Ours64) {
      fermat::SolveOptions opts;
      opts.iterations = a.iterations;
      opts.fixed_point_iters = kind == fermat::SolverKind::Ours ? a.fp_iters : 64;
      opts.precision = precision;
      const auto report = fermat::solve(spec, fermat::init_params(spec), opts);
      points = fermat::interaction_points(spec, report.solution);
    } else {
      auto run = [&](const auto& s) {
        const auto T0 = fermat::init_params(s);
        if (kind == fermat::SolverKind::Gd) {
          fermat::GdOptions opts;
          opts.iterations = a.iterations;
          return fermat::to_double(
              fermat::interaction_points(s, fermat::gradient_descent(s, T0, opts).solution));
        }
        fermat::NewtonOptions opts;
        opts.iterations = a.iterations;
        return fermat::to_double(
            fermat::interaction_points(s, fermat::newton_solve(s, T0, opts).solution));
      };
      points = precision == fermat::Precision::Single ? run(spec.cast<float>()) : run(spec);
    }
    for (const auto& p : points) {
      if (!p.allFinite()) throw fermat::Error(fermat::ErrorCode::NoConvergence, "non-finite point");
    }
  } catch (const fermat::Error& e) {
    std::fprintf(stderr, "solve failed: %s\n", e.what());
    return kFailure;
  }

  std::vector<fermat::Vec3d> path{spec.start()};
  path.insert(path.end(), points.begin(), points.end());
  path.push_back(spec.end());
  double length = 0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) length += (path[i + 1] - path[i]).norm();
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::printf("point %zu: %.17g %.17g %.17g\n", i, points[i](0), points[i](1), points[i](2));
  }
  std::printf("length: %.17g\n", length);
  return 0;
}

struct GradCheckArgs {
  std::uint64_t seed = 0;
  std::size_t n = 1;
  std::string kinds = "mixed";
  std::size_t count = 10;
};

int run_grad_check_cmd(const GradCheckArgs& a) {
  const auto report = fermat::grad_check(a.seed, a.n, fermat::parse_scene_kinds(a.kinds), a.count);
  std::printf("scenes: %zu\nmax_rel_error: %.6g\nmax_envelope_error: %.6g\nresult: %s\n",
              report.cases.size(), report.max_rel_error, report.max_envelope_error,
              report.pass ? "PASS" : "FAIL");
  return report.pass ? 0 : kFailure;
}

struct GenArgs {
  std::uint64_t seed = 0;
  std::size_t n = 1;
  std::string kinds = "reflections";
  std::size_t batch = 1;
  std::string out_dir = ".";
  std::string prefix = "scene";
};

int run_gen_cmd(const GenArgs& a) {
  if (a.batch < 1) throw fermat::Error(fermat::ErrorCode::InvalidArgument, "batch must be >= 1");
  if (a.n < 1) throw fermat::Error(fermat::ErrorCode::InvalidArgument, "n must be >= 1");
  const auto scenes = fermat::gen_scenes(a.seed, a.n, fermat::parse_scene_kinds(a.kinds), a.batch);
  std::filesystem::create_directories(a.out_dir);
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "%s_%04zu.json", a.prefix.c_str(), i);
    const auto path = std::filesystem::path(a.out_dir) / name;
    fermat::write_scene_file(path, scenes[i]);
    std::printf("%s\n", path.string().c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fermat-principle ray path solver"};
  app.require_subcommand(1);

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Run the solver benchmark and write CSV records");
  b->add_option("--seed", bench.seed, "Scene seed");
  b->add_option("--batch", bench.batch, "Paths per cell")->check(CLI::PositiveNumber);
  b->add_option("--n", bench.n, "Interaction counts, e.g. 1-5 or 1,3");
  b->add_option("--kinds", bench.kinds, "reflections | diffractions | mixed");
  b->add_option("--solvers", bench.solvers, "Comma list of ours, ours-64, gd, newton, image");
  b->add_option("--iterations", bench.iterations, "Solver iterations");
  b->add_option("--fp-iters", bench.fp_iters, "Fixed-point updates per step for ours");
  b->add_option("--precision", bench.precision, "single | double");
  b->add_option("--reps", bench.reps, "Timed repetitions (median reported)");
  b->add_option("--threads", bench.threads, "Worker threads, 0 = all cores");
  b->add_option("--out", bench.out, "CSV output file (default stdout)");
  b->add_option("--gate-out", bench.gate_out, "Write ordinal gate results to this CSV");

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Solve one scene file and print its points");
  s->add_option("file", solve.file, "Scene file")->required();
  s->add_option("--solver", solve.solver, "ours, ours-64, gd, newton, image or reference");
  s->add_option("--iterations", solve.iterations, "Solver iterations");
  s->add_option("--fp-iters", solve.fp_iters, "Fixed-point updates per step for ours");
  s->add_option("--precision", solve.precision, "single | double");

  GradCheckArgs gc;
  auto* g = app.add_subcommand("grad-check", "Check implicit gradients against re-solves");
  g->add_option("--seed", gc.seed, "Scene seed");
  g->add_option("--n", gc.n, "Interaction count");
  g->add_option("--kinds", gc.kinds, "reflections | diffractions | mixed");
  g->add_option("--count", gc.count, "Number of scenes");

  GenArgs gen;
  auto* w = app.add_subcommand("gen", "Write generated scenes as JSON files");
  w->add_option("--seed", gen.seed, "Scene seed");
  w->add_option("--n", gen.n, "Interaction count");
  w->add_option("--kinds", gen.kinds, "reflections | diffractions | mixed");
  w->add_option("--batch", gen.batch, "Number of scenes");
  w->add_option("--out-dir", gen.out_dir, "Output directory");
  w->add_option("--prefix", gen.prefix, "File name prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*b) return run_bench_cmd(bench);
    if (*s) return run_solve_cmd(solve);
    if (*g) return run_grad_check_cmd(gc);
    if (*w) return run_gen_cmd(gen);
  } catch (const fermat::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
  return kUsage;
}
