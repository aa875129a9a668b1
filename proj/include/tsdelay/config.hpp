#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tsdelay/expr.hpp"
#include "tsdelay/shift.hpp"
#include "tsdelay/solver.hpp"
#include "tsdelay/stability.hpp"

namespace tsdelay {

struct ScaleSpec {
  std::string kind;  // empty: whatever the shift system lives on
  double lo = -kInf;
  double hi = kInf;
  double step = 1.0;
  double origin = 0.0;
  double q = 2.0;
  std::vector<double> points;
  std::vector<Interval> parts;
};

struct ShiftSpec {
  std::string system = "additive";
  std::optional<double> t0;
  std::optional<double> rebase;
};

struct OutputSpec {
  std::string trajectory = "trajectory.csv";
  std::string certificate = "certificate.txt";
  std::string certificate_csv = "certificate.csv";
  std::string axioms = "axioms.txt";
  std::string compare = "compare.txt";
};

struct RunConfig {
  std::string origin;
  ScaleSpec scale;
  ShiftSpec shift;
  std::optional<double> h;
  std::optional<expr::Expr> a;
  std::optional<expr::Expr> b;
  std::optional<expr::Expr> psi;
  std::vector<std::pair<double, double>> psi_table;
  double horizon = 0.0;
  double real_step = 0.0;
  SearchGrids search;
  double compare_N = 1.0;
  std::size_t axiom_samples = 1000;
  std::uint64_t seed = 0;
  OutputSpec output;
};

/// Parses the sectioned key = value format. Numbers accept constant
/// expressions ("1/3"), inf and -inf. Throws Error(Config) naming the line.
RunConfig parse_config(std::string_view text, const std::string& origin = "<config>");
RunConfig load_config(const std::string& path);

ShiftSystem build_system(const RunConfig& cfg);
/// Requires h, a, b, a history and a horizon.
DelayProblem build_problem(const RunConfig& cfg);

}  // namespace tsdelay
