#pragma once

#include "nsc/model.hpp"

namespace nsc::lcp {

/// 0 <= z  _|_  W z + b >= 0
struct LcpProblem {
  Matrix W;
  Vector b;

  Eigen::Index size() const { return b.size(); }
};

enum class LcpStatus { Solved, MaxIterations, RayTermination, NumericalBreakdown, NoSolutionFound, ZeroDiagonal };

struct LcpSolution {
  Vector z;
  Vector w_slack;
  LcpStatus status = LcpStatus::Solved;
  int iterations = 0;
  double residual = 0.0;  // max_i |min(z_i, w_i)|
};

constexpr double kDefaultTol = 1e-10;

/// Absolute residual tolerance tol * (1 + |b|_inf).
double scaled_tolerance(const LcpProblem& problem, double tol = kDefaultTol);

/// max_i |min(z_i, (Wz+b)_i)|
double complementarity_residual(const Vector& z, const Vector& w);

/// Lemke's complementary pivoting with covering vector e and a lexicographic
/// ratio test (no cycling on degenerate, e.g. simultaneous, contacts).
LcpSolution solve_lemke(const LcpProblem& problem, double tol = kDefaultTol, int max_pivots = 0);

/// Projected Gauss-Seidel, z_i <- max(0, z_i - (Wz+b)_i / W_ii).
LcpSolution solve_pgs(const LcpProblem& problem, double tol = kDefaultTol, int max_sweeps = 10000);

/// Exhaustive search over the 2^s active subsets; a test oracle, s <= 12.
LcpSolution solve_enumeration(const LcpProblem& problem, double tol = kDefaultTol);

}  // namespace nsc::lcp
