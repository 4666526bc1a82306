#include "nsc/lcp.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>

namespace nsc::lcp {

namespace {

constexpr double kPivotTol = 1e-12;

LcpSolution finish(const LcpProblem& problem, Vector z, LcpStatus status, int iterations) {
  LcpSolution sol;
  sol.w_slack = problem.W * z + problem.b;
  sol.residual = complementarity_residual(z, sol.w_slack);
  sol.z = std::move(z);
  sol.status = status;
  sol.iterations = iterations;
  return sol;
}

bool feasible(const LcpSolution& sol, double tol) {
  return sol.residual <= tol && (sol.z.size() == 0 || (sol.z.minCoeff() >= -tol && sol.w_slack.minCoeff() >= -tol));
}

// Re-solve W_AA z_A = -b_A on the support of z; removes pivoting roundoff.
void polish(const LcpProblem& problem, LcpSolution& sol, double tol) {
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < sol.z.size(); ++i) {
    if (sol.z(i) > 0.0) {
      support.push_back(i);
    }
  }
  if (support.empty()) {
    return;
  }
  const auto k = static_cast<Eigen::Index>(support.size());
  Matrix waa(k, k);
  Vector ba(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    ba(r) = problem.b(support[r]);
    for (Eigen::Index c = 0; c < k; ++c) {
      waa(r, c) = problem.W(support[r], support[c]);
    }
  }
  Eigen::FullPivLU<Matrix> lu(waa);
  if (lu.rank() < k) {
    return;
  }
  const Vector za = lu.solve(-ba);
  if (!za.allFinite() || za.minCoeff() < 0.0) {
    return;
  }
  Vector z = Vector::Zero(sol.z.size());
  for (Eigen::Index r = 0; r < k; ++r) {
    z(support[r]) = za(r);
  }
  LcpSolution candidate = finish(problem, std::move(z), sol.status, sol.iterations);
  if (feasible(candidate, tol) && candidate.residual <= sol.residual) {
    sol = std::move(candidate);
  }
}

// Row i lexicographically smaller than row j for the ratio test:
// compare (rhs, B^-1 row) / pivot-column entry.
bool lexico_less(const Matrix& tab, Eigen::Index i, Eigen::Index j, Eigen::Index col, Eigen::Index rhs,
                 Eigen::Index s) {
  const double ci = tab(i, col);
  const double cj = tab(j, col);
  auto compare = [&](Eigen::Index k) {
    const double a = tab(i, k) / ci;
    const double b = tab(j, k) / cj;
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    if (std::abs(a - b) <= 1e-13 * scale) {
      return 0;
    }
    return a < b ? -1 : 1;
  };
  if (int c = compare(rhs); c != 0) {
    return c < 0;
  }
  for (Eigen::Index k = 0; k < s; ++k) {
    if (int c = compare(k); c != 0) {
      return c < 0;
    }
  }
  return i < j;
}

void pivot(Matrix& tab, Eigen::Index row, Eigen::Index col) {
  tab.row(row) /= tab(row, col);
  for (Eigen::Index r = 0; r < tab.rows(); ++r) {
    if (r != row && tab(r, col) != 0.0) {
      tab.row(r) -= tab(r, col) * tab.row(row);
    }
  }
}

}  // namespace

double scaled_tolerance(const LcpProblem& problem, double tol) {
  const double bnorm = problem.b.size() ? problem.b.cwiseAbs().maxCoeff() : 0.0;
  return tol * (1.0 + bnorm);
}

double complementarity_residual(const Vector& z, const Vector& w) {
  double r = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    r = std::max(r, std::abs(std::min(z(i), w(i))));
  }
  return r;
}

LcpSolution solve_lemke(const LcpProblem& problem, double tol, int max_pivots) {
  const Eigen::Index s = problem.size();
  const double atol = scaled_tolerance(problem, tol);
  if (s == 0) {
    return finish(problem, Vector(), LcpStatus::Solved, 0);
  }
  if (problem.b.minCoeff() >= 0.0) {
    return finish(problem, Vector::Zero(s), LcpStatus::Solved, 0);
  }
  if (max_pivots <= 0) {
    max_pivots = static_cast<int>(1000 + 50 * s * s);
  }

  // Columns: w_0..w_{s-1}, z_0..z_{s-1}, z0 (artificial), rhs.
  // System: w - W z - d z0 = b with covering vector d = 1.
  const Eigen::Index z0_col = 2 * s;
  const Eigen::Index rhs = 2 * s + 1;
  Matrix tab = Matrix::Zero(s, 2 * s + 2);
  tab.leftCols(s).setIdentity();
  tab.middleCols(s, s) = -problem.W;
  tab.col(z0_col).setConstant(-1.0);
  tab.col(rhs) = problem.b;
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(s));
  for (Eigen::Index i = 0; i < s; ++i) {
    basis[static_cast<std::size_t>(i)] = i;
  }

  // Initial pivot: z0 enters at the row whose b/d is lexicographically smallest.
  Eigen::Index row = 0;
  for (Eigen::Index i = 1; i < s; ++i) {
    // Column entries are -1, so compare against the negated column.
    tab.col(z0_col) *= -1.0;
    const bool less = lexico_less(tab, i, row, z0_col, rhs, s);
    tab.col(z0_col) *= -1.0;
    if (less) {
      row = i;
    }
  }
  pivot(tab, row, z0_col);
  Eigen::Index leaving = basis[static_cast<std::size_t>(row)];
  basis[static_cast<std::size_t>(row)] = z0_col;

  int iterations = 1;
  while (iterations < max_pivots) {
    const Eigen::Index entering = leaving < s ? leaving + s : leaving - s;
    const double colmax = tab.col(entering).cwiseAbs().maxCoeff();
    const double threshold = kPivotTol * std::max(colmax, std::numeric_limits<double>::min());
    Eigen::Index best = -1;
    bool tiny_positive = false;
    for (Eigen::Index i = 0; i < s; ++i) {
      const double c = tab(i, entering);
      if (c > threshold) {
        if (best < 0 || lexico_less(tab, i, best, entering, rhs, s)) {
          best = i;
        }
      } else if (c > 0.0) {
        tiny_positive = true;
      }
    }
    if (best < 0) {
      Vector z = Vector::Zero(s);
      for (Eigen::Index i = 0; i < s; ++i) {
        const Eigen::Index var = basis[static_cast<std::size_t>(i)];
        if (var >= s && var < 2 * s) {
          z(var - s) = std::max(0.0, tab(i, rhs));
        }
      }
      return finish(problem, std::move(z),
                    tiny_positive ? LcpStatus::NumericalBreakdown : LcpStatus::RayTermination, iterations);
    }
    pivot(tab, best, entering);
    ++iterations;
    leaving = basis[static_cast<std::size_t>(best)];
    basis[static_cast<std::size_t>(best)] = entering;
    if (leaving == z0_col) {
      Vector z = Vector::Zero(s);
      for (Eigen::Index i = 0; i < s; ++i) {
        const Eigen::Index var = basis[static_cast<std::size_t>(i)];
        if (var >= s && var < 2 * s) {
          z(var - s) = std::max(0.0, tab(i, rhs));
        }
      }
      LcpSolution sol = finish(problem, std::move(z), LcpStatus::Solved, iterations);
      polish(problem, sol, atol);
      if (!feasible(sol, atol)) {
        sol.status = LcpStatus::NumericalBreakdown;
      }
      return sol;
    }
  }
  return finish(problem, Vector::Zero(s), LcpStatus::MaxIterations, iterations);
}

LcpSolution solve_pgs(const LcpProblem& problem, double tol, int max_sweeps) {
  const Eigen::Index s = problem.size();
  if (s == 0) {
    return finish(problem, Vector(), LcpStatus::Solved, 0);
  }
  for (Eigen::Index i = 0; i < s; ++i) {
    if (!(problem.W(i, i) > 0.0)) {
      return finish(problem, Vector::Zero(s), LcpStatus::ZeroDiagonal, 0);
    }
  }
  const double atol = scaled_tolerance(problem, tol);
  Vector z = Vector::Zero(s);
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    for (Eigen::Index i = 0; i < s; ++i) {
      const double wi = problem.W.row(i).dot(z) + problem.b(i);
      z(i) = std::max(0.0, z(i) - wi / problem.W(i, i));
    }
    LcpSolution sol = finish(problem, z, LcpStatus::Solved, sweep);
    if (feasible(sol, atol)) {
      return sol;
    }
  }
  return finish(problem, std::move(z), LcpStatus::MaxIterations, max_sweeps);
}

LcpSolution solve_enumeration(const LcpProblem& problem, double tol) {
  const Eigen::Index s = problem.size();
  if (s > 12) {
    fail(ErrorCode::InvalidSpec, "lcp.size", "enumeration limited to 12 unknowns");
  }
  if (s == 0) {
    return finish(problem, Vector(), LcpStatus::Solved, 0);
  }
  const double atol = scaled_tolerance(problem, tol);
  const unsigned subsets = 1u << static_cast<unsigned>(s);
  for (unsigned mask = 0; mask < subsets; ++mask) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < s; ++i) {
      if (mask & (1u << static_cast<unsigned>(i))) {
        idx.push_back(i);
      }
    }
    const auto k = static_cast<Eigen::Index>(idx.size());
    Vector z = Vector::Zero(s);
    if (k > 0) {
      Matrix waa(k, k);
      Vector ba(k);
      for (Eigen::Index r = 0; r < k; ++r) {
        ba(r) = problem.b(idx[r]);
        for (Eigen::Index c = 0; c < k; ++c) {
          waa(r, c) = problem.W(idx[r], idx[c]);
        }
      }
      Eigen::FullPivLU<Matrix> lu(waa);
      if (lu.rank() < k) {
        continue;
      }
      const Vector za = lu.solve(-ba);
      if (!za.allFinite() || za.minCoeff() < -atol) {
        continue;
      }
      for (Eigen::Index r = 0; r < k; ++r) {
        z(idx[r]) = std::max(0.0, za(r));
      }
    }
    LcpSolution sol = finish(problem, std::move(z), LcpStatus::Solved, static_cast<int>(mask) + 1);
    if (feasible(sol, atol)) {
      return sol;
    }
  }
  return finish(problem, Vector::Zero(s), LcpStatus::NoSolutionFound, static_cast<int>(subsets));
}

}  // namespace nsc::lcp
