#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "crosshyp/translation.hpp"

namespace crosshyp {

struct Lambdas {
  double e = 0.1;
  double f = 0.1;
  double x = 0.5;
};

struct SolverIterate {
  const Eigen::MatrixXd& a_e;
  const Eigen::MatrixXd& a_f;
  const Eigen::MatrixXd& d_e;
  const Eigen::MatrixXd& d_f;
  double objective;
  int iteration;  // 1-based outer iteration
};

struct SolverConfig {
  int k = 100;
  int max_outer_iters = 200;
  double tolerance = 1e-5;  // relative objective decrease between outer iterations
  int inner_iters = 1;      // proximal steps per block per outer iteration

  // Backtracking line search: start at initial_step, shrink by
  // backtrack_factor until the sufficient-decrease test passes. Accepted
  // steps are warm-started into the next attempt (one factor larger).
  double initial_step = 1.0;
  double backtrack_factor = 0.5;
  double sufficient_decrease = 1e-4;
  int max_backtracks = 60;

  std::uint64_t seed = 0;
  bool row_normalize = true;  // scale X rows to unit l2 norm before solving
  std::function<void(const SolverIterate&)> on_iteration;  // observation hook
};

// Learned bilingual space: sparse codes A (entrywise non-negative),
// dictionaries D (atom columns inside the unit l2 ball), the inputs as
// solved (after optional row normalization), the translation matrix and
// the regularization weights.
struct BilingualSpace {
  Eigen::MatrixXd x_e, x_f;  // v x n
  Eigen::MatrixXd a_e, a_f;  // v x k
  Eigen::MatrixXd d_e, d_f;  // n x k
  TranslationMatrix s;
  Lambdas lambdas;

  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_history;  // one entry per outer iteration
  std::vector<std::string> warnings;
};

// Proximal operator of tau*||.||_1 restricted to the non-negative
// orthant: elementwise max(v - tau, 0).
Eigen::VectorXd nonneg_soft_threshold(const Eigen::VectorXd& v, double tau);
void nonneg_soft_threshold_inplace(Eigen::MatrixXd& m, double tau);

// Scales the vector onto the unit l2 ball when it lies outside.
Eigen::VectorXd project_unit_ball(const Eigen::VectorXd& atom);
void project_atoms_inplace(Eigen::MatrixXd& dictionary);

// The joint objective:
//   sum_i 1/2 ||A_e,i D_e^T - X_e,i||^2 + lambda_e ||A_e,i||_1
// + sum_j 1/2 ||A_f,j D_f^T - X_f,j||^2 + lambda_f ||A_f,j||_1
// + sum_ij 1/2 lambda_x S_ij ||A_e,i - A_f,j||^2
double objective_value(const BilingualSpace& space);

// Gradient of the smooth part (reconstruction + coupling) with respect
// to one side's code matrix, the other side's codes held fixed. For the
// e side the coupling pull is lambda_x * (diag(S 1) A_e - S A_f); the f
// side uses S^T. These are the gradients the solver steps on.
Eigen::MatrixXd code_smooth_gradient(const Eigen::MatrixXd& a, const Eigen::MatrixXd& d,
                                     const Eigen::MatrixXd& x, double lambda_x,
                                     const TranslationMatrix& s, bool e_side,
                                     const Eigen::MatrixXd& other_a);

// Gradient of 1/2 ||A D^T - X||_F^2 with respect to the dictionary.
Eigen::MatrixXd dict_smooth_gradient(const Eigen::MatrixXd& a, const Eigen::MatrixXd& d,
                                     const Eigen::MatrixXd& x);

// Alternating block proximal gradient on (A_e, A_f, D_e, D_f). Descent
// is guaranteed per block by the backtracking rule, so the objective is
// non-increasing across outer iterations. Either side may be empty
// (0-row X), which reduces to a monolingual sparse coding problem.
BilingualSpace solve_bisparse(const Eigen::MatrixXd& x_e, const Eigen::MatrixXd& x_f,
                              const TranslationMatrix& s, const Lambdas& lambdas,
                              const SolverConfig& config);

struct MonoResult {
  Eigen::MatrixXd a, d;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_history;
};

// Single-language sparse coding through the same code path. `side`
// selects the seed stream (0 = e, 1 = f) so that a lambda_x = 0 joint
// solve and two monolingual solves see identical initializations.
MonoResult solve_monolingual(const Eigen::MatrixXd& x, double lambda, const SolverConfig& config,
                             int side);

}  // namespace crosshyp
