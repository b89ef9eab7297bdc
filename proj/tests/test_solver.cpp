#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "crosshyp/io_util.hpp"
#include "crosshyp/solver.hpp"

using namespace crosshyp;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

Eigen::MatrixXd random_nonneg(Rng& rng, int rows, int cols, double density) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (rng.uniform() < density) m(i, j) = std::abs(rng.normal());
  return m;
}

TranslationMatrix one_hot_identity(int n) {
  TranslationMatrix s;
  s.mode = TranslationMatrix::Mode::one_hot;
  s.rows = n;
  s.cols = n;
  s.row_entries.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) s.row_entries[static_cast<std::size_t>(i)].emplace_back(i, 1.0);
  return s;
}

TranslationMatrix empty_matrix(int rows, int cols) {
  TranslationMatrix s;
  s.rows = rows;
  s.cols = cols;
  s.row_entries.resize(static_cast<std::size_t>(rows));
  return s;
}

// Direct transcription of the smooth part of the objective for the
// finite-difference oracle: two reconstruction terms plus the coupling
// sum, written with plain loops.
double smooth_objective(const Eigen::MatrixXd& a_e, const Eigen::MatrixXd& d_e,
                        const Eigen::MatrixXd& x_e, const Eigen::MatrixXd& a_f,
                        const Eigen::MatrixXd& d_f, const Eigen::MatrixXd& x_f,
                        const TranslationMatrix& s, double lambda_x) {
  double obj = 0.0;
  obj += 0.5 * (a_e * d_e.transpose() - x_e).squaredNorm();
  obj += 0.5 * (a_f * d_f.transpose() - x_f).squaredNorm();
  for (int i = 0; i < s.rows; ++i)
    for (const auto& [j, w] : s.row_entries[static_cast<std::size_t>(i)])
      obj += 0.5 * lambda_x * w * (a_e.row(i) - a_f.row(j)).squaredNorm();
  return obj;
}

struct Instance {
  Eigen::MatrixXd x_e, x_f, a_e, a_f, d_e, d_f;
  TranslationMatrix s;
};

Instance random_instance(Rng& rng, int v, int n, int k) {
  Instance inst;
  inst.x_e = random_matrix(rng, v, n);
  inst.x_f = random_matrix(rng, v, n);
  inst.a_e = random_nonneg(rng, v, k, 0.7);
  inst.a_f = random_nonneg(rng, v, k, 0.7);
  inst.d_e = random_matrix(rng, n, k);
  inst.d_f = random_matrix(rng, n, k);
  project_atoms_inplace(inst.d_e);
  project_atoms_inplace(inst.d_f);
  inst.s = one_hot_identity(v);
  return inst;
}

}  // namespace

TEST_CASE("non-negative soft threshold matches the hand values") {
  Eigen::VectorXd v(3);
  v << 3, -1, 0.5;
  Eigen::VectorXd got = nonneg_soft_threshold(v, 1.0);
  CHECK(got(0) == doctest::Approx(2.0));
  CHECK(got(1) == doctest::Approx(0.0));
  CHECK(got(2) == doctest::Approx(0.0));

  Eigen::VectorXd zero_tau = nonneg_soft_threshold(v, 0.0);
  CHECK(zero_tau(0) == doctest::Approx(3.0));
  CHECK(zero_tau(1) == doctest::Approx(0.0));
  CHECK(zero_tau(2) == doctest::Approx(0.5));

  Eigen::VectorXd all_below = nonneg_soft_threshold(v, 5.0);
  CHECK(all_below.norm() == 0.0);
}

TEST_CASE("unit-ball projection") {
  Eigen::VectorXd boundary(2);
  boundary << 0.6, 0.8;
  CHECK((project_unit_ball(boundary) - boundary).norm() == 0.0);

  Eigen::VectorXd outside(2);
  outside << 3, 4;
  Eigen::VectorXd proj = project_unit_ball(outside);
  CHECK(proj(0) == doctest::Approx(0.6));
  CHECK(proj(1) == doctest::Approx(0.8));

  Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
  CHECK(project_unit_ball(zero).norm() == 0.0);
}

TEST_CASE("objective with all-zero codes is half the squared input mass") {
  Rng rng(1);
  BilingualSpace space;
  space.x_e = random_matrix(rng, 4, 3);
  space.x_f = random_matrix(rng, 5, 3);
  space.a_e = Eigen::MatrixXd::Zero(4, 2);
  space.a_f = Eigen::MatrixXd::Zero(5, 2);
  space.d_e = random_matrix(rng, 3, 2);
  space.d_f = random_matrix(rng, 3, 2);
  space.s = empty_matrix(4, 5);
  space.lambdas = {0.3, 0.7, 0.0};
  double expected = 0.5 * (space.x_e.squaredNorm() + space.x_f.squaredNorm());
  CHECK(objective_value(space) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("objective is zero for a perfect unregularized fit") {
  Rng rng(2);
  BilingualSpace space;
  space.a_e = random_nonneg(rng, 4, 2, 1.0);
  space.a_f = random_nonneg(rng, 3, 2, 1.0);
  space.d_e = random_matrix(rng, 5, 2);
  space.d_f = random_matrix(rng, 5, 2);
  space.x_e = space.a_e * space.d_e.transpose();
  space.x_f = space.a_f * space.d_f.transpose();
  space.s = empty_matrix(4, 3);
  space.lambdas = {0.0, 0.0, 0.0};
  CHECK(objective_value(space) == doctest::Approx(0.0));
}

TEST_CASE("scalar objective hand-evaluation") {
  BilingualSpace space;
  space.x_e = Eigen::MatrixXd::Constant(1, 1, 2.0);
  space.a_e = Eigen::MatrixXd::Constant(1, 1, 1.0);
  space.d_e = Eigen::MatrixXd::Constant(1, 1, 1.0);
  space.x_f = Eigen::MatrixXd(0, 0);
  space.a_f = Eigen::MatrixXd(0, 1);
  space.d_f = Eigen::MatrixXd(0, 1);
  space.s = empty_matrix(1, 0);
  space.lambdas = {1.0, 0.0, 0.0};
  CHECK(objective_value(space) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("objective rejects inconsistent shapes") {
  BilingualSpace space;
  space.x_e = Eigen::MatrixXd::Zero(2, 3);
  space.a_e = Eigen::MatrixXd::Zero(2, 2);
  space.d_e = Eigen::MatrixXd::Zero(4, 2);  // should be 3 x 2
  space.x_f = Eigen::MatrixXd(0, 0);
  space.a_f = Eigen::MatrixXd(0, 2);
  space.d_f = Eigen::MatrixXd(0, 2);
  space.s = empty_matrix(2, 0);
  CHECK_THROWS_AS(objective_value(space), std::invalid_argument);
}

TEST_CASE("code gradients match central finite differences, coupling included") {
  Rng rng(3);
  const double h = 1e-5;
  for (int trial = 0; trial < 6; ++trial) {
    Instance inst = random_instance(rng, 5, 3, 2);
    const double lambda_x = trial % 2 ? 0.8 : 0.0;

    for (int side = 0; side < 2; ++side) {
      bool e_side = side == 0;
      Eigen::MatrixXd& a = e_side ? inst.a_e : inst.a_f;
      Eigen::MatrixXd grad =
          code_smooth_gradient(a, e_side ? inst.d_e : inst.d_f, e_side ? inst.x_e : inst.x_f,
                               lambda_x, inst.s, e_side, e_side ? inst.a_f : inst.a_e);
      Eigen::MatrixXd fd(a.rows(), a.cols());
      for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
          double keep = a(i, j);
          a(i, j) = keep + h;
          double up = smooth_objective(inst.a_e, inst.d_e, inst.x_e, inst.a_f, inst.d_f, inst.x_f,
                                       inst.s, lambda_x);
          a(i, j) = keep - h;
          double down = smooth_objective(inst.a_e, inst.d_e, inst.x_e, inst.a_f, inst.d_f,
                                         inst.x_f, inst.s, lambda_x);
          a(i, j) = keep;
          fd(i, j) = (up - down) / (2 * h);
        }
      CHECK((grad - fd).norm() <= 1e-4 * std::max(1.0, fd.norm()));
    }

    // Dictionary gradient on the e side.
    Eigen::MatrixXd grad_d = dict_smooth_gradient(inst.a_e, inst.d_e, inst.x_e);
    Eigen::MatrixXd fd(inst.d_e.rows(), inst.d_e.cols());
    for (int i = 0; i < inst.d_e.rows(); ++i)
      for (int j = 0; j < inst.d_e.cols(); ++j) {
        double keep = inst.d_e(i, j);
        inst.d_e(i, j) = keep + h;
        double up = 0.5 * (inst.a_e * inst.d_e.transpose() - inst.x_e).squaredNorm();
        inst.d_e(i, j) = keep - h;
        double down = 0.5 * (inst.a_e * inst.d_e.transpose() - inst.x_e).squaredNorm();
        inst.d_e(i, j) = keep;
        fd(i, j) = (up - down) / (2 * h);
      }
    CHECK((grad_d - fd).norm() <= 1e-4 * std::max(1.0, fd.norm()));
  }
}

TEST_CASE("the objective is monotone and iterates stay feasible") {
  Rng rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd x_e = random_matrix(rng, 12, 8);
    Eigen::MatrixXd x_f = random_matrix(rng, 12, 8);
    SolverConfig cfg;
    cfg.k = 4;
    cfg.max_outer_iters = 40;
    cfg.tolerance = 1e-12;
    cfg.seed = 100 + static_cast<std::uint64_t>(trial);

    double prev = std::numeric_limits<double>::infinity();
    int calls = 0;
    cfg.on_iteration = [&](const SolverIterate& it) {
      ++calls;
      CHECK(it.objective <= prev + 1e-8);
      prev = it.objective;
      CHECK(it.a_e.minCoeff() >= 0.0);
      CHECK(it.a_f.minCoeff() >= 0.0);
      for (int j = 0; j < it.d_e.cols(); ++j) {
        CHECK(it.d_e.col(j).squaredNorm() <= 1.0 + 1e-9);
        CHECK(it.d_f.col(j).squaredNorm() <= 1.0 + 1e-9);
      }
    };
    BilingualSpace space =
        solve_bisparse(x_e, x_f, one_hot_identity(12), {0.1, 0.1, 0.5}, cfg);
    CHECK(calls == space.iterations);
    CHECK(space.objective <= space.objective_history.front() + 1e-8);
  }
}

TEST_CASE("joint solve with lambda_x = 0 equals two monolingual solves") {
  Rng rng(5);
  Eigen::MatrixXd x_e = random_matrix(rng, 10, 6);
  Eigen::MatrixXd x_f = random_matrix(rng, 8, 6);
  SolverConfig cfg;
  cfg.k = 3;
  cfg.max_outer_iters = 30;
  cfg.tolerance = 1e-300;  // run all iterations on both paths
  cfg.seed = 7;

  BilingualSpace joint = solve_bisparse(x_e, x_f, empty_matrix(10, 8), {0.2, 0.3, 0.0}, cfg);
  MonoResult mono_e = solve_monolingual(x_e, 0.2, cfg, 0);
  MonoResult mono_f = solve_monolingual(x_f, 0.3, cfg, 1);

  CHECK(std::abs(joint.objective - (mono_e.objective + mono_f.objective)) < 1e-8);
  // The stopping rule sees the combined objective in the joint run, so a
  // side may stop one iteration apart from its monolingual twin; the
  // iterates still agree far below the objective tolerance.
  CHECK((joint.a_e - mono_e.a).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((joint.a_f - mono_f.a).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((joint.d_e - mono_e.d).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((joint.d_f - mono_f.d).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("huge l1 weights drive the codes to zero") {
  Rng rng(6);
  Eigen::MatrixXd x_e = random_matrix(rng, 6, 4);
  Eigen::MatrixXd x_f = random_matrix(rng, 6, 4);
  SolverConfig cfg;
  cfg.k = 3;
  cfg.max_outer_iters = 10;
  cfg.tolerance = 1e-12;
  BilingualSpace space =
      solve_bisparse(x_e, x_f, one_hot_identity(6), {1e6, 1e6, 0.1}, cfg);
  CHECK(space.a_e.cwiseAbs().maxCoeff() == 0.0);
  CHECK(space.a_f.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("planted sparse instances are recovered to low reconstruction error") {
  Rng rng(7);
  Eigen::MatrixXd a_true = random_nonneg(rng, 10, 4, 0.4);
  for (int i = 0; i < a_true.rows(); ++i)  // no all-zero rows
    if (a_true.row(i).sum() == 0.0) a_true(i, static_cast<int>(rng.uniform_int(4))) = 1.0;
  Eigen::MatrixXd d_true = random_matrix(rng, 8, 4);
  project_atoms_inplace(d_true);
  Eigen::MatrixXd x = a_true * d_true.transpose();

  SolverConfig cfg;
  cfg.k = 4;
  cfg.max_outer_iters = 800;
  cfg.tolerance = 1e-10;
  cfg.inner_iters = 2;
  cfg.seed = 11;
  cfg.row_normalize = false;
  MonoResult result = solve_monolingual(x, 1e-4, cfg, 0);
  double rel = (result.a * result.d.transpose() - x).norm() / x.norm();
  CHECK(rel < 0.05);
}

TEST_CASE("code sparsity is non-increasing in the l1 weight") {
  Rng rng(8);
  Eigen::MatrixXd x = random_matrix(rng, 12, 8);
  SolverConfig cfg;
  cfg.k = 4;
  cfg.max_outer_iters = 120;
  cfg.tolerance = 1e-10;
  cfg.seed = 3;

  const double grid[] = {0.01, 0.05, 0.1, 0.3, 0.6};
  long long prev_nnz = std::numeric_limits<long long>::max();
  for (double lambda : grid) {
    MonoResult result = solve_monolingual(x, lambda, cfg, 0);
    long long nnz = (result.a.array() > 1e-8).count();
    CHECK(nnz <= prev_nnz);
    prev_nnz = nnz;
  }
}

TEST_CASE("stronger coupling pulls paired rows together") {
  Rng rng(9);
  Eigen::MatrixXd x_e = random_matrix(rng, 6, 5);
  Eigen::MatrixXd x_f = random_matrix(rng, 6, 5);
  SolverConfig cfg;
  cfg.k = 3;
  cfg.max_outer_iters = 150;
  cfg.tolerance = 1e-10;
  cfg.seed = 21;

  const double grid[] = {0.0, 0.1, 0.5, 2.0, 10.0};
  double prev_gap = std::numeric_limits<double>::infinity();
  for (double lambda_x : grid) {
    BilingualSpace space =
        solve_bisparse(x_e, x_f, one_hot_identity(6), {0.05, 0.05, lambda_x}, cfg);
    double gap = (space.a_e.row(2) - space.a_f.row(2)).norm();
    CHECK(gap <= prev_gap + 1e-8);
    prev_gap = gap;
  }
}

TEST_CASE("positive lambda_x with an empty matrix warns and decouples") {
  Rng rng(10);
  Eigen::MatrixXd x_e = random_matrix(rng, 4, 3);
  Eigen::MatrixXd x_f = random_matrix(rng, 4, 3);
  SolverConfig cfg;
  cfg.k = 2;
  cfg.max_outer_iters = 5;
  cfg.tolerance = 1e-9;
  BilingualSpace space = solve_bisparse(x_e, x_f, empty_matrix(4, 4), {0.1, 0.1, 0.5}, cfg);
  REQUIRE(!space.warnings.empty());
  CHECK(space.warnings[0].find("empty translation matrix") != std::string::npos);
}

TEST_CASE("mismatched translation matrix shapes are rejected") {
  Rng rng(11);
  Eigen::MatrixXd x_e = random_matrix(rng, 4, 3);
  Eigen::MatrixXd x_f = random_matrix(rng, 4, 3);
  SolverConfig cfg;
  cfg.k = 2;
  CHECK_THROWS_AS(
      solve_bisparse(x_e, x_f, one_hot_identity(3), {0.1, 0.1, 0.5}, cfg),
      std::invalid_argument);
}

TEST_CASE("row normalization scales inputs to unit rows inside the solver") {
  Rng rng(12);
  Eigen::MatrixXd x = random_matrix(rng, 5, 4) * 100.0;
  SolverConfig cfg;
  cfg.k = 2;
  cfg.max_outer_iters = 2;
  cfg.tolerance = 1e-9;
  BilingualSpace space = solve_bisparse(x, Eigen::MatrixXd(0, 0), empty_matrix(5, 0), {0.1, 0, 0}, cfg);
  for (int i = 0; i < space.x_e.rows(); ++i)
    CHECK(space.x_e.row(i).norm() == doctest::Approx(1.0).epsilon(1e-12));
}
