#include "crosshyp/solver.hpp"

#include <cmath>
#include <stdexcept>

#include "crosshyp/io_util.hpp"

namespace crosshyp {

namespace {

// Per-row coupling mass and per-row pull target for one side of the
// quadratic alignment term. For the e side: weight = S*1, target = S*A_f;
// for the f side: weight = S^T*1, target = S^T*A_e.
struct Coupling {
  bool active = false;
  double lambda_x = 0.0;
  Eigen::VectorXd weight;
  Eigen::MatrixXd target;
  double constant = 0.0;  // sum_j w'_j ||B_j||^2, fixed while this block moves
};

double l1_norm(const Eigen::MatrixXd& m) { return m.cwiseAbs().sum(); }

double reconstruction(const Eigen::MatrixXd& a, const Eigen::MatrixXd& d,
                      const Eigen::MatrixXd& x) {
  if (x.rows() == 0) return 0.0;
  return 0.5 * (a * d.transpose() - x).squaredNorm();
}

// 1/2 lambda_x sum_ij S_ij ||A_i - B_j||^2 expanded around fixed B.
double coupling_value(const Eigen::MatrixXd& a, const Coupling& c) {
  if (!c.active) return 0.0;
  double quad = a.rowwise().squaredNorm().dot(c.weight);
  double cross = (a.cwiseProduct(c.target)).sum();
  return 0.5 * c.lambda_x * (quad - 2.0 * cross + c.constant);
}

double coupling_objective(const Eigen::MatrixXd& a_e, const Eigen::MatrixXd& a_f,
                          const TranslationMatrix& s, double lambda_x) {
  if (lambda_x == 0.0) return 0.0;
  double sum = 0.0;
  for (int i = 0; i < s.rows; ++i)
    for (const auto& [j, w] : s.row_entries[static_cast<std::size_t>(i)])
      sum += w * (a_e.row(i) - a_f.row(j)).squaredNorm();
  return 0.5 * lambda_x * sum;
}

Eigen::MatrixXd seeded_dictionary(Eigen::Index n, Eigen::Index k, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd d(n, k);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < k; ++j) d(i, j) = rng.normal();
  project_atoms_inplace(d);
  return d;
}

Eigen::MatrixXd gradient_impl(const Eigen::MatrixXd& a, const Eigen::MatrixXd& d,
                              const Eigen::MatrixXd& x, const Coupling& coup) {
  Eigen::MatrixXd grad = (a * d.transpose() - x) * d;
  if (coup.active)
    grad.noalias() += coup.lambda_x * (coup.weight.asDiagonal() * a - coup.target);
  return grad;
}

Coupling make_coupling(double lambda_x, const TranslationMatrix& s, bool e_side,
                       const Eigen::MatrixXd& other_a, int k) {
  Coupling coup;
  if (lambda_x == 0.0 || s.empty()) return coup;
  coup.active = true;
  coup.lambda_x = lambda_x;
  const int n_rows = e_side ? s.rows : s.cols;
  const int n_other = e_side ? s.cols : s.rows;
  if (other_a.rows() != n_other)
    throw std::invalid_argument("translation matrix shape does not match the code matrices");
  coup.weight = Eigen::VectorXd::Zero(n_rows);
  coup.target = Eigen::MatrixXd::Zero(n_rows, k);
  Eigen::VectorXd other_weight = Eigen::VectorXd::Zero(n_other);
  for (int i = 0; i < s.rows; ++i)
    for (const auto& [j, w] : s.row_entries[static_cast<std::size_t>(i)]) {
      int mine = e_side ? i : j;
      int theirs = e_side ? j : i;
      coup.weight(mine) += w;
      coup.target.row(mine) += w * other_a.row(theirs);
      other_weight(theirs) += w;
    }
  coup.constant = other_a.rowwise().squaredNorm().dot(other_weight);
  return coup;
}

// One backtracked proximal gradient step on a sparse-code block.
// G(A) = 1/2||A D^T - X||^2 + coupling(A) + lambda ||A||_1; accepts the
// first step with G(A') <= G(A) - (c/step) ||A' - A||_F^2.
bool prox_code_step(Eigen::MatrixXd& a, const Eigen::MatrixXd& d, const Eigen::MatrixXd& x,
                    double lambda, const Coupling& coup, const SolverConfig& cfg,
                    double& step_memo) {
  double g_cur = 0.5 * (a * d.transpose() - x).squaredNorm() + coupling_value(a, coup) +
                 lambda * l1_norm(a);
  Eigen::MatrixXd grad = gradient_impl(a, d, x, coup);

  double step = std::min(cfg.initial_step, step_memo / cfg.backtrack_factor);
  for (int bt = 0; bt < cfg.max_backtracks; ++bt, step *= cfg.backtrack_factor) {
    Eigen::MatrixXd cand = a - step * grad;
    nonneg_soft_threshold_inplace(cand, step * lambda);
    double delta_sq = (cand - a).squaredNorm();
    double g_new = 0.5 * (cand * d.transpose() - x).squaredNorm() + coupling_value(cand, coup) +
                   lambda * l1_norm(cand);
    if (!std::isfinite(g_new)) continue;
    if (g_new <= g_cur - cfg.sufficient_decrease / step * delta_sq) {
      a = std::move(cand);
      step_memo = step;
      return delta_sq > 0.0;
    }
  }
  return false;  // no acceptable step, block unchanged
}

// One backtracked projected gradient step on a dictionary block.
// G(D) = 1/2||A D^T - X||^2 over the per-atom unit-ball set.
bool proj_dict_step(Eigen::MatrixXd& d, const Eigen::MatrixXd& a, const Eigen::MatrixXd& x,
                    const SolverConfig& cfg, double& step_memo) {
  double g_cur = 0.5 * (a * d.transpose() - x).squaredNorm();
  Eigen::MatrixXd grad = dict_smooth_gradient(a, d, x);

  double step = std::min(cfg.initial_step, step_memo / cfg.backtrack_factor);
  for (int bt = 0; bt < cfg.max_backtracks; ++bt, step *= cfg.backtrack_factor) {
    Eigen::MatrixXd cand = d - step * grad;
    project_atoms_inplace(cand);
    double delta_sq = (cand - d).squaredNorm();
    double g_new = 0.5 * (a * cand.transpose() - x).squaredNorm();
    if (!std::isfinite(g_new)) continue;
    if (g_new <= g_cur - cfg.sufficient_decrease / step * delta_sq) {
      d = std::move(cand);
      step_memo = step;
      return delta_sq > 0.0;
    }
  }
  return false;
}

Eigen::MatrixXd normalized_rows(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out = x;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    double norm = out.row(i).norm();
    if (norm > 0.0) out.row(i) /= norm;
  }
  return out;
}

void check_config(const SolverConfig& cfg) {
  if (cfg.k < 1) throw std::invalid_argument("solver k must be >= 1");
  if (cfg.max_outer_iters < 1) throw std::invalid_argument("max_outer_iters must be >= 1");
  if (!(cfg.tolerance > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  if (cfg.inner_iters < 1) throw std::invalid_argument("inner_iters must be >= 1");
  if (!(cfg.initial_step > 0.0)) throw std::invalid_argument("initial_step must be > 0");
  if (!(cfg.backtrack_factor > 0.0 && cfg.backtrack_factor < 1.0))
    throw std::invalid_argument("backtrack_factor must be in (0,1)");
}

}  // namespace

Eigen::VectorXd nonneg_soft_threshold(const Eigen::VectorXd& v, double tau) {
  if (tau < 0.0) throw std::invalid_argument("soft threshold tau must be >= 0");
  return (v.array() - tau).max(0.0).matrix();
}

void nonneg_soft_threshold_inplace(Eigen::MatrixXd& m, double tau) {
  m = (m.array() - tau).max(0.0).matrix();
}

Eigen::VectorXd project_unit_ball(const Eigen::VectorXd& atom) {
  double norm = atom.norm();
  if (norm <= 1.0) return atom;
  return atom / norm;
}

void project_atoms_inplace(Eigen::MatrixXd& dictionary) {
  for (Eigen::Index j = 0; j < dictionary.cols(); ++j) {
    double sq = dictionary.col(j).squaredNorm();
    if (sq > 1.0) dictionary.col(j) /= std::sqrt(sq);
  }
}

Eigen::MatrixXd code_smooth_gradient(const Eigen::MatrixXd& a, const Eigen::MatrixXd& d,
                                     const Eigen::MatrixXd& x, double lambda_x,
                                     const TranslationMatrix& s, bool e_side,
                                     const Eigen::MatrixXd& other_a) {
  Coupling coup = make_coupling(lambda_x, s, e_side, other_a, static_cast<int>(a.cols()));
  return gradient_impl(a, d, x, coup);
}

Eigen::MatrixXd dict_smooth_gradient(const Eigen::MatrixXd& a, const Eigen::MatrixXd& d,
                                     const Eigen::MatrixXd& x) {
  return (a * d.transpose() - x).transpose() * a;
}

double objective_value(const BilingualSpace& space) {
  const auto check_side = [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& a,
                             const Eigen::MatrixXd& d, const char* side) {
    if (x.rows() != a.rows() || x.cols() != d.rows() || a.cols() != d.cols())
      throw std::invalid_argument(std::string("inconsistent shapes on side ") + side);
  };
  check_side(space.x_e, space.a_e, space.d_e, "e");
  check_side(space.x_f, space.a_f, space.d_f, "f");
  if (space.lambdas.x != 0.0 &&
      (space.s.rows != space.a_e.rows() || space.s.cols != space.a_f.rows()))
    throw std::invalid_argument("translation matrix shape does not match code matrices");

  double obj_e = reconstruction(space.a_e, space.d_e, space.x_e) + space.lambdas.e * l1_norm(space.a_e);
  double obj_f = reconstruction(space.a_f, space.d_f, space.x_f) + space.lambdas.f * l1_norm(space.a_f);
  return obj_e + obj_f + coupling_objective(space.a_e, space.a_f, space.s, space.lambdas.x);
}

BilingualSpace solve_bisparse(const Eigen::MatrixXd& x_e, const Eigen::MatrixXd& x_f,
                              const TranslationMatrix& s, const Lambdas& lambdas,
                              const SolverConfig& cfg) {
  check_config(cfg);
  if (lambdas.e < 0.0 || lambdas.f < 0.0 || lambdas.x < 0.0)
    throw std::invalid_argument("lambdas must be non-negative");
  const int k = cfg.k;

  BilingualSpace space;
  space.lambdas = lambdas;
  space.s = s;
  space.x_e = cfg.row_normalize ? normalized_rows(x_e) : x_e;
  space.x_f = cfg.row_normalize ? normalized_rows(x_f) : x_f;

  const bool has_e = space.x_e.rows() > 0 && space.x_e.cols() > 0;
  const bool has_f = space.x_f.rows() > 0 && space.x_f.cols() > 0;

  bool couple = lambdas.x > 0.0 && has_e && has_f && !s.empty();
  if (lambdas.x > 0.0 && !couple)
    space.warnings.push_back(
        "lambda_x > 0 with an empty translation matrix: the problem degenerates to two "
        "monolingual solves");
  if (couple && (s.rows != space.x_e.rows() || s.cols != space.x_f.rows()))
    throw std::invalid_argument("translation matrix shape does not match the input matrices");

  space.a_e = Eigen::MatrixXd::Zero(space.x_e.rows(), k);
  space.a_f = Eigen::MatrixXd::Zero(space.x_f.rows(), k);
  space.d_e = has_e ? seeded_dictionary(space.x_e.cols(), k, derive_seed(cfg.seed, 0))
                    : Eigen::MatrixXd::Zero(space.x_e.cols(), k);
  space.d_f = has_f ? seeded_dictionary(space.x_f.cols(), k, derive_seed(cfg.seed, 1))
                    : Eigen::MatrixXd::Zero(space.x_f.cols(), k);

  double step_ae = cfg.initial_step, step_af = cfg.initial_step;
  double step_de = cfg.initial_step, step_df = cfg.initial_step;

  double prev_objective = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= cfg.max_outer_iters; ++iter) {
    if (has_e) {
      Coupling coup =
          couple ? make_coupling(lambdas.x, s, true, space.a_f, k) : Coupling{};
      for (int inner = 0; inner < cfg.inner_iters; ++inner)
        if (!prox_code_step(space.a_e, space.d_e, space.x_e, lambdas.e, coup, cfg, step_ae)) break;
    }
    if (has_f) {
      Coupling coup =
          couple ? make_coupling(lambdas.x, s, false, space.a_e, k) : Coupling{};
      for (int inner = 0; inner < cfg.inner_iters; ++inner)
        if (!prox_code_step(space.a_f, space.d_f, space.x_f, lambdas.f, coup, cfg, step_af)) break;
    }
    if (has_e)
      for (int inner = 0; inner < cfg.inner_iters; ++inner)
        if (!proj_dict_step(space.d_e, space.a_e, space.x_e, cfg, step_de)) break;
    if (has_f)
      for (int inner = 0; inner < cfg.inner_iters; ++inner)
        if (!proj_dict_step(space.d_f, space.a_f, space.x_f, cfg, step_df)) break;

    double obj_e = reconstruction(space.a_e, space.d_e, space.x_e) + lambdas.e * l1_norm(space.a_e);
    double obj_f = reconstruction(space.a_f, space.d_f, space.x_f) + lambdas.f * l1_norm(space.a_f);
    double obj = obj_e + obj_f;
    if (couple) obj += coupling_objective(space.a_e, space.a_f, s, lambdas.x);
    if (!std::isfinite(obj))
      throw std::runtime_error("objective became non-finite at iteration " + std::to_string(iter));

    space.objective = obj;
    space.iterations = iter;
    space.objective_history.push_back(obj);
    if (cfg.on_iteration)
      cfg.on_iteration(SolverIterate{space.a_e, space.a_f, space.d_e, space.d_f, obj, iter});

    if (std::isfinite(prev_objective)) {
      double rel = (prev_objective - obj) / std::max(prev_objective, 1e-300);
      if (rel < cfg.tolerance) {
        space.converged = true;
        break;
      }
    }
    prev_objective = obj;
  }
  return space;
}

MonoResult solve_monolingual(const Eigen::MatrixXd& x, double lambda, const SolverConfig& cfg,
                             int side) {
  if (side != 0 && side != 1) throw std::invalid_argument("side must be 0 (e) or 1 (f)");
  Eigen::MatrixXd empty(0, 0);
  TranslationMatrix s;
  s.rows = side == 0 ? static_cast<int>(x.rows()) : 0;
  s.cols = side == 0 ? 0 : static_cast<int>(x.rows());
  s.row_entries.resize(static_cast<std::size_t>(s.rows));

  Lambdas lambdas{side == 0 ? lambda : 0.0, side == 1 ? lambda : 0.0, 0.0};
  BilingualSpace space = side == 0 ? solve_bisparse(x, empty, s, lambdas, cfg)
                                   : solve_bisparse(empty, x, s, lambdas, cfg);
  MonoResult result;
  result.a = side == 0 ? std::move(space.a_e) : std::move(space.a_f);
  result.d = side == 0 ? std::move(space.d_e) : std::move(space.d_f);
  result.objective = space.objective;
  result.iterations = space.iterations;
  result.converged = space.converged;
  result.objective_history = std::move(space.objective_history);
  return result;
}

}  // namespace crosshyp
