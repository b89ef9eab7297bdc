#include "crosshyp/svd.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "crosshyp/io_util.hpp"

namespace crosshyp {

namespace {

void fix_signs(Eigen::MatrixXd& u, Eigen::MatrixXd& v) {
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    Eigen::Index best = 0;
    double best_abs = 0.0;
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      double a = std::abs(u(i, j));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (best_abs > 0.0 && u(best, j) < 0.0) {
      u.col(j) = -u.col(j);
      if (j < v.cols()) v.col(j) = -v.col(j);
    }
  }
}

SvdResult from_thin_svd(Eigen::MatrixXd u, Eigen::VectorXd sigma, Eigen::MatrixXd v, int d,
                        int requested_d) {
  SvdResult result;
  result.requested_d = requested_d;

  // Trim numerically-zero trailing singular values; they carry arbitrary
  // directions and would make the output dependent on solver internals.
  int rank = 0;
  double cutoff = sigma.size() > 0
                      ? sigma(0) * std::max(u.rows(), v.rows()) *
                            std::numeric_limits<double>::epsilon()
                      : 0.0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) > cutoff) ++rank;
  int keep = std::min(d, rank);
  if (keep < d)
    result.warnings.push_back("requested dimension " + std::to_string(requested_d) +
                              " exceeds achievable rank " + std::to_string(rank) +
                              ", reduced to " + std::to_string(keep));
  if (keep == 0) keep = 0;

  result.u = u.leftCols(keep);
  result.sigma = sigma.head(keep);
  result.v = v.leftCols(keep);
  result.effective_d = keep;
  fix_signs(result.u, result.v);
  return result;
}

SvdResult exact_svd(const Eigen::MatrixXd& dense, int d, int requested_d) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(dense, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::MatrixXd u = svd.matrixU();
  Eigen::VectorXd sigma = svd.singularValues();
  Eigen::MatrixXd v = svd.matrixV();
  return from_thin_svd(std::move(u), std::move(sigma), std::move(v), d, requested_d);
}

Eigen::MatrixXd seeded_gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

// Halko-style randomized range finder with power iterations, then an
// exact SVD of the projected matrix. Fully determined by opts.seed.
template <typename Mat>
SvdResult randomized_svd(const Mat& a, int d, const SvdOptions& opts, int requested_d) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  const Eigen::Index l = std::min<Eigen::Index>(n, d + opts.oversample);

  Eigen::MatrixXd omega = seeded_gaussian(n, l, derive_seed(opts.seed, 0x5fd1));
  Eigen::MatrixXd y = a * omega;
  for (int it = 0; it < opts.power_iters; ++it) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    y = qr.householderQ() * Eigen::MatrixXd::Identity(m, l);
    y = a * (a.transpose() * y).eval();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m, l);
  Eigen::MatrixXd b = q.transpose() * a;

  Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::MatrixXd u = q * svd.matrixU();
  return from_thin_svd(std::move(u), svd.singularValues(), svd.matrixV(), d, requested_d);
}

}  // namespace

Eigen::SparseMatrix<double> to_eigen_sparse(const CoocMatrix& m) {
  Eigen::SparseMatrix<double> out(static_cast<Eigen::Index>(m.rows ()),
                                  static_cast<Eigen::Index>(m.cols()));
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(m.cells.size());
  for (const CoocCell& c : m.cells) triplets.emplace_back(c.row, c.col, c.value);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

SvdResult compute_truncated_svd(const Eigen::MatrixXd& dense, int d, const SvdOptions& opts) {
  if (d < 1) throw std::invalid_argument("svd dimension must be >= 1");
  int requested = d;
  d = std::min<int>(d, static_cast<int>(std::min(dense.rows(), dense.cols())));
  if (!opts.force_randomized &&
      (dense.rows() <= opts.exact_limit && dense.cols() <= opts.exact_limit))
    return exact_svd(dense, d, requested);
  return randomized_svd(dense, d, opts, requested);
}

SvdResult compute_truncated_svd(const Eigen::SparseMatrix<double>& sparse, int d,
                                const SvdOptions& opts) {
  if (d < 1) throw std::invalid_argument("svd dimension must be >= 1");
  int requested = d;
  d = std::min<int>(d, static_cast<int>(std::min(sparse.rows(), sparse.cols())));
  if (!opts.force_randomized &&
      (sparse.rows() <= opts.exact_limit && sparse.cols() <= opts.exact_limit))
    return exact_svd(Eigen::MatrixXd(sparse), d, requested);
  return randomized_svd(sparse, d, opts, requested);
}

DenseEmbeddings reduce_embeddings(const CoocMatrix& weighted, int d, bool scale_by_singular,
                                  const SvdOptions& opts, std::vector<std::string>* warnings) {
  if (weighted.rows() == 0 || weighted.cols() == 0)
    throw std::runtime_error("cannot reduce an empty matrix");
  SvdResult svd = compute_truncated_svd(to_eigen_sparse(weighted), d, opts);
  if (warnings)
    warnings->insert(warnings->end(), svd.warnings.begin(), svd.warnings.end());
  DenseEmbeddings emb;
  if (scale_by_singular)
    emb.matrix = svd.u * svd.sigma.asDiagonal();
  else
    emb.matrix = svd.u;
  return emb;
}

void write_embeddings(std::ostream& out, const std::vector<std::string>& words,
                      const Eigen::MatrixXd& matrix) {
  if (static_cast<Eigen::Index>(words.size()) != matrix.rows())
    throw std::invalid_argument("word count does not match embedding rows");
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    out << words[static_cast<std::size_t>(i)] << '\t';
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (j) out << ' ';
      out << fmt_double(matrix(i, j));
    }
    out << '\n';
  }
}

EmbeddingTable read_embeddings(std::istream& in) {
  EmbeddingTable table;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw std::runtime_error("embedding line " + std::to_string(line_no) + ": missing tab");
    table.words.emplace_back(line.substr(0, tab));
    std::vector<double> vals;
    for (std::string_view piece : split_view(std::string_view(line).substr(tab + 1), ' ')) {
      if (piece.empty()) continue;
      double v = 0;
      if (!parse_double(piece, v))
        throw std::runtime_error("embedding line " + std::to_string(line_no) + ": bad value");
      vals.push_back(v);
    }
    if (rows.empty())
      dim = vals.size();
    else if (vals.size() != dim)
      throw std::runtime_error("embedding line " + std::to_string(line_no) + ": inconsistent dimension");
    rows.push_back(std::move(vals));
  }
  table.matrix.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < dim; ++j)
      table.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return table;
}

EmbeddingTable read_embeddings_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open embeddings: " + path.string());
  return read_embeddings(in);
}

}  // namespace crosshyp
