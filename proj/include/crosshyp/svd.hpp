#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "crosshyp/cooc.hpp"

namespace crosshyp {

// Rows are aligned with word vocabulary ids.
struct DenseEmbeddings {
  Eigen::MatrixXd matrix;
};

struct SvdOptions {
  // Matrices with both dimensions <= exact_limit use exact dense SVD;
  // larger ones fall back to a seeded randomized range finder.
  int exact_limit = 5000;
  int oversample = 10;
  int power_iters = 2;
  std::uint64_t seed = 0;
  bool force_randomized = false;
};

struct SvdResult {
  Eigen::MatrixXd u;      // m x d, orthonormal columns
  Eigen::VectorXd sigma;  // d, non-negative, non-increasing
  Eigen::MatrixXd v;      // n x d, orthonormal columns
  int requested_d = 0;
  int effective_d = 0;  // reduced when the requested rank is not achievable
  std::vector<std::string> warnings;
};

Eigen::SparseMatrix<double> to_eigen_sparse(const CoocMatrix& m);

// Rank-d SVD with singular values descending. Deterministic: the sign of
// each singular pair is fixed by making the largest-magnitude coordinate
// of the left singular vector positive (ties resolved to the lowest row).
SvdResult compute_truncated_svd(const Eigen::MatrixXd& dense, int d, const SvdOptions& opts = {});
SvdResult compute_truncated_svd(const Eigen::SparseMatrix<double>& sparse, int d,
                                const SvdOptions& opts = {});

// Word embeddings U*Sigma (or U when scale_by_singular is off).
DenseEmbeddings reduce_embeddings(const CoocMatrix& weighted, int d, bool scale_by_singular,
                                  const SvdOptions& opts, std::vector<std::string>* warnings);

// Embedding dump: `word<TAB>v1 v2 ... vd`.
void write_embeddings(std::ostream& out, const std::vector<std::string>& words,
                      const Eigen::MatrixXd& matrix);

struct EmbeddingTable {
  std::vector<std::string> words;
  Eigen::MatrixXd matrix;
};
EmbeddingTable read_embeddings(std::istream& in);
EmbeddingTable read_embeddings_file(const std::filesystem::path& path);

}  // namespace crosshyp
