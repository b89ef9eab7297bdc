#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace crosshyp {

// Row-sparse non-negative embedding matrix keyed by word. Row entries
// are (dimension, value) with dimensions ascending and values > 0.
struct SparseEmbeddings {
  int dim = 0;
  std::vector<std::string> words;
  std::unordered_map<std::string, int> index;
  std::vector<std::vector<std::pair<int, double>>> rows;

  int row_id(std::string_view word) const;
  Eigen::VectorXd dense_row(int id) const;

  static SparseEmbeddings from_dense(const std::vector<std::string>& words,
                                     const Eigen::MatrixXd& a, double zero_tol = 0.0);
};

// Dump format: `word<TAB>idx:val idx:val ...` (nonzeros only, idx ascending).
void write_sparse_embeddings(std::ostream& out, const SparseEmbeddings& emb);
SparseEmbeddings read_sparse_embeddings(std::istream& in);
SparseEmbeddings read_sparse_embeddings_file(const std::filesystem::path& path);

}  // namespace crosshyp
