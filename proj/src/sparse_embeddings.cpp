#include "crosshyp/sparse_embeddings.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "crosshyp/io_util.hpp"

namespace crosshyp {

int SparseEmbeddings::row_id(std::string_view word) const {
  auto it = index.find(std::string(word));
  return it == index.end() ? -1 : it->second;
}

Eigen::VectorXd SparseEmbeddings::dense_row(int id) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  for (const auto& [j, val] : rows[static_cast<std::size_t>(id)]) v(j) = val;
  return v;
}

SparseEmbeddings SparseEmbeddings::from_dense(const std::vector<std::string>& words,
                                              const Eigen::MatrixXd& a, double zero_tol) {
  if (static_cast<Eigen::Index>(words.size()) != a.rows())
    throw std::invalid_argument("word count does not match matrix rows");
  SparseEmbeddings emb;
  emb.dim = static_cast<int>(a.cols());
  emb.words = words;
  emb.rows.resize(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    auto [it, inserted] = emb.index.emplace(words[i], static_cast<int>(i));
    if (!inserted) throw std::invalid_argument("duplicate word: " + words[i]);
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      double v = a(static_cast<Eigen::Index>(i), j);
      if (v > zero_tol) emb.rows[i].emplace_back(static_cast<int>(j), v);
    }
  }
  return emb;
}

void write_sparse_embeddings(std::ostream& out, const SparseEmbeddings& emb) {
  for (std::size_t i = 0; i < emb.words.size(); ++i) {
    out << emb.words[i] << '\t';
    const auto& row = emb.rows[i];
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ' ';
      out << row[j].first << ':' << fmt_double(row[j].second);
    }
    out << '\n';
  }
}

SparseEmbeddings read_sparse_embeddings(std::istream& in) {
  SparseEmbeddings emb;
  std::string line;
  std::size_t line_no = 0;
  int max_dim = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw std::runtime_error("sparse embedding line " + std::to_string(line_no) + ": missing tab");
    std::string word = line.substr(0, tab);
    std::vector<std::pair<int, double>> row;
    int prev_idx = -1;
    for (std::string_view piece : split_view(std::string_view(line).substr(tab + 1), ' ')) {
      if (piece.empty()) continue;
      std::size_t colon = piece.find(':');
      if (colon == std::string_view::npos)
        throw std::runtime_error("sparse embedding line " + std::to_string(line_no) +
                                 ": expected idx:val");
      long long idx = 0;
      double val = 0;
      if (!parse_int64(piece.substr(0, colon), idx) || idx < 0 ||
          !parse_double(piece.substr(colon + 1), val))
        throw std::runtime_error("sparse embedding line " + std::to_string(line_no) +
                                 ": bad idx:val pair");
      if (static_cast<int>(idx) <= prev_idx)
        throw std::runtime_error("sparse embedding line " + std::to_string(line_no) +
                                 ": indices must be strictly ascending");
      prev_idx = static_cast<int>(idx);
      max_dim = std::max(max_dim, prev_idx);
      row.emplace_back(prev_idx, val);
    }
    auto [it, inserted] = emb.index.emplace(word, static_cast<int>(emb.words.size()));
    if (!inserted)
      throw std::runtime_error("sparse embedding line " + std::to_string(line_no) +
                               ": duplicate word " + word);
    emb.words.push_back(std::move(word));
    emb.rows.push_back(std::move(row));
  }
  emb.dim = max_dim + 1;
  return emb;
}

SparseEmbeddings read_sparse_embeddings_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open sparse embeddings: " + path.string());
  return read_sparse_embeddings(in);
}

}  // namespace crosshyp
