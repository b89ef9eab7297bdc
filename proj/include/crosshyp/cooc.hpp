#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "crosshyp/contexts.hpp"
#include "crosshyp/vocab.hpp"

namespace crosshyp {

struct CoocCell {
  int row = 0;
  int col = 0;
  double value = 0.0;
  bool operator==(const CoocCell&) const = default;
};

// Sparse word-by-context matrix. Cells are kept sorted by (row, col) and
// never store explicit zeros; `total` tracks the sum of all cell values.
struct CoocMatrix {
  Vocabulary words;
  std::vector<std::string> contexts;  // column id order
  std::unordered_map<std::string, int> context_index;
  std::vector<CoocCell> cells;
  double total = 0.0;

  std::size_t rows() const { return words.size(); }
  std::size_t cols() const { return contexts.size(); }
  double value_at(int row, int col) const;  // 0 when absent
};

// Streaming event aggregation; shards merge commutatively. Contexts
// outside the top `context_limit` by marginal frequency (ties broken
// lexicographically ascending) are dropped at finalization, and column
// ids are assigned in that order.
class CoocCounter {
 public:
  void add(const ContextEvent& ev);
  void add(int target_id, std::string_view context);
  void merge(const CoocCounter& other);

  CoocMatrix finalize(const Vocabulary& vocab, std::size_t context_limit) const;

 private:
  std::unordered_map<std::string, std::unordered_map<int, std::uint64_t>> by_context_;
};

CoocMatrix count_cooccurrences(const std::vector<ContextEvent>& events, const Vocabulary& vocab,
                               std::size_t context_limit);

// Positive pointwise mutual information re-weighting (natural log).
// Cells that fall to zero are dropped. Requires counts.total > 0.
CoocMatrix ppmi_reweight(const CoocMatrix& counts);

// Text dump: header `rows cols nnz`, then `row col value` triples.
void write_cooc_text(std::ostream& out, const CoocMatrix& m);
// Binary dump: little-endian int64 header {rows, cols, nnz}, then
// {int64 row, int64 col, double value} triples.
void write_cooc_binary(std::ostream& out, const CoocMatrix& m);

struct CoocTriples {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<CoocCell> cells;
};
CoocTriples read_cooc_text(std::istream& in);
CoocTriples read_cooc_binary(std::istream& in);

}  // namespace crosshyp
