#include "crosshyp/cooc.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "crosshyp/io_util.hpp"

namespace crosshyp {

double CoocMatrix::value_at(int row, int col) const {
  auto it = std::lower_bound(cells.begin(), cells.end(), std::pair(row, col),
                             [](const CoocCell& c, const std::pair<int, int>& key) {
                               return std::pair(c.row, c.col) < key;
                             });
  if (it != cells.end() && it->row == row && it->col == col) return it->value;
  return 0.0;
}

void CoocCounter::add(const ContextEvent& ev) { add(ev.target_id, ev.context); }

void CoocCounter::add(int target_id, std::string_view context) {
  if (target_id < 0) throw std::invalid_argument("event target is out of vocabulary");
  by_context_[std::string(context)][target_id]++;
}

void CoocCounter::merge(const CoocCounter& other) {
  for (const auto& [ctx, rows] : other.by_context_) {
    auto& mine = by_context_[ctx];
    for (const auto& [row, count] : rows) mine[row] += count;
  }
}

CoocMatrix CoocCounter::finalize(const Vocabulary& vocab, std::size_t context_limit) const {
  if (context_limit == 0) throw std::invalid_argument("context_limit must be >= 1");

  struct Marginal {
    const std::string* context;
    std::uint64_t freq;
  };
  std::vector<Marginal> marginals;
  marginals.reserve(by_context_.size());
  for (const auto& [ctx, rows] : by_context_) {
    std::uint64_t sum = 0;
    for (const auto& [row, count] : rows) sum += count;
    marginals.push_back({&ctx, sum});
  }
  std::sort(marginals.begin(), marginals.end(), [](const Marginal& a, const Marginal& b) {
    if (a.freq != b.freq) return a.freq > b.freq;
    return *a.context < *b.context;
  });
  if (marginals.size() > context_limit) marginals.resize(context_limit);

  CoocMatrix m;
  m.words = vocab;
  m.contexts.reserve(marginals.size());
  for (const Marginal& mg : marginals) {
    m.context_index.emplace(*mg.context, static_cast<int>(m.contexts.size()));
    m.contexts.push_back(*mg.context);
  }
  for (const auto& [ctx, rows] : by_context_) {
    auto it = m.context_index.find(ctx);
    if (it == m.context_index.end()) continue;
    for (const auto& [row, count] : rows) {
      if (row >= static_cast<int>(vocab.size()))
        throw std::out_of_range("event row exceeds vocabulary size");
      m.cells.push_back({row, it->second, static_cast<double>(count)});
      m.total += static_cast<double>(count);
    }
  }
  std::sort(m.cells.begin(), m.cells.end(), [](const CoocCell& a, const CoocCell& b) {
    return std::pair(a.row, a.col) < std::pair(b.row, b.col);
  });
  return m;
}

CoocMatrix count_cooccurrences(const std::vector<ContextEvent>& events, const Vocabulary& vocab,
                               std::size_t context_limit) {
  CoocCounter counter;
  for (const ContextEvent& ev : events) counter.add(ev);
  return counter.finalize(vocab, context_limit);
}

CoocMatrix ppmi_reweight(const CoocMatrix& counts) {
  if (!(counts.total > 0.0)) throw std::runtime_error("ppmi_reweight: matrix total is zero");

  std::vector<double> row_sum(counts.rows(), 0.0);
  std::vector<double> col_sum(counts.cols(), 0.0);
  for (const CoocCell& c : counts.cells) {
    row_sum[static_cast<std::size_t>(c.row)] += c.value;
    col_sum[static_cast<std::size_t>(c.col)] += c.value;
  }

  CoocMatrix out;
  out.words = counts.words;
  out.contexts = counts.contexts;
  out.context_index = counts.context_index;
  out.cells.reserve(counts.cells.size());
  for (const CoocCell& c : counts.cells) {
    double denom = row_sum[static_cast<std::size_t>(c.row)] * col_sum[static_cast<std::size_t>(c.col)];
    if (denom <= 0.0) continue;
    double pmi = std::log(c.value * counts.total / denom);
    if (pmi > 0.0) {
      out.cells.push_back({c.row, c.col, pmi});
      out.total += pmi;
    }
  }
  return out;
}

void write_cooc_text(std::ostream& out, const CoocMatrix& m) {
  out << m.rows() << ' ' << m.cols() << ' ' << m.cells.size() << '\n';
  for (const CoocCell& c : m.cells)
    out << c.row << ' ' << c.col << ' ' << fmt_double(c.value) << '\n';
}

namespace {

template <typename T>
void put_le(std::ostream& out, T v) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char buf[sizeof(T)];
  in.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (!in) throw std::runtime_error("truncated binary matrix");
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace

void write_cooc_binary(std::ostream& out, const CoocMatrix& m) {
  put_le<std::int64_t>(out, static_cast<std::int64_t>(m.rows()));
  put_le<std::int64_t>(out, static_cast<std::int64_t>(m.cols()));
  put_le<std::int64_t>(out, static_cast<std::int64_t>(m.cells.size()));
  for (const CoocCell& c : m.cells) {
    put_le<std::int64_t>(out, c.row);
    put_le<std::int64_t>(out, c.col);
    put_le<double>(out, c.value);
  }
}

CoocTriples read_cooc_text(std::istream& in) {
  CoocTriples t;
  std::int64_t nnz = 0;
  if (!(in >> t.rows >> t.cols >> nnz)) throw std::runtime_error("bad matrix header");
  t.cells.reserve(static_cast<std::size_t>(nnz));
  for (std::int64_t i = 0; i < nnz; ++i) {
    std::int64_t r = 0, c = 0;
    double v = 0;
    if (!(in >> r >> c >> v)) throw std::runtime_error("truncated matrix dump");
    t.cells.push_back({static_cast<int>(r), static_cast<int>(c), v});
  }
  return t;
}

CoocTriples read_cooc_binary(std::istream& in) {
  CoocTriples t;
  t.rows = get_le<std::int64_t>(in);
  t.cols = get_le<std::int64_t>(in);
  std::int64_t nnz = get_le<std::int64_t>(in);
  t.cells.reserve(static_cast<std::size_t>(nnz));
  for (std::int64_t i = 0; i < nnz; ++i) {
    std::int64_t r = get_le<std::int64_t>(in);
    std::int64_t c = get_le<std::int64_t>(in);
    double v = get_le<double>(in);
    t.cells.push_back({static_cast<int>(r), static_cast<int>(c), v});
  }
  return t;
}

}  // namespace crosshyp
