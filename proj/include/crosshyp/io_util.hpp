#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace crosshyp {

// FNV-1a, used for config hashes and file digests in stage manifests.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string fnv1a_hex(std::string_view bytes);
std::string file_digest(const std::filesystem::path& path);

std::vector<std::string_view> split_view(std::string_view s, char sep);
std::string to_lower(std::string_view s);

// Doubles are always printed with round-trip precision so that stage
// outputs are byte-reproducible.
std::string fmt_double(double v);
bool parse_double(std::string_view s, double& out);
bool parse_int64(std::string_view s, long long& out);

// Line-oriented reader over plain or gzip-compressed files (zlib reads
// uncompressed input transparently). Strips trailing '\n' and '\r'.
class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path);
  ~LineReader();
  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;

  bool next(std::string& line);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Writes through a temp file in the same directory, then renames. The
// callback receives the temp path; on exception the temp file is removed.
void atomic_write(const std::filesystem::path& path,
                  const std::function<void(std::ostream&)>& writer);

// Flat key=value files (one pair per line, '#' comments, keys unique).
std::map<std::string, std::string> read_kv_file(const std::filesystem::path& path);
std::map<std::string, std::string> parse_kv_text(std::string_view text);
void write_kv_file(const std::filesystem::path& path,
                   const std::map<std::string, std::string>& kv);

// Deterministic RNG helpers. mt19937_64 output is fully specified by the
// standard and the float conversions below avoid std::*_distribution,
// whose sequences vary across library implementations.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }
  // Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  // Uniform integer on [0, n) by rejection; n >= 1.
  std::uint64_t uniform_int(std::uint64_t n);
  // Standard normal via Box-Muller; one value per call, no cached spare.
  double normal();

 private:
  std::mt19937_64 eng_;
};

}  // namespace crosshyp
