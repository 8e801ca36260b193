#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lieopt/matrix.hpp"

namespace lieopt {

class IdxError : public DataError {
 public:
  enum class Kind { BadMagic, TruncatedPayload, DimensionOverflow };
  IdxError(Kind kind, std::size_t offset, const std::string& what);
  Kind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

class BadShape : public DataError {
 public:
  using DataError::DataError;
};
class EmptyClass : public DataError {
 public:
  using DataError::DataError;
};
class ZeroMatrix : public DataError {
 public:
  using DataError::DataError;
};
class IoError : public DataError {
 public:
  using DataError::DataError;
};

struct IdxImages {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint8_t> pixels;  // count × rows × cols, row-major

  std::size_t count() const { return rows * cols == 0 ? 0 : pixels.size() / (rows * cols); }
  std::span<const std::uint8_t> image(std::size_t k) const {
    return std::span<const std::uint8_t>(pixels).subspan(k * rows * cols, rows * cols);
  }
};

struct IdxLabels {
  std::vector<std::uint8_t> labels;
};

using IdxData = std::variant<IdxImages, IdxLabels>;

// Big-endian IDX container: magic 0x00000803 (u8 images) or 0x00000801 (u8 labels).
IdxData parse_idx(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_idx(const IdxData& data);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);

/// Drops `crop` pixels from each side of a 28×28 image, flattens row-major and
/// scales to [0, 1].
std::vector<double> crop_margins(std::span<const std::uint8_t> image, int crop = 4);

struct LabeledVectors {
  Matrix data;              // dim × count, one item per column
  std::vector<int> labels;  // class id per column, in [0, classes)
  int classes = 0;
};

struct ScatterPair {
  SymMatrix a;  // between-class
  SymMatrix b;  // within-class
};

ScatterPair scatter_matrices(const LabeledVectors& data);
ScatterPair normalize_pair(const ScatterPair& pair);
/// Rewrites A so the top two generalized eigenvalues of (A, B) coincide.
ScatterPair remove_eigengap(const ScatterPair& pair);

LabeledVectors mnist_vectors(const IdxImages& images, const IdxLabels& labels, int crop = 4);

// (Ξ + Ξᵀ)/2/√n
SymMatrix gen_goe(Index n, std::uint64_t seed);
// -ΞΞᵀ/2
SymMatrix gen_negative_wishart(Index n, std::uint64_t seed);

/// Binary pair cache: "LOPT", u32 version, u32 n, then A and B as
/// little-endian f64, row-major.
void write_pair_blob(const std::filesystem::path& path, const ScatterPair& pair);
ScatterPair read_pair_blob(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_pair_blob(const ScatterPair& pair);
ScatterPair decode_pair_blob(std::span<const std::uint8_t> bytes);

/// Plain-text matrix: first token n, then n² whitespace-separated entries.
SymMatrix read_text_matrix(const std::filesystem::path& path);
void write_text_matrix(const std::filesystem::path& path, const SymMatrix& m);

/// Loads A (which = 0) or B (which = 1) from either a pair blob or a text file.
SymMatrix load_matrix(const std::filesystem::path& path, int which);

}  // namespace lieopt
