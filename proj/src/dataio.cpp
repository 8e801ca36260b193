#include "lieopt/dataio.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "lieopt/random.hpp"

namespace lieopt {

namespace {

std::string idx_message(IdxError::Kind kind, std::size_t offset, const std::string& detail) {
  const char* name = kind == IdxError::Kind::BadMagic           ? "BadMagic"
                     : kind == IdxError::Kind::TruncatedPayload ? "TruncatedPayload"
                                                                : "DimensionOverflow";
  return std::string(name) + " at byte " + std::to_string(offset) + ": " + detail;
}

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  if (bytes.size() < offset + 4) {
    throw IdxError(IdxError::Kind::TruncatedPayload, offset, "need 4 header bytes");
  }
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

}  // namespace

IdxError::IdxError(Kind kind, std::size_t offset, const std::string& what)
    : DataError(idx_message(kind, offset, what)), kind_(kind), offset_(offset) {}

IdxData parse_idx(std::span<const std::uint8_t> bytes) {
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != kImageMagic && magic != kLabelMagic) {
    std::ostringstream msg;
    msg << "unsupported magic 0x" << std::hex << magic;
    throw IdxError(IdxError::Kind::BadMagic, 0, msg.str());
  }
  const std::size_t ndims = magic & 0xFF;
  std::vector<std::uint32_t> dims;
  std::size_t total = 1;
  for (std::size_t d = 0; d < ndims; ++d) {
    const std::size_t offset = 4 + 4 * d;
    const std::uint32_t size = read_be32(bytes, offset);
    if (size != 0 && total > std::numeric_limits<std::size_t>::max() / size) {
      throw IdxError(IdxError::Kind::DimensionOverflow, offset, "element count overflows");
    }
    total *= size;
    dims.push_back(size);
  }
  const std::size_t header = 4 + 4 * ndims;
  if (bytes.size() - header < total) {
    throw IdxError(IdxError::Kind::TruncatedPayload, bytes.size(),
                   "payload needs " + std::to_string(total) + " bytes, found " +
                       std::to_string(bytes.size() - header));
  }
  const auto payload = bytes.subspan(header, total);
  if (magic == kLabelMagic) {
    return IdxLabels{std::vector<std::uint8_t>(payload.begin(), payload.end())};
  }
  IdxImages images;
  images.rows = dims[1];
  images.cols = dims[2];
  images.pixels.assign(payload.begin(), payload.end());
  return images;
}

std::vector<std::uint8_t> encode_idx(const IdxData& data) {
  std::vector<std::uint8_t> out;
  if (const auto* labels = std::get_if<IdxLabels>(&data)) {
    write_be32(out, kLabelMagic);
    write_be32(out, static_cast<std::uint32_t>(labels->labels.size()));
    out.insert(out.end(), labels->labels.begin(), labels->labels.end());
    return out;
  }
  const auto& images = std::get<IdxImages>(data);
  write_be32(out, kImageMagic);
  write_be32(out, static_cast<std::uint32_t>(images.count()));
  write_be32(out, images.rows);
  write_be32(out, images.cols);
  out.insert(out.end(), images.pixels.begin(), images.pixels.end());
  return out;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

std::vector<double> crop_margins(std::span<const std::uint8_t> image, int crop) {
  constexpr int side = 28;
  if (image.size() != side * side) {
    throw BadShape("crop_margins: expected 784 pixels, got " + std::to_string(image.size()));
  }
  if (crop < 0 || 2 * crop >= side) throw BadShape("crop_margins: crop " + std::to_string(crop));
  const int kept = side - 2 * crop;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(kept * kept));
  for (int row = crop; row < side - crop; ++row)
    for (int col = crop; col < side - crop; ++col)
      out.push_back(image[static_cast<std::size_t>(row * side + col)] / 255.0);
  return out;
}

ScatterPair scatter_matrices(const LabeledVectors& data) {
  const Index dim = data.data.rows();
  const Index count = data.data.cols();
  if (data.classes < 2) throw EmptyClass("scatter_matrices: need at least two classes");
  if (static_cast<Index>(data.labels.size()) != count) {
    throw DimensionMismatch("scatter_matrices: label count differs from item count");
  }

  Matrix means = Matrix::Zero(dim, data.classes);
  std::vector<Index> sizes(static_cast<std::size_t>(data.classes), 0);
  for (Index i = 0; i < count; ++i) {
    const int m = data.labels[static_cast<std::size_t>(i)];
    if (m < 0 || m >= data.classes) throw DataError("scatter_matrices: label out of range");
    means.col(m) += data.data.col(i);
    ++sizes[static_cast<std::size_t>(m)];
  }
  for (int m = 0; m < data.classes; ++m) {
    if (sizes[static_cast<std::size_t>(m)] == 0) {
      throw EmptyClass("scatter_matrices: class " + std::to_string(m) + " is empty");
    }
    means.col(m) /= static_cast<double>(sizes[static_cast<std::size_t>(m)]);
  }
  const Vector grand = data.data.rowwise().sum() / static_cast<double>(count);

  const Matrix between = means.colwise() - grand;
  Matrix centered = data.data;
  for (Index i = 0; i < count; ++i) centered.col(i) -= means.col(data.labels[static_cast<std::size_t>(i)]);

  return {SymMatrix(Matrix(between * between.transpose())),
          SymMatrix(Matrix(centered * centered.transpose()))};
}

ScatterPair normalize_pair(const ScatterPair& pair) {
  const double na = spectral_norm(pair.a);
  const double nb = spectral_norm(pair.b);
  if (na == 0.0) throw ZeroMatrix("normalize_pair: A is zero");
  if (nb == 0.0) throw ZeroMatrix("normalize_pair: B is zero");
  return {pair.a.scaled(1.0 / na), pair.b.scaled(1.0 / nb)};
}

ScatterPair remove_eigengap(const ScatterPair& pair) {
  const Index n = pair.a.size();
  if (n < 2) throw DimensionMismatch("remove_eigengap: need n >= 2");
  const CholeskyFactor chol = cholesky(pair.b);
  const Matrix& l = chol.upper;
  Matrix reduced = chol.solve_upper_transposed(pair.a.mat());
  reduced = chol.solve_upper_transposed(Matrix(reduced.transpose())).transpose();
  const EigenDecomposition eig = jacobi_eigh(SymMatrix(reduced));
  Vector d(n);
  for (Index k = 0; k < n; ++k) d(k) = eig.values[static_cast<std::size_t>(k)];
  d(0) = d(1);
  const Matrix lv = l.transpose() * eig.vectors;
  return {SymMatrix(Matrix(lv * d.asDiagonal() * lv.transpose())), pair.b};
}

LabeledVectors mnist_vectors(const IdxImages& images, const IdxLabels& labels, int crop) {
  if (images.rows != 28 || images.cols != 28) throw BadShape("mnist_vectors: images must be 28x28");
  const std::size_t count = images.count();
  if (labels.labels.size() != count) throw DataError("mnist_vectors: image/label count mismatch");
  const int kept = 28 - 2 * crop;
  LabeledVectors out;
  out.data.resize(kept * kept, static_cast<Index>(count));
  out.labels.resize(count);
  int max_label = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const auto v = crop_margins(images.image(k), crop);
    out.data.col(static_cast<Index>(k)) = Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
    out.labels[k] = labels.labels[k];
    max_label = std::max(max_label, out.labels[k]);
  }
  out.classes = max_label + 1;
  return out;
}

SymMatrix gen_goe(Index n, std::uint64_t seed) {
  CounterRng rng(seed);
  Matrix xi(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) xi(i, j) = rng.normal();
  return SymMatrix(Matrix((xi + xi.transpose()) / 2.0 / std::sqrt(static_cast<double>(n))));
}

SymMatrix gen_negative_wishart(Index n, std::uint64_t seed) {
  CounterRng rng(seed);
  Matrix xi(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) xi(i, j) = rng.normal();
  return SymMatrix(Matrix(-(xi * xi.transpose()) / 2.0));
}

namespace {

constexpr std::uint32_t kBlobVersion = 1;

void put_le32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

void put_le64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int k = 0; k < 8; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

std::uint64_t get_le(std::span<const std::uint8_t> bytes, std::size_t offset, int width) {
  std::uint64_t v = 0;
  for (int k = 0; k < width; ++k) v |= std::uint64_t{bytes[offset + static_cast<std::size_t>(k)]} << (8 * k);
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_pair_blob(const ScatterPair& pair) {
  const Index n = pair.a.size();
  if (pair.b.size() != n) throw DimensionMismatch("encode_pair_blob: A and B differ in size");
  std::vector<std::uint8_t> out = {'L', 'O', 'P', 'T'};
  put_le32(out, kBlobVersion);
  put_le32(out, static_cast<std::uint32_t>(n));
  for (const SymMatrix* m : {&pair.a, &pair.b})
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) put_le64(out, std::bit_cast<std::uint64_t>((*m)(i, j)));
  return out;
}

ScatterPair decode_pair_blob(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "LOPT", 4) != 0) {
    throw DataError("pair blob: missing LOPT header");
  }
  const auto version = static_cast<std::uint32_t>(get_le(bytes, 4, 4));
  if (version != kBlobVersion) throw DataError("pair blob: unsupported version " + std::to_string(version));
  const auto n = static_cast<Index>(get_le(bytes, 8, 4));
  const std::size_t need = 12 + 2 * 8 * static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  if (bytes.size() != need) {
    throw DataError("pair blob: expected " + std::to_string(need) + " bytes, found " +
                    std::to_string(bytes.size()));
  }
  std::size_t offset = 12;
  auto read_matrix = [&]() {
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j, offset += 8) m(i, j) = std::bit_cast<double>(get_le(bytes, offset, 8));
    return SymMatrix(m);
  };
  SymMatrix a = read_matrix();
  SymMatrix b = read_matrix();
  return {std::move(a), std::move(b)};
}

void write_pair_blob(const std::filesystem::path& path, const ScatterPair& pair) {
  const auto bytes = encode_pair_blob(pair);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

ScatterPair read_pair_blob(const std::filesystem::path& path) { return decode_pair_blob(read_bytes(path)); }

SymMatrix read_text_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  long long n = 0;
  if (!(in >> n) || n < 1) throw DataError(path.string() + ": bad dimension header");
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (!(in >> m(i, j))) throw DataError(path.string() + ": expected " + std::to_string(n * n) + " entries");
  if (!m.allFinite()) throw DataError(path.string() + ": non-finite entry");
  return SymMatrix(m);
}

void write_text_matrix(const std::filesystem::path& path, const SymMatrix& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(17);
  out << m.size() << '\n';
  for (Index i = 0; i < m.size(); ++i) {
    for (Index j = 0; j < m.size(); ++j) out << (j ? " " : "") << m(i, j);
    out << '\n';
  }
}

SymMatrix load_matrix(const std::filesystem::path& path, int which) {
  const auto bytes = read_bytes(path);
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), "LOPT", 4) == 0) {
    ScatterPair pair = decode_pair_blob(bytes);
    return which == 0 ? std::move(pair.a) : std::move(pair.b);
  }
  return read_text_matrix(path);
}

}  // namespace lieopt
