#include "csgrad/sensing.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace csgrad {

namespace {

// Row r of the orthonormal DCT-II matrix at dimension d, dotted with the
// first `len` coordinates of u (the rest are the zero padding).
double dct_row_dot(std::size_t r, std::size_t d, const double* u,
                   std::size_t len) {
  const double row_norm = std::sqrt(2.0 / static_cast<double>(d));
  const double amp = (r == 0) ? row_norm / std::numbers::sqrt2 : row_norm;
  const double step = std::numbers::pi * static_cast<double>(r) /
                      (2.0 * static_cast<double>(d));
  double s = 0.0;
  for (std::size_t c = 0; c < len; ++c)
    s += u[c] * std::cos(step * (2.0 * static_cast<double>(c) + 1.0));
  return amp * s;
}

}  // namespace

SensingMatrix generate_sensing_matrix(BaseTransformKind base, std::size_t d,
                                      std::size_t q, std::uint64_t seed) {
  if (d == 0)
    throw std::invalid_argument("generate_sensing_matrix: d must be positive");
  const std::size_t d_aug = pow2_ceil(d);
  if (q == 0 || q > d_aug)
    throw std::invalid_argument(
        "generate_sensing_matrix: Q must be in [1, d_aug]");
  if (base == BaseTransformKind::Dct && d_aug > 4096)
    throw std::length_error(
        "generate_sensing_matrix: DCT base is reference-only (d_aug <= 4096)");

  SensingMatrix phi;
  phi.base = base;
  phi.dim = static_cast<std::uint32_t>(d);
  phi.dim_aug = static_cast<std::uint32_t>(d_aug);
  phi.seed = seed;
  rng::Stream stream(rng::fold(seed, rng::kTagMatrix));
  phi.rows = rng::sample_without_replacement(d_aug, q, stream);
  phi.scale = std::sqrt(static_cast<double>(d_aug) / static_cast<double>(q));
  return phi;
}

Measurement SensingMatrix::apply(const DenseSignal& u) const {
  if (u.size() != dim)
    throw std::invalid_argument("apply: signal dimension mismatch");
  const std::size_t q = measurements();
  Measurement out(q);
  if (base == BaseTransformKind::Wht) {
    DenseSignal padded(dim_aug, 0.0);
    std::copy(u.begin(), u.end(), padded.begin());
    const DenseSignal t = fwht(std::move(padded));
    for (std::size_t i = 0; i < q; ++i) out[i] = scale * t[rows[i]];
  } else {
    for (std::size_t i = 0; i < q; ++i)
      out[i] = scale * dct_row_dot(rows[i], dim_aug, u.data(), u.size());
  }
  return out;
}

DenseSignal SensingMatrix::adjoint(const Measurement& v) const {
  if (v.size() != measurements())
    throw std::invalid_argument("adjoint: measurement dimension mismatch");
  DenseSignal out(dim, 0.0);
  if (base == BaseTransformKind::Wht) {
    DenseSignal scattered(dim_aug, 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) scattered[rows[i]] = v[i];
    const DenseSignal t = fwht(std::move(scattered));
    for (std::size_t c = 0; c < dim; ++c) out[c] = scale * t[c];
  } else {
    const std::size_t d = dim_aug;
    const double row_norm = std::sqrt(2.0 / static_cast<double>(d));
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::size_t r = rows[i];
      const double amp = (r == 0) ? row_norm / std::numbers::sqrt2 : row_norm;
      const double coeff = scale * amp * v[i];
      const double step = std::numbers::pi * static_cast<double>(r) /
                          (2.0 * static_cast<double>(d));
      for (std::size_t c = 0; c < dim; ++c)
        out[c] += coeff * std::cos(step * (2.0 * static_cast<double>(c) + 1.0));
    }
  }
  return out;
}

namespace {

void put_u16(std::vector<std::uint8_t>& b, std::uint16_t v) {
  b.push_back(static_cast<std::uint8_t>(v & 0xff));
  b.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8)
    b.push_back(static_cast<std::uint8_t>((v >> shift) & 0xff));
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i)
    v = (v << 8) | b[at + static_cast<std::size_t>(i)];
  return v;
}

constexpr std::uint16_t kFormatVersion = 1;

}  // namespace

std::vector<std::uint8_t> serialize(const SensingMatrix& phi) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(16 + 4 * phi.rows.size());
  bytes.push_back(static_cast<std::uint8_t>(phi.base));
  bytes.push_back(0);  // reserved
  put_u16(bytes, kFormatVersion);
  put_u32(bytes, phi.dim);
  put_u32(bytes, static_cast<std::uint32_t>(phi.rows.size()));
  put_u32(bytes, static_cast<std::uint32_t>(phi.seed & 0xffffffffull));
  for (std::uint32_t r : phi.rows) put_u32(bytes, r);
  return bytes;
}

SensingMatrix deserialize(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 16)
    throw std::runtime_error("deserialize: payload shorter than header");
  const std::uint8_t kind = bytes[0];
  if (kind > 1) throw std::runtime_error("deserialize: unknown base kind");
  const std::uint16_t version =
      static_cast<std::uint16_t>(bytes[2] | (bytes[3] << 8));
  if (version != kFormatVersion)
    throw std::runtime_error("deserialize: unsupported format version");
  const std::uint32_t d = get_u32(bytes, 4);
  const std::uint32_t q = get_u32(bytes, 8);
  const std::uint32_t seed_low = get_u32(bytes, 12);
  if (d == 0) throw std::runtime_error("deserialize: d must be positive");
  const std::size_t d_aug = pow2_ceil(d);
  if (q == 0 || q > d_aug)
    throw std::runtime_error("deserialize: Q out of range");
  if (bytes.size() != 16 + 4 * static_cast<std::size_t>(q))
    throw std::runtime_error("deserialize: payload length mismatch");

  SensingMatrix phi;
  phi.base = static_cast<BaseTransformKind>(kind);
  phi.dim = d;
  phi.dim_aug = static_cast<std::uint32_t>(d_aug);
  phi.seed = seed_low;
  phi.rows.resize(q);
  for (std::size_t i = 0; i < q; ++i) {
    const std::uint32_t r = get_u32(bytes, 16 + 4 * i);
    if (r >= d_aug)
      throw std::runtime_error("deserialize: row index out of range");
    if (i > 0 && r <= phi.rows[i - 1])
      throw std::runtime_error("deserialize: rows not strictly ascending");
    phi.rows[i] = r;
  }
  phi.scale = std::sqrt(static_cast<double>(d_aug) / static_cast<double>(q));
  return phi;
}

}  // namespace csgrad
