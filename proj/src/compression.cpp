#include "cmsgd/compression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace cmsgd {

namespace {

int ceil_log2(std::size_t d) {
  int bits = 0;
  std::size_t cap = 1;
  while (cap < d) {
    cap <<= 1;
    ++bits;
  }
  return bits;
}

void check_k(const Compressor& c, std::size_t d) {
  if (c.k < 1 || c.k > d)
    throw std::invalid_argument(c.name() + ": k must satisfy 1 <= k <= d");
}

double sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

std::optional<double> Compressor::omega_nominal(std::size_t d) const {
  const double dd = static_cast<double>(d);
  switch (kind) {
    case CompressorKind::identity:
      return 1.0;
    case CompressorKind::top_k:
      return std::min(1.0, static_cast<double>(k) / dd);
    case CompressorKind::rand_k: {
      if (!rand_k_unbiased) return std::min(1.0, static_cast<double>(k) / dd);
      // E||x - C(x)||^2 = (d/k - 1)||x||^2 for the scaled form.
      const double omega = 2.0 - dd / static_cast<double>(k);
      if (omega > 0.0) return omega;
      return std::nullopt;
    }
    case CompressorKind::norm_sign:
      // ||x - C(x)||^2 <= ||x||^2 - ||x||_1^2 / d <= (1 - 1/d)||x||^2.
      return 1.0 / dd;
    case CompressorKind::quant2bit: {
      // Per-coordinate rounding variance is at most 1/4 level^2, so the
      // relative error is bounded by d / (4 s^2) with s = 2^{k2-1}.
      const double s = std::ldexp(1.0, k2 - 1);
      const double omega = 1.0 - dd / (4.0 * s * s);
      if (omega > 0.0) return omega;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::string Compressor::name() const {
  switch (kind) {
    case CompressorKind::identity: return "identity";
    case CompressorKind::rand_k: return "rand_k";
    case CompressorKind::top_k: return "top_k";
    case CompressorKind::norm_sign: return "norm_sign";
    case CompressorKind::quant2bit: return "quant2bit";
  }
  return "unknown";
}

CompressorKind parse_compressor_kind(const std::string& name) {
  if (name == "identity") return CompressorKind::identity;
  if (name == "rand_k") return CompressorKind::rand_k;
  if (name == "top_k") return CompressorKind::top_k;
  if (name == "norm_sign") return CompressorKind::norm_sign;
  if (name == "quant2bit") return CompressorKind::quant2bit;
  throw std::invalid_argument("unknown compressor '" + name + "'");
}

std::int64_t bit_cost(const Compressor& c, std::size_t d) {
  const auto dd = static_cast<std::int64_t>(d);
  switch (c.kind) {
    case CompressorKind::identity:
      return 32 * dd;
    case CompressorKind::rand_k:
    case CompressorKind::top_k:
      return static_cast<std::int64_t>(c.k) * (32 + ceil_log2(d));
    case CompressorKind::norm_sign:
      return 32 + dd;
    case CompressorKind::quant2bit:
      return c.scalar_bits + dd * (c.k2 + 1);
  }
  return 0;
}

void compress_into(const Compressor& c, const Vector& x, Rng& rng, Vector& out) {
  const auto d = static_cast<std::size_t>(x.size());
  if (d == 0) throw std::invalid_argument("compress: empty vector");
  if (c.kind == CompressorKind::rand_k || c.kind == CompressorKind::top_k) check_k(c, d);
  out.resize(x.size());
  if ((x.array() == 0.0).all()) {
    out.setZero();
    return;
  }

  switch (c.kind) {
    case CompressorKind::identity:
      out = x;
      return;

    case CompressorKind::top_k: {
      std::vector<std::size_t> idx(d);
      std::iota(idx.begin(), idx.end(), 0);
      // Ties go to the lower index.
      std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(c.k), idx.end(),
                        [&](std::size_t a, std::size_t b) {
                          const double fa = std::abs(x(a)), fb = std::abs(x(b));
                          return fa > fb || (fa == fb && a < b);
                        });
      out.setZero();
      for (std::size_t i = 0; i < c.k; ++i) out(idx[i]) = x(idx[i]);
      return;
    }

    case CompressorKind::rand_k: {
      std::vector<std::size_t> idx(d);
      std::iota(idx.begin(), idx.end(), 0);
      for (std::size_t i = 0; i < c.k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, d - 1);
        std::swap(idx[i], idx[pick(rng)]);
      }
      const double scale =
          c.rand_k_unbiased ? static_cast<double>(d) / static_cast<double>(c.k) : 1.0;
      out.setZero();
      for (std::size_t i = 0; i < c.k; ++i) out(idx[i]) = scale * x(idx[i]);
      return;
    }

    case CompressorKind::norm_sign: {
      const double scale = x.lpNorm<1>() / static_cast<double>(d);
      for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = scale * sign(x(i));
      return;
    }

    case CompressorKind::quant2bit: {
      const double levels = std::ldexp(1.0, c.k2 - 1);
      const double inf_norm = x.lpNorm<Eigen::Infinity>();
      std::uniform_real_distribution<double> dither(0.0, 1.0);
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double u = dither(rng);
        const double level = std::floor(levels * std::abs(x(i)) / inf_norm + u);
        out(i) = inf_norm / levels * sign(x(i)) * level;
      }
      return;
    }
  }
}

CompressedMessage compress(const Compressor& c, const Vector& x, Rng& rng) {
  CompressedMessage msg;
  compress_into(c, x, rng, msg.payload);
  msg.bits = bit_cost(c, static_cast<std::size_t>(x.size()));
  return msg;
}

ContractionEstimate contraction_estimate(const Compressor& c, std::size_t d, std::size_t trials,
                                         Rng& rng) {
  if (trials < 1000) throw std::invalid_argument("contraction_estimate needs at least 1000 trials");
  std::normal_distribution<double> normal;
  Vector x(d), cx(d);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    for (std::size_t i = 0; i < d; ++i) x(i) = normal(rng);
    const double norm_sq = x.squaredNorm();
    if (norm_sq == 0.0) continue;
    compress_into(c, x, rng, cx);
    const double ratio = (x - cx).squaredNorm() / norm_sq;
    sum += ratio;
    sum_sq += ratio * ratio;
  }
  const double nt = static_cast<double>(trials);
  const double mean = sum / nt;
  const double var = std::max(0.0, (sum_sq - nt * mean * mean) / (nt - 1.0));
  return ContractionEstimate{1.0 - mean, std::sqrt(var / nt)};
}

}  // namespace cmsgd
