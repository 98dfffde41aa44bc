#pragma once

// Bipolar hypervector algebra.
//
// Bipolar (+1/-1) and bundled vectors are held as signed integers so that
// binding, bundling and dot products are exact. Real-valued vectors appear
// only where noise or normalization enters; the free functions below accept
// any Eigen column-vector expression and are templated on its scalar.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

namespace scenevsa {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Bipolar or bundled hypervector with exact integer components.
using Hypervector = Vector<int>;
using RealVector = Vector<double>;

using Rng = std::mt19937_64;

/// Nonlinearity f applied after a codebook projection.
enum class Activation { sign, normalization };

namespace detail {

template <typename A, typename B>
void check_same_dim(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b,
                    const char* op) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
}

}  // namespace detail

/// Componentwise product. Self-inverse on bipolar operands.
template <typename A, typename B>
Vector<typename A::Scalar> bind(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  static_assert(std::is_same_v<typename A::Scalar, typename B::Scalar>,
                "bind operands must share a scalar type");
  detail::check_same_dim(a, b, "bind");
  return a.cwiseProduct(b);
}

/// Componentwise sum without any thresholding.
template <typename Scalar>
Vector<Scalar> bundle(const std::vector<Vector<Scalar>>& vs) {
  if (vs.empty()) throw std::invalid_argument("bundle: empty operand list");
  Vector<Scalar> sum = vs.front();
  for (std::size_t i = 1; i < vs.size(); ++i) {
    detail::check_same_dim(sum, vs[i], "bundle");
    sum += vs[i];
  }
  return sum;
}

template <typename A, typename B>
double dot(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  detail::check_same_dim(a, b, "dot");
  return a.template cast<double>().dot(b.template cast<double>());
}

/// Cosine similarity in [-1, 1]. Throws std::domain_error on a zero-norm operand.
template <typename A, typename B>
double cosine_similarity(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  detail::check_same_dim(a, b, "cosine_similarity");
  const auto ad = a.template cast<double>();
  const auto bd = b.template cast<double>();
  const double aa = ad.squaredNorm();
  const double bb = bd.squaredNorm();
  if (aa == 0.0 || bb == 0.0) {
    throw std::domain_error("cosine_similarity: zero-norm operand");
  }
  // sqrt(aa * bb) rather than norm() * norm() keeps cos(x, x) exactly 1 for
  // integer-valued x.
  const double c = ad.dot(bd) / std::sqrt(aa * bb);
  return std::clamp(c, -1.0, 1.0);
}

/// Sign with the zero tie-break mapped to +1; output is bipolar.
template <typename Derived>
Hypervector sign(const Eigen::MatrixBase<Derived>& v) {
  using S = typename Derived::Scalar;
  return (v.array() >= S(0)).select(Hypervector::Ones(v.size()), -Hypervector::Ones(v.size()));
}

/// Scales v to unit norm; a zero vector is returned unchanged.
template <typename Derived>
RealVector normalize(const Eigen::MatrixBase<Derived>& v) {
  RealVector r = v.template cast<double>();
  const double n = r.norm();
  if (n > 0.0) r /= n;
  return r;
}

template <typename Derived>
RealVector activate(const Eigen::MatrixBase<Derived>& v, Activation f) {
  if (f == Activation::sign) return sign(v).template cast<double>();
  return normalize(v);
}

template <typename Derived>
bool is_bipolar(const Eigen::MatrixBase<Derived>& v) {
  using S = typename Derived::Scalar;
  return ((v.array() == S(1)) || (v.array() == S(-1))).all();
}

/// I.i.d. uniform bipolar vector; draws one 64-bit word per 64 components.
inline Hypervector random_bipolar(int dim, Rng& rng) {
  if (dim < 1) throw std::invalid_argument("random_bipolar: dim must be >= 1");
  Hypervector v(dim);
  std::uint64_t bits = 0;
  for (int i = 0; i < dim; ++i) {
    if (i % 64 == 0) bits = rng();
    v[i] = (bits & 1u) ? 1 : -1;
    bits >>= 1;
  }
  return v;
}

}  // namespace scenevsa
