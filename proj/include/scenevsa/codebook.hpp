#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "scenevsa/hypervector.hpp"

namespace scenevsa {

/// Attribute classes of a scene object, in codebook order.
enum class Attribute { color = 0, digit = 1, ypos = 2, xpos = 3 };

inline constexpr std::array<Attribute, 4> kAttributes{Attribute::color, Attribute::digit,
                                                      Attribute::ypos, Attribute::xpos};
inline constexpr int kNumAttributes = 4;

std::string_view to_string(Attribute a);
Attribute attribute_from_string(std::string_view name);

/// K random bipolar codewords of dimension N for one attribute class, stored
/// as the columns of an N x K matrix. Immutable after construction.
class Codebook {
 public:
  /// Draws K i.i.d. uniform bipolar codewords from a stream seeded with `seed`.
  /// Duplicate codewords are redrawn. Throws std::invalid_argument if K < 2,
  /// N < 1, or K exceeds the 2^N distinct bipolar vectors of dimension N.
  static Codebook generate(Attribute label, int size, int dim, std::uint64_t seed);

  /// Wraps explicit codewords (columns). Validates bipolarity, K >= 2 and
  /// pairwise distinctness.
  Codebook(Attribute label, std::uint64_t seed, Eigen::MatrixXi codewords);

  Attribute label() const { return label_; }
  std::uint64_t seed() const { return seed_; }
  int size() const { return static_cast<int>(codewords_.cols()); }
  int dim() const { return static_cast<int>(codewords_.rows()); }

  const Eigen::MatrixXi& codewords() const { return codewords_; }
  /// Same codewords as doubles, for projections of real-valued vectors.
  const Eigen::MatrixXd& codewords_real() const { return real_; }
  Hypervector codeword(int k) const;

  friend bool operator==(const Codebook& a, const Codebook& b) {
    return a.label_ == b.label_ && a.seed_ == b.seed_ && a.codewords_ == b.codewords_;
  }

 private:
  Attribute label_;
  std::uint64_t seed_;
  Eigen::MatrixXi codewords_;
  Eigen::MatrixXd real_;
};

/// Cb^T v: one dot product per codeword.
template <typename Derived>
RealVector codeword_scores(const Codebook& cb, const Eigen::MatrixBase<Derived>& v) {
  if (v.size() != cb.dim()) {
    throw std::invalid_argument("codeword_scores: dimension mismatch");
  }
  return cb.codewords_real().transpose() * v.template cast<double>();
}

/// f(Cb Cb^T v) computed as Cb (Cb^T v); the N x N product is never formed.
template <typename Derived>
RealVector cleanup(const Codebook& cb, const Eigen::MatrixBase<Derived>& v, Activation f) {
  if (v.size() != cb.dim()) throw std::invalid_argument("cleanup: dimension mismatch");
  const RealVector weights = codeword_scores(cb, v);
  return activate(cb.codewords_real() * weights, f);
}

/// Cleanup with the default sign activation; always bipolar.
template <typename Derived>
Hypervector cleanup(const Codebook& cb, const Eigen::MatrixBase<Derived>& v) {
  if (v.size() != cb.dim()) throw std::invalid_argument("cleanup: dimension mismatch");
  const RealVector weights = codeword_scores(cb, v);
  return sign(cb.codewords_real() * weights);
}

/// Index of the codeword with the largest dot product against v; ties go to
/// the lowest index.
template <typename Derived>
int argmax_readout(const Codebook& cb, const Eigen::MatrixBase<Derived>& v) {
  if (v.size() != cb.dim()) throw std::invalid_argument("argmax_readout: dimension mismatch");
  const RealVector scores = codeword_scores(cb, v);
  int best = 0;
  for (int k = 1; k < scores.size(); ++k) {
    if (scores[k] > scores[best]) best = k;
  }
  return best;
}

/// Largest |cosine| over all codeword pairs.
double max_pairwise_similarity(const Codebook& cb);

// JSON form: {"label","size","dim","seed","codewords":[[+-1,...],...]}
std::string codebook_to_json(const Codebook& cb);
Codebook codebook_from_json(std::string_view text);
void save_codebook(const Codebook& cb, const std::string& path);
Codebook load_codebook(const std::string& path);

}  // namespace scenevsa
