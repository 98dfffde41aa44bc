#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "scenevsa/codebook.hpp"
#include "scenevsa/hypervector.hpp"

namespace scenevsa {

/// Codebook sizes indexed by Attribute.
using AttributeSizes = std::array<int, kNumAttributes>;

/// 7 colors, 10 digits, 3 rows, 3 columns.
inline constexpr AttributeSizes kDefaultSizes{7, 10, 3, 3};

struct ObjectSpec {
  int color = 0;
  int digit = 0;
  int ypos = 0;
  int xpos = 0;

  int operator[](Attribute a) const;
  std::array<int, kNumAttributes> indices() const { return {color, digit, ypos, xpos}; }
  static ObjectSpec from_indices(const std::array<int, kNumAttributes>& idx) {
    return {idx[0], idx[1], idx[2], idx[3]};
  }

  friend auto operator<=>(const ObjectSpec&, const ObjectSpec&) = default;
};

struct SceneDescription {
  std::vector<ObjectSpec> objects;

  friend bool operator==(const SceneDescription&, const SceneDescription&) = default;
};

/// Throws std::invalid_argument if any index is outside its codebook range.
void validate(const ObjectSpec& obj, const AttributeSizes& sizes);
/// Object validation plus: at least one object, no two objects in one cell.
void validate(const SceneDescription& scene, const AttributeSizes& sizes);

/// The four codebooks (color, digit, ypos, xpos) over a shared dimension.
class CodebookSet {
 public:
  /// Codebook seeds are derived from `seed` per attribute class.
  static CodebookSet generate(int dim, const AttributeSizes& sizes, std::uint64_t seed);

  explicit CodebookSet(std::array<Codebook, kNumAttributes> books);

  const Codebook& operator[](Attribute a) const { return books_[static_cast<int>(a)]; }
  int dim() const { return books_[0].dim(); }
  AttributeSizes sizes() const;

 private:
  std::array<Codebook, kNumAttributes> books_;
};

/// Bind of the object's four codewords (bipolar).
Hypervector encode_object(const CodebookSet& cbs, const ObjectSpec& obj);

/// Sum of the per-object compound vectors; components lie in [-L, L].
Hypervector encode_scene(const CodebookSet& cbs, const SceneDescription& scene);

/// Uniform colors and digits; location cells drawn without replacement.
/// Throws if num_objects is not in [1, rows * cols].
SceneDescription random_scene(int num_objects, Rng& rng, const AttributeSizes& sizes = kDefaultSizes);

/// Per-component Gaussian std giving expected cosine `target` to a vector of
/// the given squared norm: target = 1 / sqrt(1 + N sigma^2 / |s|^2).
double noise_sigma(double squared_norm, int dim, double target);

/// s plus isotropic Gaussian noise calibrated so that the expected cosine to
/// s is `target_similarity`. Target 1 returns s unchanged. The stream is
/// advanced by N normal draws regardless of the target.
template <typename Derived>
RealVector noisy_scene_vector(const Eigen::MatrixBase<Derived>& s, double target_similarity, Rng& rng);

std::string scene_to_json(const SceneDescription& scene);
SceneDescription scene_from_json(std::string_view text);

// --- implementation ---

RealVector add_gaussian_noise(const RealVector& s, double sigma, Rng& rng);

template <typename Derived>
RealVector noisy_scene_vector(const Eigen::MatrixBase<Derived>& s, double target_similarity, Rng& rng) {
  if (!(target_similarity > 0.0 && target_similarity <= 1.0)) {
    throw std::invalid_argument("noisy_scene_vector: target similarity must be in (0, 1]");
  }
  RealVector sd = s.template cast<double>();
  const double sigma = noise_sigma(sd.squaredNorm(), static_cast<int>(sd.size()), target_similarity);
  return add_gaussian_noise(sd, sigma, rng);
}

}  // namespace scenevsa
