#include "scenevsa/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "scenevsa/seeding.hpp"

namespace scenevsa {

int ObjectSpec::operator[](Attribute a) const {
  switch (a) {
    case Attribute::color: return color;
    case Attribute::digit: return digit;
    case Attribute::ypos: return ypos;
    case Attribute::xpos: return xpos;
  }
  return -1;
}

void validate(const ObjectSpec& obj, const AttributeSizes& sizes) {
  for (Attribute a : kAttributes) {
    const int idx = obj[a];
    const int k = sizes[static_cast<int>(a)];
    if (idx < 0 || idx >= k) {
      throw std::invalid_argument(std::string(to_string(a)) + " index " + std::to_string(idx) +
                                  " out of range [0, " + std::to_string(k) + ")");
    }
  }
}

void validate(const SceneDescription& scene, const AttributeSizes& sizes) {
  if (scene.objects.empty()) throw std::invalid_argument("scene has no objects");
  std::set<std::pair<int, int>> cells;
  for (const ObjectSpec& obj : scene.objects) {
    validate(obj, sizes);
    if (!cells.emplace(obj.ypos, obj.xpos).second) {
      throw std::invalid_argument("two objects share location cell (" + std::to_string(obj.ypos) +
                                  ", " + std::to_string(obj.xpos) + ")");
    }
  }
}

CodebookSet CodebookSet::generate(int dim, const AttributeSizes& sizes, std::uint64_t seed) {
  auto make = [&](Attribute a) {
    const auto key = static_cast<std::uint64_t>(a);
    return Codebook::generate(a, sizes[key], dim, derive_seed(seed, {0xc0deb00cULL, key}));
  };
  return CodebookSet({make(Attribute::color), make(Attribute::digit), make(Attribute::ypos),
                      make(Attribute::xpos)});
}

CodebookSet::CodebookSet(std::array<Codebook, kNumAttributes> books) : books_(std::move(books)) {
  for (Attribute a : kAttributes) {
    const Codebook& cb = books_[static_cast<int>(a)];
    if (cb.label() != a) throw std::invalid_argument("CodebookSet: codebooks out of attribute order");
    if (cb.dim() != books_[0].dim()) throw std::invalid_argument("CodebookSet: codebooks differ in N");
  }
}

AttributeSizes CodebookSet::sizes() const {
  AttributeSizes s{};
  for (int i = 0; i < kNumAttributes; ++i) s[i] = books_[i].size();
  return s;
}

Hypervector encode_object(const CodebookSet& cbs, const ObjectSpec& obj) {
  validate(obj, cbs.sizes());
  Hypervector v = cbs[Attribute::color].codewords().col(obj.color);
  for (Attribute a : {Attribute::digit, Attribute::ypos, Attribute::xpos}) {
    v = v.cwiseProduct(cbs[a].codewords().col(obj[a]));
  }
  return v;
}

Hypervector encode_scene(const CodebookSet& cbs, const SceneDescription& scene) {
  if (scene.objects.empty()) throw std::invalid_argument("encode_scene: scene has no objects");
  Hypervector s = Hypervector::Zero(cbs.dim());
  for (const ObjectSpec& obj : scene.objects) s += encode_object(cbs, obj);
  return s;
}

SceneDescription random_scene(int num_objects, Rng& rng, const AttributeSizes& sizes) {
  const int rows = sizes[static_cast<int>(Attribute::ypos)];
  const int cols = sizes[static_cast<int>(Attribute::xpos)];
  const int cells = rows * cols;
  if (num_objects < 1 || num_objects > cells) {
    throw std::invalid_argument("random_scene: object count " + std::to_string(num_objects) +
                                " outside [1, " + std::to_string(cells) + "]");
  }
  // Partial Fisher-Yates over the cell indices.
  std::vector<int> cell(cells);
  std::iota(cell.begin(), cell.end(), 0);
  SceneDescription scene;
  scene.objects.reserve(num_objects);
  std::uniform_int_distribution<int> color(0, sizes[0] - 1);
  std::uniform_int_distribution<int> digit(0, sizes[1] - 1);
  for (int i = 0; i < num_objects; ++i) {
    std::uniform_int_distribution<int> pick(i, cells - 1);
    std::swap(cell[i], cell[pick(rng)]);
    ObjectSpec obj;
    obj.color = color(rng);
    obj.digit = digit(rng);
    obj.ypos = cell[i] / cols;
    obj.xpos = cell[i] % cols;
    scene.objects.push_back(obj);
  }
  return scene;
}

double noise_sigma(double squared_norm, int dim, double target) {
  if (!(target > 0.0 && target <= 1.0)) {
    throw std::invalid_argument("noise_sigma: target similarity must be in (0, 1]");
  }
  if (dim < 1) throw std::invalid_argument("noise_sigma: dim must be >= 1");
  return std::sqrt(squared_norm / dim * (1.0 / (target * target) - 1.0));
}

RealVector add_gaussian_noise(const RealVector& s, double sigma, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  RealVector out = s;
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] += sigma * gauss(rng);
  return out;
}

std::string scene_to_json(const SceneDescription& scene) {
  nlohmann::json objs = nlohmann::json::array();
  for (const ObjectSpec& o : scene.objects) {
    objs.push_back({{"color", o.color}, {"digit", o.digit}, {"ypos", o.ypos}, {"xpos", o.xpos}});
  }
  return nlohmann::json{{"objects", objs}}.dump();
}

SceneDescription scene_from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  SceneDescription scene;
  for (const auto& o : j.at("objects")) {
    scene.objects.push_back({o.at("color").get<int>(), o.at("digit").get<int>(),
                             o.at("ypos").get<int>(), o.at("xpos").get<int>()});
  }
  return scene;
}

}  // namespace scenevsa
