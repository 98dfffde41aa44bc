#include "scenevsa/codebook.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace scenevsa {

namespace {

bool column_repeats_earlier(const Eigen::MatrixXi& m, int col) {
  for (int j = 0; j < col; ++j) {
    if (m.col(j) == m.col(col)) return true;
  }
  return false;
}

}  // namespace

std::string_view to_string(Attribute a) {
  switch (a) {
    case Attribute::color: return "color";
    case Attribute::digit: return "digit";
    case Attribute::ypos: return "ypos";
    case Attribute::xpos: return "xpos";
  }
  return "unknown";
}

Attribute attribute_from_string(std::string_view name) {
  for (Attribute a : kAttributes) {
    if (to_string(a) == name) return a;
  }
  throw std::invalid_argument("unknown attribute class '" + std::string(name) + "'");
}

Codebook Codebook::generate(Attribute label, int size, int dim, std::uint64_t seed) {
  if (size < 2) throw std::invalid_argument("generate_codebook: K must be >= 2");
  if (dim < 1) throw std::invalid_argument("generate_codebook: N must be >= 1");
  if (dim < 63 && static_cast<std::uint64_t>(size) > (std::uint64_t{1} << dim)) {
    throw std::invalid_argument("generate_codebook: K exceeds the number of distinct bipolar vectors");
  }
  Rng rng(seed);
  Eigen::MatrixXi words(dim, size);
  for (int k = 0; k < size; ++k) {
    do {
      words.col(k) = random_bipolar(dim, rng);
    } while (column_repeats_earlier(words, k));
  }
  return Codebook(label, seed, std::move(words));
}

Codebook::Codebook(Attribute label, std::uint64_t seed, Eigen::MatrixXi codewords)
    : label_(label), seed_(seed), codewords_(std::move(codewords)) {
  if (codewords_.cols() < 2) throw std::invalid_argument("Codebook: K must be >= 2");
  if (codewords_.rows() < 1) throw std::invalid_argument("Codebook: N must be >= 1");
  if (!((codewords_.array() == 1) || (codewords_.array() == -1)).all()) {
    throw std::invalid_argument("Codebook: codewords must be bipolar");
  }
  for (int k = 1; k < codewords_.cols(); ++k) {
    if (column_repeats_earlier(codewords_, k)) {
      throw std::invalid_argument("Codebook: duplicate codewords");
    }
  }
  real_ = codewords_.cast<double>();
}

Hypervector Codebook::codeword(int k) const {
  if (k < 0 || k >= size()) {
    throw std::invalid_argument("Codebook::codeword: index " + std::to_string(k) +
                                " out of range for " + std::string(to_string(label_)));
  }
  return codewords_.col(k);
}

double max_pairwise_similarity(const Codebook& cb) {
  const Eigen::MatrixXd gram = cb.codewords_real().transpose() * cb.codewords_real();
  double worst = 0.0;
  for (int i = 0; i < cb.size(); ++i) {
    for (int j = i + 1; j < cb.size(); ++j) {
      worst = std::max(worst, std::abs(gram(i, j)) / cb.dim());
    }
  }
  return worst;
}

std::string codebook_to_json(const Codebook& cb) {
  nlohmann::json j;
  j["label"] = std::string(to_string(cb.label()));
  j["size"] = cb.size();
  j["dim"] = cb.dim();
  j["seed"] = cb.seed();
  auto words = nlohmann::json::array();
  for (int k = 0; k < cb.size(); ++k) {
    const Hypervector w = cb.codeword(k);
    words.push_back(std::vector<int>(w.data(), w.data() + w.size()));
  }
  j["codewords"] = std::move(words);
  return j.dump();
}

Codebook codebook_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("codebook json: ") + e.what());
  }
  const Attribute label = attribute_from_string(j.at("label").get<std::string>());
  const int size = j.at("size").get<int>();
  const int dim = j.at("dim").get<int>();
  const auto& words = j.at("codewords");
  if (size < 1 || dim < 1 || static_cast<int>(words.size()) != size) {
    throw std::invalid_argument("codebook json: codeword count does not match size");
  }
  Eigen::MatrixXi m(dim, size);
  for (int k = 0; k < size; ++k) {
    const auto w = words[k].get<std::vector<int>>();
    if (static_cast<int>(w.size()) != dim) {
      throw std::invalid_argument("codebook json: codeword length does not match dim");
    }
    for (int i = 0; i < dim; ++i) m(i, k) = w[i];
  }
  return Codebook(label, j.at("seed").get<std::uint64_t>(), std::move(m));
}

void save_codebook(const Codebook& cb, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << codebook_to_json(cb) << '\n';
}

Codebook load_codebook(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return codebook_from_json(ss.str());
}

}  // namespace scenevsa
