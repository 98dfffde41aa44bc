#pragma once

// Test-only reference computations, written without the library's fast paths.

#include <limits>
#include <vector>

#include <Eigen/Core>

#include "scenevsa/scene.hpp"

namespace scenevsa::oracle {

/// Exhaustive nearest neighbour over every attribute combination: the object
/// whose compound vector has the largest dot product with v.
template <typename Derived>
ObjectSpec nearest_compound(const CodebookSet& cbs, const Eigen::MatrixBase<Derived>& v) {
  const AttributeSizes k = cbs.sizes();
  const Eigen::VectorXd vd = v.template cast<double>();
  ObjectSpec best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < k[0]; ++c)
    for (int d = 0; d < k[1]; ++d)
      for (int y = 0; y < k[2]; ++y)
        for (int x = 0; x < k[3]; ++x) {
          double score = 0.0;
          for (int i = 0; i < cbs.dim(); ++i) {
            score += vd[i] * cbs[Attribute::color].codewords()(i, c) * cbs[Attribute::digit].codewords()(i, d) *
                     cbs[Attribute::ypos].codewords()(i, y) * cbs[Attribute::xpos].codewords()(i, x);
          }
          if (score > best_score) {
            best_score = score;
            best = {c, d, y, x};
          }
        }
  return best;
}

/// sign(C C^T v) with the N x N projector materialized.
inline Eigen::VectorXi dense_cleanup(const Eigen::MatrixXi& words, const Eigen::VectorXd& v) {
  const Eigen::MatrixXd c = words.cast<double>();
  const Eigen::MatrixXd projector = c * c.transpose();
  const Eigen::VectorXd p = projector * v;
  Eigen::VectorXi out(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) out[i] = p[i] >= 0.0 ? 1 : -1;
  return out;
}

}  // namespace scenevsa::oracle
