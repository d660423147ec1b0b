#include "spinflat/alignment.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>

namespace spinflat {

MinkVec apply(const Alignment& a, const MinkVec& r) {
  MinkVec out = a.t;
  for (int i = 0; i < 4; ++i)
    for (int c = 0; c < 4; ++c) out[i] += a.L[i][c] * r[c];
  return out;
}

Alignment align_lorentz(const std::vector<MinkVec>& reference,
                        const std::vector<MinkVec>& target) {
  if (reference.size() != target.size())
    throw std::invalid_argument("alignment inputs have different sizes");
  const Eigen::Index n = static_cast<Eigen::Index>(reference.size());
  if (n < 5) throw std::invalid_argument("alignment needs at least 5 points");

  // Centre both sets first; the translation is then the centroid offset.
  Eigen::Vector4d rc = Eigen::Vector4d::Zero(), fc = Eigen::Vector4d::Zero();
  for (Eigen::Index i = 0; i < n; ++i)
    for (int c = 0; c < 4; ++c) {
      rc[c] += reference[i][c];
      fc[c] += target[i][c];
    }
  rc /= static_cast<double>(n);
  fc /= static_cast<double>(n);
  Eigen::MatrixXd R(n, 4), F(n, 4);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int c = 0; c < 4; ++c) {
      R(i, c) = reference[i][c] - rc[c];
      F(i, c) = target[i][c] - fc[c];
    }

  Alignment a;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(R);
  qr.setThreshold(1e-10);
  a.rank = static_cast<int>(qr.rank()) + 1;
  const Eigen::Matrix4d Lt = qr.solve(F);  // R Lt = F, so L = Lt^T
  const Eigen::Matrix4d L = Lt.transpose();
  const Eigen::Vector4d t = fc - L * rc;
  for (int i = 0; i < 4; ++i) {
    a.t[i] = t[i];
    for (int c = 0; c < 4; ++c) a.L[i][c] = L(i, c);
  }
  const Eigen::Matrix4d eta = Eigen::Vector4d(-1, 1, 1, 1).asDiagonal();
  a.lorentz_defect = (L.transpose() * eta * L - eta).norm();
  for (Eigen::Index i = 0; i < n; ++i)
    a.max_deviation = std::max(a.max_deviation, euclid_norm(apply(a, reference[i]) - target[i]));
  return a;
}

}  // namespace spinflat
