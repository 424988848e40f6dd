#include "prm/geometry.hpp"

#include <algorithm>

namespace prm {

namespace {

void check_shape(const Mat& g, int d) {
  if (g.rows() != d || g.cols() != d) throw DomainError("matrix and point dimensions differ");
}

}  // namespace

ProjPoint act(const Mat& g, const ProjPoint& x) {
  check_shape(g, x.dim());
  return ProjPoint(g * x.rep());
}

DualPoint act_dual(const Mat& g, const DualPoint& y) {
  check_shape(g, y.dim());
  return DualPoint(g.transpose() * y.rep());
}

double cocycle_sigma(const Mat& g, const ProjPoint& x) {
  check_shape(g, x.dim());
  return std::log((g * x.rep()).norm());
}

double delta(const DualPoint& y, const ProjPoint& x) {
  if (y.dim() != x.dim()) throw DomainError("dual and primal dimensions differ");
  return std::min(1.0, std::abs(y.rep().dot(x.rep())));
}

CartanFrames cartan(const Mat& g) {
  if (g.rows() != g.cols()) throw DomainError("cartan needs a square matrix");
  Eigen::JacobiSVD<Mat> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) {
    throw ConvergenceError("singular value decomposition failed", g.norm());
  }
  const Vec& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 0.0)) {
    throw DomainError("cartan needs an invertible matrix (condition number " +
                      std::to_string(sv(0) / sv(sv.size() - 1)) + ")");
  }
  // JacobiSVD already orders singular values decreasingly.
  return {svd.matrixU(), sv.asDiagonal(), svd.matrixV().transpose()};
}

double wedge2_norm(const Mat& g) {
  if (g.rows() < 2) throw DomainError("wedge2_norm needs d >= 2");
  Eigen::JacobiSVD<Mat> svd(g);
  return svd.singularValues()(0) * svd.singularValues()(1);
}

IwasawaFrames iwasawa(const Mat& g) {
  // g = L A K  <=>  g^T = K^T (A L^T), a QR factorization of g^T.
  const int d = static_cast<int>(g.rows());
  if (g.cols() != d) throw DomainError("iwasawa needs a square matrix");
  Eigen::HouseholderQR<Mat> qr(g.transpose());
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  const double scale = r.diagonal().cwiseAbs().maxCoeff();
  for (int i = 0; i < d; ++i) {
    if (std::abs(r(i, i)) <= 1e-14 * scale) {
      throw DomainError("iwasawa: matrix is numerically singular");
    }
    if (r(i, i) < 0.0) {
      r.row(i) *= -1.0;
      q.col(i) *= -1.0;
    }
  }
  IwasawaFrames out;
  out.A = r.diagonal().asDiagonal();
  out.L = (r.diagonal().cwiseInverse().asDiagonal() * r).transpose();
  out.L.diagonal().setOnes();
  out.K = q.transpose();
  return out;
}

}  // namespace prm
