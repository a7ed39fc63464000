#include "thermo/core.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace thermo {

namespace {

// Scaling and squaring with the [13/13] Pade approximant (Higham 2005).
template <typename Mat>
Mat pade13(const Mat& a_in) {
  static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                 1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                 670442572800.0,      33522128640.0,       1323241920.0,
                                 40840800.0,          960960.0,            16380.0,
                                 182.0,               1.0};
  static constexpr double theta13 = 5.371920351148152;

  const auto n = a_in.rows();
  const double norm1 = a_in.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm1 > theta13) s = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / theta13))));
  Mat a = a_in / std::ldexp(1.0, s);

  const Mat id = Mat::Identity(n, n);
  const Mat a2 = a * a;
  const Mat a4 = a2 * a2;
  const Mat a6 = a4 * a2;
  Mat u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  Mat v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  Mat r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < s; ++k) r = r * r;
  return r;
}

}  // namespace

ComplexMatrix expm(const ComplexMatrix& a) {
  require_square(a, "matrix");
  require_finite(a, "matrix");
  const double scale = std::max(1.0, max_abs(a));
  const double tol = 1e-14 * scale * static_cast<double>(a.rows());
  if (max_abs(a - a.adjoint()) <= tol) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (a + a.adjoint()));
    return es.eigenvectors() * es.eigenvalues().array().exp().matrix().cast<Complex>().asDiagonal() *
           es.eigenvectors().adjoint();
  }
  if (max_abs(a + a.adjoint()) <= tol) {
    // a = i h with h Hermitian
    ComplexMatrix h = Complex(0, -1) * a;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (h + h.adjoint()));
    ComplexVector ph = (Complex(0, 1) * es.eigenvalues().cast<Complex>()).array().exp();
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
  }
  return pade13<ComplexMatrix>(a);
}

RealMatrix expm(const RealMatrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw InvalidInput("matrix must be square and non-empty");
  if (!a.allFinite()) throw InvalidInput("matrix has non-finite entries");
  if ((a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * std::max(1.0, a.cwiseAbs().maxCoeff())) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (a + a.transpose()));
    return es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() * es.eigenvectors().transpose();
  }
  return pade13<RealMatrix>(a);
}

Superoperator expm(const Superoperator& l) { return Superoperator(expm(l.matrix())); }

}  // namespace thermo
