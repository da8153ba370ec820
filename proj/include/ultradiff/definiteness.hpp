#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <vector>

#include "ultradiff/padic.hpp"
#include "ultradiff/symbols.hpp"

namespace ultradiff {

/// Outcome of a finite-sample definiteness test.  Certification is only
/// ever claimed for the sampled points; a refutation carries an explicit
/// witness (points plus coefficient vector with negative form value).
struct DefinitenessReport {
  bool certified = false;
  bool saturated = false;  // non-finite values on the sample; inconclusive
  double min_eigenvalue = 0.0;
  double matrix_norm = 0.0;
  double tolerance = 0.0;
  std::vector<PadicVector> points;
  Eigen::VectorXd witness_coefficients;  // filled on refutation
  double quadratic_form = 0.0;
};

namespace detail {

inline DefinitenessReport eig_report(Eigen::MatrixXd A, std::vector<PadicVector> pts,
                                     double rel_tol) {
  DefinitenessReport rep;
  rep.points = std::move(pts);
  if (!A.allFinite()) {
    rep.saturated = true;
    return rep;
  }
  // The complex-conjugate structure of the definiteness form makes the
  // test matrix Hermitian only up to roundoff; symmetrize first.
  Eigen::MatrixXd S = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  const auto& ev = es.eigenvalues();
  rep.min_eigenvalue = ev(0);
  rep.matrix_norm = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  rep.tolerance = rel_tol * std::max(rep.matrix_norm, 1e-300);
  rep.certified = rep.min_eigenvalue >= -rep.tolerance;
  if (!rep.certified) {
    rep.witness_coefficients = es.eigenvectors().col(0);
    rep.quadratic_form = rep.min_eigenvalue;
  }
  return rep;
}

}  // namespace detail

/// Tests sum_{ij} (psi(x_i) + psi(x_j) - psi(x_i - x_j)) l_i conj(l_j) >= 0
/// on the given points via the minimum eigenvalue of the form matrix.
inline DefinitenessReport negative_definite_test(const Symbol& psi,
                                                 const std::vector<PadicVector>& points,
                                                 double rel_tol = 1e-9) {
  const int m = static_cast<int>(points.size());
  if (m < 1) throw std::invalid_argument("negative_definite_test: need at least one point");
  Eigen::VectorXd v(m);
  for (int i = 0; i < m; ++i) v(i) = psi.eval_at(points[i]);
  Eigen::MatrixXd A(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      A(i, j) = v(i) + v(j) - psi.eval_at(points[i] - points[j]);
  return detail::eig_report(std::move(A), points, rel_tol);
}

/// PSD test of the matrix phi(x_i - x_j) for a real (radial) function phi.
inline DefinitenessReport positive_definite_test(
    const std::function<double(const PadicVector&)>& phi, const std::vector<PadicVector>& points,
    double rel_tol = 1e-9) {
  const int m = static_cast<int>(points.size());
  if (m < 1) throw std::invalid_argument("positive_definite_test: need at least one point");
  Eigen::MatrixXd A(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) A(i, j) = phi(points[i] - points[j]);
  return detail::eig_report(std::move(A), points, rel_tol);
}

/// Adapter: a stored radial function as a point function.
template <typename Scalar>
std::function<double(const PadicVector&)> as_point_function(const RadialFunction<Scalar>& f) {
  return [f](const PadicVector& x) { return std::real(std::complex<double>(f.value_at(x.shell()))); };
}

}  // namespace ultradiff
