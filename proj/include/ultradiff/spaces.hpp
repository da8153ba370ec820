#pragma once

#include <cmath>
#include <string>

#include "ultradiff/radial.hpp"
#include "ultradiff/symbols.hpp"

namespace ultradiff {

/// Largest l used when a space membership question is asked without an
/// explicit l; B_{psi,inf} is an intersection over all l, which any finite
/// tool truncates.
inline constexpr int kDefaultLMax = 8;

/// Weight family w_l(xi) = [max(1, |psi(||xi||)|)]^l attached to a
/// normalized type-1/2 symbol.  The normalization (sup over Z_p^n at most
/// 1) pins w_l = 1 on the unit ball, which every analytic tail sum below
/// relies on.
class SobolevWeight {
 public:
  SobolevWeight(Symbol psi, int l) : psi_(std::move(psi)), l_(l) {
    if (l_ < 0) throw std::invalid_argument("SobolevWeight: l must be >= 0");
    const int tag = psi_.declared_type().tag;
    if (tag != 1 && tag != 2)
      throw std::invalid_argument("SobolevWeight: psi must be declared type 1 or 2");
    double sup = std::abs(psi_.eval_zero());
    for (int m = kDefaultWindowLo; m <= 0; ++m) sup = std::max(sup, std::abs(psi_.eval_shell(m)));
    if (!(sup > 0.0) || sup > 1.0 + 1e-12)
      throw std::invalid_argument("SobolevWeight: psi violates the unit-ball normalization");
  }

  const Symbol& psi() const { return psi_; }
  int level() const { return l_; }

  double shell_weight(int m) const {
    if (m <= 0) return 1.0;
    const double v = detail::max1(psi_.eval_shell(m));
    const double lg = l_ * std::log(v);
    if (lg > kSaturationLogThreshold) return std::numeric_limits<double>::infinity();
    return std::exp(lg);
  }

 private:
  Symbol psi_;
  int l_;
};

struct NormReport {
  double value = 0.0;
  double remainder = 0.0;
  int window_lo = 0, window_hi = 0;
  bool certified = false;
  std::string reason;
};

/// || f ||_{psi,l}: the weighted L^2 norm of Ff, computed on the Fourier
/// side directly.  Exact for radial Bruhat-Schwartz input; truncated input
/// yields a membership-failure verdict since an unbounded weight cannot be
/// certified against an unknown tail.
inline NormReport besov_norm(const RealRadial& f, const SobolevWeight& w) {
  NormReport rep;
  if (!f.compactly_supported()) {
    rep.certified = false;
    rep.reason = "input carries a truncated tail; weighted norm not certifiable";
    return rep;
  }
  const auto fhat = radial_fourier(f);
  const int p = f.prime(), n = f.dim();
  const int A = fhat.k_min(), B = fhat.k_max();
  const double c = fhat.inner_value();
  // Unit weight below shell 0 by normalization; explicit weights between.
  const int ball_top = std::min(A, 1);
  double acc = c * c * ball_volume(ball_top - 1, n, p);
  for (int m = ball_top; m <= A - 1; ++m)
    acc += w.shell_weight(m) * c * c * sphere_volume(m, n, p);
  for (int m = A; m <= B; ++m) {
    const double v = fhat.value_on_shell(m);
    if (v == 0.0) continue;
    const double wt = w.shell_weight(m);
    if (!std::isfinite(wt)) {
      rep.certified = false;
      rep.reason = "weight saturates on the spectrum";
      return rep;
    }
    acc += wt * v * v * sphere_volume(m, n, p);
  }
  rep.value = std::sqrt(acc);
  rep.remainder = 0.0;
  rep.window_lo = A;
  rep.window_hi = B;
  rep.certified = true;
  return rep;
}

inline NormReport besov_norm(const RealRadial& f, const Symbol& psi, int l) {
  return besov_norm(f, SobolevWeight(psi, l));
}

/// d_psi(f,g) = max_{l <= l_max} 2^{-l} r_l / (1 + r_l) with
/// r_l = ||f-g||_{psi,l}; the metric of the countably-normed topology.
inline double psi_metric(const RealRadial& f, const RealRadial& g, const Symbol& psi,
                         int l_max = kDefaultLMax) {
  const auto diff = f - g;
  double d = 0.0;
  for (int l = 0; l <= l_max; ++l) {
    const auto nr = besov_norm(diff, SobolevWeight(psi, l));
    if (!nr.certified) throw std::invalid_argument("psi_metric: " + nr.reason);
    const double r = nr.value;
    d = std::max(d, std::exp2(-l) * r / (1.0 + r));
  }
  return d;
}

struct EmbeddingReport {
  bool accepted = false;    // precondition l > n / beta0
  std::string reason;
  double sup_norm = 0.0;        // ||f||_inf
  double fourier_l1 = 0.0;      // ||Ff||_{L^1}
  double constant = 0.0;        // Cauchy-Schwarz constant sqrt(integral of w^{-1})
  double weighted_norm = 0.0;   // ||f||_{psi,l}
  bool chain_holds = false;     // sup <= l1 <= C * weighted
};

/// Verifies the embedding chain ||f||_inf <= ||Ff||_{L^1} <= C ||f||_{psi,l}
/// for a type-1 weight, with C computed as the shell sum of 1/w_l plus a
/// certified geometric tail from the declared lower bound (which is what
/// makes l > n/beta0 the integrability threshold).
inline EmbeddingReport embedding_bound_check(const RealRadial& f, const Symbol& psi, int l,
                                             int window_hi = kDefaultWindowHi) {
  EmbeddingReport rep;
  const DeclaredType& d = psi.declared_type();
  if (d.tag != 1) {
    rep.reason = "psi must be declared type 1";
    return rep;
  }
  const int n = f.dim(), p = f.prime();
  if (!(l > n / d.beta0)) {
    rep.reason = "integrability requires l > n/beta0";
    return rep;
  }
  SobolevWeight w(psi, l);

  rep.sup_norm = f.sup_norm();
  const auto fhat = radial_fourier(f);
  rep.fourier_l1 = std::abs(fhat.inner_value()) * ball_volume(fhat.k_min() - 1, n, p);
  for (int m = fhat.k_min(); m <= fhat.k_max(); ++m)
    rep.fourier_l1 += std::abs(fhat.value_on_shell(m)) * sphere_volume(m, n, p);

  double c2 = ball_volume(kDefaultWindowLo - 1, n, p);  // w = 1 below the window
  for (int m = kDefaultWindowLo; m <= window_hi; ++m) {
    const double wt = w.shell_weight(m);
    if (std::isfinite(wt)) c2 += sphere_volume(m, n, p) / wt;
  }
  // Tail from the declared bound: 1/w <= (C0 p^{m beta0})^{-l} for m > 0.
  const double ratio = std::pow(static_cast<double>(p), n - d.beta0 * l);
  const double first = sphere_volume(window_hi + 1, n, p) /
                       std::pow(d.C0 * std::pow(static_cast<double>(p), (window_hi + 1) * d.beta0), l);
  if (ratio < 1.0 && std::isfinite(first)) c2 += first / (1.0 - ratio);
  rep.constant = std::sqrt(c2);

  const auto nr = besov_norm(f, w);
  if (!nr.certified) {
    rep.reason = nr.reason;
    return rep;
  }
  rep.weighted_norm = nr.value;
  rep.accepted = true;
  const double slack = 1e-12 * (1.0 + rep.fourier_l1 + rep.constant * rep.weighted_norm);
  rep.chain_holds = rep.sup_norm <= rep.fourier_l1 + slack &&
                    rep.fourier_l1 <= rep.constant * rep.weighted_norm + slack;
  return rep;
}

}  // namespace ultradiff
