#pragma once

#include <cmath>
#include <stdexcept>

#include "ultradiff/padic.hpp"

namespace ultradiff {

/// Exponent magnitude beyond which p^{rn} leaves double range; callers
/// switch to the log forms below.
inline constexpr double kLogDoubleRange = 700.0;

inline double log_ball_volume(int r, int n, int p) {
  return static_cast<double>(r) * n * std::log(static_cast<double>(p));
}

/// vol(B_r^n) = p^{rn} under the Haar normalization vol(Z_p^n) = 1.
inline double ball_volume(int r, int n, int p) {
  const double lg = log_ball_volume(r, n, p);
  if (std::abs(lg) > kLogDoubleRange) return std::exp(lg);
  return pow_int(p, static_cast<long long>(r) * n);
}

/// vol(S_k^n) = p^{kn} (1 - p^{-n}).
inline double sphere_volume(int k, int n, int p) {
  return ball_volume(k, n, p) * (1.0 - pow_int(p, -n));
}

inline BigRational ball_volume_exact(int r, int n, int p) {
  const long long e = static_cast<long long>(r) * n;
  if (e >= 0) return BigRational(big_pow(p, static_cast<int>(e)));
  return BigRational(1, big_pow(p, static_cast<int>(-e)));
}

inline BigRational sphere_volume_exact(int k, int n, int p) {
  return ball_volume_exact(k, n, p) - ball_volume_exact(k - 1, n, p);
}

/// W(k,m) = integral of chi_p(xi . x) over the sphere ||x||_p = p^k for
/// ||xi||_p = p^m.  Closed form by ball-sphere additivity:
///   W = vol(S_k^n)      for m <= -k,
///   W = -vol(B_{k-1}^n) for m == 1-k,
///   W = 0               for m >= 2-k.
inline double shell_kernel(int k, int m, int p, int n) {
  if (m <= -k) return sphere_volume(k, n, p);
  if (m == 1 - k) return -ball_volume(k - 1, n, p);
  return 0.0;
}

inline BigRational shell_kernel_exact(int k, int m, int p, int n) {
  if (m <= -k) return sphere_volume_exact(k, n, p);
  if (m == 1 - k) return -ball_volume_exact(k - 1, n, p);
  return BigRational(0);
}

}  // namespace ultradiff
