#pragma once

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <type_traits>
#include <utility>

#include "ultradiff/shells.hpp"

namespace ultradiff {

/// Behavior of a radial function on shells below the stored window.
///   Zero:     f(p^k) = 0 for k < k_min
///   Constant: f(p^k) = c for k < k_min (and f(0) = c)
///   Limit:    continue with the value stored at k_min
enum class InnerTailKind { Zero, Constant, Limit };

template <typename Scalar>
struct InnerTail {
  InnerTailKind kind = InnerTailKind::Zero;
  Scalar value = Scalar(0);

  static InnerTail zero() { return {InnerTailKind::Zero, Scalar(0)}; }
  static InnerTail constant(Scalar c) { return {InnerTailKind::Constant, c}; }
  static InnerTail limit() { return {InnerTailKind::Limit, Scalar(0)}; }
};

namespace detail {
inline bool finite(double x) { return std::isfinite(x); }
inline bool finite(const std::complex<double>& x) {
  return std::isfinite(x.real()) && std::isfinite(x.imag());
}
inline double conj_of(double x) { return x; }
inline std::complex<double> conj_of(const std::complex<double>& x) { return std::conj(x); }
inline double abs_of(double x) { return std::abs(x); }
inline double abs_of(const std::complex<double>& x) { return std::abs(x); }
}  // namespace detail

class truncation_error : public std::runtime_error {
 public:
  truncation_error(const std::string& what, double bound)
      : std::runtime_error(what), remainder_bound(bound) {}
  double remainder_bound;
};

/// Radial function on Q_p^n: one value per shell ||x||_p = p^k over a
/// finite window [k_min, k_max], an inner-tail descriptor below it, and a
/// zero outer tail above it.  A nonzero `outer_l1_bound` declares that the
/// true function has been truncated at k_max with at most that much L^1
/// mass discarded; operations either propagate the bound or refuse input
/// they cannot certify.  With a constant (or zero) inner tail and zero
/// outer tail this is exactly a radial Bruhat-Schwartz function, on which
/// the Fourier calculus below is closed-form exact.
template <typename Scalar>
class RadialFunction {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  RadialFunction(int p, int n, int k_min, Vector values, InnerTail<Scalar> inner,
                 double outer_l1_bound = 0.0)
      : p_(p), n_(n), k_min_(k_min), values_(std::move(values)), inner_(inner),
        outer_l1_bound_(outer_l1_bound) {
    if (!is_prime(p_)) throw std::invalid_argument("RadialFunction: p must be prime");
    if (n_ < 1) throw std::invalid_argument("RadialFunction: dimension must be >= 1");
    if (values_.size() == 0) throw std::invalid_argument("RadialFunction: empty window");
    for (Eigen::Index i = 0; i < values_.size(); ++i)
      if (!detail::finite(values_[i])) throw std::invalid_argument("RadialFunction: non-finite value");
    if (!detail::finite(inner_.value)) throw std::invalid_argument("RadialFunction: non-finite tail");
    if (!(outer_l1_bound_ >= 0.0) || !std::isfinite(outer_l1_bound_))
      throw std::invalid_argument("RadialFunction: bad outer tail bound");
  }

  static RadialFunction zero(int p, int n) {
    Vector v(1);
    v[0] = Scalar(0);
    return RadialFunction(p, n, 0, std::move(v), InnerTail<Scalar>::zero());
  }

  /// Indicator of the ball ||x||_p <= p^r.
  static RadialFunction ball_indicator(int p, int n, int r) {
    Vector v(1);
    v[0] = Scalar(1);
    return RadialFunction(p, n, r, std::move(v), InnerTail<Scalar>::constant(Scalar(1)));
  }

  /// Indicator of the sphere ||x||_p = p^k.
  static RadialFunction sphere_indicator(int p, int n, int k) {
    Vector v(1);
    v[0] = Scalar(1);
    return RadialFunction(p, n, k, std::move(v), InnerTail<Scalar>::zero());
  }

  int prime() const { return p_; }
  int dim() const { return n_; }
  int k_min() const { return k_min_; }
  int k_max() const { return k_min_ + static_cast<int>(values_.size()) - 1; }
  int window_size() const { return static_cast<int>(values_.size()); }
  const Vector& values() const { return values_; }
  InnerTailKind inner_kind() const { return inner_.kind; }
  double outer_l1_bound() const { return outer_l1_bound_; }
  bool compactly_supported() const { return outer_l1_bound_ == 0.0; }

  /// Inner-tail value with Limit resolved to the value at k_min.
  Scalar inner_value() const {
    switch (inner_.kind) {
      case InnerTailKind::Zero: return Scalar(0);
      case InnerTailKind::Constant: return inner_.value;
      case InnerTailKind::Limit: return values_[0];
    }
    return Scalar(0);
  }

  Scalar value_on_shell(int k) const {
    if (k < k_min_) return inner_value();
    if (k > k_max()) return Scalar(0);
    return values_[k - k_min_];
  }

  Scalar value_at_origin() const { return inner_value(); }

  Scalar value_at(const ShellIndex& s) const {
    return s.is_origin() ? value_at_origin() : value_on_shell(s.k());
  }

  double sup_norm() const {
    double m = detail::abs_of(inner_value());
    for (Eigen::Index i = 0; i < values_.size(); ++i) m = std::max(m, detail::abs_of(values_[i]));
    return m;
  }

  bool compatible_with(const RadialFunction& g) const { return p_ == g.p_ && n_ == g.n_; }

 private:
  int p_, n_, k_min_;
  Vector values_;
  InnerTail<Scalar> inner_;
  double outer_l1_bound_;
};

using RealRadial = RadialFunction<double>;
using ComplexRadial = RadialFunction<std::complex<double>>;

namespace detail {
template <typename Scalar>
void check_compatible(const RadialFunction<Scalar>& f, const RadialFunction<Scalar>& g,
                      const char* op) {
  if (!f.compatible_with(g)) throw std::invalid_argument(std::string(op) + ": mismatched (p, n)");
}
}  // namespace detail

/// f(p^k) * vol(S_k^n), evaluated in log space when the volume leaves
/// double range.
template <typename Scalar>
Scalar shell_mass(const RadialFunction<Scalar>& f, int k) {
  const double lg = log_ball_volume(k, f.dim(), f.prime());
  const Scalar v = f.value_on_shell(k);
  if (std::abs(lg) > kLogDoubleRange) {
    const double a = detail::abs_of(v);
    if (a == 0.0) return Scalar(0);
    const double mag = std::exp(lg + std::log(a)) * (1.0 - pow_int(f.prime(), -f.dim()));
    return v * Scalar(mag / a);
  }
  return v * Scalar(sphere_volume(k, f.dim(), f.prime()));
}

template <typename Scalar>
struct IntegralResult {
  Scalar value;
  double tail_bound;  // |error| from any declared outer truncation
};

/// Integral over Q_p^n as a shell sum; the constant inner tail contributes
/// its ball mass analytically.
template <typename Scalar>
IntegralResult<Scalar> radial_integral(const RadialFunction<Scalar>& f) {
  Scalar acc = f.inner_value() * Scalar(ball_volume(f.k_min() - 1, f.dim(), f.prime()));
  for (int k = f.k_min(); k <= f.k_max(); ++k) acc += shell_mass(f, k);
  return {acc, f.outer_l1_bound()};
}

/// Fourier transform of a radial Bruhat-Schwartz function, exact via the
/// closed-form sphere character integrals W(k,m).  Output window
/// [-k_max, 1-k_min]; below it the transform is exactly constant and equal
/// to the integral of f.  Self-inverse on radial functions.
template <typename Scalar>
RadialFunction<Scalar> radial_fourier(const RadialFunction<Scalar>& f) {
  if (!f.compactly_supported())
    throw std::invalid_argument("radial_fourier: input carries an undeclared outer tail");
  const int p = f.prime(), n = f.dim();
  const int a = f.k_min(), b = f.k_max();
  const Scalar c = f.inner_value();
  const double inner_ball = ball_volume(a - 1, n, p);

  const int out_lo = -b, out_hi = 1 - a;
  typename RadialFunction<Scalar>::Vector out(out_hi - out_lo + 1);
  for (int m = out_lo; m <= out_hi; ++m) {
    Scalar acc = c * Scalar(inner_ball);  // m <= 1-a holds on the whole output window
    for (int k = a; k <= b; ++k) {
      const double w = shell_kernel(k, m, p, n);
      if (w != 0.0) acc += f.values()[k - a] * Scalar(w);
    }
    out[m - out_lo] = acc;
  }
  const Scalar total = radial_integral(f).value;
  return RadialFunction<Scalar>(p, n, out_lo, std::move(out),
                                InnerTail<Scalar>::constant(total));
}

/// <f, g> in L^2 as a shell sum.  Inputs must be compactly supported:
/// an L^1 tail bound does not control the L^2 tail.
template <typename Scalar>
Scalar l2_inner(const RadialFunction<Scalar>& f, const RadialFunction<Scalar>& g) {
  detail::check_compatible(f, g, "l2_inner");
  if (!f.compactly_supported() || !g.compactly_supported())
    throw std::invalid_argument("l2_inner: cannot certify truncated input");
  const int lo = std::min(f.k_min(), g.k_min());
  const int hi = std::max(f.k_max(), g.k_max());
  Scalar acc = f.inner_value() * detail::conj_of(g.inner_value()) *
               Scalar(ball_volume(lo - 1, f.dim(), f.prime()));
  for (int k = lo; k <= hi; ++k)
    acc += f.value_on_shell(k) * detail::conj_of(g.value_on_shell(k)) *
           Scalar(sphere_volume(k, f.dim(), f.prime()));
  return acc;
}

template <typename Scalar>
double l2_norm(const RadialFunction<Scalar>& f) {
  return std::sqrt(std::abs(std::real(std::complex<double>(l2_inner(f, f)))));
}

template <typename Scalar>
RadialFunction<Scalar> linear_combine(Scalar ca, const RadialFunction<Scalar>& f, Scalar cb,
                                      const RadialFunction<Scalar>& g) {
  detail::check_compatible(f, g, "linear_combine");
  const int lo = std::min(f.k_min(), g.k_min());
  const int hi = std::max(f.k_max(), g.k_max());
  typename RadialFunction<Scalar>::Vector out(hi - lo + 1);
  for (int k = lo; k <= hi; ++k) out[k - lo] = ca * f.value_on_shell(k) + cb * g.value_on_shell(k);
  const Scalar inner = ca * f.inner_value() + cb * g.inner_value();
  InnerTail<Scalar> tail = (f.inner_kind() == InnerTailKind::Zero &&
                            g.inner_kind() == InnerTailKind::Zero)
                               ? InnerTail<Scalar>::zero()
                               : InnerTail<Scalar>::constant(inner);
  const double bound = detail::abs_of(ca) * f.outer_l1_bound() + detail::abs_of(cb) * g.outer_l1_bound();
  return RadialFunction<Scalar>(f.prime(), f.dim(), lo, std::move(out), tail, bound);
}

template <typename Scalar>
RadialFunction<Scalar> operator+(const RadialFunction<Scalar>& f, const RadialFunction<Scalar>& g) {
  return linear_combine(Scalar(1), f, Scalar(1), g);
}
template <typename Scalar>
RadialFunction<Scalar> operator-(const RadialFunction<Scalar>& f, const RadialFunction<Scalar>& g) {
  return linear_combine(Scalar(1), f, Scalar(-1), g);
}
template <typename Scalar>
RadialFunction<Scalar> operator*(Scalar c, const RadialFunction<Scalar>& f) {
  typename RadialFunction<Scalar>::Vector out = c * f.values();
  InnerTail<Scalar> tail = f.inner_kind() == InnerTailKind::Zero
                               ? InnerTail<Scalar>::zero()
                               : InnerTail<Scalar>::constant(c * f.inner_value());
  return RadialFunction<Scalar>(f.prime(), f.dim(), f.k_min(), std::move(out), tail,
                                detail::abs_of(c) * f.outer_l1_bound());
}

/// Max |f - g| over shells and tails of the common refinement.
template <typename Scalar>
double sup_distance(const RadialFunction<Scalar>& f, const RadialFunction<Scalar>& g) {
  detail::check_compatible(f, g, "sup_distance");
  const int lo = std::min(f.k_min(), g.k_min());
  const int hi = std::max(f.k_max(), g.k_max());
  double m = detail::abs_of(f.inner_value() - g.inner_value());
  for (int k = lo; k <= hi; ++k)
    m = std::max(m, detail::abs_of(f.value_on_shell(k) - g.value_on_shell(k)));
  return m;
}

/// Convolution through the spectral side: F^{-1}(Ff . Fg).  Exact for
/// Bruhat-Schwartz inputs.  The window guard reports the span bound when a
/// pathological pair would exceed it.
template <typename Scalar>
RadialFunction<Scalar> radial_convolve(const RadialFunction<Scalar>& f,
                                       const RadialFunction<Scalar>& g,
                                       int max_window_span = 512) {
  detail::check_compatible(f, g, "radial_convolve");
  const auto fh = radial_fourier(f);
  const auto gh = radial_fourier(g);
  const int lo = std::min(fh.k_min(), gh.k_min());
  const int hi = std::min(fh.k_max(), gh.k_max());
  if (hi - lo + 1 > max_window_span)
    throw truncation_error("radial_convolve: window span exceeds cap",
                           static_cast<double>(hi - lo + 1));
  typename RadialFunction<Scalar>::Vector out(hi - lo + 1);
  for (int m = lo; m <= hi; ++m) out[m - lo] = fh.value_on_shell(m) * gh.value_on_shell(m);
  RadialFunction<Scalar> prod(f.prime(), f.dim(), lo, std::move(out),
                              InnerTail<Scalar>::constant(fh.inner_value() * gh.inner_value()));
  return radial_fourier(prod);
}

}  // namespace ultradiff
