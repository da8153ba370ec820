#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ultradiff/radial.hpp"
#include "ultradiff/symbols.hpp"

namespace ultradiff {

/// Default accuracy of constant-inner-tail continuations on the spectral
/// side, and the cap on window auto-extension.
inline constexpr double kDefaultSpectralTol = 1e-12;
inline constexpr int kDefaultWindowCap = 256;

/// A radial Fourier multiplier described by its shell values, its value at
/// xi = 0, and a certified bound on sup_{m' <= m} |value(m') - value(0)|.
/// The deviation bound is what certifies continuing the multiplied
/// spectrum below the window by its limit value.
struct SpectralMultiplier {
  std::function<double(int)> value;
  double value_at_zero = 0.0;
  std::function<double(int)> inner_deviation;
};

struct ApplyResult {
  RealRadial value;
  /// Uniform bound on |stored - true| over all of Q_p^n.
  double uniform_error = 0.0;
};

/// F^{-1}(mult . Ff) for radial Bruhat-Schwartz f.  The product spectrum
/// is exact on the window and continued below it by its limit value once
/// the certified deviation mass drops under tol.
inline ApplyResult apply_spectral(const SpectralMultiplier& mult, const RealRadial& f,
                                  double tol = kDefaultSpectralTol,
                                  int window_cap = kDefaultWindowCap) {
  if (!f.compactly_supported())
    throw std::invalid_argument("apply_spectral: input carries an undeclared outer tail");
  const int p = f.prime(), n = f.dim();
  const auto fhat = radial_fourier(f);
  const int B = fhat.k_max();
  const double c = fhat.inner_value();

  int lo = fhat.k_min();
  double rep_error = 0.0;
  if (c != 0.0) {
    while (true) {
      const double err = std::abs(c) * mult.inner_deviation(lo - 1) * ball_volume(lo - 1, n, p);
      if (err <= tol) {
        rep_error = err;
        break;
      }
      if (--lo < -window_cap)
        throw truncation_error("apply_spectral: inner window extension exceeds cap", err);
    }
  }

  RealRadial::Vector vals(B - lo + 1);
  for (int m = lo; m <= B; ++m) {
    const double fv = fhat.value_on_shell(m);
    vals[m - lo] = fv == 0.0 ? 0.0 : mult.value(m) * fv;
    if (!std::isfinite(vals[m - lo]))
      throw std::invalid_argument("apply_spectral: multiplier saturates on the spectrum");
  }
  InnerTail<double> tail = c == 0.0 ? InnerTail<double>::zero()
                                    : InnerTail<double>::constant(c * mult.value_at_zero);
  RealRadial product(p, n, lo, std::move(vals), tail);
  return {radial_fourier(product), rep_error};
}

/// D_psi f = F^{-1}(psi(||xi||) Ff); real output for real radial input.
inline ApplyResult apply_multiplier(const Symbol& psi, const RealRadial& f,
                                    double tol = kDefaultSpectralTol,
                                    int window_cap = kDefaultWindowCap) {
  SpectralMultiplier mult{[&psi](int m) { return psi.eval_shell(m); }, psi.eval_zero(),
                          [&psi](int m) { return psi.inner_deviation(m); }};
  return apply_spectral(mult, f, tol, window_cap);
}

struct OperatorTerm {
  double b;
  Symbol psi;
};

/// P(d) with symbol p(xi) = sum_j b_j psi_j(||xi||), acting as
/// P f = -F^{-1}(p . Ff).  Carries the Sobolev weight attached to the
/// symbol's growth class and the empirical domination constant
/// sup p(xi) / max(1, psi_w(xi)) recorded over the working window.
class PseudoDiffOperator {
 public:
  explicit PseudoDiffOperator(std::vector<OperatorTerm> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw std::invalid_argument("PseudoDiffOperator: no terms");
    p_ = terms_.front().psi.prime();
    n_ = terms_.front().psi.dim();
    bool has_type12 = false;
    for (const auto& t : terms_) {
      if (t.b <= 0) throw std::invalid_argument("PseudoDiffOperator: coefficients must be > 0");
      if (t.psi.prime() != p_ || t.psi.dim() != n_)
        throw std::invalid_argument("PseudoDiffOperator: mixed (p, n)");
      const int tag = t.psi.declared_type().tag;
      if (tag == 1 || tag == 2) has_type12 = true;
    }
    if (!has_type12)
      throw std::invalid_argument("PseudoDiffOperator: needs at least one type 1 or 2 term");
    attach_space_weight();
  }

  int prime() const { return p_; }
  int dim() const { return n_; }
  const std::vector<OperatorTerm>& terms() const { return terms_; }

  /// H(p^m) = sum_j b_j psi_j(p^m); the symbol as a function of the shell.
  double symbol_shell(int m) const {
    double acc = 0;
    for (const auto& t : terms_) acc += t.b * t.psi.eval_shell(m);
    return acc;
  }
  double symbol_zero() const {
    double acc = 0;
    for (const auto& t : terms_) acc += t.b * t.psi.eval_zero();
    return acc;
  }
  double symbol_deviation(int m) const {
    double acc = 0;
    for (const auto& t : terms_) acc += t.b * t.psi.inner_deviation(m);
    return acc;
  }

  /// Monotone lower bound with nondecreasing increments (1 - Jhat parts
  /// dropped); certified heat-kernel tails are computed against it.
  double minorant_shell(int m) const {
    double acc = 0;
    for (const auto& t : terms_) acc += t.b * t.psi.power_minorant_shell(m);
    return acc;
  }
  bool minorant_grows() const {
    for (const auto& t : terms_)
      if (t.psi.power_minorant_grows()) return true;
    return false;
  }

  SpectralMultiplier symbol_multiplier() const {
    return {[this](int m) { return symbol_shell(m); }, symbol_zero(),
            [this](int m) { return symbol_deviation(m); }};
  }

  const Symbol& space_weight() const { return *space_weight_; }
  double space_weight_bound() const { return space_weight_bound_; }

 private:
  void attach_space_weight() {
    std::vector<std::pair<double, Symbol>> type2;
    double beta = 0;
    for (const auto& t : terms_) {
      const auto& d = t.psi.declared_type();
      if (d.tag == 2) type2.emplace_back(1.0, t.psi);
      if (d.tag == 1) beta = std::max(beta, d.beta1);
    }
    Symbol w = type2.empty() ? Symbol::power_norm(p_, n_, 1.0, beta)
                             : normalize_condition_psi(Symbol::sum(type2)).normalized;
    w = w.with_declared_type(type2.empty() ? fit_type1(w, beta, beta)
                                           : fit_type2(w, {1, 2, 4, 8, 16}, -20, 20));
    space_weight_ = std::make_shared<const Symbol>(std::move(w));
    double bound = symbol_zero() / detail::max1(space_weight_->eval_zero());
    for (int m = kDefaultWindowLo; m <= kDefaultWindowHi; ++m) {
      const double h = symbol_shell(m);
      const double ww = detail::max1(space_weight_->eval_shell(m));
      if (!std::isfinite(h) || !std::isfinite(ww)) break;
      bound = std::max(bound, h / ww);
    }
    space_weight_bound_ = bound;
  }

  std::vector<OperatorTerm> terms_;
  int p_, n_;
  std::shared_ptr<const Symbol> space_weight_;
  double space_weight_bound_ = 0;
};

/// P f = -sum_j b_j D_{psi_j} f, evaluated through the combined symbol.
inline ApplyResult apply_P(const PseudoDiffOperator& op, const RealRadial& f,
                           double tol = kDefaultSpectralTol, int window_cap = kDefaultWindowCap) {
  auto r = apply_spectral(op.symbol_multiplier(), f, tol, window_cap);
  return {-1.0 * r.value, r.uniform_error};
}

namespace detail {

/// integral of f over the ball B_r^n: analytic inner-tail mass plus the
/// covered shells.
inline double ball_integral(const RealRadial& f, int r) {
  double acc = f.inner_value() * ball_volume(std::min(r, f.k_min() - 1), f.dim(), f.prime());
  for (int k = f.k_min(); k <= std::min(r, f.k_max()); ++k)
    acc += f.value_on_shell(k) * sphere_volume(k, f.dim(), f.prime());
  return acc;
}

/// integral over the y-shell S_k of g(x - y) for radial g and ||x|| = p^j:
/// equal-norm shells reduce to a ball average, all others are constant.
inline double shifted_shell_integral(const RealRadial& g, int j, int k) {
  const int p = g.prime(), n = g.dim();
  if (k != j) return g.value_on_shell(std::max(j, k)) * sphere_volume(k, n, p);
  return ball_integral(g, j - 1) +
         g.value_on_shell(j) * (sphere_volume(j, n, p) - ball_volume(j - 1, n, p));
}

}  // namespace detail

/// Taibleson operator through its hypersingular integral representation
///
///   (D^beta f)(x) = (1-p^beta)/(1-p^{-beta-n})
///                   . integral ||y||^{-beta-n} (f(x-y) - f(x)) dy.
///
/// For x on shell j the y-shells below j contribute nothing (||x-y|| =
/// ||x|| there and f is radial), the y-shell at j reduces to a ball
/// average, and the shells beyond the support of f sum to an exact
/// geometric tail, so the kernel singularity needs no regularization.
/// The output decays like p^{-j(beta+n)}; the mass beyond the emitted
/// window is declared via the L^1 tail bound.
inline RealRadial taibleson_integral_apply(double beta, const RealRadial& f, int extra_shells = 6) {
  if (beta <= 0) throw std::invalid_argument("taibleson_integral_apply: beta must be > 0");
  if (!f.compactly_supported())
    throw std::invalid_argument("taibleson_integral_apply: input must be compactly supported");
  const int p = f.prime(), n = f.dim();
  const double pd = static_cast<double>(p);
  const double kappa = (1.0 - std::pow(pd, beta)) / (1.0 - std::pow(pd, -beta - n));
  const int A = f.k_min(), B = f.k_max();
  const int lo = A - 1, hi = B + extra_shells;
  // p^{-k(beta+n)} vol(S_k^n)
  auto kernel_weight = [&](int k) { return std::pow(pd, -k * beta) * (1.0 - pow_int(p, -n)); };
  const double geom = 1.0 / (1.0 - std::pow(pd, -beta));

  RealRadial::Vector out(hi - lo + 1);
  for (int j = lo; j <= hi; ++j) {
    const double fj = f.value_on_shell(j);
    double acc = std::pow(pd, -j * (beta + n)) *
                 (detail::ball_integral(f, j - 1) - fj * ball_volume(j - 1, n, p));
    for (int k = j + 1; k <= B; ++k) acc += (f.value_on_shell(k) - fj) * kernel_weight(k);
    acc += -fj * kernel_weight(std::max(j + 1, B + 1)) * geom;
    out[j - lo] = kappa * acc;
  }
  // Beyond hi only the ball-average term survives:
  // value(j) = kappa p^{-j(beta+n)} integral(f).
  const double total = radial_integral(f).value;
  const double tail_l1 = std::abs(kappa * total) * kernel_weight(hi + 1) * geom;
  return RealRadial(p, n, lo, std::move(out), InnerTail<double>::limit(), tail_l1);
}

/// D_{psi_J} f = -integral J(||x-y||)(f(y) - f(x)) dy = f - J * f, computed
/// by direct shell sums in x-space (independently of the Fourier route it
/// must agree with).
inline RealRadial jkernel_apply(const RealRadial& J, const RealRadial& f) {
  detail::check_compatible(J, f, "jkernel_apply");
  if (!J.compactly_supported() || !f.compactly_supported())
    throw std::invalid_argument("jkernel_apply: inputs must be compactly supported");
  const double mass = radial_integral(J).value;
  if (std::abs(mass - 1.0) > 1e-12)
    throw std::invalid_argument("jkernel_apply: J must have unit mass");
  for (int k = J.k_min() - 1; k <= J.k_max(); ++k)
    if (J.value_on_shell(k) < 0) throw std::invalid_argument("jkernel_apply: J must be >= 0");

  const int p = f.prime(), n = f.dim();
  const int lo = std::min(J.k_min(), f.k_min()) - 1;
  const int hi = std::max(J.k_max(), f.k_max());
  RealRadial::Vector out(hi - lo + 1);
  for (int j = lo; j <= hi; ++j) {
    // (J * f)(x) for ||x|| = p^j.  Below k0 both J(||y||) and the shifted
    // shell integral of f are constant, so that part sums to a ball mass.
    const int k0 = std::min(J.k_min(), j);
    double conv = J.inner_value() * f.value_on_shell(j) * ball_volume(k0 - 1, n, p);
    for (int k = k0; k <= J.k_max(); ++k)
      conv += J.value_on_shell(k) * detail::shifted_shell_integral(f, j, k);
    out[j - lo] = f.value_on_shell(j) - conv;
  }
  return RealRadial(p, n, lo, std::move(out), InnerTail<double>::limit());
}

/// Resolvent of (lambda - P): u with (lambda - P) u = f, via
/// u_hat = f_hat / (lambda + H(||xi||)).
inline ApplyResult resolvent_solve(const PseudoDiffOperator& op, double lambda, const RealRadial& f,
                                   double tol = kDefaultSpectralTol,
                                   int window_cap = kDefaultWindowCap) {
  if (!(lambda > 0)) throw std::invalid_argument("resolvent_solve: lambda must be > 0");
  const double h0 = op.symbol_zero();
  SpectralMultiplier mult{
      [&op, lambda](int m) { return 1.0 / (lambda + op.symbol_shell(m)); },
      1.0 / (lambda + h0),
      [&op, lambda, h0](int m) { return op.symbol_deviation(m) / (lambda * (lambda + h0)); }};
  return apply_spectral(mult, f, tol, window_cap);
}

/// One PMP evaluation: where the test function attains its maximum and
/// what the generator does there.
struct PmpCase {
  double sup_value = 0.0;
  std::vector<int> argmax_shells;  // shells attaining the sup
  bool argmax_includes_origin = false;
  bool argmax_includes_far_field = false;  // sup attained on the zero outer region
  double op_value_at_max = 0.0;            // largest P f over the argmax set
  bool vacuous = false;                    // sup < 0: nothing to check
  bool inconclusive = false;               // sup not attainable on the window
  bool pass = false;
};

struct PmpReport {
  bool all_pass = true;
  std::vector<PmpCase> cases;
  int witness_index = -1;  // first failing case
};

/// Positive maximum principle test: for each real f with sup f >= 0
/// attained at x0, requires (sign . P f)(x0) <= tol.  Radial test
/// functions attain their sup on whole shells, where radial operators are
/// constant, so shell classes are honest witnesses.
inline PmpReport pmp_check(const PseudoDiffOperator& op, const std::vector<RealRadial>& fs,
                           double sign = 1.0, double tol = 1e-9,
                           double spectral_tol = kDefaultSpectralTol) {
  PmpReport report;
  for (const auto& f : fs) {
    PmpCase c;
    if (!f.compactly_supported()) {
      c.inconclusive = true;
      c.pass = false;
      report.all_pass = false;
      report.cases.push_back(std::move(c));
      continue;
    }
    auto pf = apply_P(op, f, spectral_tol);
    const RealRadial& g = pf.value;

    double window_sup = f.inner_value();
    for (int k = f.k_min(); k <= f.k_max(); ++k) window_sup = std::max(window_sup, f.value_on_shell(k));
    // f vanishes identically outside its window, so 0 is always attained.
    const double sup = std::max(window_sup, 0.0);
    c.sup_value = sup;
    c.vacuous = window_sup < 0;  // positive part of the max lives only in the far field
    const double match_tol = 1e-12 * (1.0 + std::abs(sup));
    double worst = -std::numeric_limits<double>::infinity();
    const int lo = std::min(f.k_min(), g.k_min()) - 1;
    const int hi = std::max(f.k_max(), g.k_max());
    for (int k = lo; k <= hi; ++k) {
      if (std::abs(f.value_on_shell(k) - sup) > match_tol) continue;
      if (k < f.k_min()) c.argmax_includes_origin = true;  // whole inner ball, origin included
      if (k > f.k_max()) c.argmax_includes_far_field = true;
      c.argmax_shells.push_back(k);
      worst = std::max(worst, sign * g.value_on_shell(k));
    }
    if (sup == 0.0) c.argmax_includes_far_field = true;  // P f is exactly 0 beyond both windows
    c.op_value_at_max = worst;
    c.pass = worst <= tol + pf.uniform_error;
    if (!c.pass && report.witness_index < 0)
      report.witness_index = static_cast<int>(report.cases.size());
    report.all_pass = report.all_pass && c.pass;
    report.cases.push_back(std::move(c));
  }
  return report;
}

struct DissipativityCase {
  double f_sup = 0.0;
  double resolvent_sup = 0.0;  // ||(1 - lambda P) f||_inf
  bool pass = false;
};

struct DissipativityReport {
  bool all_pass = true;
  std::vector<DissipativityCase> cases;
  int witness_index = -1;
};

/// Dissipativity of P: ||(1 - lambda P) f||_inf >= ||f||_inf.
inline DissipativityReport dissipativity_check(const PseudoDiffOperator& op, double lambda,
                                               const std::vector<RealRadial>& fs, double sign = 1.0,
                                               double spectral_tol = kDefaultSpectralTol) {
  if (!(lambda > 0)) throw std::invalid_argument("dissipativity_check: lambda must be > 0");
  DissipativityReport report;
  for (const auto& f : fs) {
    auto pf = apply_P(op, f, spectral_tol);
    const auto g = linear_combine(1.0, f, -lambda * sign, pf.value);
    DissipativityCase c;
    c.f_sup = f.sup_norm();
    c.resolvent_sup = g.sup_norm();
    const double slack = lambda * pf.uniform_error + 1e-12 * (1.0 + c.f_sup);
    c.pass = c.resolvent_sup + slack >= c.f_sup;
    if (!c.pass && report.witness_index < 0)
      report.witness_index = static_cast<int>(report.cases.size());
    report.all_pass = report.all_pass && c.pass;
    report.cases.push_back(c);
  }
  return report;
}

}  // namespace ultradiff
