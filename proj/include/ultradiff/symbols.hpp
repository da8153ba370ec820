#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ultradiff/radial.hpp"

namespace ultradiff {

/// Iterated exponentials overflow any float at modest shells; evaluation
/// saturates to +infinity beyond this magnitude and downstream semigroup
/// code treats exp(-t * inf) as 0.
inline constexpr double kSaturationLogThreshold = 700.0;

enum class SymbolKind { Const, PowerNorm, OneMinusJHat, PowerSeriesNorm, Sum, ExpTower };

/// Growth-class declaration with its certifying constants.
///   type 0: |psi| <= C
///   type 1: C0 [max(1,|xi|)]^b0 <= max(1,|psi|) <= C1 [max(1,|xi|)]^b1
///   type 2: max(1,|psi|) > C(b) [max(1,|xi|)]^b for each ladder exponent b
struct DeclaredType {
  int tag = -1;  // -1: undeclared
  double C = 0.0;
  double C0 = 0.0, C1 = 0.0, beta0 = 0.0, beta1 = 0.0;
  std::vector<double> betas, Cs;
};

/// Expression tree of radial negative definite functions on Q_p^n.
/// Immutable after construction; evaluation is pure.  Every constructor
/// corresponds to a class whose negative definiteness is backed by a
/// closure property (sums with positive weights, Fourier transforms of
/// probability densities, norm power series, exponential towers over
/// integer-exponent series); the finite-sample definiteness test provides
/// the runtime certificate.
class Symbol {
 public:
  static Symbol constant(int p, int n, double c) {
    if (c < 0) throw std::invalid_argument("Symbol: constant must be >= 0");
    auto node = make_node(SymbolKind::Const, p, n);
    node->c = c;
    return Symbol(std::move(node));
  }

  /// b ||xi||_p^alpha
  static Symbol power_norm(int p, int n, double b, double alpha) {
    if (b <= 0 || alpha <= 0) throw std::invalid_argument("Symbol: power_norm needs b, alpha > 0");
    auto node = make_node(SymbolKind::PowerNorm, p, n);
    node->b = b;
    node->alpha = alpha;
    return Symbol(std::move(node));
  }

  /// sum_j c_j ||xi||_p^{alpha_j}, all c_j >= 0, alpha_j > 0.
  static Symbol power_series_norm(int p, int n, std::vector<double> coeffs,
                                  std::vector<double> exponents) {
    if (coeffs.size() != exponents.size() || coeffs.empty())
      throw std::invalid_argument("Symbol: power_series_norm needs matching nonempty terms");
    for (double c : coeffs)
      if (c < 0) throw std::invalid_argument("Symbol: power_series_norm coefficients must be >= 0");
    for (double a : exponents)
      if (a <= 0) throw std::invalid_argument("Symbol: power_series_norm exponents must be > 0");
    auto node = make_node(SymbolKind::PowerSeriesNorm, p, n);
    node->coeffs = std::move(coeffs);
    node->exponents = std::move(exponents);
    return Symbol(std::move(node));
  }

  /// 1 - Jhat(||xi||_p) for a radial probability density J (J >= 0,
  /// integral 1, compact support).  Values lie in [0,2].
  static Symbol one_minus_jhat(RealRadial J) {
    if (!J.compactly_supported())
      throw std::invalid_argument("Symbol: J must be compactly supported");
    for (int k = J.k_min() - 1; k <= J.k_max(); ++k)
      if (J.value_on_shell(k) < 0) throw std::invalid_argument("Symbol: J must be >= 0");
    const double mass = radial_integral(J).value;
    if (std::abs(mass - 1.0) > 1e-12)
      throw std::invalid_argument("Symbol: J must have unit mass (got " + std::to_string(mass) + ")");
    auto node = make_node(SymbolKind::OneMinusJHat, J.prime(), J.dim());
    node->jhat = std::make_shared<RealRadial>(radial_fourier(J));
    node->j = std::make_shared<RealRadial>(std::move(J));
    return Symbol(std::move(node));
  }

  /// sum_j b_j psi_j with positive weights; negative definiteness is
  /// preserved (convex cone).
  static Symbol sum(std::vector<std::pair<double, Symbol>> terms) {
    if (terms.empty()) throw std::invalid_argument("Symbol: empty sum");
    for (const auto& [w, s] : terms) {
      if (w <= 0) throw std::invalid_argument("Symbol: sum weights must be > 0");
      if (s.prime() != terms.front().second.prime() || s.dim() != terms.front().second.dim())
        throw std::invalid_argument("Symbol: sum over mixed (p, n)");
    }
    auto node = make_node(SymbolKind::Sum, terms.front().second.prime(),
                          terms.front().second.dim());
    for (auto& [w, s] : terms) {
      node->weights.push_back(w);
      node->children.push_back(s.node_);
    }
    return Symbol(std::move(node));
  }

  /// height-fold iterated exponential of a norm power series.  The base is
  /// restricted to PowerSeriesNorm with integer exponents; arbitrary bases
  /// are rejected rather than guessed.
  static Symbol exp_tower(const Symbol& base, int height) {
    if (height < 1) throw std::invalid_argument("Symbol: tower height must be >= 1");
    if (base.kind() != SymbolKind::PowerSeriesNorm)
      throw std::invalid_argument("Symbol: tower base must be a norm power series");
    for (double a : base.node_->exponents)
      if (a != std::floor(a))
        throw std::invalid_argument("Symbol: tower base exponents must be integers");
    auto node = make_node(SymbolKind::ExpTower, base.prime(), base.dim());
    node->height = height;
    node->children.push_back(base.node_);
    node->weights.push_back(1.0);
    return Symbol(std::move(node));
  }

  SymbolKind kind() const { return node_->kind; }
  int prime() const { return node_->p; }
  int dim() const { return node_->n; }

  const DeclaredType& declared_type() const { return node_->declared; }
  Symbol with_declared_type(DeclaredType d) const {
    auto node = std::make_shared<Node>(*node_);
    node->declared = std::move(d);
    return Symbol(std::move(node));
  }

  /// Value at ||xi||_p = p^m; +infinity sentinel on overflow.
  double eval_shell(int m) const { return eval(node_.get(), m, false); }
  /// Value at xi = 0.
  double eval_zero() const { return eval(node_.get(), 0, true); }
  double eval_at(const ShellIndex& s) const {
    return s.is_origin() ? eval_zero() : eval_shell(s.k());
  }
  double eval_at(const PadicVector& x) const { return eval_at(x.shell()); }

  /// sup over m' <= m of |psi(p^{m'}) - psi(0)|; used to certify constant
  /// inner-tail continuations of spectral multipliers.
  double inner_deviation(int m) const { return dev(node_.get(), m); }

  /// Nondecreasing in the shell index (true for all norm-power built
  /// symbols; not claimed for 1 - Jhat).
  bool is_monotone() const { return monotone(node_.get()); }

  /// Lower bound for psi obtained by dropping 1 - Jhat subtrees; a
  /// nondecreasing function with nondecreasing increments, which is what
  /// certified heat-kernel tail bounds need.
  double power_minorant_shell(int m) const { return minorant(node_.get(), m); }
  bool power_minorant_grows() const { return minorant_grows(node_.get()); }

  const RealRadial* jhat() const { return node_->jhat.get(); }
  const RealRadial* jdensity() const { return node_->j.get(); }
  int tower_height() const { return node_->height; }
  double const_value() const { return node_->c; }
  double power_coeff() const { return node_->b; }
  double power_exponent() const { return node_->alpha; }
  const std::vector<double>& series_coeffs() const { return node_->coeffs; }
  const std::vector<double>& series_exponents() const { return node_->exponents; }
  std::vector<std::pair<double, Symbol>> sum_terms() const {
    std::vector<std::pair<double, Symbol>> out;
    for (std::size_t i = 0; i < node_->children.size(); ++i)
      out.emplace_back(node_->weights[i], Symbol(node_->children[i]));
    return out;
  }
  Symbol tower_base() const { return Symbol(node_->children.at(0)); }

 private:
  struct Node {
    SymbolKind kind;
    int p, n;
    double c = 0;                       // Const
    double b = 0, alpha = 0;            // PowerNorm
    std::vector<double> coeffs, exponents;  // PowerSeriesNorm
    std::shared_ptr<RealRadial> j, jhat;    // OneMinusJHat
    int height = 0;                     // ExpTower
    std::vector<double> weights;
    std::vector<std::shared_ptr<const Node>> children;
    DeclaredType declared;
  };

  explicit Symbol(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static std::shared_ptr<Node> make_node(SymbolKind k, int p, int n) {
    if (!is_prime(p)) throw std::invalid_argument("Symbol: p must be prime");
    if (n < 1) throw std::invalid_argument("Symbol: n must be >= 1");
    auto node = std::make_shared<Node>();
    node->kind = k;
    node->p = p;
    node->n = n;
    return node;
  }

  static double norm_power(int p, int m, double alpha) {
    // (p^m)^alpha, saturating
    const double lg = m * alpha * std::log(static_cast<double>(p));
    if (lg > kSaturationLogThreshold) return std::numeric_limits<double>::infinity();
    return std::exp(lg);
  }

  static double eval(const Node* nd, int m, bool origin) {
    switch (nd->kind) {
      case SymbolKind::Const:
        return nd->c;
      case SymbolKind::PowerNorm:
        return origin ? 0.0 : nd->b * norm_power(nd->p, m, nd->alpha);
      case SymbolKind::PowerSeriesNorm: {
        if (origin) return 0.0;
        double acc = 0;
        for (std::size_t i = 0; i < nd->coeffs.size(); ++i) {
          if (nd->coeffs[i] == 0) continue;
          acc += nd->coeffs[i] * norm_power(nd->p, m, nd->exponents[i]);
          if (!std::isfinite(acc)) return std::numeric_limits<double>::infinity();
        }
        return acc;
      }
      case SymbolKind::OneMinusJHat:
        return 1.0 - (origin ? nd->jhat->inner_value() : nd->jhat->value_on_shell(m));
      case SymbolKind::Sum: {
        double acc = 0;
        for (std::size_t i = 0; i < nd->children.size(); ++i) {
          acc += nd->weights[i] * eval(nd->children[i].get(), m, origin);
          if (!std::isfinite(acc)) return std::numeric_limits<double>::infinity();
        }
        return acc;
      }
      case SymbolKind::ExpTower: {
        double x = eval(nd->children[0].get(), m, origin);
        for (int j = 0; j < nd->height; ++j) {
          if (x > kSaturationLogThreshold) return std::numeric_limits<double>::infinity();
          x = std::exp(x);
        }
        return x;
      }
    }
    return 0.0;
  }

  static bool monotone(const Node* nd) {
    switch (nd->kind) {
      case SymbolKind::OneMinusJHat:
        return false;
      case SymbolKind::Sum:
      case SymbolKind::ExpTower:
        return std::all_of(nd->children.begin(), nd->children.end(),
                           [](const auto& c) { return monotone(c.get()); });
      default:
        return true;
    }
  }

  static double dev(const Node* nd, int m) {
    if (monotone(nd)) {
      const double d = eval(nd, m, false) - eval(nd, 0, true);
      return std::max(d, 0.0);
    }
    switch (nd->kind) {
      case SymbolKind::OneMinusJHat: {
        // Jhat is exactly 1 below its stored window, so the deviation
        // vanishes for deep shells and is a finite max otherwise.
        const auto& jh = *nd->jhat;
        if (m < jh.k_min()) return 0.0;
        double d = 0;
        for (int mm = jh.k_min(); mm <= std::min(m, jh.k_max()); ++mm)
          d = std::max(d, std::abs(1.0 - jh.value_on_shell(mm)));
        if (m > jh.k_max()) d = std::max(d, 1.0);
        return d;
      }
      case SymbolKind::Sum: {
        double acc = 0;
        for (std::size_t i = 0; i < nd->children.size(); ++i)
          acc += nd->weights[i] * dev(nd->children[i].get(), m);
        return acc;
      }
      default:
        return eval(nd, m, false) - eval(nd, 0, true);
    }
  }

  static double minorant(const Node* nd, int m) {
    switch (nd->kind) {
      case SymbolKind::OneMinusJHat:
        return 0.0;
      case SymbolKind::Sum: {
        double acc = 0;
        for (std::size_t i = 0; i < nd->children.size(); ++i)
          acc += nd->weights[i] * minorant(nd->children[i].get(), m);
        return acc;
      }
      case SymbolKind::ExpTower: {
        double x = minorant(nd->children[0].get(), m);
        for (int j = 0; j < nd->height; ++j) {
          if (x > kSaturationLogThreshold) return std::numeric_limits<double>::infinity();
          x = std::exp(x);
        }
        return x;
      }
      default:
        return eval(nd, m, false);
    }
  }

  static bool minorant_grows(const Node* nd) {
    switch (nd->kind) {
      case SymbolKind::Const:
      case SymbolKind::OneMinusJHat:
        return false;
      case SymbolKind::PowerNorm:
        return true;
      case SymbolKind::PowerSeriesNorm:
        for (std::size_t i = 0; i < nd->coeffs.size(); ++i)
          if (nd->coeffs[i] > 0) return true;
        return false;
      case SymbolKind::Sum:
        return std::any_of(nd->children.begin(), nd->children.end(),
                           [](const auto& c) { return minorant_grows(c.get()); });
      case SymbolKind::ExpTower:
        return minorant_grows(nd->children[0].get());
    }
    return false;
  }

  std::shared_ptr<const Node> node_;
};

inline double eval_symbol(const Symbol& psi, const ShellIndex& s) { return psi.eval_at(s); }

/// Shell range every sample-based certificate runs over by default.
inline constexpr int kDefaultWindowLo = -64;
inline constexpr int kDefaultWindowHi = 64;

struct TypeCheckReport {
  bool ok = false;
  int tag = -1;
  std::optional<int> offending_shell;  // nullopt + !ok means the origin failed
  std::string message;
};

namespace detail {
inline double max_norm_term(int p, int m, double beta) {
  // [max(1, ||xi||)]^beta at ||xi|| = p^m
  if (m <= 0) return 1.0;
  const double lg = m * beta * std::log(static_cast<double>(p));
  if (lg > kSaturationLogThreshold) return std::numeric_limits<double>::infinity();
  return std::exp(lg);
}
inline double max1(double x) { return std::max(1.0, std::abs(x)); }
}  // namespace detail

/// Verifies the declared growth class on every shell of the window (plus
/// the origin).  Certification is sample-based; no global claim.
inline TypeCheckReport classify_type(const Symbol& psi, int window_lo = kDefaultWindowLo,
                                     int window_hi = kDefaultWindowHi) {
  const DeclaredType& d = psi.declared_type();
  TypeCheckReport rep;
  rep.tag = d.tag;
  if (d.tag < 0) {
    rep.message = "no declared type";
    return rep;
  }
  auto fail = [&](std::optional<int> shell, const std::string& msg) {
    rep.ok = false;
    rep.offending_shell = shell;
    rep.message = msg;
    return rep;
  };
  const int p = psi.prime();
  for (int step = -1; step <= window_hi - window_lo; ++step) {
    const bool origin = step < 0;
    const int m = window_lo + step;
    const double v = origin ? psi.eval_zero() : psi.eval_shell(m);
    const auto where = origin ? std::optional<int>() : std::optional<int>(m);
    switch (d.tag) {
      case 0:
        if (!(std::abs(v) <= d.C)) return fail(where, "type 0 bound exceeded");
        break;
      case 1: {
        const double lhs = d.C0 * detail::max_norm_term(p, origin ? 0 : m, d.beta0);
        const double rhs = d.C1 * detail::max_norm_term(p, origin ? 0 : m, d.beta1);
        const double mid = detail::max1(v);
        if (!(lhs <= mid * (1 + 1e-12))) return fail(where, "type 1 lower bound fails");
        if (!(mid <= rhs * (1 + 1e-12))) return fail(where, "type 1 upper bound fails");
        break;
      }
      case 2: {
        for (std::size_t i = 0; i < d.betas.size(); ++i) {
          const double bound = d.Cs[i] * detail::max_norm_term(p, origin ? 0 : m, d.betas[i]);
          if (!(detail::max1(v) > bound)) return fail(where, "type 2 lower bound fails");
        }
        break;
      }
      default:
        return fail(std::nullopt, "unknown type tag");
    }
  }
  rep.ok = true;
  rep.message = "certified on window";
  return rep;
}

/// Empirical type-1 constants for given exponents: the largest C0 and
/// smallest C1 valid on the window.
inline DeclaredType fit_type1(const Symbol& psi, double beta0, double beta1,
                              int window_lo = kDefaultWindowLo, int window_hi = kDefaultWindowHi) {
  DeclaredType d;
  d.tag = 1;
  d.beta0 = beta0;
  d.beta1 = beta1;
  double c0 = std::numeric_limits<double>::infinity(), c1 = 0;
  for (int step = -1; step <= window_hi - window_lo; ++step) {
    const bool origin = step < 0;
    const int m = window_lo + step;
    const double v = detail::max1(origin ? psi.eval_zero() : psi.eval_shell(m));
    c0 = std::min(c0, v / detail::max_norm_term(psi.prime(), origin ? 0 : m, beta0));
    c1 = std::max(c1, v / detail::max_norm_term(psi.prime(), origin ? 0 : m, beta1));
  }
  d.C0 = c0;
  d.C1 = c1;
  return d;
}

/// Empirical type-2 ladder constants (half the observed minimum ratio).
inline DeclaredType fit_type2(const Symbol& psi, std::vector<double> ladder = {1, 2, 4, 8, 16},
                              int window_lo = kDefaultWindowLo, int window_hi = kDefaultWindowHi) {
  DeclaredType d;
  d.tag = 2;
  d.betas = std::move(ladder);
  for (double beta : d.betas) {
    double c = std::numeric_limits<double>::infinity();
    for (int step = -1; step <= window_hi - window_lo; ++step) {
      const bool origin = step < 0;
      const int m = window_lo + step;
      const double v = detail::max1(origin ? psi.eval_zero() : psi.eval_shell(m));
      const double t = detail::max_norm_term(psi.prime(), origin ? 0 : m, beta);
      if (std::isfinite(v) || std::isfinite(t)) c = std::min(c, v / t);
    }
    d.Cs.push_back(0.5 * c);
  }
  return d;
}

struct NormalizeResult {
  Symbol normalized;
  double scale;  // normalized = scale * original
  double sup_on_unit_ball;
};

/// Rescales psi so that 0 < sup_{Z_p^n} |psi| <= 1.  The sup is taken over
/// shells [window_lo, 0] plus the origin; radial continuity makes deeper
/// shells converge to psi(0).
inline NormalizeResult normalize_condition_psi(const Symbol& psi, int window_lo = kDefaultWindowLo) {
  double sup = std::abs(psi.eval_zero());
  for (int m = window_lo; m <= 0; ++m) sup = std::max(sup, std::abs(psi.eval_shell(m)));
  if (!(sup > 0))
    throw std::invalid_argument("normalize_condition_psi: symbol vanishes on Z_p^n");
  if (!std::isfinite(sup))
    throw std::invalid_argument("normalize_condition_psi: symbol saturates on Z_p^n");
  if (sup <= 1.0) return {psi, 1.0, sup};
  const double scale = 1.0 / sup;
  return {Symbol::sum({{scale, psi}}), scale, sup};
}

}  // namespace ultradiff
