#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <compare>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ultradiff {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Digits kept past the leading digit of every arithmetic result.  Any
/// finite simulation only distinguishes points up to a ball of radius
/// p^(v+L), so truncated values behave as elements of a quotient space.
inline constexpr int kDefaultDigitPrecision = 32;

/// Sentinel for ord(0) = +infinity.
inline constexpr int kOrdInfinity = std::numeric_limits<int>::max();

inline bool is_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; static_cast<long long>(d) * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

/// base^e with exact results while the value fits in 53 bits.
inline double pow_int(double base, long long e) {
  if (e < 0) return 1.0 / pow_int(base, -e);
  double acc = 1.0, b = base;
  while (e > 0) {
    if (e & 1) acc *= b;
    b *= b;
    e >>= 1;
  }
  return acc;
}

inline BigInt big_pow(int base, int e) {
  BigInt acc = 1, b = base;
  while (e > 0) {
    if (e & 1) acc *= b;
    b *= b;
    e >>= 1;
  }
  return acc;
}

/// The sphere ||x||_p = p^k, with a distinguished origin element standing
/// for k = -infinity.
class ShellIndex {
 public:
  static ShellIndex origin() { return ShellIndex(0, true); }
  static ShellIndex of(int k) { return ShellIndex(k, false); }

  bool is_origin() const { return origin_; }
  int k() const {
    if (origin_) throw std::logic_error("ShellIndex: origin has no finite shell");
    return k_;
  }

  friend bool operator==(const ShellIndex& a, const ShellIndex& b) {
    return a.origin_ == b.origin_ && (a.origin_ || a.k_ == b.k_);
  }
  friend std::strong_ordering operator<=>(const ShellIndex& a, const ShellIndex& b) {
    if (a.origin_ != b.origin_) return a.origin_ ? std::strong_ordering::less : std::strong_ordering::greater;
    if (a.origin_) return std::strong_ordering::equal;
    return a.k_ <=> b.k_;
  }

 private:
  ShellIndex(int k, bool origin) : k_(k), origin_(origin) {}
  int k_;
  bool origin_;
};

/// Element of Q_p in truncated canonical digit form
///
///   x = p^v * (d0 + d1 p + d2 p^2 + ...),   d0 != 0,
///
/// with at most L digits retained.  Zero is a tagged value, not a digit
/// pattern, since ord(0) = +infinity has no digit encoding.  Values are
/// immutable after construction; all operations are pure.
class PadicScalar {
 public:
  static PadicScalar zero(int p) {
    check_prime(p);
    PadicScalar x;
    x.p_ = p;
    x.zero_ = true;
    return x;
  }

  /// Canonicalizes: strips leading/trailing zero digits, truncates to
  /// `precision` digits.  Empty digit list yields zero.
  static PadicScalar from_digits(int p, int v, std::vector<int> digits,
                                 int precision = kDefaultDigitPrecision) {
    check_prime(p);
    for (int d : digits)
      if (d < 0 || d >= p) throw std::invalid_argument("PadicScalar: digit out of range");
    PadicScalar x;
    x.p_ = p;
    x.v_ = v;
    x.digits_ = std::move(digits);
    x.canonicalize(precision);
    return x;
  }

  static PadicScalar from_int(long long value, int p, int precision = kDefaultDigitPrecision) {
    check_prime(p);
    if (value == 0) return zero(p);
    bool neg = value < 0;
    unsigned long long u = neg ? -static_cast<unsigned long long>(value) : value;
    int v = 0;
    while (u % p == 0) {
      u /= p;
      ++v;
    }
    std::vector<int> digits;
    while (u > 0 && static_cast<int>(digits.size()) < precision) {
      digits.push_back(static_cast<int>(u % p));
      u /= p;
    }
    PadicScalar x = from_digits(p, v, std::move(digits), precision);
    return neg ? x.negate(precision) : x;
  }

  /// p^v as a p-adic value.
  static PadicScalar unit_power(int p, int v) { return from_digits(p, v, {1}); }

  bool is_zero() const { return zero_; }
  int prime() const { return p_; }

  /// Valuation of the leading digit; only defined for nonzero values.
  int valuation() const {
    if (zero_) throw std::logic_error("PadicScalar: zero has no valuation");
    return v_;
  }
  const std::vector<int>& digits() const { return digits_; }

  int ord() const { return zero_ ? kOrdInfinity : v_; }

  double norm() const { return zero_ ? 0.0 : pow_int(p_, -static_cast<long long>(v_)); }

  /// {x}_p as an exact rational in [0,1).  Digits at negative powers have
  /// denominator p^{-v}, which overflows doubles for deep valuations, so
  /// the result stays exact until the caller converts.
  BigRational fractional_part() const {
    if (zero_ || v_ >= 0) return BigRational(0);
    const int depth = -v_;
    BigInt num = 0;
    BigInt pw = 1;
    for (int j = 0; j < depth && j < static_cast<int>(digits_.size()); ++j) {
      num += digits_[j] * pw;
      pw *= p_;
    }
    return BigRational(num, big_pow(p_, depth));
  }

  PadicScalar negate(int precision = kDefaultDigitPrecision) const {
    if (zero_) return *this;
    std::vector<int> out(precision);
    out[0] = p_ - digits_[0];
    for (int i = 1; i < precision; ++i) {
      int di = i < static_cast<int>(digits_.size()) ? digits_[i] : 0;
      out[i] = p_ - 1 - di;
    }
    return from_digits(p_, v_, std::move(out), precision);
  }

  PadicScalar add(const PadicScalar& rhs, int precision = kDefaultDigitPrecision) const {
    check_same_prime(rhs);
    if (zero_) return rhs;
    if (rhs.zero_) return *this;
    const int lo = std::min(v_, rhs.v_);
    // Digits at powers >= lo + precision are unknowable from truncated inputs.
    const int cut = lo + precision;
    const int hi = std::min(std::max(v_ + len(), rhs.v_ + rhs.len()), cut);
    std::vector<int> acc(hi - lo + 1, 0);
    for (int i = 0; i < len(); ++i)
      if (v_ + i < cut) acc[v_ + i - lo] += digits_[i];
    for (int i = 0; i < rhs.len(); ++i)
      if (rhs.v_ + i < cut) acc[rhs.v_ + i - lo] += rhs.digits_[i];
    int carry = 0;
    for (std::size_t i = 0; i < acc.size(); ++i) {
      acc[i] += carry;
      carry = acc[i] / p_;
      acc[i] %= p_;
    }
    acc.resize(std::min<std::size_t>(acc.size(), cut - lo));
    return from_digits(p_, lo, std::move(acc), precision);
  }

  PadicScalar sub(const PadicScalar& rhs, int precision = kDefaultDigitPrecision) const {
    return add(rhs.negate(precision), precision);
  }

  PadicScalar mul(const PadicScalar& rhs, int precision = kDefaultDigitPrecision) const {
    check_same_prime(rhs);
    if (zero_ || rhs.zero_) return zero(p_);
    const int width = std::min(len() + rhs.len(), precision + 1);
    std::vector<long long> acc(width, 0);
    for (int i = 0; i < len(); ++i)
      for (int j = 0; j < rhs.len(); ++j)
        if (i + j < width) acc[i + j] += static_cast<long long>(digits_[i]) * rhs.digits_[j];
    std::vector<int> out(width);
    long long carry = 0;
    for (int i = 0; i < width; ++i) {
      long long s = acc[i] + carry;
      carry = s / p_;
      out[i] = static_cast<int>(s % p_);
    }
    return from_digits(p_, v_ + rhs.v_, std::move(out), precision);
  }

  friend PadicScalar operator+(const PadicScalar& a, const PadicScalar& b) { return a.add(b); }
  friend PadicScalar operator-(const PadicScalar& a, const PadicScalar& b) { return a.sub(b); }
  friend PadicScalar operator-(const PadicScalar& a) { return a.negate(); }
  friend PadicScalar operator*(const PadicScalar& a, const PadicScalar& b) { return a.mul(b); }

  friend bool operator==(const PadicScalar& a, const PadicScalar& b) {
    if (a.p_ != b.p_) return false;
    if (a.zero_ || b.zero_) return a.zero_ == b.zero_;
    return a.v_ == b.v_ && a.digits_ == b.digits_;
  }

  /// Text form `p^v * (d0 d1 ...)`, `0` for zero.
  std::string to_string() const {
    if (zero_) return "0";
    std::ostringstream os;
    os << p_ << '^' << v_ << " * (";
    for (std::size_t i = 0; i < digits_.size(); ++i) {
      if (i) os << ' ';
      os << digits_[i];
    }
    os << ')';
    return os.str();
  }

 private:
  PadicScalar() = default;

  int len() const { return static_cast<int>(digits_.size()); }

  static void check_prime(int p) {
    if (!is_prime(p)) throw std::invalid_argument("PadicScalar: p must be prime");
  }
  void check_same_prime(const PadicScalar& rhs) const {
    if (p_ != rhs.p_) throw std::invalid_argument("PadicScalar: mixed primes");
  }

  void canonicalize(int precision) {
    std::size_t lead = 0;
    while (lead < digits_.size() && digits_[lead] == 0) ++lead;
    if (lead == digits_.size()) {
      zero_ = true;
      v_ = 0;
      digits_.clear();
      return;
    }
    digits_.erase(digits_.begin(), digits_.begin() + lead);
    v_ += static_cast<int>(lead);
    if (static_cast<int>(digits_.size()) > precision) digits_.resize(precision);
    while (!digits_.empty() && digits_.back() == 0) digits_.pop_back();
    zero_ = false;
  }

  int p_ = 2;
  int v_ = 0;
  std::vector<int> digits_;
  bool zero_ = false;
};

inline int padic_ord(const PadicScalar& x) { return x.ord(); }
inline double padic_norm(const PadicScalar& x) { return x.norm(); }
inline BigRational fractional_part(const PadicScalar& x) { return x.fractional_part(); }

/// chi_p(y) = exp(2 pi i {y}_p); an additive character of Q_p.
inline std::complex<double> character(const PadicScalar& y) {
  const double q = y.fractional_part().convert_to<double>();
  const double arg = 2.0 * std::numbers::pi * q;
  return {std::cos(arg), std::sin(arg)};
}

/// Point of Q_p^n; all components share the prime.
class PadicVector {
 public:
  PadicVector(int p, std::vector<PadicScalar> components) : p_(p), comps_(std::move(components)) {
    if (comps_.empty()) throw std::invalid_argument("PadicVector: dimension must be >= 1");
    for (const auto& c : comps_)
      if (c.prime() != p_) throw std::invalid_argument("PadicVector: mixed primes");
  }

  static PadicVector zero(int p, int n) {
    return PadicVector(p, std::vector<PadicScalar>(n, PadicScalar::zero(p)));
  }

  int prime() const { return p_; }
  int dim() const { return static_cast<int>(comps_.size()); }
  const std::vector<PadicScalar>& components() const { return comps_; }
  const PadicScalar& operator[](int i) const { return comps_[i]; }

  bool is_zero() const {
    return std::all_of(comps_.begin(), comps_.end(), [](const auto& c) { return c.is_zero(); });
  }

  int ord() const {
    int o = kOrdInfinity;
    for (const auto& c : comps_) o = std::min(o, c.ord());
    return o;
  }

  double norm() const {
    double m = 0;
    for (const auto& c : comps_) m = std::max(m, c.norm());
    return m;
  }

  /// Sphere containing this point; origin sentinel for the zero vector.
  ShellIndex shell() const {
    const int o = ord();
    return o == kOrdInfinity ? ShellIndex::origin() : ShellIndex::of(-o);
  }

  PadicVector add(const PadicVector& rhs, int precision = kDefaultDigitPrecision) const {
    check_compatible(rhs);
    std::vector<PadicScalar> out;
    out.reserve(comps_.size());
    for (std::size_t i = 0; i < comps_.size(); ++i) out.push_back(comps_[i].add(rhs.comps_[i], precision));
    return PadicVector(p_, std::move(out));
  }

  PadicVector sub(const PadicVector& rhs, int precision = kDefaultDigitPrecision) const {
    check_compatible(rhs);
    std::vector<PadicScalar> out;
    out.reserve(comps_.size());
    for (std::size_t i = 0; i < comps_.size(); ++i) out.push_back(comps_[i].sub(rhs.comps_[i], precision));
    return PadicVector(p_, std::move(out));
  }

  friend PadicVector operator+(const PadicVector& a, const PadicVector& b) { return a.add(b); }
  friend PadicVector operator-(const PadicVector& a, const PadicVector& b) { return a.sub(b); }
  friend bool operator==(const PadicVector& a, const PadicVector& b) {
    return a.p_ == b.p_ && a.comps_ == b.comps_;
  }

 private:
  void check_compatible(const PadicVector& rhs) const {
    if (p_ != rhs.p_ || comps_.size() != rhs.comps_.size())
      throw std::invalid_argument("PadicVector: incompatible operands");
  }

  int p_;
  std::vector<PadicScalar> comps_;
};

inline double padic_norm(const PadicVector& x) { return x.norm(); }

}  // namespace ultradiff
