#pragma once

#include <gmpxx.h>

#include <Eigen/Core>
#include <array>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace covforge {

// Exact rational scalar. gmpxx keeps values canonical: gcd(|num|, den) = 1,
// den > 0, zero stored as 0/1.
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

struct DivisionByZero : std::domain_error {
  DivisionByZero() : std::domain_error("division by zero") {}
};

/// Element of the real quadratic extension Q(sqrt2, sqrt3), stored as
/// a + b*sqrt2 + c*sqrt3 + d*sqrt6 with rational components. The
/// representation is unique, so equality is componentwise.
class FieldScalar {
 public:
  Rational a, b, c, d;

  FieldScalar() : a(0), b(0), c(0), d(0) {}
  FieldScalar(long v) : a(v), b(0), c(0), d(0) {}          // NOLINT(runtime/explicit)
  FieldScalar(const Rational& v) : a(v), b(0), c(0), d(0) {}  // NOLINT(runtime/explicit)
  FieldScalar(Rational av, Rational bv, Rational cv, Rational dv)
      : a(std::move(av)), b(std::move(bv)), c(std::move(cv)), d(std::move(dv)) {}

  static FieldScalar sqrt2() { return FieldScalar(0, 1, 0, 0); }
  static FieldScalar sqrt3() { return FieldScalar(0, 0, 1, 0); }
  static FieldScalar sqrt6() { return FieldScalar(0, 0, 0, 1); }
  // 1/sqrt2 = sqrt2/2, etc. These are the normalizations that occur in
  // symmetry-adapted polynomial tables.
  static FieldScalar inv_sqrt2() { return FieldScalar(0, rat(1, 2), 0, 0); }
  static FieldScalar inv_sqrt3() { return FieldScalar(0, 0, rat(1, 3), 0); }
  static FieldScalar inv_sqrt6() { return FieldScalar(0, 0, 0, rat(1, 6)); }

  bool is_zero() const { return a == 0 && b == 0 && c == 0 && d == 0; }
  bool is_rational() const { return b == 0 && c == 0 && d == 0; }

  friend bool operator==(const FieldScalar& x, const FieldScalar& y) {
    return x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d;
  }
  friend bool operator!=(const FieldScalar& x, const FieldScalar& y) { return !(x == y); }

  FieldScalar& operator+=(const FieldScalar& o) {
    a += o.a;
    b += o.b;
    c += o.c;
    d += o.d;
    return *this;
  }
  FieldScalar& operator-=(const FieldScalar& o) {
    a -= o.a;
    b -= o.b;
    c -= o.c;
    d -= o.d;
    return *this;
  }
  friend FieldScalar operator+(FieldScalar x, const FieldScalar& y) { return x += y; }
  friend FieldScalar operator-(FieldScalar x, const FieldScalar& y) { return x -= y; }
  friend FieldScalar operator-(const FieldScalar& x) {
    return FieldScalar(-x.a, -x.b, -x.c, -x.d);
  }

  // Multiplication reduces via sqrt2*sqrt3 = sqrt6, (sqrt2)^2 = 2,
  // (sqrt3)^2 = 3, (sqrt6)^2 = 6.
  friend FieldScalar operator*(const FieldScalar& x, const FieldScalar& y) {
    FieldScalar r;
    r.a = x.a * y.a + 2 * x.b * y.b + 3 * x.c * y.c + 6 * x.d * y.d;
    r.b = x.a * y.b + x.b * y.a + 3 * (x.c * y.d + x.d * y.c);
    r.c = x.a * y.c + x.c * y.a + 2 * (x.b * y.d + x.d * y.b);
    r.d = x.a * y.d + x.d * y.a + x.b * y.c + x.c * y.b;
    return r;
  }
  FieldScalar& operator*=(const FieldScalar& o) { return *this = *this * o; }

  FieldScalar inverse() const;
  friend FieldScalar operator/(const FieldScalar& x, const FieldScalar& y) {
    return x * y.inverse();
  }
  FieldScalar& operator/=(const FieldScalar& o) { return *this = *this * o.inverse(); }

  /// Exact sign of the real value: -1, 0 or +1.
  int sign() const;

  /// Exact square root inside the field, when one exists. Handles the
  /// rational case r = s^2 * m with m in {1,2,3,6}; returns nullopt otherwise.
  std::optional<FieldScalar> sqrt_in_field() const;

  double to_double() const;
  std::string str() const;

  friend std::ostream& operator<<(std::ostream& os, const FieldScalar& x) {
    return os << x.str();
  }
};

inline FieldScalar operator*(long s, const FieldScalar& x) { return FieldScalar(s) * x; }

std::string rational_str(const Rational& r);
Rational rational_from_str(const std::string& s);

using FMat = Eigen::Matrix<FieldScalar, Eigen::Dynamic, Eigen::Dynamic>;
using FVec = Eigen::Matrix<FieldScalar, Eigen::Dynamic, 1>;

}  // namespace covforge

namespace Eigen {
template <>
struct NumTraits<covforge::FieldScalar> {
  using Real = covforge::FieldScalar;
  using NonInteger = covforge::FieldScalar;
  using Literal = covforge::FieldScalar;
  using Nested = covforge::FieldScalar;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 16,
    MulCost = 64,
  };
  static inline Real epsilon() { return Real(); }
  static inline Real dummy_precision() { return Real(); }
  static inline int digits10() { return 0; }
};
}  // namespace Eigen
