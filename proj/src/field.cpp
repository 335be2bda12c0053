#include "covforge/field.hpp"

#include <sstream>

namespace covforge {

namespace {

// Sign of p + q*sqrt2 for rational p, q.
int sign_q2(const Rational& p, const Rational& q) {
  const int sp = sgn(p);
  const int sq = sgn(q);
  if (sq == 0) return sp;
  if (sp == 0) return sq;
  if (sp == sq) return sp;
  // Opposite signs: compare p^2 against 2 q^2.
  const Rational w = p * p - 2 * q * q;
  return sp * sgn(w);
}

}  // namespace

int FieldScalar::sign() const {
  // Split as u + sqrt3 * v with u = a + b*sqrt2, v = c + d*sqrt2.
  const int su = sign_q2(a, b);
  const int sv = sign_q2(c, d);
  if (sv == 0) return su;
  if (su == 0) return sv;
  if (su == sv) return su;
  // Opposite signs: compare u^2 against 3 v^2 inside Q(sqrt2).
  // u^2 = a^2 + 2b^2 + 2ab*sqrt2, v^2 likewise.
  const Rational wp = a * a + 2 * b * b - 3 * (c * c + 2 * d * d);
  const Rational wq = 2 * a * b - 6 * c * d;
  return su * sign_q2(wp, wq);
}

FieldScalar FieldScalar::inverse() const {
  if (is_zero()) throw DivisionByZero();
  // Solve M v = e1 where M is multiplication-by-x in the basis
  // {1, sqrt2, sqrt3, sqrt6}:
  //   x*1     = (a, b, c, d)
  //   x*sqrt2 = (2b, a, 2d, c)
  //   x*sqrt3 = (3c, 3d, a, b)
  //   x*sqrt6 = (6d, 3c, 2b, a)
  Rational m[4][5] = {
      {a, 2 * b, 3 * c, 6 * d, Rational(1)},
      {b, a, 3 * d, 3 * c, Rational(0)},
      {c, 2 * d, a, 2 * b, Rational(0)},
      {d, c, b, a, Rational(0)},
  };
  for (int col = 0; col < 4; ++col) {
    int piv = -1;
    for (int r = col; r < 4; ++r) {
      if (m[r][col] != 0) {
        piv = r;
        break;
      }
    }
    if (piv < 0) throw DivisionByZero();  // singular: cannot happen in a field
    if (piv != col) {
      for (int k = 0; k < 5; ++k) std::swap(m[piv][k], m[col][k]);
    }
    const Rational p = m[col][col];
    for (int k = col; k < 5; ++k) m[col][k] /= p;
    for (int r = 0; r < 4; ++r) {
      if (r == col || m[r][col] == 0) continue;
      const Rational f = m[r][col];
      for (int k = col; k < 5; ++k) m[r][k] -= f * m[col][k];
    }
  }
  return FieldScalar(m[0][4], m[1][4], m[2][4], m[3][4]);
}

std::optional<FieldScalar> FieldScalar::sqrt_in_field() const {
  if (sign() < 0) return std::nullopt;
  if (is_zero()) return FieldScalar();
  if (!is_rational()) return std::nullopt;
  // r = s^2 * m with m in {1, 2, 3, 6}: then sqrt(r) = s * sqrt(m).
  const auto rational_sqrt = [](const Rational& r) -> std::optional<Rational> {
    if (!mpz_perfect_square_p(r.get_num_mpz_t()) ||
        !mpz_perfect_square_p(r.get_den_mpz_t())) {
      return std::nullopt;
    }
    Rational s;
    mpz_sqrt(s.get_num_mpz_t(), r.get_num_mpz_t());
    mpz_sqrt(s.get_den_mpz_t(), r.get_den_mpz_t());
    return s;
  };
  if (auto s = rational_sqrt(a)) return FieldScalar(*s);
  if (auto s = rational_sqrt(a / 2)) return FieldScalar(0, *s, 0, 0);
  if (auto s = rational_sqrt(a / 3)) return FieldScalar(0, 0, *s, 0);
  if (auto s = rational_sqrt(a / 6)) return FieldScalar(0, 0, 0, *s);
  return std::nullopt;
}

double FieldScalar::to_double() const {
  return a.get_d() + b.get_d() * 1.4142135623730951 + c.get_d() * 1.7320508075688772 +
         d.get_d() * 2.449489742783178;
}

std::string rational_str(const Rational& r) {
  std::ostringstream os;
  os << r.get_num() << "/" << r.get_den();
  return os.str();
}

Rational rational_from_str(const std::string& s) {
  Rational r;
  if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
  r.canonicalize();
  return r;
}

std::string FieldScalar::str() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  const auto emit = [&](const Rational& v, const char* radical) {
    if (v == 0) return;
    Rational av = abs(v);
    if (first) {
      if (v < 0) os << "-";
      first = false;
    } else {
      os << (v < 0 ? " - " : " + ");
    }
    const bool unit = (av == 1) && radical[0] != '\0';
    if (!unit) {
      os << av.get_num();
      if (av.get_den() != 1) os << "/" << av.get_den();
      if (radical[0] != '\0') os << "*";
    }
    os << radical;
  };
  emit(a, "");
  emit(b, "sqrt(2)");
  emit(c, "sqrt(3)");
  emit(d, "sqrt(6)");
  return os.str();
}

}  // namespace covforge
