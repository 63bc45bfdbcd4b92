#pragma once

// Cl(3,0) geometric algebra over a dense 8-coefficient representation.
//
// Blade order (also the serialization order):
//   0: 1   1: e1   2: e2   3: e3   4: e23   5: e31   6: e12   7: e123
//
// The bivector basis is cyclic, so that I*e1 = e23, I*e2 = e31, I*e3 = e12
// and beta(a) := I*a has the same three components as a.

#include <array>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "spinsphere/errors.hpp"

namespace spinsphere {

enum class Blade : int {
  kScalar = 0,
  kE1 = 1,
  kE2 = 2,
  kE3 = 3,
  kE23 = 4,
  kE31 = 5,
  kE12 = 6,
  kE123 = 7,
};

inline constexpr double kUnitTolerance = 1e-9;

namespace detail {

// Basis blades as bitmasks over {e1, e2, e3} (bit 0 = e1) together with the
// sign that relates the canonical ascending product to our blade.
// e31 = e3 e1 = -e1 e3, hence the -1.
struct BladeMask {
  std::uint8_t mask;
  int sign;
};

inline constexpr std::array<BladeMask, 8> kBladeMasks = {{
    {0b000, +1},  // 1
    {0b001, +1},  // e1
    {0b010, +1},  // e2
    {0b100, +1},  // e3
    {0b110, +1},  // e23
    {0b101, -1},  // e31
    {0b011, +1},  // e12
    {0b111, +1},  // e123
}};

constexpr int IndexOfMask(std::uint8_t mask) {
  for (int i = 0; i < 8; ++i) {
    if (kBladeMasks[i].mask == mask) return i;
  }
  return -1;
}

constexpr int Popcount(unsigned v) {
  int c = 0;
  for (; v != 0; v &= v - 1) ++c;
  return c;
}

// Sign from reordering the product of two ascending blades into ascending
// order. With signature (+,+,+) repeated factors square to +1.
constexpr int ReorderSign(std::uint8_t a, std::uint8_t b) {
  int swaps = 0;
  for (unsigned shifted = a >> 1; shifted != 0; shifted >>= 1) {
    swaps += Popcount(shifted & b);
  }
  return (swaps % 2 == 0) ? 1 : -1;
}

struct ProductEntry {
  int index;
  int sign;
};

using ProductTable = std::array<std::array<ProductEntry, 8>, 8>;

constexpr ProductTable MakeProductTable() {
  ProductTable table{};
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      const auto a = kBladeMasks[i];
      const auto b = kBladeMasks[j];
      const std::uint8_t m = a.mask ^ b.mask;
      const int k = IndexOfMask(m);
      // our blade_i = a.sign * canonical(a.mask), and likewise for the result
      const int s = a.sign * b.sign * ReorderSign(a.mask, b.mask) *
                    kBladeMasks[k].sign;
      table[i][j] = {k, s};
    }
  }
  return table;
}

inline constexpr ProductTable kProductTable = MakeProductTable();

inline constexpr std::array<int, 8> kGrade = {0, 1, 1, 1, 2, 2, 2, 3};

}  // namespace detail

/// Product of two basis blades: (index of result, sign).
constexpr detail::ProductEntry BladeProduct(Blade x, Blade y) {
  return detail::kProductTable[static_cast<int>(x)][static_cast<int>(y)];
}

template <typename Scalar>
class Multivector {
 public:
  using Coeffs = Eigen::Matrix<Scalar, 8, 1>;

  Multivector() : coeffs_(Coeffs::Zero()) {}
  explicit Multivector(const Coeffs& coeffs) : coeffs_(coeffs) {}

  static Multivector Zero() { return Multivector(); }
  static Multivector FromScalar(Scalar s) {
    Multivector m;
    m.coeffs_[0] = s;
    return m;
  }
  static Multivector Basis(Blade b, Scalar weight = Scalar(1)) {
    Multivector m;
    m.coeffs_[static_cast<int>(b)] = weight;
    return m;
  }
  static Multivector Vector(const Eigen::Matrix<Scalar, 3, 1>& v) {
    Multivector m;
    m.coeffs_.template segment<3>(1) = v;
    return m;
  }
  static Multivector FromBivector(const Eigen::Matrix<Scalar, 3, 1>& b) {
    Multivector m;
    m.coeffs_.template segment<3>(4) = b;
    return m;
  }
  static Multivector Pseudoscalar(Scalar s = Scalar(1)) {
    return Basis(Blade::kE123, s);
  }

  const Coeffs& coeffs() const { return coeffs_; }
  Coeffs& coeffs() { return coeffs_; }

  Scalar operator[](Blade b) const { return coeffs_[static_cast<int>(b)]; }
  Scalar& operator[](Blade b) { return coeffs_[static_cast<int>(b)]; }

  Scalar scalar() const { return coeffs_[0]; }
  Eigen::Matrix<Scalar, 3, 1> vector_part() const {
    return coeffs_.template segment<3>(1);
  }
  Eigen::Matrix<Scalar, 3, 1> bivector_part() const {
    return coeffs_.template segment<3>(4);
  }
  Scalar trivector() const { return coeffs_[7]; }

  /// Grade-k projection.
  Multivector grade(int k) const {
    Multivector out;
    for (int i = 0; i < 8; ++i) {
      if (detail::kGrade[i] == k) out.coeffs_[i] = coeffs_[i];
    }
    return out;
  }

  /// Euclidean norm of the coefficient vector; equals sqrt(<x x^dagger>_0).
  Scalar norm() const { return coeffs_.norm(); }

  Multivector& operator+=(const Multivector& o) {
    coeffs_ += o.coeffs_;
    return *this;
  }
  Multivector& operator-=(const Multivector& o) {
    coeffs_ -= o.coeffs_;
    return *this;
  }
  Multivector& operator*=(Scalar s) {
    coeffs_ *= s;
    return *this;
  }

  friend Multivector operator+(Multivector x, const Multivector& y) {
    return x += y;
  }
  friend Multivector operator-(Multivector x, const Multivector& y) {
    return x -= y;
  }
  friend Multivector operator-(Multivector x) {
    x.coeffs_ = -x.coeffs_;
    return x;
  }
  friend Multivector operator*(Multivector x, Scalar s) { return x *= s; }
  friend Multivector operator*(Scalar s, Multivector x) { return x *= s; }

  /// Geometric product.
  friend Multivector operator*(const Multivector& x, const Multivector& y) {
    Multivector out;
    for (int i = 0; i < 8; ++i) {
      const Scalar xi = x.coeffs_[i];
      if (xi == Scalar(0)) continue;
      for (int j = 0; j < 8; ++j) {
        const auto e = detail::kProductTable[i][j];
        out.coeffs_[e.index] += Scalar(e.sign) * xi * y.coeffs_[j];
      }
    }
    return out;
  }

  bool isApprox(const Multivector& o, Scalar tol) const {
    return (coeffs_ - o.coeffs_).cwiseAbs().maxCoeff() <= tol;
  }

 private:
  Coeffs coeffs_;
};

template <typename Scalar>
Multivector<Scalar> geometric_product(const Multivector<Scalar>& x,
                                      const Multivector<Scalar>& y) {
  return x * y;
}

/// Reversion: grades 0 and 1 fixed, grades 2 and 3 negated.
template <typename Scalar>
Multivector<Scalar> reverse(const Multivector<Scalar>& x) {
  Multivector<Scalar> out = x;
  out.coeffs().template tail<4>() *= Scalar(-1);
  return out;
}

template <typename Scalar>
Multivector<Scalar> commutator(const Multivector<Scalar>& x,
                               const Multivector<Scalar>& y) {
  return Scalar(0.5) * (x * y - y * x);
}

/// Comma separated coefficients in blade order, 17 significant digits.
template <typename Scalar>
std::string to_csv(const Multivector<Scalar>& x) {
  std::ostringstream os;
  os.precision(17);
  for (int i = 0; i < 8; ++i) {
    if (i) os << ',';
    os << x.coeffs()[i];
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Bivectors.

template <typename Scalar>
class Bivector {
 public:
  using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

  Bivector() : components_(Vec3::Zero()) {}
  explicit Bivector(const Vec3& components) : components_(components) {}
  Bivector(Scalar b23, Scalar b31, Scalar b12) : components_(b23, b31, b12) {}

  static Bivector Zero() { return Bivector(); }

  const Vec3& components() const { return components_; }
  Scalar norm() const { return components_.norm(); }

  Multivector<Scalar> multivector() const {
    return Multivector<Scalar>::FromBivector(components_);
  }

  friend Bivector operator+(const Bivector& x, const Bivector& y) {
    return Bivector(x.components_ + y.components_);
  }
  friend Bivector operator-(const Bivector& x, const Bivector& y) {
    return Bivector(x.components_ - y.components_);
  }
  friend Bivector operator-(const Bivector& x) { return Bivector(-x.components_); }
  friend Bivector operator*(Scalar s, const Bivector& x) {
    return Bivector(s * x.components_);
  }
  friend Bivector operator*(const Bivector& x, Scalar s) {
    return Bivector(s * x.components_);
  }

  bool isApprox(const Bivector& o, Scalar tol) const {
    return (components_ - o.components_).cwiseAbs().maxCoeff() <= tol;
  }

 private:
  Vec3 components_;
};

/// beta(a) = I a.
template <typename Scalar>
Bivector<Scalar> beta(const Eigen::Matrix<Scalar, 3, 1>& a) {
  return Bivector<Scalar>(a);
}

/// Grade-2 part of a multivector as a Bivector.
template <typename Scalar>
Bivector<Scalar> bivector_of(const Multivector<Scalar>& x) {
  return Bivector<Scalar>(x.bivector_part());
}

// ---------------------------------------------------------------------------
// Rotors (even-grade elements, i.e. quaternions).
//
// Stored as the 4-vector (q0, q1, q2, q3) = scalar + q1 e23 + q2 e31 + q3 e12,
// which is also the embedding of S^3 in R^4.

template <typename Scalar>
class Rotor {
 public:
  using Vec4 = Eigen::Matrix<Scalar, 4, 1>;
  using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

  Rotor() : q_(Scalar(1), Scalar(0), Scalar(0), Scalar(0)) {}
  explicit Rotor(const Vec4& q) : q_(q) {}
  Rotor(Scalar s, const Bivector<Scalar>& b) {
    q_[0] = s;
    q_.template tail<3>() = b.components();
  }
  Rotor(Scalar q0, Scalar q1, Scalar q2, Scalar q3) : q_(q0, q1, q2, q3) {}

  static Rotor Identity() { return Rotor(); }

  /// Even part of a multivector; odd grades are dropped.
  static Rotor FromEven(const Multivector<Scalar>& x) {
    return Rotor(x.scalar(), Bivector<Scalar>(x.bivector_part()));
  }

  const Vec4& coeffs() const { return q_; }
  Scalar scalar() const { return q_[0]; }
  Bivector<Scalar> bivector() const { return Bivector<Scalar>(q_.template tail<3>()); }
  Scalar norm() const { return q_.norm(); }
  bool is_unit(Scalar tol = Scalar(kUnitTolerance)) const {
    return std::abs(q_.norm() - Scalar(1)) <= tol;
  }

  Multivector<Scalar> multivector() const {
    Multivector<Scalar> m;
    m.coeffs()[0] = q_[0];
    m.coeffs().template segment<3>(4) = q_.template tail<3>();
    return m;
  }

  Rotor reversed() const {
    Rotor r = *this;
    r.q_.template tail<3>() *= Scalar(-1);
    return r;
  }

  friend Rotor operator*(const Rotor& x, const Rotor& y) {
    return FromEven(x.multivector() * y.multivector());
  }
  friend Rotor operator-(const Rotor& x) { return Rotor(Vec4(-x.q_)); }

  bool isApprox(const Rotor& o, Scalar tol) const {
    return (q_ - o.q_).cwiseAbs().maxCoeff() <= tol;
  }

 private:
  Vec4 q_;
};

template <typename Scalar>
Rotor<Scalar> reverse(const Rotor<Scalar>& q) {
  return q.reversed();
}

/// cos(half_angle) + b sin(half_angle) for a unit bivector b.
template <typename Scalar>
Rotor<Scalar> rotor_exp(const Bivector<Scalar>& b, Scalar half_angle) {
  if (std::abs(b.norm() - Scalar(1)) > Scalar(kUnitTolerance)) {
    throw Error(ErrorCode::kNonUnitBivector,
                "rotor_exp: bivector norm deviates from 1");
  }
  return Rotor<Scalar>(std::cos(half_angle), std::sin(half_angle) * b);
}

/// q(psi, a) = exp(beta(a) psi / 2).
template <typename Scalar>
Rotor<Scalar> rotor_from_axis_angle(const Eigen::Matrix<Scalar, 3, 1>& axis,
                                    Scalar psi) {
  return rotor_exp(beta(axis), psi / Scalar(2));
}

template <typename Scalar>
struct RotorLog {
  Bivector<Scalar> axis;
  Scalar half_angle;
  /// Set when |scalar| == 1 and the returned axis is the caller's default.
  bool axis_undefined;
};

/// Principal logarithm with half_angle in [0, pi]. At q = +-1 the axis is
/// undefined and `default_axis` is returned instead.
template <typename Scalar>
RotorLog<Scalar> rotor_log(
    const Rotor<Scalar>& q,
    const Bivector<Scalar>& default_axis = Bivector<Scalar>(0, 0, 1)) {
  const Scalar s = q.scalar();
  const auto b = q.bivector().components();
  const Scalar bn = b.norm();
  const Scalar half = std::atan2(bn, s);
  if (bn <= Scalar(1e-12)) {
    return {default_axis, s >= Scalar(0) ? Scalar(0) : Scalar(M_PI), true};
  }
  return {Bivector<Scalar>(b / bn), half, false};
}

/// q b q^dagger; identical for q and -q.
template <typename Scalar>
Bivector<Scalar> rotate_bivector(const Rotor<Scalar>& q,
                                 const Bivector<Scalar>& b) {
  const auto m = q.multivector() * b.multivector() * q.reversed().multivector();
  return bivector_of(m);
}

/// Rotates a vector: q v q^dagger.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> rotate_vector(const Rotor<Scalar>& q,
                                          const Eigen::Matrix<Scalar, 3, 1>& v) {
  const auto m = q.multivector() * Multivector<Scalar>::Vector(v) *
                 q.reversed().multivector();
  return m.vector_part();
}

// Double-precision aliases used by the rest of the library.
using Multivectord = Multivector<double>;
using Bivectord = Bivector<double>;
using Rotord = Rotor<double>;
using Eigen::Vector3d;
using Eigen::Vector4d;

}  // namespace spinsphere
