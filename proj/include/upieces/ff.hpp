#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace upieces {

/// Encoded field element: base-p digits of the polynomial representative,
/// little-endian. Always in [0, q).
using Elem = std::uint8_t;

inline constexpr int kMaxFieldOrder = 16;

namespace detail {
struct FieldTables {
  int q = 0;
  int p = 0;
  int degree = 0;
  std::vector<int> modulus;  // coefficients, constant term first, monic
  std::array<std::array<Elem, kMaxFieldOrder>, kMaxFieldOrder> add{};
  std::array<std::array<Elem, kMaxFieldOrder>, kMaxFieldOrder> mul{};
  std::array<Elem, kMaxFieldOrder> neg{};
  std::array<Elem, kMaxFieldOrder> inv{};
  std::array<Elem, kMaxFieldOrder> sqrt{};  // meaningful for p == 2 only
  Elem primitive = 1;                        // generator of the unit group
};
}  // namespace detail

/// A finite field F_q, q = p^k <= 16, p in {2,3,5,7}. Extension fields use
/// the fixed moduli t^2+t+1 (F_4), t^3+t+1 (F_8), t^2+1 (F_9), t^4+t+1 (F_16).
///
/// Field is a cheap value handle over immutable operation tables; two
/// handles compare equal iff they have the same order.
class Field {
 public:
  /// Throws UnsupportedField unless q is a supported prime power.
  static Field make(int q);

  int q() const { return t_->q; }
  int p() const { return t_->p; }
  int degree() const { return t_->degree; }
  const std::vector<int>& modulus() const { return t_->modulus; }
  Elem primitive() const { return t_->primitive; }

  Elem add(Elem a, Elem b) const { return t_->add[a][b]; }
  Elem sub(Elem a, Elem b) const { return t_->add[a][t_->neg[b]]; }
  Elem neg(Elem a) const { return t_->neg[a]; }
  Elem mul(Elem a, Elem b) const { return t_->mul[a][b]; }
  /// Throws std::domain_error on zero.
  Elem inv(Elem a) const;
  Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
  Elem pow(Elem a, unsigned k) const;
  Elem from_int(long long v) const;  // image of an integer under Z -> F_p
  Elem frobenius(Elem a) const { return pow(a, static_cast<unsigned>(p())); }

  /// Unique square root in characteristic 2 (a^(q/2)). Throws CharMismatch
  /// in odd characteristic.
  Elem sqrt(Elem a) const;

  friend bool operator==(const Field& a, const Field& b) { return a.q() == b.q(); }
  friend bool operator!=(const Field& a, const Field& b) { return !(a == b); }

 private:
  explicit Field(const detail::FieldTables* t) : t_(t) {}
  const detail::FieldTables* t_;
};

/// Field element with its field attached; compared by (value, q).
struct FieldElement {
  Elem value = 0;
  Field field;

  FieldElement(Field f, Elem v) : value(v), field(f) {}

  friend FieldElement operator+(const FieldElement& a, const FieldElement& b) {
    return {a.field, a.field.add(a.value, b.value)};
  }
  friend FieldElement operator-(const FieldElement& a, const FieldElement& b) {
    return {a.field, a.field.sub(a.value, b.value)};
  }
  friend FieldElement operator*(const FieldElement& a, const FieldElement& b) {
    return {a.field, a.field.mul(a.value, b.value)};
  }
  friend FieldElement operator/(const FieldElement& a, const FieldElement& b) {
    return {a.field, a.field.div(a.value, b.value)};
  }
  FieldElement operator-() const { return {field, field.neg(value)}; }
  FieldElement inverse() const { return {field, field.inv(value)}; }
  friend bool operator==(const FieldElement& a, const FieldElement& b) {
    return a.value == b.value && a.field == b.field;
  }
};

/// ff_sqrt on a tagged element.
FieldElement ff_sqrt(const FieldElement& a);

/// Orders accepted by Field::make, ascending.
std::vector<int> supported_field_orders();

}  // namespace upieces
