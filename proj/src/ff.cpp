#include "upieces/ff.hpp"

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "upieces/errors.hpp"

namespace upieces {
namespace {

struct PrimePower {
  int p;
  int k;
};

std::optional<PrimePower> factor_prime_power(int q) {
  for (int p : {2, 3, 5, 7}) {
    int k = 0;
    int r = q;
    while (r > 1 && r % p == 0) {
      r /= p;
      ++k;
    }
    if (r == 1 && k > 0) return PrimePower{p, k};
  }
  return std::nullopt;
}

std::vector<int> fixed_modulus(int q) {
  switch (q) {
    case 4: return {1, 1, 1};     // t^2 + t + 1
    case 8: return {1, 1, 0, 1};  // t^3 + t + 1
    case 9: return {1, 0, 1};     // t^2 + 1
    case 16: return {1, 1, 0, 0, 1};  // t^4 + t + 1
    default: return {0, 1};       // t, prime field
  }
}

using Poly = std::vector<int>;

Poly digits(int v, int p, int k) {
  Poly d(k, 0);
  for (int i = 0; i < k; ++i) {
    d[i] = v % p;
    v /= p;
  }
  return d;
}

int undigits(const Poly& d, int p) {
  int v = 0;
  for (int i = static_cast<int>(d.size()) - 1; i >= 0; --i) v = v * p + d[i];
  return v;
}

// Remainder of a modulo a monic polynomial m over F_p.
Poly poly_mod(Poly a, const Poly& m, int p) {
  const int dm = static_cast<int>(m.size()) - 1;
  for (int i = static_cast<int>(a.size()) - 1; i >= dm; --i) {
    const int c = a[i] % p;
    if (c == 0) continue;
    for (int j = 0; j <= dm; ++j) {
      a[i - dm + j] = ((a[i - dm + j] - c * m[j]) % p + p) % p;
    }
  }
  a.resize(dm);
  return a;
}

bool is_irreducible(const Poly& m, int p) {
  const int k = static_cast<int>(m.size()) - 1;
  // Trial division by every monic polynomial of degree 1..k/2.
  for (int d = 1; 2 * d <= k; ++d) {
    int count = 1;
    for (int i = 0; i < d; ++i) count *= p;
    for (int v = 0; v < count; ++v) {
      Poly f = digits(v, p, d);
      f.push_back(1);
      Poly r = poly_mod(m, f, p);
      bool zero = true;
      for (int c : r) zero = zero && c == 0;
      if (zero) return false;
    }
  }
  return true;
}

detail::FieldTables build_tables(int q, int p, int k) {
  detail::FieldTables t;
  t.q = q;
  t.p = p;
  t.degree = k;
  t.modulus = fixed_modulus(q);
  if (k > 1 && !is_irreducible(t.modulus, p)) {
    throw std::logic_error("fixed modulus is reducible");
  }
  for (int a = 0; a < q; ++a) {
    const Poly da = digits(a, p, k);
    Poly na(k);
    for (int i = 0; i < k; ++i) na[i] = (p - da[i]) % p;
    t.neg[a] = static_cast<Elem>(undigits(na, p));
    for (int b = 0; b < q; ++b) {
      const Poly db = digits(b, p, k);
      Poly s(k);
      for (int i = 0; i < k; ++i) s[i] = (da[i] + db[i]) % p;
      t.add[a][b] = static_cast<Elem>(undigits(s, p));
      Poly prod(2 * k, 0);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
      if (k > 1) {
        prod = poly_mod(prod, t.modulus, p);
      } else {
        prod.resize(1);
      }
      t.mul[a][b] = static_cast<Elem>(undigits(prod, p));
    }
  }
  for (int a = 1; a < q; ++a) {
    for (int b = 1; b < q; ++b) {
      if (t.mul[a][b] == 1) t.inv[a] = static_cast<Elem>(b);
    }
    if (t.inv[a] == 0) throw std::logic_error("field table has a non-invertible element");
  }
  for (int g = 1; g < q; ++g) {
    int order = 1;
    Elem x = static_cast<Elem>(g);
    while (x != 1) {
      x = t.mul[x][g];
      ++order;
    }
    if (order == q - 1) {
      t.primitive = static_cast<Elem>(g);
      break;
    }
  }
  if (p == 2) {
    for (int a = 0; a < q; ++a) t.sqrt[t.mul[a][a]] = static_cast<Elem>(a);
  }
  return t;
}

const detail::FieldTables* tables_for(int q) {
  static const auto all = [] {
    std::array<std::unique_ptr<detail::FieldTables>, kMaxFieldOrder + 1> out;
    for (int order = 2; order <= kMaxFieldOrder; ++order) {
      if (auto pp = factor_prime_power(order)) {
        out[order] = std::make_unique<detail::FieldTables>(build_tables(order, pp->p, pp->k));
      }
    }
    return out;
  }();
  if (q < 2 || q > kMaxFieldOrder || !all[q]) return nullptr;
  return all[q].get();
}

}  // namespace

Field Field::make(int q) {
  const auto* t = tables_for(q);
  if (t == nullptr) {
    throw UnsupportedField("q = " + std::to_string(q) +
                           " is not a prime power <= 16 with p in {2,3,5,7}");
  }
  return Field(t);
}

Elem Field::inv(Elem a) const {
  if (a == 0) throw std::domain_error("inverse of zero");
  return t_->inv[a];
}

Elem Field::pow(Elem a, unsigned k) const {
  Elem r = 1;
  Elem b = a;
  while (k > 0) {
    if (k & 1u) r = mul(r, b);
    b = mul(b, b);
    k >>= 1u;
  }
  return r;
}

Elem Field::from_int(long long v) const {
  const long long r = ((v % p()) + p()) % p();
  return static_cast<Elem>(r);
}

Elem Field::sqrt(Elem a) const {
  if (p() != 2) {
    throw CharMismatch("square roots are only provided in characteristic 2");
  }
  return t_->sqrt[a];
}

FieldElement ff_sqrt(const FieldElement& a) { return {a.field, a.field.sqrt(a.value)}; }

std::vector<int> supported_field_orders() {
  std::vector<int> out;
  for (int q = 2; q <= kMaxFieldOrder; ++q) {
    if (factor_prime_power(q)) out.push_back(q);
  }
  return out;
}

}  // namespace upieces
