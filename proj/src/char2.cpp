#include "upieces/char2.hpp"

#include "upieces/errors.hpp"

namespace upieces {
namespace {

void require_char2(const Field& f) {
  if (f.p() != 2) throw CharMismatch("quadratic forms are defined in characteristic 2 only");
}

/// Basis vectors, their pairwise sums and (for q > 2) their multiples by a
/// primitive element. A function Q with Q(ay) = a^2 Q(y) plus a linear term
/// that vanishes on all of these vanishes identically.
std::vector<Vector> certification_vectors(const Field& f, const std::vector<Vector>& basis) {
  std::vector<Vector> out = basis;
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i + 1; j < basis.size(); ++j) out.push_back(vec_add(f, basis[i], basis[j]));
  if (f.q() > 2) {
    for (const auto& b : basis) out.push_back(vec_scale(f, f.primitive(), b));
  }
  return out;
}

/// <v, N^(k-1) v> for a vector v in original coordinates.
Elem self_pairing(const SymplecticSpace& s, const Matrix& n_pow, std::span<const Elem> v) {
  return bilinear(s.gram, v, n_pow.apply(v));
}

std::vector<Vector> unit_vectors(std::size_t n) {
  std::vector<Vector> out;
  for (std::size_t i = 0; i < n; ++i) {
    Vector v(n, 0);
    v[i] = 1;
    out.push_back(std::move(v));
  }
  return out;
}

bool b_alternating(const GradedSymplecticData& d, int m) {
  const auto it = d.bn.find(m);
  return it == d.bn.end() || is_alternating(it->second);
}

void check_form_size(const Matrix& n, const SymplecticSpace& s, const GradedSymplecticData& d) {
  if (n.rows() != s.dim || d.graded.dim != s.dim) throw DimensionMismatch("graded data size");
}

}  // namespace

Elem QuadraticForm::evaluate(std::span<const Elem> coeffs) const {
  if (coeffs.size() != dim()) throw DimensionMismatch("quadratic form argument");
  const Field& f = field;
  Elem acc = 0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i] == 0) continue;
    acc = f.add(acc, f.mul(f.mul(coeffs[i], coeffs[i]), basis_values[i]));
    for (std::size_t j = i + 1; j < coeffs.size(); ++j) {
      acc = f.add(acc, f.mul(f.mul(coeffs[i], coeffs[j]), polar(i, j)));
    }
  }
  return acc;
}

LSets sets_L(const GradedSymplecticData& d) {
  require_char2(d.graded.field);
  const int e = d.graded.e;
  LSets out;
  for (int n = 2; n <= e + 2; n += 2) {
    if (b_alternating(d, n - 1) && b_alternating(d, n + 1)) out.L.insert(n);
    bool all = b_alternating(d, n - 1);
    for (int m = n + 1; m <= e - 1; m += 2) all = all && b_alternating(d, m);
    if (all) out.Lprime.insert(n);
  }
  ensure(!out.Lprime.empty(), "no even n makes the odd forms alternating");
  out.nn = *out.Lprime.begin();
  for (int n : out.Lprime) ensure(out.L.count(n) == 1, "Lprime is not contained in L");
  return out;
}

LSets sets_L(const Matrix& n, const SymplecticSpace& s) {
  require_char2(s.field);
  return sets_L(graded_symplectic(n, s));
}

QuadraticForm qform_qn(const Matrix& n, const SymplecticSpace& s, const GradedSymplecticData& d,
                       const LSets& l, int k) {
  require_char2(s.field);
  check_form_size(n, s, d);
  if (l.L.count(k) == 0) throw NotInL("n = " + std::to_string(k) + " is not in L");
  const Field& f = s.field;
  const GradedSpace& g = d.graded;
  const auto it = d.primitive_basis.find(k);
  std::vector<Vector> basis = it == d.primitive_basis.end() ? std::vector<Vector>{} : it->second;
  Matrix polar = it == d.primitive_basis.end() ? Matrix(f, 0, 0) : d.bn.at(k);
  const Matrix n_pow = n.pow(static_cast<unsigned>(k - 1));

  std::vector<Vector> lifts;
  Vector values;
  for (const auto& x : basis) {
    lifts.push_back(lift_primitive(g, k, x));
    values.push_back(self_pairing(s, n_pow, lifts.back()));
  }
  if (!basis.empty()) {
    // Changing the lift by y in V_{>=1-n} with N^(n+1) y = 0 keeps the value.
    const Subspace other = subspace_meet(g.filtration.at(1 - k),
                                         kernel(n.pow(static_cast<unsigned>(k + 1))));
    const auto shifts = certification_vectors(f, other.basis_vectors());
    for (std::size_t i = 0; i < lifts.size(); ++i) {
      for (const auto& y : shifts) {
        ensure(self_pairing(s, n_pow, vec_add(f, lifts[i], y)) == values[i],
               "q_n depends on the choice of lift");
      }
    }
    for (std::size_t i = 0; i < lifts.size(); ++i) {
      for (std::size_t j = i + 1; j < lifts.size(); ++j) {
        const Elem sum = self_pairing(s, n_pow, vec_add(f, lifts[i], lifts[j]));
        ensure(sum == f.add(f.add(values[i], values[j]), polar(i, j)),
               "q_n polarization identity fails");
      }
    }
  }
  return QuadraticForm{f, std::move(basis), std::move(values), std::move(polar)};
}

QuadraticForm qform_qn(const Matrix& n, const SymplecticSpace& s, int k) {
  require_char2(s.field);
  const GradedSymplecticData d = graded_symplectic(n, s);
  return qform_qn(n, s, d, sets_L(d), k);
}

QuadraticForm qform_Qn(const Matrix& n, const SymplecticSpace& s, const GradedSymplecticData& d,
                       const LSets& l, int k) {
  require_char2(s.field);
  check_form_size(n, s, d);
  if (l.Lprime.count(k) == 0) throw NotInLprime("n = " + std::to_string(k) + " is not in L'");
  const Field& f = s.field;
  const GradedSpace& g = d.graded;
  const std::size_t piece = g.gr_dim(-k);
  const std::vector<Vector> basis = unit_vectors(piece);
  const Matrix n_pow = n.pow(static_cast<unsigned>(k - 1));
  const Matrix nu_k = g.nu.pow(static_cast<unsigned>(k));

  auto rep = [&](const Vector& x) { return g.basis.apply(g.embed(-k, x)); };
  auto value = [&](const Vector& x) { return self_pairing(s, n_pow, rep(x)); };

  Vector values;
  Matrix polar(f, piece, piece);
  for (std::size_t i = 0; i < piece; ++i) {
    values.push_back(value(basis[i]));
    for (std::size_t j = 0; j < piece; ++j) {
      polar(i, j) = d.pair0(g.embed(-k, basis[i]), nu_k.apply(g.embed(-k, basis[j])));
    }
  }
  QuadraticForm form{f, basis, values, polar};
  if (piece == 0) return form;

  const auto probes = certification_vectors(f, basis);
  // Any representative in V_{>=-n} gives the same value.
  const auto shifts = certification_vectors(f, g.filtration.at(1 - k).basis_vectors());
  for (const auto& x : basis) {
    const Vector r = rep(x);
    for (const auto& y : shifts) {
      ensure(self_pairing(s, n_pow, vec_add(f, r, y)) == value(x),
             "Q_n depends on the choice of representative");
    }
  }
  for (std::size_t i = 0; i < piece; ++i) {
    for (std::size_t j = i + 1; j < piece; ++j) {
      ensure(value(vec_add(f, basis[i], basis[j])) ==
                 f.add(f.add(values[i], values[j]), polar(i, j)),
             "Q_n polarization identity fails");
    }
  }

  // x = sum_m nu^m x_m with x_m in P_{-n-2m}, and Q_n(x) = sum_m q_{n+2m}(x_m).
  std::vector<QuadraticForm> qs;
  std::vector<Vector> columns;
  for (int m = 0; k + 2 * m <= g.max_degree(); ++m) {
    const int deg = k + 2 * m;
    ensure(l.L.count(deg) == 1, "Lprime member has a shift outside L");
    qs.push_back(qform_qn(n, s, d, l, deg));
    const Matrix nm = g.nu_power_block(-deg, static_cast<unsigned>(m));
    for (const auto& p : qs.back().domain_basis) columns.push_back(nm.apply(p));
  }
  const Matrix decomposition = Matrix::from_columns(f, piece, columns);
  for (const auto& x : probes) {
    const auto coeffs = solve(decomposition, x);
    ensure(coeffs.has_value(), "graded piece is not spanned by primitive parts");
    Elem total = 0;
    std::size_t at = 0;
    for (const auto& q : qs) {
      const std::span<const Elem> part(coeffs->data() + at, q.dim());
      total = f.add(total, q.evaluate(part));
      at += q.dim();
    }
    ensure(total == value(x), "Q_n does not decompose through the q_n");
  }
  return form;
}

QuadraticForm qform_Qn(const Matrix& n, const SymplecticSpace& s, int k) {
  require_char2(s.field);
  const GradedSymplecticData d = graded_symplectic(n, s);
  return qform_Qn(n, s, d, sets_L(d), k);
}

std::set<int> odd_invariant_set(const std::map<int, int>& gr_dims) {
  auto dim_at = [&](int a) {
    const auto it = gr_dims.find(a);
    return it == gr_dims.end() ? 0 : it->second;
  };
  int reach = 0;
  for (const auto& [a, dim] : gr_dims)
    if (dim > 0) reach = std::max(reach, std::abs(a));
  std::set<int> out;
  for (int n = 1; n <= reach; n += 2) {
    const int c = dim_at(-n) - dim_at(-n - 2);
    if (c > 0 && c % 2 == 0) out.insert(n);
  }
  return out;
}

SplittingInvariant splitting_invariant(const GradedSymplecticData& d) {
  const GradedSpace& g = d.graded;
  std::map<int, int> dims;
  for (int a = g.min_degree(); a <= g.max_degree(); ++a) dims[a] = static_cast<int>(g.gr_dim(a));
  SplittingInvariant out;
  out.I = odd_invariant_set(dims);
  for (int n : out.I) out.c[n] = dims[-n] - (dims.count(-n - 2) ? dims[-n - 2] : 0);
  if (g.field.p() == 2) {
    const LSets l = sets_L(d);
    out.L = l.L;
    out.Lprime = l.Lprime;
    out.nn = l.nn;
    for (int n : out.I) {
      // x -> <x, nu^n x>_0 is additive and Frobenius-semilinear, so testing
      // the diagonal of b_n on a basis of P_{-n} decides whether it vanishes.
      if (!is_alternating(d.bn.at(n))) out.J.insert(n);
    }
  }
  return out;
}

SplittingInvariant splitting_invariant(const Matrix& n, const SymplecticSpace& s) {
  return splitting_invariant(graded_symplectic(n, s));
}

}  // namespace upieces
