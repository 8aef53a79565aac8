#include "upieces/pieces.hpp"

#include <absl/container/flat_hash_set.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <tuple>

#include "upieces/errors.hpp"

namespace upieces {

// ---------------------------------------------------------------- groups

void GroupSpec::validate() const {
  (void)Field::make(q);
  if (dim == 0) throw InvalidInput("group dimension must be positive");
  if (family == Family::Sp && dim % 2 != 0) throw OddDimension("Sp needs an even dimension");
}

std::size_t GroupSpec::positive_roots() const {
  if (family == Family::GL) return dim * (dim - 1) / 2;
  return (dim / 2) * (dim / 2);
}

std::string GroupSpec::name() const {
  return std::string(family == Family::GL ? "GL" : "Sp") + "_" + std::to_string(dim) + "(F_" +
         std::to_string(q) + ")";
}

bool operator<(const PieceLabel& a, const PieceLabel& b) {
  if (a.lambda.parts != b.lambda.parts) return a.lambda.parts < b.lambda.parts;
  return std::lexicographical_compare(a.J.begin(), a.J.end(), b.J.begin(), b.J.end());
}

std::map<int, int> graded_dims(const Partition& lambda) {
  std::map<int, int> out;
  for (int j : lambda.parts)
    for (int a = 1 - j; a <= j - 1; a += 2) ++out[a];
  return out;
}

std::set<int> invariant_set_I(const Partition& lambda) {
  std::set<int> out;
  for (int j : lambda.parts) {
    const int m = lambda.multiplicity(j);
    if (j % 2 == 0 && m % 2 == 0) out.insert(j - 1);
  }
  return out;
}

bool is_symplectic_partition(const Partition& lambda) {
  for (int j : lambda.parts)
    if (j % 2 == 1 && lambda.multiplicity(j) % 2 != 0) return false;
  return true;
}

namespace {

Matrix minus_identity(const Matrix& u) { return u - Matrix::identity(u.field(), u.rows()); }

Matrix require_unipotent(const Matrix& u) {
  if (!u.square()) throw DimensionMismatch("matrix is not square");
  Matrix n = minus_identity(u);
  if (!nilpotency_order(n)) throw NotUnipotent("u - 1 is not nilpotent");
  return n;
}

}  // namespace

PieceLabel gl_label(const Matrix& u) { return PieceLabel{jordan_type(require_unipotent(u)), {}}; }

PieceLabel sp_label(const Matrix& u, const SymplecticSpace& s) {
  if (u.rows() != s.dim || !u.square()) throw DimensionMismatch("matrix and form sizes differ");
  const Matrix n = require_unipotent(u);
  if (!is_sp_member(u, s)) throw NotSpMember("u does not preserve the form");
  PieceLabel label{jordan_type(n), {}};
  if (s.field.p() == 2) label.J = splitting_invariant(n, s).J;
  ensure(is_symplectic_partition(label.lambda), "odd part with odd multiplicity in Sp");
  return label;
}

PieceLabel label_of(const Matrix& u, const GroupSpec& spec) {
  if (spec.family == Family::GL) return gl_label(u);
  return sp_label(u, standard_symplectic(spec.dim, spec.q));
}

std::vector<PieceLabel> admissible_labels(const GroupSpec& spec) {
  spec.validate();
  std::vector<PieceLabel> out;
  const bool char2 = spec.field().p() == 2;
  for (const Partition& p : partitions_of(static_cast<int>(spec.dim))) {
    if (spec.family == Family::GL) {
      out.push_back({p, {}});
      continue;
    }
    if (!is_symplectic_partition(p)) continue;
    const std::set<int> iset = invariant_set_I(p);
    const std::vector<int> members(iset.begin(), iset.end());
    const std::size_t subsets = char2 ? (std::size_t{1} << members.size()) : 1;
    for (std::size_t mask = 0; mask < subsets; ++mask) {
      PieceLabel label{p, {}};
      for (std::size_t b = 0; b < members.size(); ++b)
        if (mask >> b & 1) label.J.insert(members[b]);
      out.push_back(std::move(label));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Matrix jordan_nilpotent(const Field& f, const Partition& lambda) {
  const auto n = static_cast<std::size_t>(lambda.total());
  Matrix m(f, n, n);
  std::size_t at = 0;
  for (int j : lambda.parts) {
    for (int k = 0; k + 1 < j; ++k) m(at + k + 1, at + k) = 1;
    at += static_cast<std::size_t>(j);
  }
  return m;
}

// ---------------------------------------------------------------- model

std::size_t CanonicalModel::offset(int a) const {
  return static_cast<std::size_t>(std::lower_bound(degrees.begin(), degrees.end(), a) - degrees.begin());
}

std::size_t CanonicalModel::gr_dim(int a) const { return offset(a + 1) - offset(a); }

Matrix CanonicalModel::block(const Matrix& m, int b, int a) const {
  return m.block(offset(b), offset(a), gr_dim(b), gr_dim(a));
}

void CanonicalModel::set_block(Matrix& m, int b, int a, const Matrix& blk) const {
  m.set_block(offset(b), offset(a), blk);
}

Matrix CanonicalModel::nn_polar() const {
  const std::size_t d = gr_dim(-nn);
  if (d == 0) return Matrix(field, 0, 0);
  const Matrix nun = block(nu.pow(static_cast<unsigned>(nn)), nn, -nn);
  return block(gram0, -nn, nn) * nun;
}

namespace {

/// Form b on the multiplicity space of W^n.
Matrix multiplicity_form(const Field& f, int n, int m, bool hyperbolic) {
  const auto sz = static_cast<std::size_t>(m);
  if (n % 2 == 0) return standard_gram(f, sz);
  Matrix b(f, sz, sz);
  if (hyperbolic) {
    for (std::size_t r = 0; r + 1 < sz; r += 2) {
      b(r, r + 1) = 1;
      b(r + 1, r) = 1;
    }
  } else {
    for (std::size_t r = 0; r < sz; ++r) b(r, r) = 1;
  }
  return b;
}

int floor_half(int i) { return (i - ((i % 2 + 2) % 2)) / 2; }

}  // namespace

CanonicalModel canonical_model(const PieceLabel& label, const Field& f) {
  const Partition& lambda = label.lambda;
  if (!is_symplectic_partition(lambda)) throw InadmissibleLabel("odd part with odd multiplicity");
  const std::set<int> iset = invariant_set_I(lambda);
  for (int n : label.J) {
    if (iset.count(n) == 0) throw InadmissibleLabel("J is not a subset of I");
  }
  if (!label.J.empty() && f.p() != 2) throw InadmissibleLabel("J must be empty in odd characteristic");

  // Coordinates (degree, n, copy), sorted.
  std::vector<std::tuple<int, int, int>> coords;
  std::map<int, int> mult;
  for (int j : lambda.parts) mult[j - 1] = lambda.multiplicity(j);
  for (const auto& [n, m] : mult)
    for (int i = -n; i <= n; i += 2)
      for (int r = 0; r < m; ++r) coords.emplace_back(i, n, r);
  std::sort(coords.begin(), coords.end());

  CanonicalModel model{f, label, coords.size(), {}, Matrix(f, coords.size(), coords.size()),
                       Matrix(f, coords.size(), coords.size()), 0};
  std::map<std::tuple<int, int, int>, std::size_t> index;
  for (std::size_t k = 0; k < coords.size(); ++k) {
    index[coords[k]] = k;
    model.degrees.push_back(std::get<0>(coords[k]));
  }

  const bool char2 = f.p() == 2;
  for (const auto& [n, m] : mult) {
    const bool hyperbolic = char2 && n % 2 == 1 && iset.count(n) == 1 && label.J.count(n) == 0;
    const Matrix b = multiplicity_form(f, n, m, hyperbolic);
    for (int i = -n; i <= n; i += 2) {
      const Elem sign = floor_half(i) % 2 == 0 ? Elem{1} : f.neg(1);
      for (int r = 0; r < m; ++r) {
        if (i + 2 <= n) model.nu(index[{i + 2, n, r}], index[{i, n, r}]) = 1;
        for (int t = 0; t < m; ++t) {
          model.gram0(index[{i, n, r}], index[{-i, n, t}]) =
              f.mul(sign, b(static_cast<std::size_t>(r), static_cast<std::size_t>(t)));
        }
      }
    }
  }
  ensure(is_alternating(model.gram0) && rank(model.gram0) == model.dim,
         "model form is not symplectic");
  // nu is skew: <nu x, y>_0 + <x, nu y>_0 = 0.
  ensure((model.nu.transpose() * model.gram0 + model.gram0 * model.nu).is_zero(),
         "model nu is not skew-adjoint");

  if (char2) {
    auto alternating_from = [&](int n) {
      for (const auto& [m, c] : mult) {
        if (m % 2 == 0 || m < n - 1) continue;
        if (!(iset.count(m) == 1 && label.J.count(m) == 0)) return false;
      }
      return true;
    };
    int nn = 2;
    while (!alternating_from(nn)) nn += 2;
    model.nn = nn;
  }
  return model;
}

namespace {

/// sum over i + i' = nn - 2 of <x, nu^i N4 nu^i' x>_0, for x in gr_{-nn}.
Vector model_q_values(const CanonicalModel& m, const Matrix& n4, const std::vector<Vector>& xs) {
  const Field& f = m.field;
  const int nn = m.nn;
  Matrix total(f, m.dim, m.dim);
  for (int i = 0; i <= nn - 2; ++i) {
    total = total + m.nu.pow(static_cast<unsigned>(i)) * n4 *
                        m.nu.pow(static_cast<unsigned>(nn - 2 - i));
  }
  Vector out;
  const std::size_t off = m.offset(-nn);
  for (const auto& x : xs) {
    Vector full(m.dim, 0);
    std::copy(x.begin(), x.end(), full.begin() + static_cast<std::ptrdiff_t>(off));
    out.push_back(bilinear(m.gram0, full, total.apply(full)));
  }
  return out;
}

std::vector<Vector> units(std::size_t n) {
  std::vector<Vector> out;
  for (std::size_t i = 0; i < n; ++i) {
    Vector v(n, 0);
    v[i] = 1;
    out.push_back(std::move(v));
  }
  return out;
}

/// The degree-2j component of N in model coordinates, chosen so that the
/// degree-2j part of N^T G0 + G0 N + N^T G0 N vanishes.
Matrix solve_degree(const CanonicalModel& m, const std::vector<Matrix>& parts, int j) {
  const Field& f = m.field;
  Matrix c(f, m.dim, m.dim);
  for (int a = 1; a < j; ++a) {
    c = c + parts[static_cast<std::size_t>(a)].transpose() * m.gram0 *
                parts[static_cast<std::size_t>(j - a)];
  }
  Matrix out(f, m.dim, m.dim);
  const int lo = m.degrees.empty() ? 0 : m.degrees.front();
  const int hi = m.degrees.empty() ? 0 : m.degrees.back();
  for (int a = -j; a + 2 * j <= hi; ++a) {
    const int b = a + 2 * j;
    if (a < lo || m.gr_dim(a) == 0 || m.gr_dim(b) == 0) continue;
    const auto pair_inv = inverse(m.block(m.gram0, -b, b));
    ensure(pair_inv.has_value(), "model form does not pair opposite degrees");
    if (a > -j) {
      m.set_block(out, b, a, (*pair_inv * m.block(c, -b, a)).scaled(f.neg(1)));
    } else {
      const Matrix mm = m.block(c, -j, -j).scaled(f.neg(1));
      Matrix upper(f, mm.rows(), mm.cols());
      for (std::size_t r = 0; r < mm.rows(); ++r) {
        ensure(mm(r, r) == 0, "degree equation has a nonzero diagonal");
        for (std::size_t s = r + 1; s < mm.cols(); ++s) upper(r, s) = mm(r, s);
      }
      m.set_block(out, b, a, *pair_inv * upper);
    }
  }
  return out;
}

QuadraticForm default_q(const CanonicalModel& m) {
  const std::size_t d = m.gr_dim(-m.nn);
  return QuadraticForm{m.field, units(d), Vector(d, 0), m.nn_polar()};
}

void check_q(const CanonicalModel& m, const QuadraticForm& q) {
  const std::size_t d = m.gr_dim(-m.nn);
  if (q.field != m.field) throw IncompatibleQ("Q is over a different field");
  if (q.dim() != d || q.basis_values.size() != d || q.polar.rows() != d || q.polar.cols() != d) {
    throw IncompatibleQ("Q must live on gr_{-" + std::to_string(m.nn) + "} of dimension " +
                        std::to_string(d));
  }
  if (q.domain_basis != units(d)) throw IncompatibleQ("Q must be given on the unit basis");
  const Matrix polar = m.nn_polar();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      if (i != k && q.polar(i, k) != polar(i, k)) {
        throw IncompatibleQ("polarization of Q differs from <x, nu^n y>_0");
      }
    }
}

}  // namespace

ConstructedN construct_N_detailed(const PieceLabel& label, const GroupSpec& spec,
                                  const std::optional<QuadraticForm>& q) {
  spec.validate();
  if (spec.family != Family::Sp) throw InvalidInput("construct_N needs a symplectic group");
  const auto labels = admissible_labels(spec);
  if (std::find(labels.begin(), labels.end(), label) == labels.end()) {
    throw InadmissibleLabel("label is not admissible for " + spec.name());
  }
  const Field f = spec.field();
  const bool char2 = f.p() == 2;
  if (q && !char2) throw IncompatibleQ("a quadratic form only applies in characteristic 2");

  CanonicalModel model = canonical_model(label, f);
  QuadraticForm target = char2 ? default_q(model) : QuadraticForm{f, {}, {}, Matrix(f, 0, 0)};
  if (q) {
    check_q(model, *q);
    target = *q;
  }
  const int e = label.lambda.parts.empty() ? 0 : label.lambda.parts.front();

  std::vector<Matrix> parts{Matrix(f, model.dim, model.dim), model.nu};
  for (int j = 2; j <= e - 1; ++j) {
    parts.push_back(solve_degree(model, parts, j));
    if (j != 2 || !char2 || model.gr_dim(-model.nn) == 0) continue;

    // Adjust N4 on gr_{-2} -> gr_2 by a symmetric term zeta with
    // <x, nu^t zeta nu^t x>_0 = theta(x)^2, t = (nn - 2) / 2.
    const std::size_t d = model.gr_dim(-model.nn);
    const auto basis = units(d);
    const Vector current = model_q_values(model, parts[2], basis);
    const unsigned t = static_cast<unsigned>((model.nn - 2) / 2);
    const Matrix shift = model.block(model.nu.pow(t), -2, -model.nn);
    const Matrix rows = shift.transpose();  // row i is nu^t e_i in gr_{-2}
    Vector theta(d);
    for (std::size_t i = 0; i < d; ++i) theta[i] = f.sqrt(f.sub(target.basis_values[i], current[i]));
    const auto h = solve(rows, theta);
    ensure(h.has_value(), "nu^t is not injective on gr_{-nn}");
    Matrix hh(f, h->size(), h->size());
    for (std::size_t r = 0; r < h->size(); ++r)
      for (std::size_t s = 0; s < h->size(); ++s) hh(r, s) = f.mul((*h)[r], (*h)[s]);
    const auto pair_inv = inverse(model.block(model.gram0, -2, 2));
    ensure(pair_inv.has_value(), "model form does not pair gr_-2 with gr_2");
    Matrix zeta(f, model.dim, model.dim);
    model.set_block(zeta, 2, -2, *pair_inv * hh);
    parts[2] = parts[2] + zeta;
    ensure(model_q_values(model, parts[2], basis) == target.basis_values,
           "adjusted N4 does not realize Q");
  }

  Matrix n_model(f, model.dim, model.dim);
  for (std::size_t j = 1; j < parts.size(); ++j) n_model = n_model + parts[j];
  const Matrix one = Matrix::identity(f, model.dim);
  ensure((one + n_model).transpose() * model.gram0 * (one + n_model) == model.gram0,
         "constructed N does not preserve the model form");

  const Matrix fm = darboux_basis(model.gram0);
  const auto c = inverse(fm);
  ensure(c.has_value(), "darboux basis is singular");
  ConstructedN out{model, target, n_model, *c, *c * n_model * fm};
  const ConstructChecks checks = check_constructed(out);
  ensure(checks.sp_member, "constructed N is not in M");
  ensure(checks.filtration, "constructed N has the wrong canonical filtration");
  ensure(checks.nu, "constructed N induces the wrong graded map");
  ensure(checks.q, "constructed N has the wrong quadratic form");
  return out;
}

Matrix construct_N(const PieceLabel& label, const GroupSpec& spec,
                   const std::optional<QuadraticForm>& q) {
  return construct_N_detailed(label, spec, q).n;
}

ConstructChecks check_constructed(const ConstructedN& c) {
  const CanonicalModel& m = c.model;
  const Field& f = m.field;
  const SymplecticSpace s = standard_symplectic(m.dim, f.q());
  ConstructChecks out;
  out.sp_member = c.transport.transpose() * s.gram * c.transport == m.gram0 && is_m_member(c.n, s);
  if (!out.sp_member) return out;

  // The model filtration carried over by the transport.
  const int lo = m.degrees.empty() ? 0 : m.degrees.front();
  const int hi = m.degrees.empty() ? 0 : m.degrees.back();
  std::vector<Subspace> steps;
  for (int a = lo; a <= hi; ++a) {
    std::vector<Vector> vs;
    for (std::size_t k = m.offset(a); k < m.dim; ++k) vs.push_back(c.transport.column(k));
    steps.push_back(Subspace::span(f, m.dim, vs));
  }
  const Filtration moved(f, m.dim, lo, steps);
  out.filtration = dk_filtration(c.n) == moved;

  const auto c_inv = inverse(c.transport);
  const Matrix nu_std = c.transport * m.nu * *c_inv;
  out.nu = in_filtered_degree(moved, c.n - nu_std, 3);

  if (f.p() != 2) {
    out.q = true;
    return out;
  }
  const GradedSymplecticData d = graded_symplectic(c.n, s);
  const LSets l = sets_L(d);
  if (l.nn != m.nn) return out;
  const std::size_t dim = m.gr_dim(-m.nn);
  if (dim == 0) {
    out.q = true;
    return out;
  }
  const QuadraticForm qn = qform_Qn(c.n, s, d, l, m.nn);
  const GradedSpace& g = d.graded;
  auto coords = [&](const Vector& x) {
    Vector full(m.dim, 0);
    std::copy(x.begin(), x.end(), full.begin() + static_cast<std::ptrdiff_t>(m.offset(-m.nn)));
    return g.project(-m.nn, g.basis_inv.apply(c.transport.apply(full)));
  };
  const auto basis = units(dim);
  bool ok = true;
  for (std::size_t i = 0; i < dim && ok; ++i) {
    ok = qn.evaluate(coords(basis[i])) == c.target_q.basis_values[i];
    for (std::size_t k = i + 1; k < dim && ok; ++k) {
      const Vector sum = vec_add(f, basis[i], basis[k]);
      ok = qn.evaluate(coords(sum)) == c.target_q.evaluate(sum);
    }
  }
  out.q = ok;
  return out;
}

Matrix canonical_representative(const PieceLabel& label, const GroupSpec& spec) {
  spec.validate();
  const auto labels = admissible_labels(spec);
  if (std::find(labels.begin(), labels.end(), label) == labels.end()) {
    throw InadmissibleLabel("label is not admissible for " + spec.name());
  }
  const Field f = spec.field();
  const Matrix one = Matrix::identity(f, spec.dim);
  if (spec.family == Family::GL) return one + jordan_nilpotent(f, label.lambda);
  return one + construct_N(label, spec);
}

// ---------------------------------------------------------------- codec

namespace {

unsigned bits_for(int q) {
  unsigned b = 0;
  while ((1 << b) < q) ++b;
  return b;
}

}  // namespace

MatrixCodec::MatrixCodec(Field f, std::size_t dim) : field_(f), dim_(dim), bits_(bits_for(f.q())) {
  if (dim * dim * bits_ > 64) {
    throw ScaleExceeded(std::to_string(dim) + "x" + std::to_string(dim) + " matrices over F_" +
                        std::to_string(f.q()) + " do not fit in 64 bits");
  }
}

std::uint64_t MatrixCodec::encode(const Matrix& m) const {
  if (m.rows() != dim_ || m.cols() != dim_) throw DimensionMismatch("codec size");
  std::uint64_t key = 0;
  const auto data = m.data();
  for (std::size_t k = 0; k < data.size(); ++k) key |= std::uint64_t{data[k]} << (k * bits_);
  return key;
}

Matrix MatrixCodec::decode(std::uint64_t key) const {
  Matrix m(field_, dim_, dim_);
  const std::uint64_t mask = (std::uint64_t{1} << bits_) - 1;
  for (std::size_t k = 0; k < dim_ * dim_; ++k) m(k / dim_, k % dim_) = static_cast<Elem>(key >> (k * bits_) & mask);
  return m;
}

namespace {

constexpr std::size_t kMaxEntries = 64;

/// Allocation-free products of packed matrices with fixed sparse factors.
class PackedOps {
 public:
  explicit PackedOps(const MatrixCodec& c)
      : field_(c.field()), dim_(c.dim()), bits_(c.bits_per_entry()),
        mask_((std::uint64_t{1} << bits_) - 1) {}

  struct Sparse {
    std::vector<std::tuple<std::uint8_t, std::uint8_t, Elem>> entries;
  };

  static Sparse sparse(const Matrix& m) {
    Sparse s;
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::size_t c = 0; c < m.cols(); ++c)
        if (m(r, c) != 0) s.entries.emplace_back(r, c, m(r, c));
    return s;
  }

  void decode(std::uint64_t key, Elem* out) const {
    for (std::size_t k = 0; k < dim_ * dim_; ++k) out[k] = static_cast<Elem>(key >> (k * bits_) & mask_);
  }
  std::uint64_t encode(const Elem* a) const {
    std::uint64_t key = 0;
    for (std::size_t k = 0; k < dim_ * dim_; ++k) key |= std::uint64_t{a[k]} << (k * bits_);
    return key;
  }
  /// out = s * a
  void left(const Sparse& s, const Elem* a, Elem* out) const {
    std::fill(out, out + dim_ * dim_, Elem{0});
    for (const auto& [r, k, v] : s.entries)
      for (std::size_t c = 0; c < dim_; ++c)
        out[r * dim_ + c] = field_.add(out[r * dim_ + c], field_.mul(v, a[k * dim_ + c]));
  }
  /// out = a * s
  void right(const Elem* a, const Sparse& s, Elem* out) const {
    std::fill(out, out + dim_ * dim_, Elem{0});
    for (const auto& [k, c, v] : s.entries)
      for (std::size_t r = 0; r < dim_; ++r)
        out[r * dim_ + c] = field_.add(out[r * dim_ + c], field_.mul(a[r * dim_ + k], v));
  }

 private:
  Field field_;
  std::size_t dim_;
  unsigned bits_;
  std::uint64_t mask_;
};

/// key -> key of g u g^-1.
class Conjugator {
 public:
  Conjugator(const PackedOps& ops, const Matrix& g)
      : ops_(&ops), g_(PackedOps::sparse(g)), g_inv_(PackedOps::sparse(*inverse(g))) {}

  std::uint64_t operator()(std::uint64_t key) const {
    std::array<Elem, kMaxEntries> a{}, t{}, r{};
    ops_->decode(key, a.data());
    ops_->left(g_, a.data(), t.data());
    ops_->right(t.data(), g_inv_, r.data());
    return ops_->encode(r.data());
  }

 private:
  const PackedOps* ops_;
  PackedOps::Sparse g_;
  PackedOps::Sparse g_inv_;
};

std::vector<Elem> parameter_basis(const Field& f) {
  std::vector<Elem> out;
  Elem w = 1;
  for (int k = 0; k < f.degree(); ++k) {
    out.push_back(w);
    w = f.mul(w, f.primitive());
  }
  return out;
}

std::uint64_t ipow(std::uint64_t b, std::size_t e) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

std::vector<Matrix> group_generators(const GroupSpec& spec) {
  spec.validate();
  const Field f = spec.field();
  const std::size_t n = spec.dim;
  std::vector<Matrix> out;
  if (spec.family == Family::GL) {
    for (Elem t : parameter_basis(f)) {
      for (std::size_t i = 0; i + 1 < n; ++i) {
        Matrix up = Matrix::identity(f, n), down = Matrix::identity(f, n);
        up(i, i + 1) = t;
        down(i + 1, i) = t;
        out.push_back(up);
        out.push_back(down);
      }
    }
    if (f.primitive() != 1) {
      Matrix d = Matrix::identity(f, n);
      d(0, 0) = f.primitive();
      out.push_back(d);
    }
    return out;
  }
  const SymplecticSpace s = standard_symplectic(n, spec.q);
  for (Elem t : parameter_basis(f)) {
    for (std::size_t i = 0; i < n / 2; ++i) {
      const std::size_t j = i + 1 < n / 2 ? i + 1 : n - 1 - i;
      const Matrix x = sp_root_element(f, n, i, j, t);
      out.push_back(x);
      out.push_back(x.transpose());
    }
  }
  for (const auto& g : out) ensure(is_sp_member(g, s), "generator is not symplectic");
  return out;
}

std::string generator_description(const GroupSpec& spec) {
  std::string params = spec.field().degree() == 1 ? "1" : "w^0..w^" + std::to_string(spec.field().degree() - 1);
  if (spec.family == Family::GL) {
    return "elementary matrices 1 + t E_{i,i+1}, 1 + t E_{i+1,i} (t in {" + params + "})" +
           (spec.field().primitive() != 1 ? " and diag(w, 1, ..., 1)" : "") +
           ", w the primitive element";
  }
  return "root elements of the +- simple roots with parameters t in {" + params +
         "}, w the primitive element";
}

std::vector<Matrix> unitriangular_elements(const GroupSpec& spec) {
  spec.validate();
  const Field f = spec.field();
  const std::size_t n = spec.dim;
  std::vector<Matrix> factors_base;  // one generic factor per positive root
  std::vector<std::pair<std::size_t, std::size_t>> roots;
  if (spec.family == Family::GL) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) roots.emplace_back(i, j);
  } else {
    roots = sp_positive_roots(n);
  }
  const std::uint64_t count = ipow(static_cast<std::uint64_t>(f.q()), roots.size());
  if (count > kMaxUnipotents) throw ScaleExceeded("unitriangular subgroup is too large");
  std::vector<Matrix> out;
  out.reserve(count);
  std::vector<Elem> digits(roots.size(), 0);
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    Matrix u = Matrix::identity(f, n);
    for (std::size_t r = 0; r < roots.size(); ++r) {
      if (digits[r] == 0) continue;
      const auto [i, j] = roots[r];
      if (spec.family == Family::GL) {
        Matrix x = Matrix::identity(f, n);
        x(i, j) = digits[r];
        u = u * x;
      } else {
        u = u * sp_root_element(f, n, i, j, digits[r]);
      }
    }
    out.push_back(std::move(u));
    for (std::size_t r = 0; r < digits.size(); ++r) {
      if (++digits[r] < f.q()) break;
      digits[r] = 0;
    }
  }
  return out;
}

std::vector<std::uint64_t> enumerate_unipotents(const GroupSpec& spec) {
  spec.validate();
  const std::uint64_t expected = ipow(static_cast<std::uint64_t>(spec.q), 2 * spec.positive_roots());
  if (expected > kMaxUnipotents) {
    throw ScaleExceeded(spec.name() + " has " + std::to_string(expected) +
                        " unipotent elements, beyond the enumeration limit");
  }
  const MatrixCodec codec(spec.field(), spec.dim);
  const PackedOps ops(codec);
  std::vector<Conjugator> conj;
  for (const auto& g : group_generators(spec)) conj.emplace_back(ops, g);

  absl::flat_hash_set<std::uint64_t> seen;
  std::vector<std::uint64_t> order;
  seen.reserve(expected);
  order.reserve(expected);
  for (const auto& u : unitriangular_elements(spec)) {
    const auto key = codec.encode(u);
    if (seen.insert(key).second) order.push_back(key);
  }
  ensure(order.size() == ipow(static_cast<std::uint64_t>(spec.q), spec.positive_roots()),
         "unitriangular elements are not distinct");
  for (std::size_t at = 0; at < order.size(); ++at) {
    for (const auto& c : conj) {
      const auto key = c(order[at]);
      if (seen.insert(key).second) {
        order.push_back(key);
        if (order.size() > kMaxUnipotents) throw ScaleExceeded("conjugation closure is too large");
      }
    }
  }
  std::sort(order.begin(), order.end());
  return order;
}

OrbitPartition conjugacy_orbits(const std::vector<std::uint64_t>& keys, const GroupSpec& spec) {
  const MatrixCodec codec(spec.field(), spec.dim);
  const PackedOps ops(codec);
  std::vector<Conjugator> conj;
  for (const auto& g : group_generators(spec)) conj.emplace_back(ops, g);

  constexpr std::uint32_t kUnset = ~std::uint32_t{0};
  OrbitPartition out;
  out.orbit_of.assign(keys.size(), kUnset);
  for (std::size_t start = 0; start < keys.size(); ++start) {
    if (out.orbit_of[start] != kUnset) continue;
    const auto id = static_cast<std::uint32_t>(out.orbits.size());
    std::vector<std::uint32_t> members{static_cast<std::uint32_t>(start)};
    out.orbit_of[start] = id;
    for (std::size_t at = 0; at < members.size(); ++at) {
      for (const auto& c : conj) {
        const auto key = c(keys[members[at]]);
        const auto it = std::lower_bound(keys.begin(), keys.end(), key);
        if (it == keys.end() || *it != key) throw InternalError("key set is not conjugation stable");
        const auto idx = static_cast<std::size_t>(it - keys.begin());
        if (out.orbit_of[idx] == kUnset) {
          out.orbit_of[idx] = id;
          members.push_back(static_cast<std::uint32_t>(idx));
        }
      }
    }
    std::sort(members.begin(), members.end());
    out.orbits.push_back(std::move(members));
  }
  return out;
}

std::uint64_t group_order_bfs(const GroupSpec& spec, std::uint64_t limit) {
  spec.validate();
  const MatrixCodec codec(spec.field(), spec.dim);
  const PackedOps ops(codec);
  std::vector<PackedOps::Sparse> gens;
  for (const auto& g : group_generators(spec)) gens.push_back(PackedOps::sparse(g));
  absl::flat_hash_set<std::uint64_t> seen;
  std::vector<std::uint64_t> order{codec.encode(Matrix::identity(spec.field(), spec.dim))};
  seen.insert(order.front());
  std::array<Elem, kMaxEntries> a{}, b{};
  for (std::size_t at = 0; at < order.size(); ++at) {
    ops.decode(order[at], a.data());
    for (const auto& g : gens) {
      ops.right(a.data(), g, b.data());
      const auto key = ops.encode(b.data());
      if (seen.insert(key).second) {
        order.push_back(key);
        if (order.size() > limit) throw ScaleExceeded(spec.name() + " is too large for a full closure");
      }
    }
  }
  return order.size();
}

// ---------------------------------------------------------------- checks

std::vector<Matrix> g3_elements(const Matrix& u, const GroupSpec& spec) {
  const Field f = spec.field();
  const Matrix n = require_unipotent(u);
  const GradedSpace g = graded_space(n);
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  for (std::size_t r = 0; r < g.dim; ++r)
    for (std::size_t c = 0; c < g.dim; ++c)
      if (g.degrees[r] - g.degrees[c] >= 3) slots.emplace_back(r, c);
  const std::uint64_t count = ipow(static_cast<std::uint64_t>(f.q()), slots.size());
  if (slots.size() > 40 || count > (std::uint64_t{1} << 22)) {
    throw ScaleExceeded("E_{>=3} has too many points to enumerate");
  }
  const SymplecticSpace s = spec.family == Family::Sp ? standard_symplectic(spec.dim, spec.q)
                                                      : SymplecticSpace{f, 0, Matrix(f, 0, 0)};
  std::vector<Matrix> out;
  std::vector<Elem> digits(slots.size(), 0);
  const Matrix one = Matrix::identity(f, g.dim);
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    Matrix x(f, g.dim, g.dim);
    for (std::size_t k = 0; k < slots.size(); ++k) x(slots[k].first, slots[k].second) = digits[k];
    Matrix h = one + g.from_graded(x);
    if (spec.family == Family::GL || is_sp_member(h, s)) out.push_back(std::move(h));
    for (std::size_t k = 0; k < digits.size(); ++k) {
      if (++digits[k] < f.q()) break;
      digits[k] = 0;
    }
  }
  return out;
}

namespace {

bool in_group(const Matrix& h, const GroupSpec& spec, const SymplecticSpace& s) {
  if (rank(h) != h.rows()) return false;
  return spec.family == Family::GL || is_sp_member(h, s);
}

/// Every group element commuting with u maps each V_{>=a} of u - 1 onto
/// itself. Returns the number of group elements tested.
std::uint64_t check_centralizer(const Matrix& u, const GroupSpec& spec, std::mt19937_64& rng,
                                bool& ok) {
  const Field f = spec.field();
  const std::size_t n = spec.dim;
  const SymplecticSpace s = spec.family == Family::Sp ? standard_symplectic(n, spec.q)
                                                      : SymplecticSpace{f, 0, Matrix(f, 0, 0)};
  const Filtration filt = dk_filtration(minus_identity(u));
  // X u - u X as a linear map on vec(X) (row-major).
  Matrix op(f, n * n, n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t k = 0; k < n; ++k) {
        op(r * n + c, r * n + k) = f.add(op(r * n + c, r * n + k), u(k, c));
        op(r * n + c, k * n + c) = f.sub(op(r * n + c, k * n + c), u(r, k));
      }
  const auto basis = kernel(op).basis_vectors();
  auto to_matrix = [&](const Vector& v) {
    Matrix m(f, n, n);
    for (std::size_t k = 0; k < n * n; ++k) m(k / n, k % n) = v[k];
    return m;
  };
  auto test = [&](const Matrix& h) {
    for (int a = filt.lo(); a <= filt.hi(); ++a) {
      if (!(image_of(h, filt.at(a)) == filt.at(a))) ok = false;
    }
  };
  std::uint64_t tested = 0;
  const std::uint64_t total = basis.size() > 20 ? ~std::uint64_t{0}
                                                : ipow(static_cast<std::uint64_t>(f.q()), basis.size());
  if (total <= (std::uint64_t{1} << 20)) {
    std::vector<Elem> digits(basis.size(), 0);
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      Vector v(n * n, 0);
      for (std::size_t k = 0; k < basis.size(); ++k)
        if (digits[k] != 0) v = vec_add(f, v, vec_scale(f, digits[k], basis[k]));
      const Matrix h = to_matrix(v);
      if (in_group(h, spec, s)) {
        test(h);
        ++tested;
      }
      for (std::size_t k = 0; k < digits.size(); ++k) {
        if (++digits[k] < f.q()) break;
        digits[k] = 0;
      }
    }
    return tested;
  }
  std::uniform_int_distribution<int> pick(0, f.q() - 1);
  for (int draw = 0; draw < 4096; ++draw) {
    Vector v(n * n, 0);
    for (const auto& b : basis) v = vec_add(f, v, vec_scale(f, static_cast<Elem>(pick(rng)), b));
    const Matrix h = to_matrix(v);
    if (in_group(h, spec, s)) {
      test(h);
      ++tested;
    }
  }
  return tested;
}

}  // namespace

bool ClassReport::ok() const {
  return total == expected_total && every_label_admissible && class_function && coset_same_label &&
         centralizer_preserves;
}

ClassReport verify_pieces(const GroupSpec& spec, const VerifyOptions& options) {
  spec.validate();
  ClassReport report;
  report.spec = spec;
  report.generators = generator_description(spec);
  report.expected_total = ipow(static_cast<std::uint64_t>(spec.q), 2 * spec.positive_roots());
  const std::vector<std::uint64_t> keys = enumerate_unipotents(spec);
  report.total = keys.size();
  const OrbitPartition orbits = conjugacy_orbits(keys, spec);
  const MatrixCodec codec(spec.field(), spec.dim);

  const std::vector<PieceLabel> labels = admissible_labels(spec);
  auto label_index = [&](const PieceLabel& l) -> int {
    const auto it = std::lower_bound(labels.begin(), labels.end(), l);
    return it != labels.end() && *it == l ? static_cast<int>(it - labels.begin()) : -1;
  };

  // Label per element (or per orbit representative), sharded over threads.
  std::vector<std::size_t> targets;
  if (options.label_all) {
    targets.resize(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) targets[i] = i;
  } else {
    for (const auto& o : orbits.orbits) targets.push_back(o.front());
  }
  std::vector<int> target_label(targets.size(), -1);
  const unsigned jobs = std::max(1u, options.jobs);
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&](unsigned w) {
    try {
      for (std::size_t t = w; t < targets.size() && !failed; t += jobs) {
        target_label[t] = label_index(label_of(codec.decode(keys[targets[t]]), spec));
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      failed = true;
      if (!error) error = std::current_exception();
    }
  };
  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  std::vector<int> orbit_label(orbits.orbits.size(), -2);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    if (target_label[t] < 0) report.every_label_admissible = false;
    int& slot = orbit_label[orbits.orbit_of[targets[t]]];
    if (slot == -2) {
      slot = target_label[t];
    } else if (slot != target_label[t]) {
      report.class_function = false;
    }
  }

  for (const auto& l : labels) report.labels.push_back({l, 0, {}});
  for (std::size_t o = 0; o < orbits.orbits.size(); ++o) {
    if (orbit_label[o] < 0) continue;
    auto& rec = report.labels[static_cast<std::size_t>(orbit_label[o])];
    rec.count += orbits.orbits[o].size();
    rec.orbit_sizes.push_back(orbits.orbits[o].size());
  }
  for (auto& rec : report.labels) std::sort(rec.orbit_sizes.begin(), rec.orbit_sizes.end());

  if (options.sample == 0) return report;
  // Both checks are invariant under conjugation, so one representative per
  // orbit covers the whole group; `sample` caps the orbits per label.
  std::mt19937_64 rng(options.seed);
  std::map<int, std::size_t> used;
  for (std::size_t o = 0; o < orbits.orbits.size(); ++o) {
    if (orbit_label[o] < 0 || used[orbit_label[o]]++ >= options.sample) continue;
    const Matrix u = codec.decode(keys[orbits.orbits[o].front()]);
    for (const auto& h : g3_elements(u, spec)) {
      const auto key = codec.encode(u * h);
      const auto it = std::lower_bound(keys.begin(), keys.end(), key);
      if (it == keys.end() || *it != key) {
        report.coset_same_label = false;
        report.coset_same_orbit = false;
        continue;
      }
      const std::uint32_t other = orbits.orbit_of[static_cast<std::size_t>(it - keys.begin())];
      if (other != o) {
        report.coset_same_orbit = false;
        ++report.coset_orbit_escapes;
      }
      if (orbit_label[other] != orbit_label[o]) report.coset_same_label = false;
    }
    ++report.coset_checked;
    bool ok = true;
    check_centralizer(u, spec, rng, ok);
    report.centralizer_preserves = report.centralizer_preserves && ok;
    ++report.centralizer_checked;
  }
  return report;
}

}  // namespace upieces
