#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "support/oracles.hpp"
#include "support/symplectic_gen.hpp"
#include "upieces/errors.hpp"
#include "upieces/pieces.hpp"

namespace upieces {
namespace {

using testing::random_elem;

GroupSpec sp(std::size_t dim, int q) { return {Family::Sp, dim, q}; }
GroupSpec gl(std::size_t dim, int q) { return {Family::GL, dim, q}; }

/// Every dim x dim matrix over F_q, filtered by brute force.
std::vector<std::uint64_t> brute_force_unipotents(const GroupSpec& spec) {
  const Field f = spec.field();
  const MatrixCodec codec(f, spec.dim);
  const std::size_t cells = spec.dim * spec.dim;
  std::uint64_t total = 1;
  for (std::size_t k = 0; k < cells; ++k) total *= static_cast<std::uint64_t>(f.q());
  const SymplecticSpace s = spec.family == Family::Sp ? standard_symplectic(spec.dim, spec.q)
                                                      : SymplecticSpace{f, 0, Matrix(f, 0, 0)};
  std::vector<std::uint64_t> out;
  const Matrix one = Matrix::identity(f, spec.dim);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    const Matrix m = testing::matrix_from_index(f, spec.dim, idx);
    if (!(m - one).pow(static_cast<unsigned>(spec.dim)).is_zero()) continue;
    if (spec.family == Family::Sp && !(m.transpose() * s.gram * m == s.gram)) continue;
    out.push_back(codec.encode(m));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Partition with a single part size repeated or listed.
Partition parts(std::vector<int> p) { return Partition{std::move(p)}; }

TEST(Labels, AdmissibleCounts) {
  EXPECT_EQ(admissible_labels(gl(3, 2)).size(), 3u);
  EXPECT_EQ(admissible_labels(gl(4, 5)).size(), 5u);
  EXPECT_EQ(admissible_labels(sp(4, 2)).size(), 5u);
  EXPECT_EQ(admissible_labels(sp(4, 3)).size(), 4u);
  EXPECT_EQ(admissible_labels(sp(6, 2)).size(), 9u);
  EXPECT_EQ(admissible_labels(sp(6, 3)).size(), 8u);
  const auto labels = admissible_labels(sp(4, 2));
  EXPECT_TRUE(std::is_sorted(labels.begin(), labels.end()));
  EXPECT_EQ(labels[3].lambda, parts({2, 2}));
  EXPECT_EQ(labels[3].J, (std::set<int>{1}));
}

TEST(Labels, GradedDimsAndI) {
  EXPECT_EQ(graded_dims(parts({3, 1})), (std::map<int, int>{{-2, 1}, {0, 2}, {2, 1}}));
  EXPECT_EQ(invariant_set_I(parts({2, 2, 1, 1})), (std::set<int>{1}));
  EXPECT_EQ(invariant_set_I(parts({2, 2, 2})), (std::set<int>{}));
  EXPECT_EQ(invariant_set_I(parts({4, 4, 2, 2})), (std::set<int>{1, 3}));
  for (const auto& p : partitions_of(8)) {
    EXPECT_EQ(invariant_set_I(p), odd_invariant_set(graded_dims(p)));
  }
  EXPECT_TRUE(is_symplectic_partition(parts({3, 3})));
  EXPECT_FALSE(is_symplectic_partition(parts({3, 1})));
}

TEST(Labels, Errors) {
  const Field f = Field::make(2);
  Matrix not_unipotent = Matrix::identity(f, 2);
  not_unipotent(0, 0) = 0;
  not_unipotent(0, 1) = 1;
  not_unipotent(1, 0) = 1;
  EXPECT_THROW(gl_label(not_unipotent), NotUnipotent);
  EXPECT_THROW(sp_label(not_unipotent, standard_symplectic(2, 2)), NotUnipotent);
  Matrix not_sp = Matrix::identity(f, 4);
  not_sp(0, 1) = 1;
  EXPECT_THROW(sp_label(not_sp, standard_symplectic(4, 2)), NotSpMember);
  EXPECT_THROW(admissible_labels(sp(3, 2)), OddDimension);
  EXPECT_THROW(admissible_labels(gl(3, 6)), UnsupportedField);
}

TEST(Labels, GlLabelIsJordanType) {
  std::mt19937_64 rng(11);
  for (int q : {2, 3, 4}) {
    const Field f = Field::make(q);
    for (const auto& p : partitions_of(5)) {
      const Matrix n = testing::conjugate(testing::random_invertible(rng, f, 5), testing::jordan_matrix(f, p.parts));
      EXPECT_EQ(gl_label(Matrix::identity(f, 5) + n), (PieceLabel{p, {}}));
    }
  }
}

TEST(Codec, RoundTripAndLimits) {
  std::mt19937_64 rng(3);
  for (int q : {2, 3, 4, 5, 7}) {
    const Field f = Field::make(q);
    const MatrixCodec codec(f, 4);
    for (int t = 0; t < 20; ++t) {
      const Matrix m = testing::random_matrix(rng, f, 4, 4);
      EXPECT_EQ(codec.decode(codec.encode(m)), m);
    }
  }
  EXPECT_EQ(MatrixCodec(Field::make(3), 4).bits_per_entry(), 2u);
  EXPECT_EQ(MatrixCodec(Field::make(7), 4).bits_per_entry(), 3u);
  EXPECT_THROW(MatrixCodec(Field::make(3), 6), ScaleExceeded);
  EXPECT_THROW(enumerate_unipotents(sp(6, 3)), ScaleExceeded);
  EXPECT_THROW(enumerate_unipotents(sp(8, 2)), ScaleExceeded);
  EXPECT_THROW(enumerate_unipotents(gl(4, 5)), ScaleExceeded);
}

TEST(Enumeration, MatchesBruteForce) {
  for (const GroupSpec& spec : {gl(2, 2), gl(2, 3), gl(3, 2), sp(2, 2), sp(2, 3), sp(4, 2)}) {
    SCOPED_TRACE(spec.name());
    const auto keys = enumerate_unipotents(spec);
    EXPECT_EQ(keys, brute_force_unipotents(spec));
  }
}

TEST(Enumeration, SteinbergCount) {
  EXPECT_EQ(enumerate_unipotents(sp(4, 3)).size(), 6561u);
  EXPECT_EQ(enumerate_unipotents(sp(4, 4)).size(), 65536u);
  EXPECT_EQ(enumerate_unipotents(gl(4, 2)).size(), 4096u);
  EXPECT_EQ(enumerate_unipotents(gl(3, 3)).size(), 729u);
}

TEST(Enumeration, GroupOrders) {
  EXPECT_EQ(group_order_bfs(gl(3, 2)), 168u);
  EXPECT_EQ(group_order_bfs(gl(2, 3)), 48u);
  EXPECT_EQ(group_order_bfs(gl(2, 4)), 180u);
  EXPECT_EQ(group_order_bfs(sp(2, 3)), 24u);
  EXPECT_EQ(group_order_bfs(sp(4, 2)), 720u);
  EXPECT_EQ(group_order_bfs(sp(4, 3)), 51840u);
  EXPECT_EQ(group_order_bfs(sp(2, 4)), 60u);
  EXPECT_THROW(group_order_bfs(sp(4, 3), 1000), ScaleExceeded);
}

TEST(Orbits, SmallGroups) {
  const auto keys = enumerate_unipotents(gl(2, 2));
  ASSERT_EQ(keys.size(), 4u);
  const auto orbits = conjugacy_orbits(keys, gl(2, 2));
  std::vector<std::size_t> sizes;
  for (const auto& o : orbits.orbits) sizes.push_back(o.size());
  std::sort(sizes.begin(), sizes.end());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{1, 3}));
}

TEST(Orbits, Sp4OverF2MatchesS6) {
  // Sp_4(F_2) is S_6; its 2-elements have class sizes 1, 15, 15, 45, 90, 90.
  const auto keys = enumerate_unipotents(sp(4, 2));
  const auto orbits = conjugacy_orbits(keys, sp(4, 2));
  std::vector<std::size_t> sizes;
  for (const auto& o : orbits.orbits) sizes.push_back(o.size());
  std::sort(sizes.begin(), sizes.end());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{1, 15, 15, 45, 90, 90}));
}

TEST(VerifyPieces, Sp4OverF2) {
  const ClassReport r = verify_pieces(sp(4, 2));
  EXPECT_EQ(r.total, r.expected_total);
  EXPECT_TRUE(r.every_label_admissible);
  EXPECT_TRUE(r.class_function);
  EXPECT_TRUE(r.coset_same_label);
  EXPECT_TRUE(r.centralizer_preserves);
  EXPECT_EQ(r.total, 256u);
  ASSERT_EQ(r.labels.size(), 5u);
  const std::vector<std::uint64_t> counts{1, 15, 15, 45, 180};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(r.labels[i].count, counts[i]);
  EXPECT_EQ(r.labels[4].orbit_sizes, (std::vector<std::uint64_t>{90, 90}));
  EXPECT_EQ(r.coset_checked, 6u);
}

TEST(VerifyPieces, CosetOrbitStability) {
  // u G_3 stays inside one rational class when the geometric class does not
  // split in a way that G_3 sees.
  for (const GroupSpec& spec : {sp(4, 3), gl(3, 3), gl(4, 2), sp(2, 5)}) {
    SCOPED_TRACE(spec.name());
    const ClassReport r = verify_pieces(spec);
    EXPECT_TRUE(r.coset_same_label);
    EXPECT_TRUE(r.coset_same_orbit);
  }
}

TEST(VerifyPieces, RegularCosetSplitsOverF2) {
  // For a regular unipotent u of Sp_4(F_2), half of u G_3(F_2) is not
  // conjugate to u: the geometric class is one, the rational classes are two.
  const GroupSpec spec = sp(4, 2);
  const SymplecticSpace s = standard_symplectic(4, 2);
  std::vector<Matrix> group;
  for (std::uint64_t idx = 0; idx < 65536; ++idx) {
    const Matrix m = testing::matrix_from_index(spec.field(), 4, idx);
    if (m.transpose() * s.gram * m == s.gram) group.push_back(m);
  }
  ASSERT_EQ(group.size(), 720u);
  const PieceLabel regular{parts({4}), {}};
  const Matrix u = canonical_representative(regular, spec);
  int conjugate = 0;
  int total = 0;
  for (const auto& h : g3_elements(u, spec)) {
    const Matrix v = u * h;
    EXPECT_EQ(label_of(v, spec), regular);
    ++total;
    for (const auto& g : group) {
      if (g * u == v * g) {
        ++conjugate;
        break;
      }
    }
  }
  EXPECT_EQ(total, 4);
  EXPECT_EQ(conjugate, 2);
  const ClassReport r = verify_pieces(spec);
  EXPECT_FALSE(r.coset_same_orbit);
  EXPECT_EQ(r.coset_orbit_escapes, 4u);
}

TEST(VerifyPieces, Gl3OverF2) {
  // Centralizer orders 168, 8, 4 give class sizes 1, 21, 42.
  const ClassReport r = verify_pieces(gl(3, 2));
  EXPECT_TRUE(r.ok());
  ASSERT_EQ(r.labels.size(), 3u);
  EXPECT_EQ(r.labels[0].count, 1u);
  EXPECT_EQ(r.labels[1].count, 21u);
  EXPECT_EQ(r.labels[2].count, 42u);
}

TEST(VerifyPieces, ThreadedMatchesSerial) {
  VerifyOptions serial;
  VerifyOptions threaded;
  threaded.jobs = 3;
  const ClassReport a = verify_pieces(sp(4, 3), serial);
  const ClassReport b = verify_pieces(sp(4, 3), threaded);
  ASSERT_EQ(a.labels.size(), b.labels.size());
  for (std::size_t i = 0; i < a.labels.size(); ++i) {
    EXPECT_EQ(a.labels[i].count, b.labels[i].count);
    EXPECT_EQ(a.labels[i].orbit_sizes, b.labels[i].orbit_sizes);
  }
  EXPECT_TRUE(a.ok());
}

TEST(VerifyPieces, RepresentativeLabellingAgrees) {
  VerifyOptions reps;
  reps.label_all = false;
  reps.sample = 0;
  const ClassReport a = verify_pieces(sp(4, 2));
  const ClassReport b = verify_pieces(sp(4, 2), reps);
  for (std::size_t i = 0; i < a.labels.size(); ++i) EXPECT_EQ(a.labels[i].count, b.labels[i].count);
}

/// dim G_3 from graded dimensions, counting coordinates of E_{>=3} and
/// halving for the symplectic condition.
std::size_t g3_dimension(const std::map<int, int>& g, Family family) {
  std::size_t twice = 0;
  std::size_t plain = 0;
  for (const auto& [a, ga] : g)
    for (const auto& [b, gb] : g)
      if (b - a >= 3) plain += static_cast<std::size_t>(ga * gb);
  if (family == Family::GL) return plain;
  twice = plain;
  for (const auto& [b, gb] : g)
    if (2 * b >= 3) twice += static_cast<std::size_t>(gb);
  return twice / 2;
}

TEST(G3, PointCountMatchesDimension) {
  for (const GroupSpec& spec : {sp(4, 2), sp(4, 3), sp(6, 2), gl(4, 2), gl(3, 3)}) {
    for (const auto& label : admissible_labels(spec)) {
      SCOPED_TRACE(spec.name());
      const Matrix u = canonical_representative(label, spec);
      const auto pts = g3_elements(u, spec);
      std::uint64_t expect = 1;
      for (std::size_t k = 0; k < g3_dimension(graded_dims(label.lambda), spec.family); ++k)
        expect *= static_cast<std::uint64_t>(spec.q);
      EXPECT_EQ(pts.size(), expect);
    }
  }
}

TEST(Construct, RoundTripEveryLabel) {
  for (const GroupSpec& spec : {sp(2, 2), sp(4, 2), sp(6, 2), sp(8, 2), sp(2, 3), sp(4, 3),
                                sp(6, 3), sp(4, 4), sp(4, 5), sp(6, 4), gl(4, 3)}) {
    for (const auto& label : admissible_labels(spec)) {
      SCOPED_TRACE(spec.name());
      const Matrix u = canonical_representative(label, spec);
      EXPECT_EQ(label_of(u, spec), label);
    }
  }
}

TEST(Construct, ModelIsConsistent) {
  const Field f = Field::make(2);
  const CanonicalModel m = canonical_model(PieceLabel{parts({2, 2}), {1}}, f);
  EXPECT_EQ(m.degrees, (std::vector<int>{-1, -1, 1, 1}));
  EXPECT_EQ(m.nn, 4);
  const CanonicalModel h = canonical_model(PieceLabel{parts({2, 2}), {}}, f);
  EXPECT_EQ(h.nn, 2);
  EXPECT_THROW(canonical_model(PieceLabel{parts({3, 1}), {}}, f), InadmissibleLabel);
  EXPECT_THROW(canonical_model(PieceLabel{parts({2, 2}), {3}}, f), InadmissibleLabel);
  EXPECT_THROW(canonical_representative(PieceLabel{parts({2, 2}), {1}}, sp(4, 3)),
               InadmissibleLabel);
  EXPECT_THROW(canonical_representative(PieceLabel{parts({3}), {}}, sp(4, 2)), InadmissibleLabel);
}

TEST(Construct, PrescribedQuadraticForms) {
  std::mt19937_64 rng(5);
  int with_form = 0;
  for (const GroupSpec& spec : {sp(6, 2), sp(8, 2), sp(6, 4), sp(10, 2)}) {
    for (const auto& label : admissible_labels(spec)) {
      const CanonicalModel m = canonical_model(label, spec.field());
      const std::size_t d = m.gr_dim(-m.nn);
      if (d == 0) continue;
      ++with_form;
      for (int trial = 0; trial < 3; ++trial) {
        QuadraticForm q{spec.field(), {}, {}, m.nn_polar()};
        for (std::size_t i = 0; i < d; ++i) {
          Vector v(d, 0);
          v[i] = 1;
          q.domain_basis.push_back(v);
          q.basis_values.push_back(random_elem(rng, spec.field()));
        }
        const ConstructedN c = construct_N_detailed(label, spec, q);
        EXPECT_TRUE(check_constructed(c).all());
        EXPECT_EQ(label_of(Matrix::identity(spec.field(), spec.dim) + c.n, spec), label);
      }
    }
  }
  EXPECT_GT(with_form, 0);
}

TEST(Construct, IncompatibleQ) {
  const GroupSpec spec = sp(6, 2);
  const PieceLabel label{parts({3, 3}), {}};
  const CanonicalModel m = canonical_model(label, spec.field());
  const std::size_t d = m.gr_dim(-m.nn);
  ASSERT_GT(d, 0u);
  QuadraticForm bad{spec.field(), {}, Vector(d, 0), Matrix(spec.field(), d, d)};
  for (std::size_t i = 0; i < d; ++i) {
    Vector v(d, 0);
    v[i] = 1;
    bad.domain_basis.push_back(v);
  }
  ASSERT_FALSE(m.nn_polar() == bad.polar);
  EXPECT_THROW(construct_N(label, spec, bad), IncompatibleQ);
  QuadraticForm wrong_size{spec.field(), {}, {}, Matrix(spec.field(), 0, 0)};
  EXPECT_THROW(construct_N(label, spec, wrong_size), IncompatibleQ);
  EXPECT_THROW(construct_N(PieceLabel{parts({4}), {}}, sp(4, 3),
                           QuadraticForm{Field::make(3), {}, {}, Matrix(Field::make(3), 0, 0)}),
               IncompatibleQ);
}

TEST(Construct, GlRepresentativeIsJordan) {
  const GroupSpec spec = gl(4, 3);
  const PieceLabel label{parts({3, 1}), {}};
  EXPECT_EQ(canonical_representative(label, spec),
            Matrix::identity(spec.field(), 4) + jordan_nilpotent(spec.field(), label.lambda));
}

}  // namespace
}  // namespace upieces
