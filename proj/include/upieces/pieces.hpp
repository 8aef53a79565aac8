#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "upieces/char2.hpp"

namespace upieces {

enum class Family { GL, Sp };

struct GroupSpec {
  Family family = Family::GL;
  std::size_t dim = 0;
  int q = 2;

  /// Throws OddDimension (Sp with odd dim) and UnsupportedField.
  void validate() const;
  Field field() const { return Field::make(q); }
  /// Number of positive roots: n(n-1)/2 for GL_n, m^2 for Sp_2m.
  std::size_t positive_roots() const;
  std::string name() const;
};

/// Label of a unipotent class inside a piece: the Jordan partition and the
/// subset J of odd integers (empty for GL and in odd characteristic).
struct PieceLabel {
  Partition lambda;
  std::set<int> J;

  friend bool operator==(const PieceLabel&, const PieceLabel&) = default;
  /// Lexicographic on the parts, then on J as an increasing sequence.
  friend bool operator<(const PieceLabel& a, const PieceLabel& b);
};

/// Graded dimensions of the canonical filtration of a nilpotent of type
/// lambda: a part j contributes one dimension to each degree 1-j, 3-j, ..., j-1.
std::map<int, int> graded_dims(const Partition& lambda);
/// Odd n with c_n = multiplicity of the part n+1 positive and even.
std::set<int> invariant_set_I(const Partition& lambda);
/// Odd parts have even multiplicity.
bool is_symplectic_partition(const Partition& lambda);

/// Throws NotUnipotent.
PieceLabel gl_label(const Matrix& u);
/// Throws NotUnipotent and NotSpMember.
PieceLabel sp_label(const Matrix& u, const SymplecticSpace& s);
PieceLabel label_of(const Matrix& u, const GroupSpec& spec);

std::vector<PieceLabel> admissible_labels(const GroupSpec& spec);

/// The graded model of a label: W^n for every part n+1 with positions
/// -n, -n+2, ..., n, each a copy of F^m. nu shifts position i to i+2 and
/// the admissible form pairs position i with -i through a form b on F^m,
/// twisted by the sign (-1)^floor(i/2).
struct CanonicalModel {
  Field field;
  PieceLabel label;
  std::size_t dim = 0;
  std::vector<int> degrees;  // ascending
  Matrix nu;
  Matrix gram0;
  /// Smallest even n >= 2 whose odd forms b_{n-1}, b_{n+1}, ... are all
  /// alternating (characteristic 2 only, otherwise 0).
  int nn = 0;

  std::size_t offset(int a) const;
  std::size_t gr_dim(int a) const;
  Matrix block(const Matrix& m, int b, int a) const;
  void set_block(Matrix& m, int b, int a, const Matrix& blk) const;
  /// Gram matrix of <x, nu^nn y>_0 on gr_{-nn}.
  Matrix nn_polar() const;
};

CanonicalModel canonical_model(const PieceLabel& label, const Field& f);

struct ConstructedN {
  CanonicalModel model;
  QuadraticForm target_q;  // on gr_{-nn} of the model (empty in odd characteristic)
  Matrix n_model;          // N in model coordinates, preserving gram0
  Matrix transport;        // C with C^T G_std C = gram0
  Matrix n;                // C N C^-1, in standard coordinates
};

struct ConstructChecks {
  bool sp_member = false;
  bool filtration = false;
  bool nu = false;
  bool q = false;
  bool all() const { return sp_member && filtration && nu && q; }
};

/// Builds N = N_2 + N_4 + ... degree by degree in the model (N_2 = nu), with
/// the characteristic-2 adjustment of N_4 that makes Q_nn equal to `q`, then
/// transports it to the standard form. Throws InadmissibleLabel and
/// IncompatibleQ; a failed postcondition raises InternalError.
ConstructedN construct_N_detailed(const PieceLabel& label, const GroupSpec& spec,
                                  const std::optional<QuadraticForm>& q = std::nullopt);
Matrix construct_N(const PieceLabel& label, const GroupSpec& spec,
                   const std::optional<QuadraticForm>& q = std::nullopt);
ConstructChecks check_constructed(const ConstructedN& c);

/// GL: 1 + Jordan nilpotent of type lambda with the standard basis. Sp:
/// 1 + construct_N(label) with the standard form. Throws InadmissibleLabel.
Matrix canonical_representative(const PieceLabel& label, const GroupSpec& spec);

/// Nilpotent Jordan matrix with N e_k = e_{k+1} inside each block.
Matrix jordan_nilpotent(const Field& f, const Partition& lambda);

/// Packs a dim x dim matrix into 64 bits, ceil(log2 q) bits per entry in
/// row-major order. Throws ScaleExceeded when it does not fit.
class MatrixCodec {
 public:
  MatrixCodec(Field f, std::size_t dim);
  std::uint64_t encode(const Matrix& m) const;
  Matrix decode(std::uint64_t key) const;
  const Field& field() const { return field_; }
  std::size_t dim() const { return dim_; }
  unsigned bits_per_entry() const { return bits_; }

 private:
  Field field_;
  std::size_t dim_;
  unsigned bits_;
};

/// Generators of GL_n(F_q) (elementary matrices at +-simple positions with
/// parameters w^0..w^(k-1), and diag(w, 1, ..., 1)) or Sp(F_q) (root
/// elements of the +-simple roots with the same parameters); w is the
/// primitive element and q = p^k.
std::vector<Matrix> group_generators(const GroupSpec& spec);
std::string generator_description(const GroupSpec& spec);

/// Upper unitriangular subgroup of the group.
std::vector<Matrix> unitriangular_elements(const GroupSpec& spec);

/// Largest unipotent count handled by enumeration.
inline constexpr std::uint64_t kMaxUnipotents = std::uint64_t{1} << 23;

/// All unipotent elements, as sorted codec keys: the conjugation closure of
/// the unitriangular subgroup. Throws ScaleExceeded beyond desk scale.
std::vector<std::uint64_t> enumerate_unipotents(const GroupSpec& spec);

struct OrbitPartition {
  std::vector<std::uint32_t> orbit_of;          // per element index
  std::vector<std::vector<std::uint32_t>> orbits;  // element indices
};

/// Orbits of a conjugation-stable sorted key set under the generators.
OrbitPartition conjugacy_orbits(const std::vector<std::uint64_t>& keys, const GroupSpec& spec);

/// |G| by breadth-first closure from the identity. Throws ScaleExceeded
/// above `limit` elements.
std::uint64_t group_order_bfs(const GroupSpec& spec, std::uint64_t limit = 3'000'000);

struct LabelRecord {
  PieceLabel label;
  std::uint64_t count = 0;
  std::vector<std::uint64_t> orbit_sizes;  // ascending
};

struct ClassReport {
  GroupSpec spec;
  std::string generators;
  std::uint64_t total = 0;
  std::uint64_t expected_total = 0;
  std::vector<LabelRecord> labels;  // one per admissible label, sorted
  bool every_label_admissible = true;
  bool class_function = true;       // each orbit inside one fiber
  std::uint64_t coset_checked = 0;  // elements u with u G_3 checked
  /// Every element of u G_3(F_q) has the label of u.
  bool coset_same_label = true;
  /// Every element of u G_3(F_q) is conjugate to u in G(F_q). This can fail
  /// when a geometric class splits over F_q (regular unipotents of Sp_4(F_2)),
  /// so it is reported but not part of ok().
  bool coset_same_orbit = true;
  std::uint64_t coset_orbit_escapes = 0;
  std::uint64_t centralizer_checked = 0;
  bool centralizer_preserves = true;
  bool ok() const;
};

struct VerifyOptions {
  unsigned jobs = 1;
  /// Elements per label for the sampled checks; 0 disables them.
  std::size_t sample = 200;
  std::uint64_t seed = 0;
  /// Label every element (otherwise one representative per orbit).
  bool label_all = true;
};

ClassReport verify_pieces(const GroupSpec& spec, const VerifyOptions& options = {});

/// Members of the group of the form 1 + X with X in E_{>=3} of the
/// canonical filtration of u - 1, i.e. the finite points of G_3.
std::vector<Matrix> g3_elements(const Matrix& u, const GroupSpec& spec);

}  // namespace upieces
