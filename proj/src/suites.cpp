#include "upieces/suites.hpp"

#include <algorithm>
#include <functional>
#include <mutex>
#include <random>
#include <thread>

#include "upieces/errors.hpp"

namespace upieces {
namespace {

constexpr std::size_t kKeptFailures = 20;

class FailureLog {
 public:
  explicit FailureLog(SuiteResult& result) : result_(result) {}

  void add(std::uint64_t index, SuiteFailure failure) {
    std::lock_guard lock(mutex_);
    ++result_.failure_count;
    kept_.emplace_back(index, std::move(failure));
  }

  /// Keeps the earliest failures by enumeration index, so the report does
  /// not depend on thread scheduling.
  void finish() {
    std::stable_sort(kept_.begin(), kept_.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [index, f] : kept_) {
      if (result_.failures.size() == kKeptFailures) break;
      result_.failures.push_back(std::move(f));
    }
  }

 private:
  SuiteResult& result_;
  std::mutex mutex_;
  std::vector<std::pair<std::uint64_t, SuiteFailure>> kept_;
};

SuiteResult started(std::string suite, std::string scope) {
  SuiteResult r;
  r.suite = std::move(suite);
  r.scope = std::move(scope);
  return r;
}

void require_sp(const GroupSpec& spec, const std::string& suite) {
  if (spec.family != Family::Sp) throw InvalidInput("suite " + suite + " applies to symplectic groups only");
}

/// Calls check(index, u) for every unipotent u of the group, sharded over
/// `jobs` threads; the check reports failures through the log.
void for_each_unipotent(const GroupSpec& spec, unsigned jobs,
                        const std::function<void(std::uint64_t, const Matrix&)>& check,
                        SuiteResult& result) {
  const auto keys = enumerate_unipotents(spec);
  const MatrixCodec codec(spec.field(), spec.dim);
  const unsigned workers = std::max(1u, jobs);
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < keys.size(); i += workers) check(i, codec.decode(keys[i]));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  result.checked = keys.size();
}

SuiteResult suite_p1(const SuiteOptions& o) {
  SuiteResult r = started("p1", o.spec.name());
  VerifyOptions v;
  v.jobs = o.jobs;
  v.sample = 0;
  v.seed = o.seed;
  const ClassReport report = verify_pieces(o.spec, v);
  r.checked = report.total;
  FailureLog log(r);
  if (report.total != report.expected_total)
    log.add(0, {"unipotent count equals q^(2 N+)", std::nullopt,
                std::to_string(report.total) + " != " + std::to_string(report.expected_total)});
  if (!report.every_label_admissible)
    log.add(1, {"every unipotent has an admissible label", std::nullopt, ""});
  if (!report.class_function)
    log.add(2, {"label is constant on conjugacy classes", std::nullopt, ""});
  log.finish();
  std::int64_t orbits = 0;
  for (const auto& rec : report.labels) orbits += static_cast<std::int64_t>(rec.orbit_sizes.size());
  r.stats["labels"] = static_cast<std::int64_t>(report.labels.size());
  r.stats["orbits"] = orbits;
  return r;
}

SuiteResult suite_p6(const SuiteOptions& o) {
  SuiteResult r = started("p6", o.spec.name());
  VerifyOptions v;
  v.jobs = o.jobs;
  v.sample = o.sample;
  v.seed = o.seed;
  v.label_all = false;
  const ClassReport report = verify_pieces(o.spec, v);
  r.checked = report.coset_checked;
  FailureLog log(r);
  if (!report.coset_same_label)
    log.add(0, {"u G_3 stays inside the class of u within its piece", std::nullopt, ""});
  if (!report.centralizer_preserves)
    log.add(1, {"the centralizer of u preserves the canonical filtration", std::nullopt, ""});
  log.finish();
  r.stats["coset_checked"] = static_cast<std::int64_t>(report.coset_checked);
  r.stats["coset_orbit_escapes"] = static_cast<std::int64_t>(report.coset_orbit_escapes);
  r.stats["centralizer_checked"] = static_cast<std::int64_t>(report.centralizer_checked);
  return r;
}

SuiteResult suite_p8(const SuiteOptions& o) {
  require_sp(o.spec, "p8");
  SuiteResult r = started("p8", o.spec.name());
  VerifyOptions v;
  v.jobs = o.jobs;
  v.sample = 0;
  v.label_all = false;
  const ClassReport report = verify_pieces(o.spec, v);
  FailureLog log(r);
  std::uint64_t index = 0;
  for (const auto& p : partitions_of(static_cast<int>(o.spec.dim))) {
    if (!is_symplectic_partition(p)) continue;
    const ProductFormulaReport pf = verify_product_formula(p, report);
    ++r.checked;
    if (!pf.ok) {
      std::string parts;
      for (int x : p.parts) parts += (parts.empty() ? "" : ",") + std::to_string(x);
      log.add(index, {"fiber sizes follow the product formula", std::nullopt,
                      "lambda = (" + parts + "): " + pf.diagnostic});
    }
    ++index;
  }
  log.finish();
  return r;
}

SuiteResult suite_f_recursion(const SuiteOptions& o) {
  const std::size_t top = o.max_dim ? o.max_dim : o.spec.dim;
  SuiteResult r = started("f-recursion", "q=" + std::to_string(o.spec.q) + ", d<=" + std::to_string(top));
  FailureLog log(r);
  for (std::size_t d = 0; d <= top; ++d) {
    const std::int64_t formula = count_sym_nondeg(static_cast<int>(d), o.spec.q);
    const std::int64_t direct = count_sym_nondeg_brute(static_cast<int>(d), o.spec.q);
    ++r.checked;
    if (formula != direct)
      log.add(d, {"recursion counts nondegenerate symmetric forms", std::nullopt,
                  "d=" + std::to_string(d) + ": " + std::to_string(formula) + " != " + std::to_string(direct)});
  }
  log.finish();
  return r;
}

SuiteResult suite_qforms(const SuiteOptions& o) {
  require_sp(o.spec, "qforms");
  if (o.spec.field().p() != 2) throw InvalidInput("suite qforms needs characteristic 2");
  SuiteResult r = started("qforms", o.spec.name());
  const SymplecticSpace s = standard_symplectic(o.spec.dim, o.spec.q);
  const Matrix one = Matrix::identity(s.field, s.dim);
  FailureLog log(r);
  for_each_unipotent(o.spec, o.jobs, [&](std::uint64_t index, const Matrix& u) {
    const Matrix n = u - one;
    try {
      const GradedSymplecticData d = graded_symplectic(n, s);
      const LSets l = sets_L(d);
      // Both constructors assert lift independence and their identities.
      for (int k : l.L) qform_qn(n, s, d, l, k);
      for (int k : l.Lprime) qform_Qn(n, s, d, l, k);
    } catch (const InternalError& e) {
      log.add(index, {e.what(), u, ""});
    }
  }, r);
  log.finish();
  return r;
}

SuiteResult suite_selfdual(const SuiteOptions& o) {
  require_sp(o.spec, "selfdual");
  SuiteResult r = started("selfdual", o.spec.name());
  const SymplecticSpace s = standard_symplectic(o.spec.dim, o.spec.q);
  const Field& f = s.field;
  const Matrix one = Matrix::identity(f, s.dim);
  FailureLog log(r);
  for_each_unipotent(o.spec, o.jobs, [&](std::uint64_t index, const Matrix& u) {
    const Matrix n = u - one;
    auto fail = [&](const std::string& what, const std::string& detail) {
      log.add(index, {what, u, detail});
    };
    if (!check_self_dual(n, s)) return fail("the canonical filtration is self-dual", "");
    const GradedSymplecticData d = graded_symplectic(n, s);
    for (const auto& [k, b] : d.bn) {
      const std::string at = "n=" + std::to_string(k);
      if (rank(b) != b.rows()) fail("b_n is nondegenerate", at);
      const bool odd = k % 2 != 0;
      const Matrix expected = odd ? b : Matrix(f, b.rows(), b.cols()) - b;
      if (!(b.transpose() == expected)) fail("b_n is symmetric for odd n and skew for even n", at);
      if (!odd && f.p() == 2 && !is_alternating(b)) fail("b_n is alternating for even n", at);
      if (!odd && b.rows() % 2 != 0) fail("dim P_{-n} is even for even n", at);
    }
  }, r);
  log.finish();
  return r;
}

SuiteResult suite_construct(const SuiteOptions& o) {
  const std::size_t top = o.max_dim ? o.max_dim : o.spec.dim;
  const bool sp = o.spec.family == Family::Sp;
  SuiteResult r = started("construct", std::string(sp ? "Sp" : "GL") + " dims <= " + std::to_string(top) +
                                 " over F_" + std::to_string(o.spec.q));
  FailureLog log(r);
  std::uint64_t index = 0;
  for (std::size_t dim = sp ? 2 : 1; dim <= top; dim += sp ? 2 : 1) {
    const GroupSpec spec{o.spec.family, dim, o.spec.q};
    for (const auto& label : admissible_labels(spec)) {
      ++r.checked;
      const Matrix u = canonical_representative(label, spec);
      if (!(label_of(u, spec) == label))
        log.add(index, {"the representative has the requested label", u, spec.name()});
      if (sp) {
        const ConstructChecks c = check_constructed(construct_N_detailed(label, spec));
        if (!c.sp_member) log.add(index, {"1 + N lies in Sp", u, spec.name()});
        if (!c.filtration) log.add(index, {"N has the target canonical filtration", u, spec.name()});
        if (!c.nu) log.add(index, {"N induces the model graded map", u, spec.name()});
        if (!c.q) log.add(index, {"N has the prescribed quadratic form", u, spec.name()});
      }
      ++index;
    }
  }
  log.finish();
  return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"p1",     "p6",       "p8",       "f-recursion",
                                              "qforms", "selfdual", "construct"};
  return names;
}

SuiteResult run_suite(const std::string& name, const SuiteOptions& options) {
  if (name == "f-recursion") {
    Field::make(options.spec.q);
    return suite_f_recursion(options);
  }
  options.spec.validate();
  if (name == "p1") return suite_p1(options);
  if (name == "p6") return suite_p6(options);
  if (name == "p8") return suite_p8(options);
  if (name == "qforms") return suite_qforms(options);
  if (name == "selfdual") return suite_selfdual(options);
  if (name == "construct") return suite_construct(options);
  throw InvalidInput("unknown suite \"" + name + "\"");
}

std::int64_t count_sym_nondeg_brute(int d, int q) {
  if (d < 0) throw RangeError("dimension must be nonnegative");
  const Field f = Field::make(q);
  const auto n = static_cast<std::size_t>(d);
  std::int64_t total = 1;
  for (std::size_t k = 0; k < n * (n + 1) / 2; ++k) {
    total *= q;
    if (total > (std::int64_t{1} << 24)) throw ScaleExceeded("too many symmetric matrices to enumerate");
  }
  std::int64_t count = 0;
  for (std::int64_t idx = 0; idx < total; ++idx) {
    Matrix m(f, n, n);
    std::int64_t rest = idx;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        m(i, j) = m(j, i) = static_cast<Elem>(rest % q);
        rest /= q;
      }
    }
    if (rank(m) == n) ++count;
  }
  return count;
}

}  // namespace upieces
