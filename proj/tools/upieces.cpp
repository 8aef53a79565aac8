// Command-line front end: classify, enumerate, count, verify, construct.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "upieces/errors.hpp"
#include "upieces/json_io.hpp"
#include "upieces/suites.hpp"

namespace {

using namespace upieces;

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kInvalidInput = 2, kScaleExceeded = 3 };

struct Flags {
  std::string group;
  std::size_t dim = 0;
  std::size_t max_dim = 0;
  int q = 0;
  std::vector<int> qs{2, 3, 4, 5};
  std::string suite;
  std::string input;
  std::string out;
  unsigned jobs = 1;
  std::size_t sample = 200;
  std::string label;
  bool elements = false;
  bool label_all = false;
  bool invariant = false;
  bool meta = false;
};

/// A verification failure whose JSON diagnostics were already written.
struct Failed {};

std::uint64_t seed_from_env() {
  const char* raw = std::getenv("UPIECES_SEED");
  if (raw == nullptr || *raw == '\0') return 0;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(raw, &used);
    if (used != std::string(raw).size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw InvalidInput(std::string("UPIECES_SEED must be a nonnegative integer, got \"") + raw + "\"");
  }
}

Family family_of(const Flags& f) {
  if (f.group.empty()) throw InvalidInput("--group is required");
  return f.group == "sp" ? Family::Sp : Family::GL;
}

GroupSpec spec_of(const Flags& f) {
  if (f.q == 0) throw InvalidInput("--q is required");
  if (f.dim == 0) throw InvalidInput("--dim is required");
  GroupSpec spec{family_of(f), f.dim, f.q};
  spec.validate();
  return spec;
}

/// Writes JSON lines to --out or stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InvalidInput("cannot write " + path);
    }
  }
  void line(const Json& j) { stream() << j.dump() << '\n'; }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string read_input(const std::string& path) {
  std::ostringstream buffer;
  if (path.empty() || path == "-") {
    buffer << std::cin.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot read " + path);
    buffer << in.rdbuf();
  }
  return buffer.str();
}

/// One JSON document, or one document per nonempty line.
std::vector<Json> parse_documents(const std::string& text) {
  try {
    Json whole = Json::parse(text);
    if (whole.is_array() && (whole.empty() || whole.front().is_object())) {
      return std::vector<Json>(whole.begin(), whole.end());
    }
    return {whole};
  } catch (const Json::parse_error&) {
  }
  std::vector<Json> docs;
  std::istringstream lines(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(lines, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      docs.push_back(Json::parse(line));
    } catch (const Json::parse_error& e) {
      throw InvalidInput("line " + std::to_string(number) + ": " + e.what());
    }
  }
  return docs;
}

int cmd_classify(const Flags& f, Output& out) {
  const Family family = family_of(f);
  const auto docs = parse_documents(read_input(f.input));
  if (docs.empty()) throw InvalidInput("no matrix in the input");
  for (const auto& doc : docs) {
    const Matrix u = matrix_from_json(doc);
    if (f.q != 0 && u.field().q() != f.q)
      throw InvalidInput("matrix is over F_" + std::to_string(u.field().q()) + ", expected F_" + std::to_string(f.q));
    if (!u.square() || u.rows() == 0) throw InvalidInput("matrix must be square and nonempty");
    const GroupSpec spec{family, u.rows(), u.field().q()};
    spec.validate();
    Json j = to_json(label_of(u, spec));
    if (f.invariant && family == Family::Sp) {
      const SymplecticSpace s = standard_symplectic(spec.dim, spec.q);
      j["invariant"] = to_json(splitting_invariant(u - Matrix::identity(u.field(), u.rows()), s));
    }
    out.line(j);
  }
  return kOk;
}

int cmd_enumerate(const Flags& f, Output& out) {
  const GroupSpec spec = spec_of(f);
  if (f.elements) {
    const auto keys = enumerate_unipotents(spec);
    const MatrixCodec codec(spec.field(), spec.dim);
    for (std::uint64_t key : keys) out.line(to_json(codec.decode(key)));
    return kOk;
  }
  VerifyOptions options;
  options.jobs = f.jobs;
  options.sample = 0;
  options.seed = seed_from_env();
  options.label_all = f.label_all;
  const ClassReport report = verify_pieces(spec, options);
  if (f.meta) {
    Json meta;
    meta["group"] = spec.name();
    meta["generators"] = report.generators;
    meta["total"] = report.total;
    meta["expected_total"] = report.expected_total;
    out.line(meta);
  }
  for (const auto& rec : report.labels) out.line(to_json(rec));
  if (!report.ok()) {
    Json diag;
    diag["error"] = "verification failed";
    diag["total"] = report.total;
    diag["expected_total"] = report.expected_total;
    diag["every_label_admissible"] = report.every_label_admissible;
    diag["class_function"] = report.class_function;
    std::cerr << diag.dump() << '\n';
    throw Failed{};
  }
  return kOk;
}

int cmd_count(const Flags& f, Output& out) {
  const Family family = family_of(f);
  if (f.dim == 0) throw InvalidInput("--dim is required");
  for (int q : f.qs) GroupSpec{family, f.dim, q}.validate();
  const CountReport report = piece_count_polynomials(family, f.dim, f.qs, f.jobs);
  for (const auto& piece : report.pieces) out.line(to_json(piece));
  Json summary;
  summary["group"] = std::string(family == Family::GL ? "GL_" : "Sp_") + std::to_string(f.dim);
  summary["qs"] = report.qs;
  Json totals = Json::object();
  for (const auto& [q, t] : report.totals) {
    Json entry;
    entry["sum"] = t.first;
    entry["expected"] = t.second;
    totals[std::to_string(q)] = std::move(entry);
  }
  summary["totals"] = std::move(totals);
  summary["ok"] = report.ok();
  out.line(summary);
  if (!report.ok()) {
    std::cerr << Json{{"error", "verification failed"}, {"suite", "count"}}.dump() << '\n';
    throw Failed{};
  }
  return kOk;
}

int cmd_verify(const Flags& f, Output& out) {
  if (f.suite.empty()) throw InvalidInput("--suite is required");
  SuiteOptions options;
  options.sample = f.sample;
  options.jobs = f.jobs;
  options.seed = seed_from_env();
  options.max_dim = f.max_dim;
  if (f.q == 0) throw InvalidInput("--q is required");
  if (f.suite == "f-recursion") {
    if (f.max_dim == 0 && f.dim == 0) throw InvalidInput("--max-dim is required");
    options.spec = GroupSpec{Family::Sp, f.dim, f.q};
  } else if (f.suite == "construct") {
    if (f.max_dim == 0 && f.dim == 0) throw InvalidInput("--dim or --max-dim is required");
    options.spec = GroupSpec{family_of(f), f.max_dim ? f.max_dim : f.dim, f.q};
  } else {
    options.spec = spec_of(f);
  }
  const SuiteResult r = run_suite(f.suite, options);
  Json j;
  j["suite"] = r.suite;
  j["scope"] = r.scope;
  j["ok"] = r.ok();
  j["checked"] = r.checked;
  j["failure_count"] = r.failure_count;
  Json failures = Json::array();
  for (const auto& fail : r.failures) {
    Json e;
    e["property"] = fail.property;
    if (fail.element) e["element"] = to_json(*fail.element);
    if (!fail.detail.empty()) e["detail"] = fail.detail;
    failures.push_back(std::move(e));
  }
  j["failures"] = std::move(failures);
  Json stats = Json::object();
  for (const auto& [k, v] : r.stats) stats[k] = v;
  j["stats"] = std::move(stats);
  out.line(j);
  if (!r.ok()) throw Failed{};
  return kOk;
}

int cmd_construct(const Flags& f, Output& out) {
  const GroupSpec spec = spec_of(f);
  if (f.label.empty()) throw InvalidInput("--label is required");
  const std::string text = f.label.front() == '{' ? f.label : read_input(f.label);
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidInput(std::string("--label: ") + e.what());
  }
  const PieceLabel label = label_from_json(doc);
  out.line(to_json(canonical_representative(label, spec)));
  return kOk;
}

void report_error(const std::string& kind, const std::string& message) {
  std::cerr << Json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unipotent pieces of GL and Sp over small finite fields"};
  app.require_subcommand(1);
  Flags f;

  auto group = [&](CLI::App* sub) {
    sub->add_option("--group", f.group, "gl or sp")->check(CLI::IsMember({"gl", "sp"}));
  };
  auto field = [&](CLI::App* sub) { sub->add_option("--q", f.q, "field order"); };
  auto dim = [&](CLI::App* sub) { sub->add_option("--dim", f.dim, "matrix dimension")->check(CLI::PositiveNumber); };
  auto io = [&](CLI::App* sub) { sub->add_option("--out", f.out, "output file (default stdout)"); };
  auto jobs = [&](CLI::App* sub) { sub->add_option("--jobs", f.jobs, "worker threads")->check(CLI::Range(1u, 256u)); };

  CLI::App* classify = app.add_subcommand("classify", "label unipotent matrices read as JSON");
  group(classify);
  field(classify);
  io(classify);
  classify->add_option("--input", f.input, "matrix JSON file or JSON lines (default stdin)");
  classify->add_flag("--invariant", f.invariant, "include the splitting invariant (sp)");

  CLI::App* enumerate = app.add_subcommand("enumerate", "class report of all unipotents, one line per label");
  group(enumerate);
  field(enumerate);
  dim(enumerate);
  io(enumerate);
  jobs(enumerate);
  enumerate->add_flag("--elements", f.elements, "stream every unipotent as matrix JSON instead");
  enumerate->add_flag("--label-all", f.label_all, "label every element, not one per class");
  enumerate->add_flag("--meta", f.meta, "prepend a line with the group and its generators");

  CLI::App* count = app.add_subcommand("count", "piece sizes across field orders and their polynomials");
  group(count);
  dim(count);
  io(count);
  jobs(count);
  count->add_option("--qs", f.qs, "field orders")->delimiter(',');

  CLI::App* verify = app.add_subcommand("verify", "run an invariant suite");
  group(verify);
  field(verify);
  dim(verify);
  io(verify);
  jobs(verify);
  verify->add_option("--suite", f.suite, "suite name")->check(CLI::IsMember(suite_names()));
  verify->add_option("--max-dim", f.max_dim, "largest dimension (f-recursion, construct)");
  verify->add_option("--sample", f.sample, "classes per label for spot checks (p6)");

  CLI::App* construct = app.add_subcommand("construct", "representative matrix of a label");
  group(construct);
  field(construct);
  dim(construct);
  io(construct);
  construct->add_option("--label", f.label, R"(label JSON such as {"lambda":[2,2],"J":[1]}, or a file holding it)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalidInput;
  }

  try {
    Output out(f.out);
    if (*classify) return cmd_classify(f, out);
    if (*enumerate) return cmd_enumerate(f, out);
    if (*count) return cmd_count(f, out);
    if (*verify) return cmd_verify(f, out);
    return cmd_construct(f, out);
  } catch (const Failed&) {
    return kVerificationFailed;
  } catch (const ScaleExceeded& e) {
    report_error("scale exceeded", e.what());
    return kScaleExceeded;
  } catch (const Error& e) {
    report_error("invalid input", e.what());
    return kInvalidInput;
  } catch (const Json::exception& e) {
    report_error("invalid input", e.what());
    return kInvalidInput;
  } catch (const InternalError& e) {
    report_error("verification failed", e.what());
    return kVerificationFailed;
  }
}
