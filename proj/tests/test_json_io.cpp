#include <gtest/gtest.h>

#include "upieces/errors.hpp"
#include "upieces/json_io.hpp"
#include "upieces/suites.hpp"

namespace upieces {
namespace {

TEST(JsonIo, MatrixRoundTrip) {
  const Field f = Field::make(4);
  const Matrix m = Matrix::from_rows(f, {{0, 1, 2}, {3, 0, 1}});
  const Json j = to_json(m);
  EXPECT_EQ(j.dump(), R"({"q":4,"rows":[[0,1,2],[3,0,1]]})");
  EXPECT_EQ(matrix_from_json(j), m);
}

TEST(JsonIo, MatrixRejectsBadDocuments) {
  EXPECT_THROW(matrix_from_json(Json::parse(R"({"rows":[[1]]})")), InvalidInput);
  EXPECT_THROW(matrix_from_json(Json::parse(R"({"q":2,"rows":[[1,2]]})")), InvalidInput);
  EXPECT_THROW(matrix_from_json(Json::parse(R"({"q":2,"rows":[[1,0],[1]]})")), InvalidInput);
  EXPECT_THROW(matrix_from_json(Json::parse(R"({"q":6,"rows":[[1]]})")), UnsupportedField);
  EXPECT_THROW(matrix_from_json(Json::parse(R"({"q":2,"rows":[["1"]]})")), InvalidInput);
}

TEST(JsonIo, Labels) {
  const PieceLabel label{Partition{{2, 2}}, {1}};
  EXPECT_EQ(to_json(label).dump(), R"({"lambda":[2,2],"J":[1]})");
  EXPECT_EQ(label_from_json(to_json(label)), label);
  EXPECT_EQ(label_from_json(Json::parse(R"({"lambda":[3,1]})")), (PieceLabel{Partition{{3, 1}}, {}}));
  EXPECT_THROW(label_from_json(Json::parse(R"({"lambda":[1,3]})")), InvalidInput);
  EXPECT_THROW(label_from_json(Json::parse(R"({"lambda":[2,0]})")), InvalidInput);
  EXPECT_THROW(label_from_json(Json::parse(R"({"J":[1]})")), InvalidInput);
}

TEST(JsonIo, FiltrationOfRegularNilpotent) {
  const Field f = Field::make(2);
  Matrix n(f, 2, 2);
  n(1, 0) = 1;
  EXPECT_EQ(to_json(dk_filtration(n)).dump(), R"({"e":2,"steps":{"-1":[[1,0],[0,1]],"0":[[0,1]],"1":[[0,1]]}})");
}

TEST(JsonIo, SplittingInvariant) {
  SplittingInvariant inv;
  inv.I = {1};
  inv.J = {1};
  inv.c = {{1, 2}};
  inv.L = {4};
  inv.Lprime = {4};
  EXPECT_EQ(to_json(inv).dump(), R"({"I":[1],"J":[1],"c":{"1":2},"L":[4],"Lprime":[4]})");
}

TEST(JsonIo, SymplecticSpace) {
  const SymplecticSpace s = standard_symplectic(4, 3);
  const SymplecticSpace back = symplectic_from_json(to_json(s));
  EXPECT_EQ(back.gram, s.gram);
  EXPECT_THROW(symplectic_from_json(Json::parse(R"({"q":2,"gram":[[1,0],[0,1]]})")), InvalidInput);
  EXPECT_THROW(symplectic_from_json(Json::parse(R"({"q":2,"gram":[[0,1,0]]})")), InvalidInput);
}

TEST(JsonIo, ReportLines) {
  const LabelRecord rec{PieceLabel{Partition{{4}}, {}}, 180, {90, 90}};
  EXPECT_EQ(to_json(rec).dump(), R"({"lambda":[4],"J":[],"count":180,"orbits":[90,90]})");

  PieceCount piece;
  piece.lambda = Partition{{2}};
  piece.counts = {{2, 3}, {3, 8}};
  piece.poly = IntPolynomial{{-1, 0, 1}};
  piece.ok = true;
  const Json j = to_json(piece);
  EXPECT_EQ(j.at("counts").dump(), R"({"2":3,"3":8})");
  EXPECT_EQ(j.at("poly").dump(), "[-1,0,1]");
  EXPECT_EQ(j.at("poly_text"), "q^2 - 1");
  EXPECT_TRUE(j.at("ok").get<bool>());
  piece.poly.reset();
  EXPECT_TRUE(to_json(piece).at("poly").is_null());
}

TEST(Suites, SmallRunsPass) {
  for (const std::string name : {"p1", "p6", "p8", "qforms", "selfdual"}) {
    const SuiteResult r = run_suite(name, {GroupSpec{Family::Sp, 4, 2}});
    EXPECT_TRUE(r.ok()) << name;
    EXPECT_GT(r.checked, 0u) << name;
  }
  const SuiteResult p1 = run_suite("p1", {GroupSpec{Family::Sp, 4, 2}});
  EXPECT_EQ(p1.stats.at("labels"), 5);
  EXPECT_EQ(p1.stats.at("orbits"), 6);
  SuiteOptions rec{GroupSpec{Family::Sp, 0, 2}};
  rec.max_dim = 4;
  EXPECT_TRUE(run_suite("f-recursion", rec).ok());
  SuiteOptions con{GroupSpec{Family::Sp, 4, 3}};
  EXPECT_EQ(run_suite("construct", con).checked, 2u + 4u);
}

TEST(Suites, Errors) {
  EXPECT_THROW(run_suite("nope", {GroupSpec{Family::Sp, 4, 2}}), InvalidInput);
  EXPECT_THROW(run_suite("qforms", {GroupSpec{Family::Sp, 4, 3}}), InvalidInput);
  EXPECT_THROW(run_suite("p8", {GroupSpec{Family::GL, 3, 2}}), InvalidInput);
  EXPECT_THROW(run_suite("p1", {GroupSpec{Family::Sp, 8, 3}}), ScaleExceeded);
  EXPECT_THROW(count_sym_nondeg_brute(6, 3), ScaleExceeded);
  EXPECT_EQ(count_sym_nondeg_brute(2, 2), 4);
}

}  // namespace
}  // namespace upieces
