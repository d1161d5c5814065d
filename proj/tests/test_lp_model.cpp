#include "doctest.h"

#include "ipmforge/lp_model.hpp"
#include "ipmforge/oracle.hpp"
#include "support/test_support.hpp"

using namespace ipmforge;
using ipmforge::testing::unit1;

TEST_CASE("strict feasibility on the unit interval") {
  LpInstance p = unit1();

  FeasibleWitness w = check_strict_feasibility(p, Vector::Zero(1));
  CHECK(w.slacks[0] == 1.0);
  CHECK(w.slacks[1] == 1.0);

  CHECK_THROWS_AS(check_strict_feasibility(p, Vector::Constant(1, 1.0)), NotStrictlyInterior);
  try {
    check_strict_feasibility(p, Vector::Constant(1, 1.0));
  } catch (const NotStrictlyInterior& e) {
    CHECK(e.row == 0);
  }

  FeasibleWitness mid = check_strict_feasibility(p, Vector::Constant(1, 0.5));
  CHECK(mid.slacks[0] == 0.5);
  CHECK(mid.slacks[1] == 1.5);
}

TEST_CASE("witness slacks equal b - A x exactly") {
  RandomInstance inst = random_instance(3, 11, 5);
  ipmforge::testing::TestRng rng(17);
  const Vector x = ipmforge::testing::interior_point(inst.lp, inst.start.x, rng);
  FeasibleWitness w = check_strict_feasibility(inst.lp, x);
  for (int i = 0; i < inst.lp.rows(); ++i) {
    const double ax =
        kernels::dot_fold(inst.lp.a.data() + static_cast<std::ptrdiff_t>(i) * inst.lp.cols(),
                          x.data(), inst.lp.cols());
    CHECK(w.slacks[i] == inst.lp.b[i] - ax);
  }
}

TEST_CASE("add_hypercube on an empty instance gives the unit interval") {
  LpInstance empty;
  empty.a = Matrix(0, 1);
  empty.b = Vector(0);
  empty.c = Vector::Constant(1, 1.0);
  empty.epsilon = 1e-2;
  LpInstance cube = add_hypercube(empty, 1.0);
  LpInstance want = unit1();
  CHECK(cube.rows() == 2);
  CHECK(cube.a == want.a);
  CHECK(cube.b == want.b);
}

TEST_CASE("add_hypercube appends 2n rows with slack radius at the origin") {
  LpInstance base;
  base.a = Matrix(0, 2);
  base.b = Vector(0);
  base.c = Vector::Ones(2);
  LpInstance cube = add_hypercube(base, 5.0);
  CHECK(cube.rows() == 4);
  FeasibleWitness w = check_strict_feasibility(cube, Vector::Zero(2));
  for (int i = 0; i < 4; ++i) CHECK(w.slacks[i] == 5.0);
}

TEST_CASE("hypercube rows confine every vertex") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    RandomInstance inst = random_instance(2, 7, seed);
    OracleResult best = solve_by_vertex_enumeration(inst.lp);
    CHECK(best.argmin.cwiseAbs().maxCoeff() <= 1.0 + 1e-9);
  }
}

TEST_CASE("random_instance is deterministic in the seed") {
  RandomInstance a = random_instance(2, 6, 42);
  RandomInstance b = random_instance(2, 6, 42);
  CHECK(a.lp.a == b.lp.a);
  CHECK(a.lp.b == b.lp.b);
  CHECK(a.lp.c == b.lp.c);
  RandomInstance c = random_instance(2, 6, 43);
  CHECK(a.lp.a != c.lp.a);
}

TEST_CASE("random_instance keeps the origin strictly interior") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RandomInstance inst = random_instance(3, 10, seed);
    CHECK(inst.start.slacks.minCoeff() > 0.4);  // hypercube slack 1, random rows >= 0.5
  }
}

TEST_CASE("random_instance rejects m < 3n") {
  CHECK_THROWS_AS(random_instance(3, 8, 0), InvalidArgument);
}

TEST_CASE("random instances have a finite oracle optimum") {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    RandomInstance inst = random_instance(3, 9, seed);
    OracleResult r = solve_by_vertex_enumeration(inst.lp);
    CHECK(std::isfinite(r.optimum));
  }
}

TEST_CASE("lp json round trip") {
  LpInstance p = unit1();
  Vector x0 = Vector::Constant(1, 0.25);
  Json j = lp_to_json(p, x0);
  LpFile f = lp_from_json(j);
  CHECK(f.lp.a == p.a);
  CHECK(f.lp.b == p.b);
  CHECK(f.lp.c == p.c);
  CHECK(f.lp.epsilon == p.epsilon);
  REQUIRE(f.x0.has_value());
  CHECK((*f.x0)[0] == 0.25);
}

TEST_CASE("lp json schema errors carry the field path") {
  Json j = lp_to_json(unit1());
  j.erase("b");
  CHECK_THROWS_WITH_AS(lp_from_json(j), doctest::Contains("\"b\""), SchemaError);

  Json bad = lp_to_json(unit1());
  bad["A"][1] = Json::array({1.0, 2.0});
  CHECK_THROWS_WITH_AS(lp_from_json(bad), doctest::Contains("A[1]"), SchemaError);

  Json neg = lp_to_json(unit1());
  neg["epsilon"] = -1.0;
  CHECK_THROWS_AS(lp_from_json(neg), SchemaError);
}

TEST_CASE("LpInstance validation requires m >= n+1") {
  LpInstance p;
  p.a = Matrix::Identity(2, 2);
  p.b = Vector::Ones(2);
  p.c = Vector::Ones(2);
  CHECK_THROWS_AS(p.validate(), ShapeError);
}
