#include <doctest.h>

#include "lapfol/errors.hpp"
#include "lapfol/lapalg.hpp"

using namespace lapfol;

namespace {

PolyFunction P(const SpacePtr& s, const char* text) { return PolyFunction::parse(s, text); }

}  // namespace

TEST_CASE("filtration dimensions") {
  const auto s2 = make_space("s2");
  const Subalgebra zonal = Subalgebra::parse(s2, {"z"});
  for (int d = 0; d <= 12; ++d) CHECK(zonal.dimension(d) == d + 1);
  const Subalgebra even = Subalgebra::parse(s2, {"z^2"});
  CHECK(even.dimension(4) == 3);
  CHECK(even.dimension(5) == 3);
  // Redundant generators do not inflate the span.
  const Subalgebra twice = Subalgebra::parse(s2, {"z", "2 z", "z^2"});
  CHECK(twice.dimension(6) == 7);
  // The constant is always there.
  const Subalgebra trivial(s2, {});
  CHECK(trivial.dimension(5) == 1);
  CHECK(trivial.contains(PolyFunction::constant(s2, 3)));
}

TEST_CASE("cap above the configured maximum is a configuration error") {
  const auto s2 = make_space("s2");
  CHECK_THROWS_AS(Subalgebra::parse(s2, {"z"}, default_tolerances().degree_cap + 1), ConfigError);
  CHECK_THROWS_AS(Subalgebra::parse(s2, {"z"}, -1), ConfigError);
}

TEST_CASE("express reconstructs random members") {
  Rng rng(21);
  const auto hopf = make_submetry("s3-hopf");
  const Subalgebra A(hopf->space_ptr(), hopf->quotient_map(), 6);
  const auto basis = A.basis(6);
  std::uniform_int_distribution<int> coef(-5, 5);
  for (int k = 0; k < 10; ++k) {
    PolyFunction f(hopf->space_ptr());
    for (const auto& b : basis) f += b * Rational(coef(rng));
    const auto c = A.express(f, 6);
    REQUIRE(c.has_value());
    PolyFunction back(hopf->space_ptr());
    for (std::size_t i = 0; i < basis.size(); ++i) back += basis[i] * (*c)[i];
    CHECK(back == f);
    CHECK(A.residual(f, 6).is_zero());
  }
  CHECK_FALSE(A.contains(P(hopf->space_ptr(), "x1")));
  CHECK_FALSE(A.residual(P(hopf->space_ptr(), "x1 x2"), 6).is_zero());
}

TEST_CASE("closure examples with witnesses") {
  const auto s2 = make_space("s2");
  for (const char* g : {"z", "z^2", "3 z - 1"}) {
    const Subalgebra A = Subalgebra::parse(s2, {g});
    const ClosureCertificate cert = check_laplacian_closed(A, 12);
    CHECK(cert.closed);
    REQUIRE(cert.witnesses.size() == 1);
    CHECK(expand_witness(A, cert, cert.witnesses[0]) == laplace_beltrami(A.generators()[0]));
  }
  const auto hopf = make_submetry("s3-hopf");
  const Subalgebra H(hopf->space_ptr(), hopf->quotient_map());
  const ClosureCertificate hc = check_laplacian_closed(H, 12);
  CHECK(hc.closed);
  CHECK(hc.witnesses.size() == 3);
  for (const auto& w : hc.witnesses)
    CHECK(expand_witness(H, hc, w) == laplace_beltrami(H.generators()[static_cast<std::size_t>(w.generator)]));
}

TEST_CASE("z^3 is not Laplacian-closed and the obstruction is linear in z") {
  const auto s2 = make_space("s2");
  const Subalgebra A = Subalgebra::parse(s2, {"z^3"});
  const ClosureCertificate cert = check_laplacian_closed(A, 12);
  CHECK_FALSE(cert.closed);
  REQUIRE(cert.counterexample.has_value());
  CHECK(*cert.counterexample == 0);
  REQUIRE(cert.residual.has_value());
  CHECK_FALSE(cert.residual->is_zero());
  CHECK(Subalgebra::parse(s2, {"z"}, 1).contains(*cert.residual));
  CHECK_FALSE(cert.summary().empty());
}

TEST_CASE("field of fractions regression: z^2 does not generate z") {
  const auto s2 = make_space("s2");
  const Subalgebra even = Subalgebra::parse(s2, {"z^2"});
  const PolyFunction z = PolyFunction::coordinate(s2, 2);
  CHECK_FALSE(even.contains(z));
  CHECK_FALSE(even.contains(z.pow(3)));
  CHECK(even.contains(z.pow(2)));
  CHECK(even.contains(z.pow(6)));
}

TEST_CASE("eigen intersections of the zonal algebra") {
  const auto s2 = make_space("s2");
  const Subalgebra zonal = Subalgebra::parse(s2, {"z"});
  for (int k = 0; k <= 8; ++k) {
    const auto E = zonal.eigen_intersection(Rational(k * (k + 1)));
    REQUIRE(E.size() == 1);
    CHECK(laplace_beltrami(E[0]) == E[0] * Rational(k * (k + 1)));
  }
  CHECK(zonal.eigen_intersection(Rational(5)).empty());
  const Subalgebra even = Subalgebra::parse(s2, {"z^2"});
  CHECK(even.eigen_intersection(Rational(2)).empty());
  CHECK(even.eigen_intersection(Rational(6)).size() == 1);
}

TEST_CASE("Reynolds examples") {
  const auto s2 = make_space("s2");
  const Subalgebra zonal = Subalgebra::parse(s2, {"z"});
  CHECK(reynolds(zonal, P(s2, "x^2"), Rational(6)) == P(s2, "1/2 - 1/2 z^2"));
  CHECK(reynolds(zonal, P(s2, "x y"), Rational(6)).is_zero());
  CHECK(reynolds(zonal, P(s2, "z^3 + x"), Rational(12)) == P(s2, "z^3"));
  CHECK_THROWS_AS(reynolds(zonal, P(s2, "z^4"), Rational(6)), CutoffExceeded);
  const ReynoldsOperator R(zonal, Rational(6));
  CHECK_THROWS_AS(R(P(s2, "x^3")), CutoffExceeded);
}

TEST_CASE("Reynolds identity, idempotence, self-adjointness") {
  const auto s2 = make_space("s2");
  for (const char* g : {"z", "z^2"}) {
    const Subalgebra A = Subalgebra::parse(s2, {g});
    const ReynoldsOperator R(A, Rational(72));
    const auto abasis = A.basis(4);
    const auto bbasis = monomial_basis(s2, 4);
    for (const auto& b : bbasis) {
      const PolyFunction Rb = R(b);
      CHECK(R(Rb) == Rb);
      CHECK(A.contains(Rb));
      for (const auto& a : abasis) CHECK(R(a * b) == a * Rb);
      for (const auto& c : bbasis) CHECK(l2_inner(Rb, c) == l2_inner(b, R(c)));
    }
    for (const auto& a : abasis) CHECK(R(a) == a);
  }
}

TEST_CASE("Reynolds projection equals the fiber average for every catalog submetry") {
  for (const auto& id : submetry_ids()) {
    const auto sigma = make_submetry(id);
    if (!sigma->has_exact_average()) continue;
    const Subalgebra A(sigma->space_ptr(), sigma->quotient_map());
    const ReynoldsOperator R(A, Rational(40));
    for (const auto& f : monomial_basis(sigma->space_ptr(), 4)) CHECK(R(f) == average_function(f, *sigma));
  }
}

TEST_CASE("separation examples") {
  const auto lat = make_submetry("s2-latitude");
  const SeparationReport ok = verify_separation(lat->quotient_map(), *lat, 60, 1e-10, 3);
  CHECK(ok.separates);
  CHECK(ok.margin > 1e-10);
  CHECK(ok.pairs_tested > 0);
  CHECK(ok.fiber_constancy < 1e-10);

  const SeparationReport bad = verify_separation({P(lat->space_ptr(), "z^2")}, *lat, 60, 1e-10, 3);
  CHECK_FALSE(bad.separates);
  REQUIRE(bad.violation.has_value());
  CHECK(std::fabs(bad.violation->first(2) + bad.violation->second(2)) < 1e-8);

  for (const auto& id : submetry_ids()) {
    const auto sigma = make_submetry(id);
    const SeparationReport r = verify_separation(sigma->quotient_map(), *sigma, 40, 1e-10, 5);
    CHECK_MESSAGE(r.separates, id);
  }
}

TEST_CASE("maximality examples") {
  const auto lat = make_submetry("s2-latitude");
  const auto fold = make_submetry("s2-fold");
  {
    const MaximalityReport m = maximality_probe(Subalgebra::parse(lat->space_ptr(), {"z"}), *lat, Rational(30));
    CHECK(m.agree);
    CHECK_FALSE(m.first_mismatch.has_value());
    for (const auto& e : m.entries) CHECK(e.dim_basic == e.dim_algebra);
  }
  {
    const MaximalityReport m = maximality_probe(Subalgebra::parse(fold->space_ptr(), {"z^2"}), *fold, Rational(30));
    CHECK(m.agree);
  }
  {
    const MaximalityReport m = maximality_probe(Subalgebra::parse(lat->space_ptr(), {"z^3"}), *lat, Rational(30));
    CHECK_FALSE(m.agree);
    REQUIRE(m.first_mismatch.has_value());
    CHECK(*m.first_mismatch == 2);
    const PolyFunction z = PolyFunction::coordinate(lat->space_ptr(), 2);
    bool found = false;
    for (const auto& e : m.entries)
      if (e.lambda == 2) {
        CHECK(e.dim_basic == 1);
        CHECK(e.dim_algebra == 0);
        for (const auto& f : e.outside) found = found || Subalgebra(lat->space_ptr(), {z}, 1).contains(f);
      }
    CHECK(found);
  }
  {
    // z^2 is a strictly smaller algebra than the latitude-basic functions.
    const MaximalityReport m = maximality_probe(Subalgebra::parse(lat->space_ptr(), {"z^2"}), *lat, Rational(30));
    CHECK_FALSE(m.agree);
  }
}
