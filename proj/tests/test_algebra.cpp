#include <doctest.h>

#include <cmath>

#include "ncerg/algebra.hpp"
#include "ncerg/rng.hpp"

using namespace ncerg;

namespace {

AlgebraPtr m2() { return make_algebra({{2, 1.0}}); }

OperatorElement diag2(const AlgebraPtr& a, cplx d0, cplx d1) {
  OperatorElement x = OperatorElement::zero(a);
  x.blocks()[0](0, 0) = d0;
  x.blocks()[0](1, 1) = d1;
  return x;
}

}  // namespace

TEST_CASE("algebra spec validation") {
  CHECK_THROWS_AS(make_algebra({}), std::invalid_argument);
  CHECK_THROWS_AS(make_algebra({{0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(make_algebra({{2, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(make_algebra({{2, -1.0}}), std::invalid_argument);
  const AlgebraPtr a = make_algebra({{1, 0.25}, {3, 2.0}});
  CHECK(a->total_dim() == 4);
  CHECK(a->trace_of_identity() == doctest::Approx(0.25 + 6.0));
}

TEST_CASE("trace on simple elements") {
  const AlgebraPtr a = m2();
  CHECK(trace(OperatorElement::identity(a)).real() == doctest::Approx(2.0));
  CHECK(trace(diag2(a, 1.0, -1.0)).real() == doctest::Approx(0.0));

  const AlgebraPtr two = make_algebra({{2, 1.0}, {2, 0.5}});
  CHECK(trace(OperatorElement::identity(two)).real() == doctest::Approx(3.0));
}

TEST_CASE("trace is linear, positive on x*x, and tracial") {
  Rng rng(7);
  const AlgebraPtr a = make_algebra({{3, 1.0}, {2, 0.5}});
  for (int i = 0; i < 20; ++i) {
    const OperatorElement x = rng.element(a);
    const OperatorElement y = rng.element(a);
    const cplx lhs = trace(cplx(2.0, 1.0) * x + y);
    const cplx rhs = cplx(2.0, 1.0) * trace(x) + trace(y);
    CHECK(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(lhs)));
    CHECK(trace(multiply(x.adjoint(), x)).real() >= 0.0);
    const cplx xy = trace(multiply(x, y));
    const cplx yx = trace(multiply(y, x));
    CHECK(std::abs(xy - yx) < 1e-11 * (1.0 + std::abs(xy)));
  }
}

TEST_CASE("schatten norms on pinned examples") {
  const AlgebraPtr a = m2();
  const OperatorElement x = diag2(a, 3.0, -4.0);
  CHECK(schatten_norm(x, 1.0) == doctest::Approx(7.0).epsilon(1e-12));
  CHECK(schatten_norm(x, std::numeric_limits<double>::infinity()) ==
        doctest::Approx(4.0).epsilon(1e-12));

  OperatorElement nil = OperatorElement::zero(a);
  nil.blocks()[0](0, 1) = 1.0;
  CHECK(schatten_norm(nil, 2.0) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(schatten_norm(x, 0.5), std::invalid_argument);
}

TEST_CASE("schatten norm axioms and weights") {
  Rng rng(11);
  const AlgebraPtr a = make_algebra({{2, 2.0}, {3, 0.5}});
  for (double p : {1.0, 2.0, 4.0}) {
    for (int i = 0; i < 10; ++i) {
      const OperatorElement x = rng.element(a);
      const OperatorElement y = rng.element(a);
      CHECK(schatten_norm(x + y, p) <= schatten_norm(x, p) + schatten_norm(y, p) + 1e-10);
      CHECK(schatten_norm(cplx(-2.0) * x, p) ==
            doctest::Approx(2.0 * schatten_norm(x, p)).epsilon(1e-10));
    }
  }
  // weights enter for p < infinity only
  const AlgebraPtr unweighted = make_algebra({{2, 1.0}});
  const AlgebraPtr weighted = make_algebra({{2, 3.0}});
  OperatorElement u = OperatorElement::identity(unweighted);
  OperatorElement w = OperatorElement::identity(weighted);
  CHECK(schatten_norm(w, 1.0) == doctest::Approx(3.0 * schatten_norm(u, 1.0)));
  CHECK(schatten_norm(w, std::numeric_limits<double>::infinity()) ==
        doctest::Approx(schatten_norm(u, std::numeric_limits<double>::infinity())));
}

TEST_CASE("Hoelder-type consistency with the finite trace") {
  Rng rng(13);
  const AlgebraPtr a = make_algebra({{4, 1.0}, {2, 0.25}});
  const double tau1 = a->trace_of_identity();
  for (double p : {1.0, 2.0, 4.0}) {
    for (int i = 0; i < 10; ++i) {
      const OperatorElement x = rng.element(a);
      CHECK(schatten_norm(x, 1.0) <=
            std::pow(tau1, 1.0 - 1.0 / p) * schatten_norm(x, p) + 1e-9);
    }
  }
}

TEST_CASE("absolute value") {
  const AlgebraPtr a = m2();
  const OperatorElement x = diag2(a, -2.0, 5.0);
  const OperatorElement ax = absolute_value(x);
  CHECK(operator_norm(ax - diag2(a, 2.0, 5.0)) < 1e-10);

  CHECK(operator_norm(absolute_value(OperatorElement::zero(a))) == doctest::Approx(0.0));

  Rng rng(3);
  const OperatorElement u = rng.unitary(a);
  CHECK(operator_norm(absolute_value(u) - OperatorElement::identity(a)) < 1e-10);

  // |a| = a for positive a; result^2 = x*x
  const AlgebraPtr b = make_algebra({{4, 1.0}, {3, 2.0}});
  for (int i = 0; i < 10; ++i) {
    const OperatorElement pos = rng.positive(b);
    CHECK(operator_norm(absolute_value(pos) - pos) < 1e-10 * (1.0 + operator_norm(pos)));
    const OperatorElement g = rng.element(b);
    const OperatorElement ag = absolute_value(g);
    CHECK(operator_norm(multiply(ag, ag) - multiply(g.adjoint(), g)) <
          1e-10 * (1.0 + operator_norm(g) * operator_norm(g)));
  }
}

TEST_CASE("spectral projection on pinned examples") {
  const AlgebraPtr a = m2();
  const OperatorElement x = diag2(a, 1.0, 3.0);

  const Projection e = spectral_projection(x, 0.0, 2.0);
  CHECK(operator_norm(e.element() - diag2(a, 1.0, 0.0)) < 1e-10);

  const Projection all = spectral_projection(x, 0.0, 5.0);
  CHECK(operator_norm(all.element() - OperatorElement::identity(a)) < 1e-10);

  const Projection none = spectral_projection(x, 10.0, 20.0);
  CHECK(operator_norm(none.element()) < 1e-10);

  OperatorElement nonsa = OperatorElement::zero(a);
  nonsa.blocks()[0](0, 1) = 5.0;
  CHECK_THROWS_AS(spectral_projection(nonsa, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("spectral projections commute, window the spectrum, and partition") {
  Rng rng(17);
  const AlgebraPtr a = make_algebra({{5, 1.0}, {3, 0.5}});
  for (int i = 0; i < 10; ++i) {
    const OperatorElement h = rng.self_adjoint(a);
    const double top = operator_norm(h);
    const Projection e = spectral_projection(h, 0.0, top / 2.0);
    const OperatorElement he = multiply(h, e.element());
    CHECK(operator_norm(he - multiply(e.element(), h)) < 1e-9 * (1.0 + top));
    // he is self-adjoint with spectrum inside [0 - slack, top/2 + slack] plus
    // the kernel contributed by e^perp.
    const auto eg = eigh(he);
    for (const auto& block : eg.eigenvalues)
      for (double lam : block) {
        CHECK(lam >= 0.0 - 1e-8 - 1e-12);
        CHECK(lam <= top / 2.0 + 1e-8);
      }
    // partition over disjoint windows sums to the identity
    const Projection lo = spectral_projection(h, -top - 1.0, 0.0);
    const Projection hi = spectral_projection(h, std::nextafter(0.0, 1.0) + 2e-9, top + 1.0);
    CHECK(operator_norm(lo.element() + hi.element() - OperatorElement::identity(a)) < 1e-8);
  }
}

TEST_CASE("eigensolver reconstructs random self-adjoint instances") {
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dim = 1 + rng.next_u64() % 32;
    const AlgebraPtr a = make_algebra({{dim, 1.0}});
    const OperatorElement h = rng.self_adjoint(a);
    const auto eg = eigh(h);
    // a = sum lambda_i e_i rebuilt from the decomposition
    CMatrix rebuilt(dim);
    const CMatrix& v = eg.eigenvectors[0];
    for (std::size_t col = 0; col < dim; ++col)
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
          rebuilt(i, j) += eg.eigenvalues[0][col] * v(i, col) * std::conj(v(j, col));
    rebuilt -= h.blocks()[0];
    CHECK(rebuilt.frobenius() <= 1e-9 * (1.0 + h.blocks()[0].frobenius()));
  }
}

TEST_CASE("projection type validates its invariants") {
  const AlgebraPtr a = m2();
  CHECK_NOTHROW(Projection(diag2(a, 1.0, 0.0)));
  CHECK_NOTHROW(Projection(OperatorElement::identity(a)));
  CHECK_THROWS_AS((void)Projection(diag2(a, 0.5, 0.0)), std::invalid_argument);
  OperatorElement skew = OperatorElement::zero(a);
  skew.blocks()[0](0, 1) = 1.0;
  CHECK_THROWS_AS((void)Projection(skew), std::invalid_argument);

  const Projection e(diag2(a, 1.0, 0.0));
  CHECK(e.trace_complement() == doctest::Approx(1.0));
}

TEST_CASE("measure ball membership") {
  const AlgebraPtr a = m2();

  const auto zero = measure_ball_membership(OperatorElement::zero(a), 0.5, 0.01);
  CHECK(zero.accepted);
  CHECK(operator_norm(zero.e.element() - OperatorElement::identity(a)) < 1e-10);

  Rng rng(29);
  const OperatorElement x = rng.element(a);
  const auto big = measure_ball_membership(x, operator_norm(x) + 1.0, 0.01);
  CHECK(big.accepted);
  CHECK(operator_norm(big.e.element() - OperatorElement::identity(a)) < 1e-10);

  // x = diag(5, 0.1), eps = 0.2, delta = 1: keeps only the small direction
  const auto w = measure_ball_membership(diag2(a, 5.0, 0.1), 0.2, 1.0);
  CHECK(w.accepted);
  CHECK(w.trace_complement == doctest::Approx(1.0));
  CHECK(operator_norm(w.e.element() - diag2(a, 0.0, 1.0)) < 1e-10);
  CHECK(w.norm_xe <= 0.2 + 1e-12);

  const auto refused = measure_ball_membership(diag2(a, 5.0, 4.0), 0.2, 1.0);
  CHECK_FALSE(refused.accepted);

  CHECK_THROWS_AS(measure_ball_membership(x, -1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(measure_ball_membership(x, 0.5, 0.0), std::invalid_argument);
}

TEST_CASE("measure ball witness satisfies its contract on random input") {
  Rng rng(31);
  const AlgebraPtr a = make_algebra({{4, 1.0}, {2, 2.0}});
  for (int i = 0; i < 20; ++i) {
    const OperatorElement x = rng.element(a);
    const double eps = 0.3 * operator_norm(x);
    const auto w = measure_ball_membership(x, eps, a->trace_of_identity());
    CHECK(w.accepted);  // delta = tau(1) always admits the construction
    CHECK(w.norm_xe <= eps + 1e-9);
    CHECK(w.trace_complement <= a->trace_of_identity() + 1e-12);
  }
}
