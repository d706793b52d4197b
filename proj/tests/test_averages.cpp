#include <doctest.h>

#include <cmath>

#include "ncerg/averages.hpp"
#include "ncerg/rng.hpp"
#include "oracles.hpp"

using namespace ncerg;

namespace {

AlgebraPtr m2() { return make_algebra({{2, 1.0}}); }

DSOperator identity_recipe(const AlgebraPtr& a) {
  return DSOperator(a, MixedUnitary{{{1.0, OperatorElement::identity(a)}}});
}

DSOperator swap_recipe(const AlgebraPtr& a) {
  OperatorElement u = OperatorElement::zero(a);
  u.blocks()[0](0, 1) = 1.0;
  u.blocks()[0](1, 0) = 1.0;
  return DSOperator(a, UnitaryConjugation{u});
}

DSOperator random_mixed(const AlgebraPtr& a, std::uint64_t seed) {
  Rng rng(seed);
  const double p = rng.uniform(0.3, 0.7);
  return DSOperator(a, MixedUnitary{{{p, rng.unitary(a)}, {1.0 - p, rng.unitary(a)}}});
}

OperatorElement diag2(const AlgebraPtr& a, cplx d0, cplx d1) {
  OperatorElement x = OperatorElement::zero(a);
  x.blocks()[0](0, 0) = d0;
  x.blocks()[0](1, 1) = d1;
  return x;
}

}  // namespace

TEST_CASE("average stream: pinned small cases") {
  const AlgebraPtr a = m2();
  Rng rng(2);
  const OperatorElement x = rng.element(a);

  AverageStream one(random_mixed(a, 3), x, std::nullopt, std::nullopt);
  CHECK(operator_norm(one.advance() - x) < 1e-14 * (1.0 + operator_norm(x)));

  AverageStream id_stream(identity_recipe(a), x, std::nullopt, std::nullopt);
  for (int n = 1; n <= 20; ++n)
    CHECK(operator_norm(id_stream.advance() - x) < 1e-14 * (1.0 + operator_norm(x)));

  AverageStream sw(swap_recipe(a), diag2(a, 1.0, 0.0), std::nullopt, std::nullopt);
  sw.advance();
  CHECK(operator_norm(sw.advance() - diag2(a, 0.5, 0.5)) < 1e-15);
}

TEST_CASE("stream equals the from-scratch oracle for every family") {
  const AlgebraPtr a = make_algebra({{3, 1.0}, {2, 0.5}});
  Rng rng(31);
  const DSOperator op = random_mixed(a, 33);
  const OperatorElement x = rng.element(a);

  const WeightSequence beta =
      WeightSequence::trig_poly(TrigPolynomial{{cplx(0.9, 0.2), cplx(-0.4)}, {0.7, 2.1}});
  const SubsequenceSpec k = SubsequenceSpec::blocks(IntervalBlocks::squares());

  struct Case {
    std::optional<WeightSequence> beta;
    std::optional<SubsequenceSpec> k;
  };
  const Case cases[] = {{std::nullopt, std::nullopt},
                        {beta, std::nullopt},
                        {std::nullopt, k},
                        {beta, k}};
  for (const auto& c : cases) {
    AverageStream stream(op, x, c.beta, c.k);
    for (std::uint64_t n = 1; n <= 64; ++n) {
      const OperatorElement& m = stream.advance();
      if (n == 1 || n == 7 || n == 33 || n == 64) {
        const OperatorElement expected = oracle::naive_average(op, x, c.beta, c.k, n);
        double frob = 0.0, scale = 0.0;
        for (std::size_t bi = 0; bi < m.blocks().size(); ++bi) {
          frob += std::pow((m.blocks()[bi] - expected.blocks()[bi]).frobenius(), 2);
          scale += std::pow(expected.blocks()[bi].frobenius(), 2);
        }
        CHECK(std::sqrt(frob) <= 1e-12 * (1.0 + std::sqrt(scale)));
      }
    }
  }
}

TEST_CASE("norm bound holds on every emitted average") {
  const AlgebraPtr a = make_algebra({{4, 1.0}});
  Rng rng(41);
  const DSOperator op = random_mixed(a, 42);
  const OperatorElement x = rng.element(a);
  const WeightSequence beta =
      WeightSequence::trig_poly(TrigPolynomial{{cplx(1.2, -0.3)}, {1.9}});
  const SubsequenceSpec k = SubsequenceSpec::complement(SparseRule::squares());

  const double inf = std::numeric_limits<double>::infinity();
  AverageStream stream(op, x, beta, k);
  for (int n = 1; n <= 50; ++n) {
    const OperatorElement& m = stream.advance();
    for (double p : {1.0, 2.0, inf})
      CHECK(schatten_norm(m, p) <= beta.sup_bound() * schatten_norm(x, p) + 1e-10);
  }
}

TEST_CASE("averages are linear in the input") {
  const AlgebraPtr a = make_algebra({{3, 1.0}});
  Rng rng(51);
  const DSOperator op = random_mixed(a, 52);
  const OperatorElement x = rng.element(a);
  const OperatorElement y = rng.element(a);
  const cplx s(0.7, -1.1);

  AverageStream sx(op, x, std::nullopt, std::nullopt);
  AverageStream sy(op, y, std::nullopt, std::nullopt);
  AverageStream sxy(op, s * x + y, std::nullopt, std::nullopt);
  for (int n = 1; n <= 32; ++n) {
    const OperatorElement mx = sx.advance();
    const OperatorElement my = sy.advance();
    const OperatorElement mxy = sxy.advance();
    CHECK(operator_norm(mxy - (s * mx + my)) <
          1e-12 * (1.0 + operator_norm(mx) + operator_norm(my)));
  }
}

TEST_CASE("scalar factors converging to a limit preserve stream limits") {
  // lambda_n x_n -> lambda xhat with lambda_n = (k_{n-1}+1)/n along a
  // density-one sequence (lambda = 1) and x_n the running averages.
  const AlgebraPtr a = make_algebra({{3, 1.0}});
  Rng rng(61);
  const DSOperator op = random_mixed(a, 62);
  const OperatorElement x = rng.element(a);
  const SubsequenceSpec k = SubsequenceSpec::complement(SparseRule::squares());
  const OperatorElement xhat = fixed_space_projector(op)(x);

  AverageStream stream(op, x, std::nullopt, k);
  double at100 = 0.0, at2000 = 0.0;
  for (std::uint64_t n = 1; n <= 2000; ++n) {
    const OperatorElement& m = stream.advance();
    const double lambda_n =
        static_cast<double>(stream.last_exponent() + 1) / static_cast<double>(n);
    const double res = operator_norm(cplx(lambda_n) * m - xhat);
    if (n == 100) at100 = res;
    if (n == 2000) at2000 = res;
  }
  CHECK(at2000 < at100);
  CHECK(at2000 < 0.05 * operator_norm(x));
}

TEST_CASE("stream rejects bad inputs") {
  const AlgebraPtr a = m2();
  Rng rng(8);
  const OperatorElement x = rng.element(a);
  const AlgebraPtr b = make_algebra({{3, 1.0}});
  CHECK_THROWS_AS((void)AverageStream(identity_recipe(b), x, std::nullopt, std::nullopt),
                  std::invalid_argument);

  // exhausted explicit prefix surfaces as index underflow
  AverageStream stream(identity_recipe(a), x, std::nullopt,
                       SubsequenceSpec::explicit_terms({0, 2}));
  stream.advance();
  stream.advance();
  CHECK_THROWS_AS((void)stream.advance(), std::invalid_argument);
}

TEST_CASE("transfer identities: degenerate full-sequence case is exact") {
  const AlgebraPtr a = make_algebra({{3, 1.0}});
  Rng rng(71);
  const DSOperator op = random_mixed(a, 72);
  const OperatorElement x = rng.element(a);
  const WeightSequence ones = WeightSequence::ones();
  const SubsequenceSpec full = SubsequenceSpec::full();
  for (std::uint64_t n : {std::uint64_t{1}, std::uint64_t{17}, std::uint64_t{50}}) {
    CHECK(transfer_identity_check(TransferIdentity::SubsequentialAsFull, op, ones, full, x, n) == 0.0);
    CHECK(transfer_identity_check(TransferIdentity::IndicatorAsSubsequential, op, ones, full, x, n) == 0.0);
  }
}

TEST_CASE("transfer identities hold to rounding on random instances") {
  const AlgebraPtr a = make_algebra({{4, 1.0}, {2, 2.0}});
  Rng rng(81);
  const DSOperator op = random_mixed(a, 82);
  const OperatorElement x = rng.element(a);
  const double scale = 1.0 + operator_norm(x);

  std::vector<cplx> raw;
  for (int i = 0; i < 200; ++i) raw.emplace_back(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));
  const WeightSequence beta = WeightSequence::explicit_values(std::move(raw));
  const SubsequenceSpec evens = SubsequenceSpec::evens();

  CHECK(transfer_identity_check(TransferIdentity::SubsequentialAsFull, op, beta, evens, x, 50) <=
        1e-10 * scale);
  const auto prefix = SubsequenceSpec::evens().prefix(21);
  CHECK(transfer_identity_check(TransferIdentity::IndicatorAsSubsequential, op, beta, evens, x, prefix[20]) <=
        1e-10 * scale);

  // prefix of k too short for the inversion
  const SubsequenceSpec late = SubsequenceSpec::explicit_terms({40, 41, 42});
  CHECK_THROWS_AS(
      (void)transfer_identity_check(TransferIdentity::IndicatorAsSubsequential, op, beta, late, x, 5),
      std::invalid_argument);
}

TEST_CASE("deleted-terms gap bound") {
  const AlgebraPtr a = make_algebra({{3, 1.0}});
  Rng rng(91);
  const DSOperator op = random_mixed(a, 92);
  const OperatorElement x = rng.element(a);
  const WeightSequence ones = WeightSequence::ones();

  // full sequence: A_n coincides with M_n, gap and bound both vanish
  const GapBound full = theorem31_gap(op, ones, SubsequenceSpec::full(), x, 25);
  CHECK(full.bound == 0.0);
  CHECK(full.measured <= 1e-12 * (1.0 + operator_norm(x)));

  // evens: k_n = 2n makes the prefactor exactly 1/2
  const GapBound ev = theorem31_gap(op, ones, SubsequenceSpec::evens(), x, 100);
  CHECK(ev.bound == doctest::Approx(0.5 * operator_norm(x)).epsilon(1e-12));
  CHECK(ev.measured <= ev.bound + 1e-10);

  // density-one sequence: bound shrinks like sqrt(k_n)/k_n
  const SubsequenceSpec ns = SubsequenceSpec::complement(SparseRule::squares());
  const GapBound dens = theorem31_gap(op, ones, ns, x, 10000);
  CHECK(dens.measured <= dens.bound + 1e-10);
  CHECK(dens.bound <= 0.02 * operator_norm(x));

  CHECK_THROWS_AS((void)theorem31_gap(op, ones, SubsequenceSpec::full(), x, 0),
                  std::invalid_argument);
}

TEST_CASE("checkpoint helper validates and matches the stream") {
  const AlgebraPtr a = m2();
  Rng rng(95);
  const DSOperator op = random_mixed(a, 96);
  const OperatorElement x = rng.element(a);
  const auto points = stream_checkpoints(op, x, std::nullopt, std::nullopt, {1, 4, 9});
  CHECK(points.size() == 3);
  CHECK(points[2].first == 9);
  const OperatorElement expected = oracle::naive_average(op, x, std::nullopt, std::nullopt, 9);
  CHECK(operator_norm(points[2].second - expected) < 1e-12 * (1.0 + operator_norm(expected)));
  CHECK_THROWS_AS(
      (void)stream_checkpoints(op, x, std::nullopt, std::nullopt, {4, 2}),
      std::invalid_argument);
}
