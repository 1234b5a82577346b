#include <gtest/gtest.h>

#include <bit>
#include <cstdint>

#include "jetvar/brst.hpp"
#include "support/odd_shift_oracle.hpp"
#include "support/random_forms.hpp"

using namespace jetvar;
using jetvar::testing::FormSampler;
using jetvar::testing::OddShiftOracle;

namespace {

LieStructure perturbed(const LieStructure& g, std::size_t r, std::size_t p, std::size_t q, int delta) {
  std::vector<Rational> c = g.constants();
  const std::size_t d = g.dim();
  c[(r * d + p) * d + q] += delta;
  c[(r * d + q) * d + p] -= delta;
  return {d, c};
}

// Structure constants of su(2) in the basis e'_p = M^i_p e_i.
LieStructure su2_in_basis(const std::vector<std::vector<int>>& mt) {
  const LieStructure g = LieStructure::su2();
  // invert the 3x3 integer matrix exactly
  linalg::Matrix aug(3, linalg::Vector(6));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) aug[i][j] = mt[i][j];
    aug[i][3 + i] = 1;
  }
  linalg::rref(aug, 6);
  std::vector<Rational> c(27);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t p = 0; p < 3; ++p)
      for (std::size_t q = 0; q < 3; ++q) {
        Rational v;
        for (std::size_t s = 0; s < 3; ++s)
          for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) v += aug[r][3 + s] * g.c(s, i, j) * mt[i][p] * mt[j][q];
        c[(r * 3 + p) * 3 + q] = v;
      }
  return {3, c};
}

}  // namespace

TEST(LieStructure, ValidationAndPresets) {
  EXPECT_TRUE(LieStructure::su2().jacobi_verified());
  EXPECT_TRUE(LieStructure::abelian(4).jacobi_verified());
  EXPECT_EQ(LieStructure::su2().c(0, 1, 2), 1);
  EXPECT_EQ(LieStructure::su2().c(0, 2, 1), -1);
  std::vector<Rational> bad(8);
  bad[1] = 1;  // c^0_01 without its antisymmetric partner
  EXPECT_THROW(LieStructure(2, bad), std::invalid_argument);
  EXPECT_THROW(LieStructure(2, std::vector<Rational>(3)), std::invalid_argument);
  EXPECT_FALSE(perturbed(LieStructure::su2(), 0, 0, 1, 1).jacobi_verified());
}

TEST(BrstGenerator, WorkedExamples) {
  auto ab = brst_generator(LieStructure::abelian(2), {"t", "x"});
  const Model& am = ab.model;
  EXPECT_EQ(am.num_fields(), 6u);
  for (std::size_t r = 0; r < 2; ++r) {
    EXPECT_TRUE(ab.generator.characteristic(ab.ghosts[r]).is_zero());
    EXPECT_EQ(ab.generator.characteristic(ab.gauge[r][1]), jet(am, ab.ghosts[r], MultiIndex({0, 1})));
  }

  auto su = brst_generator(LieStructure::su2(), {"t"});
  const Model& m = su.model;
  auto C = [&](int r) { return jet(m, su.ghosts[static_cast<std::size_t>(r)]); };
  auto A = [&](int r) { return jet(m, su.gauge[static_cast<std::size_t>(r)][0]); };
  EXPECT_EQ(su.generator.characteristic(su.ghosts[0]), -(C(1) * C(2)));
  EXPECT_EQ(su.generator.characteristic(su.ghosts[1]), -(C(2) * C(0)));
  EXPECT_EQ(su.generator.characteristic(su.gauge[0][0]),
            jet(m, su.ghosts[0], MultiIndex({1})) + A(1) * C(2) - A(2) * C(1));
  EXPECT_EQ(m.field(su.ghosts[0]).name, "C1");
  EXPECT_EQ(m.field(su.gauge[2][0]).name, "A3_t");
  EXPECT_EQ(m.field(su.ghosts[0]).charge, 1);
  EXPECT_EQ(su.generator.parity(), Parity::odd);
  EXPECT_TRUE(su.generator.is_vertical());

  EXPECT_THROW(brst_generator(LieStructure::abelian(0), {"t"}), std::invalid_argument);
}

TEST(BrstGenerator, IsContactPreserving) {
  for (const auto& g : {LieStructure::su2(), LieStructure::abelian(2)}) {
    auto sys = brst_generator(g, {"t", "x"});
    EXPECT_TRUE(is_contact_preserving(sys.model, sys.generator).preserving);
  }
}

TEST(Nilpotency, WorkedExamples) {
  auto su = brst_generator(LieStructure::su2(), {"t"});
  auto rep = nilpotency_check(su.model, su.generator);
  EXPECT_TRUE(rep.nilpotent);
  EXPECT_EQ(rep.criterion, "sufficient condition");
  EXPECT_EQ(rep.probes, 16);

  // odd fields shifted by functions of the base
  Model g({"t"});
  const FieldId c = g.add_field("c", Parity::odd, 1);
  const FieldId e = g.add_field("e", Parity::odd, 1);
  auto shift = nilpotency_check(g, Derivation::vertical(g, {GradedForm(1), coord(0) * coord(0)}));
  EXPECT_TRUE(shift.nilpotent);

  Model ev({"t"});
  const FieldId y = ev.add_field("y", Parity::even);
  auto even = nilpotency_check(ev, Derivation::vertical(ev, {GradedForm(1)}));
  EXPECT_FALSE(even.nilpotent);
  EXPECT_EQ(even.criterion, "parity");

  // odd v with v^y = c, v^c = y: L_v(v^y) = y != 0
  Model mixed({"t"});
  const FieldId my = mixed.add_field("y", Parity::even);
  const FieldId mc = mixed.add_field("c", Parity::odd);
  auto swap = nilpotency_check(mixed, Derivation::vertical(mixed, {jet(mixed, mc), jet(mixed, my)}));
  EXPECT_FALSE(swap.nilpotent);
  EXPECT_EQ(swap.witness, jet(mixed, my));
  EXPECT_EQ(swap.criterion, "sufficient condition");

  EXPECT_THROW(nilpotency_check(ev, Derivation::generalized(ev, {GradedForm(1)}, {})), std::invalid_argument);
  (void)y;
  (void)c;
  (void)e;
}

TEST(Nilpotency, EveryJacobiViolatingPerturbationOfSu2Fails) {
  int violating = 0;
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t p = 0; p < 3; ++p)
      for (std::size_t q = p + 1; q < 3; ++q) {
        const LieStructure g = perturbed(LieStructure::su2(), r, p, q, 1);
        auto sys = brst_generator(g, {"t"});
        auto rep = nilpotency_check(sys.model, sys.generator);
        EXPECT_EQ(rep.nilpotent, g.jacobi_verified());
        if (!g.jacobi_verified()) {
          ++violating;
          EXPECT_FALSE(rep.witness.is_zero());
        }
      }
  EXPECT_GT(violating, 0);
}

TEST(Nilpotency, JacobiIffNilpotentRandomized) {
  std::mt19937 rng(4242);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  int lie = 0, non_lie = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto d = static_cast<std::size_t>(pick(1, 3));
    LieStructure g = LieStructure::abelian(d);
    switch (trial % 3) {
      case 0: {  // random antisymmetric constants
        std::vector<Rational> c(d * d * d);
        for (std::size_t r = 0; r < d; ++r)
          for (std::size_t p = 0; p < d; ++p)
            for (std::size_t q = p + 1; q < d; ++q) {
              const int v = pick(0, 2) ? 0 : pick(-2, 2);
              c[(r * d + p) * d + q] = v;
              c[(r * d + q) * d + p] = -v;
            }
        g = LieStructure(d, c);
        break;
      }
      case 1: {  // su(2) in a random integer basis
        std::vector<std::vector<int>> mt(3, std::vector<int>(3));
        Rational det = 0;
        while (det == 0) {
          for (auto& row : mt)
            for (int& x : row) x = pick(-2, 2);
          det = mt[0][0] * (mt[1][1] * mt[2][2] - mt[1][2] * mt[2][1]) - mt[0][1] * (mt[1][0] * mt[2][2] - mt[1][2] * mt[2][0]) +
                mt[0][2] * (mt[1][0] * mt[2][1] - mt[1][1] * mt[2][0]);
        }
        g = su2_in_basis(mt);
        break;
      }
      default: {  // Heisenberg-type [e1, e2] = k e3 plus an optional perturbation
        std::vector<Rational> c(27);
        const int k = pick(1, 3);
        c[(2 * 3 + 0) * 3 + 1] = k;
        c[(2 * 3 + 1) * 3 + 0] = -k;
        g = LieStructure(3, c);
        if (pick(0, 1)) g = perturbed(g, static_cast<std::size_t>(pick(0, 2)), 0, 2, pick(1, 2));
        break;
      }
    }
    auto sys = brst_generator(g, {"t"});
    auto rep = nilpotency_check(sys.model, sys.generator, 4);
    EXPECT_EQ(rep.nilpotent, g.jacobi_verified()) << "trial " << trial;
    (g.jacobi_verified() ? lie : non_lie)++;
  }
  EXPECT_GT(lie, 10);
  EXPECT_GT(non_lie, 5);
}

TEST(SOperator, BicomplexRelationsRandomized) {
  auto su = brst_generator(LieStructure::su2(), {"t", "x"});
  const Model& m = su.model;
  const ChargeGrading q(m);
  FormSampler s(m, 17, {.max_jet = 2, .max_degree = 2, .max_base_degree = 1, .max_terms = 2});
  for (int trial = 0; trial < 40; ++trial) {
    const GradedForm phi = s.form(0, static_cast<unsigned>(trial % 3));
    const GradedForm sphi = s_operator(m, su.generator, phi);
    EXPECT_TRUE(s_operator(m, su.generator, sphi).is_zero());
    EXPECT_TRUE((d_horizontal(m, sphi) + s_operator(m, su.generator, d_horizontal(m, phi))).is_zero());
    // charge bookkeeping on single terms
    const GradedForm mono = GradedForm::from_canonical({phi.terms().front()});
    const GradedForm smono = s_operator(m, su.generator, mono);
    if (!smono.is_zero()) EXPECT_EQ(q.of(smono), *q.of(mono) + 1);
    const GradedForm dmono = d_horizontal(m, mono);
    if (!dmono.is_zero()) EXPECT_EQ(q.of(dmono), q.of(mono));
  }
  EXPECT_EQ(s_operator(m, su.generator, jet(m, su.ghosts[0])), lie(m, su.generator, jet(m, su.ghosts[0])));
  EXPECT_THROW(s_operator(m, su.generator, theta(m, su.ghosts[0])), std::invalid_argument);
}

TEST(Truncation, BasisEnumeration) {
  Model m({"t"});
  m.add_field("c", Parity::odd, 1);
  m.add_field("y", Parity::even, 0);
  const ChargeGrading q(m);
  // charge 1, J = 1, D = 2: c, c_1 times {1, y, y_1}
  auto b = truncation_basis(m, q, {.max_jet = 1, .max_degree = 2, .max_base = 0, .charge = 1, .form_degree = 0});
  EXPECT_EQ(b.size(), 6u);
  auto b2 = truncation_basis(m, q, {.max_jet = 1, .max_degree = 2, .max_base = 1, .charge = 0, .form_degree = 1});
  // {1, y, y_1, y^2, y y_1, y_1^2} x {1, t} x dt
  EXPECT_EQ(b2.size(), 12u);
  EXPECT_TRUE(std::is_sorted(b2.begin(), b2.end()));
  EXPECT_EQ(std::adjacent_find(b2.begin(), b2.end()), b2.end());
  for (const Monomial& mono : b2) EXPECT_EQ(normalize(GradedForm::from_canonical({{mono, Rational(1)}})).terms().front().mono, mono);
}


TEST(RelativeCohomology, OddShiftMatchesBruteForceOracle) {
  for (int fields = 1; fields <= 2; ++fields) {
    Model m({"t"});
    std::vector<GradedForm> chars;
    for (int a = 0; a < fields; ++a) {
      m.add_field("c" + std::to_string(a), Parity::odd, 1);
      chars.push_back(GradedForm(a + 1));
    }
    const Derivation v = Derivation::vertical(m, chars);
    const ChargeGrading q(m);
    for (int base = 0; base <= 1; ++base) {
      const OddShiftOracle oracle{fields, {1, 2}, 1, 2, base};
      for (unsigned deg = 0; deg <= 1; ++deg)
        for (int k = 0; k <= 3; ++k) {
          auto rep = relative_cohomology(m, v, q, {.max_jet = 1, .max_degree = 2, .max_base = base, .charge = k, .form_degree = deg});
          const auto want = oracle.cohomology(k, static_cast<int>(deg));
          EXPECT_EQ(rep.step, -1);
          EXPECT_EQ(static_cast<int>(rep.cochains), want.cochains) << fields << " " << base << " " << deg << " " << k;
          EXPECT_EQ(static_cast<int>(rep.closed), want.closed) << fields << " " << base << " " << deg << " " << k;
          EXPECT_EQ(static_cast<int>(rep.exact), want.exact) << fields << " " << base << " " << deg << " " << k;
          EXPECT_EQ(rep.representatives.size(), rep.dimension);
        }
    }
  }
}

TEST(RelativeCohomology, ExactFormsHaveZeroClass) {
  auto su = brst_generator(LieStructure::su2(), {"t"});
  const Model& m = su.model;
  const ChargeGrading q(m);
  const CochainTruncation trunc{.max_jet = 1, .max_degree = 2, .max_base = 0, .charge = 1, .form_degree = 1};
  // d_H(C1) = C1_(1) dt and s(A1_t dt) both lie in the truncation
  const GradedForm dh = d_horizontal(m, jet(m, su.ghosts[0]));
  EXPECT_TRUE(relatively_exact(m, su.generator, q, {.max_jet = 2, .max_degree = 2, .max_base = 0, .charge = 1, .form_degree = 1}, dh));
  const GradedForm sx = s_operator(m, su.generator, jet(m, su.gauge[0][0]) * dx(0));
  EXPECT_TRUE(relatively_exact(m, su.generator, q, trunc, sx));
  EXPECT_FALSE(relatively_exact(m, su.generator, q, trunc, jet(m, su.ghosts[0]) * dx(0)));
  EXPECT_THROW(relatively_exact(m, su.generator, q, trunc, jet(m, su.ghosts[0])), std::invalid_argument);
}

TEST(RelativeCohomology, RefusesTruncationsThatAreNotSubcomplexes) {
  // v^y = c y^2 raises the polynomial degree by two: y_(1) dt = d_H(y) is
  // exact at D = 1, but s(y_(1) dt) = -d_H(c y^2) has no primitive in reach
  Model m({"t"});
  const FieldId y = m.add_field("y", Parity::even, 0);
  const FieldId c = m.add_field("c", Parity::odd, 1);
  const Derivation v = Derivation::vertical(m, {jet(m, c) * jet(m, y) * jet(m, y), GradedForm()});
  const ChargeGrading q(m);
  EXPECT_THROW(relative_cohomology(m, v, q, {.max_jet = 1, .max_degree = 1, .max_base = 0, .charge = 0, .form_degree = 1}), Refusal);
  EXPECT_NO_THROW(relative_cohomology(m, v, q, {.max_jet = 1, .max_degree = 1, .max_base = 0, .charge = 0, .form_degree = 0}));
}

TEST(RelativeCohomology, ChargeStepMustBeHomogeneous) {
  Model m({"t"});
  m.add_field("c", Parity::odd, 1);
  m.add_field("e", Parity::odd, 2);
  const Derivation v = Derivation::vertical(m, {GradedForm(1), GradedForm(1)});
  EXPECT_THROW(charge_step(m, ChargeGrading(m), v), std::invalid_argument);
}
