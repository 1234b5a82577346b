#include <gtest/gtest.h>

#include "jetvar/variational.hpp"
#include "support/random_forms.hpp"

using namespace jetvar;
using jetvar::testing::FormSampler;
using jetvar::testing::random_symmetry;

namespace {

struct Mechanics {
  Model m = jetvar::testing::mechanics_model();
  FieldId y = 0;
  GradedForm t = coord(0);
  GradedForm dt = dx(0);
  GradedForm yj(int k) const { return jet(m, y, MultiIndex({k})); }
  GradedForm th(int k) const { return theta(m, y, MultiIndex({k})); }
};

const Rational half(1, 2);

}  // namespace

TEST(EulerLagrange, WorkedExamples) {
  Mechanics k;
  auto el = euler_lagrange(k.m, {half * k.yj(1) * k.yj(1)});
  EXPECT_EQ(el.components[0], -k.yj(2));
  EXPECT_EQ(el.form, -k.yj(2) * k.th(0) * k.dt);

  Model w({"t", "x"});
  const FieldId u = w.add_field("u", Parity::even);
  GradedForm ut = jet(w, u, MultiIndex({1, 0})), ux = jet(w, u, MultiIndex({0, 1}));
  auto wave = euler_lagrange(w, {half * (ut * ut - ux * ux)});
  EXPECT_EQ(wave.components[u], -jet(w, u, MultiIndex({2, 0})) + jet(w, u, MultiIndex({0, 2})));

  EXPECT_TRUE(euler_lagrange(k.m, {GradedForm()}).form.is_zero());
  // base-only densities are trivial
  EXPECT_TRUE(euler_lagrange(k.m, {k.t * k.t}).form.is_zero());
}

TEST(EulerLagrange, AgreesWithInteriorEulerOfDifferential) {
  for (const Model& m : {jetvar::testing::mixed_model_1d(), jetvar::testing::mixed_model_2d()}) {
    FormSampler s(m, 31, {.max_jet = 2, .max_degree = 3});
    for (int trial = 0; trial < 100; ++trial) {
      Lagrangian l{s.scalar(Parity::even)};
      EXPECT_EQ(euler_lagrange(m, l).form, variational(m, lagrangian_form(m, l)));
    }
  }
}

TEST(Lepagean, WorkedExamples) {
  Mechanics k;
  // first order: Poincare-Cartan
  auto pc = lepagean(k.m, {half * k.yj(1) * k.yj(1)});
  EXPECT_EQ(pc.xi, k.yj(1) * k.th(0));
  // second order: xi = -y_3 theta + y_2 theta_1
  auto second = lepagean(k.m, {half * k.yj(2) * k.yj(2)});
  EXPECT_EQ(second.xi, -k.yj(3) * k.th(0) + k.yj(2) * k.th(1));
  // order-zero density has no boundary part
  EXPECT_TRUE(lepagean(k.m, {k.t * k.yj(0)}).xi.is_zero());
}

TEST(Lepagean, DecompositionOfVerticalDifferentialRandomized) {
  for (const Model& m : {jetvar::testing::mixed_model_1d(), jetvar::testing::mixed_model_2d()}) {
    FormSampler s(m, 41, {.max_jet = 3, .max_degree = 3});
    for (int trial = 0; trial < 100; ++trial) {
      Lagrangian l{s.scalar(Parity::even)};
      const GradedForm lf = lagrangian_form(m, l);
      auto lep = lepagean(m, l);
      EXPECT_EQ(d_vertical(lf), euler_lagrange(m, l).form - d_horizontal(m, lep.xi));
      for (const auto& [key, f] : lep.coefficients) EXPECT_TRUE(f.is_scalar());
      EXPECT_EQ(h_contact(lep.xi, 1), lep.xi);
      EXPECT_EQ(h_horizontal(lep.xi, m.dim() - 1), lep.xi);
    }
  }
}

TEST(FirstVariationalFormula, VanishesForRandomPairs) {
  int checked = 0;
  for (const Model& m : {jetvar::testing::mixed_model_1d(), jetvar::testing::mixed_model_2d()}) {
    FormSampler s(m, 57, {.max_jet = 2, .max_degree = 2, .max_terms = 2});
    for (int trial = 0; trial < 40; ++trial) {
      Lagrangian l{s.scalar(Parity::even)};
      const Parity p = trial % 2 ? Parity::odd : Parity::even;
      Derivation v = random_symmetry(m, s, p, true, trial % 3 != 0);
      EXPECT_TRUE(fvf_residual(m, l, v).is_zero()) << "trial " << trial;
      ++checked;
    }
  }
  EXPECT_EQ(checked, 80);
}

TEST(FirstVariationalFormula, RejectsRawFamilies) {
  Mechanics k;
  Derivation raw = Derivation::raw(k.m, {GradedForm()}, {{{k.y, MultiIndex({0})}, k.yj(0)}});
  EXPECT_THROW(fvf_residual(k.m, {k.yj(1)}, raw), std::invalid_argument);
}

TEST(Noether, WorkedExamples) {
  Mechanics k;
  Lagrangian l{half * k.yj(1) * k.yj(1)};

  auto shift = divergence_symmetry(k.m, l, Derivation::vertical(k.m, {GradedForm(1)}));
  ASSERT_TRUE(shift.is_symmetry);
  EXPECT_EQ(shift.noether.current, k.yj(1));

  auto time = divergence_symmetry(k.m, l, Derivation::generalized(k.m, {GradedForm(1)}, {-k.yj(1)}));
  ASSERT_TRUE(time.is_symmetry);
  EXPECT_EQ(time.noether.current, -half * k.yj(1) * k.yj(1));

  auto scale = divergence_symmetry(k.m, l, Derivation::vertical(k.m, {k.yj(0)}));
  EXPECT_FALSE(scale.is_symmetry);
  EXPECT_EQ(scale.witness, -2 * k.yj(2) * k.th(0) * k.dt);

  // Galilean boost t d/dy: L_v L = y_1 dt = d_H(y), so sigma = y and J = t y_1 - y
  auto boost = divergence_symmetry(k.m, l, Derivation::vertical(k.m, {k.t}));
  ASSERT_TRUE(boost.is_symmetry);
  EXPECT_EQ(boost.noether.sigma, k.yj(0));
  EXPECT_EQ(boost.noether.current, k.t * k.yj(1) - k.yj(0));

  Derivation nonprojected = Derivation::generalized(k.m, {k.yj(0)}, {});
  EXPECT_THROW(divergence_symmetry(k.m, l, nonprojected), std::invalid_argument);
}

TEST(Trivialize, WorkedExamples) {
  Mechanics k;
  EXPECT_EQ(trivialize(k.m, {k.yj(0) * k.yj(1)}), half * k.yj(0) * k.yj(0));
  EXPECT_EQ(trivialize(k.m, {k.t}), half * k.t * k.t);
  EXPECT_TRUE(trivialize(k.m, {GradedForm()}).is_zero());
  try {
    trivialize(k.m, {half * k.yj(1) * k.yj(1)});
    FAIL() << "expected a refusal";
  } catch (const Refusal& r) {
    ASSERT_EQ(r.witnesses().size(), 1u);
    EXPECT_EQ(r.witnesses()[0].second, -k.yj(2));
  }
}

TEST(Trivialize, RoundTripsOnRandomTotalDivergences) {
  for (const Model& m : {jetvar::testing::mixed_model_1d(), jetvar::testing::mixed_model_2d()}) {
    FormSampler s(m, 73, {.max_jet = 2, .max_degree = 3, .max_base_degree = 2});
    for (int trial = 0; trial < 50; ++trial) {
      GradedForm div;
      for (std::size_t l = 0; l < m.dim(); ++l) div += total_derivative(m, l, s.scalar(Parity::even));
      Lagrangian lag{div};
      GradedForm xi = trivialize(m, lag);
      EXPECT_EQ(d_horizontal(m, xi), lagrangian_form(m, lag));
      EXPECT_EQ(h_horizontal(xi, m.dim() - 1), xi);
    }
  }
}

TEST(ContactHomotopy, WorkedExamples) {
  Mechanics k;
  // d_H(y theta) = y_1 theta dt + y theta_1 dt
  GradedForm phi = d_horizontal(k.m, k.yj(0) * k.th(0));
  GradedForm psi = contact_homotopy(k.m, phi);
  EXPECT_EQ(d_horizontal(k.m, psi), phi);
  EXPECT_EQ(psi, k.yj(0) * k.th(0));

  try {
    contact_homotopy(k.m, k.th(0) * k.dt);
    FAIL() << "expected a refusal";
  } catch (const Refusal& r) {
    EXPECT_EQ(r.witnesses()[0].second, k.th(0) * k.dt);
  }
  EXPECT_THROW(contact_homotopy(k.m, k.th(0)), std::invalid_argument);
}

TEST(ContactHomotopy, InvertsHorizontalDifferentialRandomized) {
  for (const Model& m : {jetvar::testing::mixed_model_1d(), jetvar::testing::mixed_model_2d()}) {
    FormSampler s(m, 89, {.max_jet = 2, .max_degree = 2});
    for (int trial = 0; trial < 50; ++trial) {
      GradedForm phi = d_horizontal(m, s.form(1, static_cast<unsigned>(m.dim() - 1)));
      if (phi.is_zero()) continue;
      GradedForm psi = contact_homotopy(m, phi);
      EXPECT_EQ(d_horizontal(m, psi), phi);
    }
  }
}
