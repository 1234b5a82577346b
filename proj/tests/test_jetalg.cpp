#include <gtest/gtest.h>

#include <algorithm>

#include "jetvar/calculus.hpp"
#include "support/random_forms.hpp"

using namespace jetvar;
using jetvar::testing::FormSampler;

namespace {

// Independent sign oracle: bubble-sort a word of atoms, charging
// (-1)^(|u||w| + [u][w]) per adjacent swap; a nilpotent atom meeting itself
// kills the word.
std::optional<std::pair<int, std::vector<Atom>>> bubble_sort_sign(std::vector<Atom> w) {
  int sign = 1;
  for (std::size_t pass = 0; pass < w.size(); ++pass)
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      if (w[i + 1] < w[i]) {
        const unsigned e = w[i].form_degree() * w[i + 1].form_degree() + bit(w[i].parity()) * bit(w[i + 1].parity());
        if (e % 2) sign = -sign;
        std::swap(w[i], w[i + 1]);
      }
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    if (w[i] == w[i + 1] && w[i].nilpotent()) return std::nullopt;
  return std::make_pair(sign, w);
}

GradedForm from_sorted_word(int sign, const std::vector<Atom>& w) {
  Monomial m;
  for (Atom a : w) {
    if (!m.empty() && m.back().atom == a)
      ++m.back().exp;
    else
      m.push_back({a, 1});
  }
  return GradedForm::from_canonical({{m, Rational(sign)}});
}

}  // namespace

TEST(MultiIndex, OrderAndEnumeration) {
  EXPECT_EQ(MultiIndex(2).order(), 0);
  EXPECT_EQ(MultiIndex({2, 1}).order(), 3);
  EXPECT_EQ(MultiIndex({1, 0}) + MultiIndex({0, 1}), MultiIndex({1, 1}));
  EXPECT_THROW(MultiIndex({1, 0}) - MultiIndex({0, 1}), std::invalid_argument);
  auto two = MultiIndex::of_order(2, 2);
  ASSERT_EQ(two.size(), 3u);
  EXPECT_EQ(two.front(), MultiIndex({0, 2}));
  EXPECT_EQ(two.back(), MultiIndex({2, 0}));
  EXPECT_EQ(MultiIndex::up_to_order(3, 2).size(), 10u);
}

TEST(Atom, PackingRoundTrips) {
  Atom a = Atom::theta(7, Parity::odd, MultiIndex({3, 0, 2}));
  EXPECT_EQ(a.kind(), AtomKind::contact);
  EXPECT_EQ(a.index(), 7u);
  EXPECT_EQ(a.parity(), Parity::odd);
  EXPECT_EQ(a.multi_index(3), MultiIndex({3, 0, 2}));
  EXPECT_EQ(a.shifted(1).multi_index(3), MultiIndex({3, 1, 2}));
  EXPECT_EQ(a.as_jet().kind(), AtomKind::jet);
  // canonical order: scalars, then dx, then theta; multi-index lexicographic
  EXPECT_LT(Atom::coord(1), Atom::jet(0, Parity::even, MultiIndex({0})));
  EXPECT_LT(Atom::jet(5, Parity::even, MultiIndex({9})), Atom::dx(0));
  EXPECT_LT(Atom::dx(3), Atom::theta(0, Parity::even, MultiIndex({0})));
  EXPECT_LT(Atom::theta(0, Parity::even, MultiIndex({0, 1})), Atom::theta(0, Parity::even, MultiIndex({1, 0})));
  EXPECT_THROW(Atom::jet(0, Parity::even, MultiIndex({1, 2, 3, 4, 5, 6, 7})), std::invalid_argument);
  EXPECT_THROW(Atom::jet(0, Parity::even, MultiIndex({200})), std::overflow_error);
}

TEST(Wedge, WorkedExamples) {
  Model m({"t"});
  const FieldId y = m.add_field("y", Parity::even);
  const FieldId c = m.add_field("c", Parity::odd);
  const FieldId c2 = m.add_field("c2", Parity::odd);

  EXPECT_TRUE((dx(0) * dx(0)).is_zero());
  EXPECT_TRUE((jet(m, c) * jet(m, c)).is_zero());
  EXPECT_TRUE((theta(m, y) * theta(m, y)).is_zero());

  // theta^c ^ theta^c survives: the brute-force sign of the self swap is +1
  GradedForm tc2 = theta(m, c) * theta(m, c);
  EXPECT_FALSE(tc2.is_zero());
  auto oracle = bubble_sort_sign({Atom::theta(m, c, MultiIndex({0})), Atom::theta(m, c, MultiIndex({0}))});
  ASSERT_TRUE(oracle.has_value());
  EXPECT_EQ(tc2, from_sorted_word(oracle->first, oracle->second));

  // c2 c1 = - c1 c2
  EXPECT_EQ(jet(m, c2) * jet(m, c), -(jet(m, c) * jet(m, c2)));
  // theta^y ^ dt + dt ^ theta^y = 0
  EXPECT_TRUE((theta(m, y) * dx(0) + dx(0) * theta(m, y)).is_zero());
  // odd scalar past odd contact form anticommutes, past dt commutes
  EXPECT_EQ(theta(m, c) * jet(m, c2), -(jet(m, c2) * theta(m, c)));
  EXPECT_EQ(dx(0) * jet(m, c), jet(m, c) * dx(0));
}

TEST(Normalize, WorkedExamples) {
  Model m({"t"});
  const FieldId y = m.add_field("y", Parity::even);
  GradedForm yy = jet(m, y);
  EXPECT_TRUE((2 * yy - yy - yy).is_zero());
  EXPECT_TRUE(GradedForm().is_zero());
  GradedForm f = yy * theta(m, y) + Rational(1, 2) * dx(0);
  EXPECT_EQ(normalize(f), f);
  EXPECT_EQ(normalize(normalize(f)), normalize(f));
}

TEST(Normalize, MatchesBubbleSortOracleOnRandomWords) {
  Model m = jetvar::testing::mixed_model_2d();
  FormSampler s(m, 1234);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<Atom> word;
    const int len = s.uniform(1, 6);
    for (int i = 0; i < len; ++i) {
      const int kind = s.uniform(0, 3);
      const auto field = static_cast<FieldId>(s.uniform(0, 2));
      const MultiIndex mi = s.multi_index(1);
      switch (kind) {
        case 0: word.push_back(Atom::coord(static_cast<std::size_t>(s.uniform(0, 1)))); break;
        case 1: word.push_back(Atom::jet(m, field, mi)); break;
        case 2: word.push_back(Atom::dx(static_cast<std::size_t>(s.uniform(0, 1)))); break;
        default: word.push_back(Atom::theta(m, field, mi)); break;
      }
    }
    GradedForm got = normalize({{Rational(1), word}});
    auto expected = bubble_sort_sign(word);
    if (!expected) {
      EXPECT_TRUE(got.is_zero());
    } else {
      EXPECT_EQ(got, from_sorted_word(expected->first, expected->second));
    }
  }
}

TEST(BidegreeSplit, WorkedExamples) {
  Model m({"t"});
  const FieldId y = m.add_field("y", Parity::even);
  // dy = theta^y + y_(1) dt
  GradedForm dy = d_total(m, jet(m, y));
  auto parts = bidegree_split(dy);
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_EQ(parts.at({1, 0}), theta(m, y));
  EXPECT_EQ(parts.at({0, 1}), jet(m, y, MultiIndex({1})) * dx(0));
  EXPECT_TRUE(bidegree_split(GradedForm()).empty());

  Model m2({"t", "x"});
  GradedForm w = dx(0) * dx(1);
  auto p2 = bidegree_split(w);
  ASSERT_EQ(p2.size(), 1u);
  EXPECT_EQ(p2.at({0, 2}), w);
}

TEST(Properties, AssociativityGradedCommutativityAndBookkeeping) {
  Model m = jetvar::testing::mixed_model_2d();
  FormSampler s(m, 99, {.max_jet = 2, .max_degree = 2, .max_base_degree = 1, .max_terms = 3});
  for (int trial = 0; trial < 200; ++trial) {
    GradedForm a = s.any_form(), b = s.any_form(), c = s.any_form();
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(normalize(a), a);

    // graded commutativity on homogeneous single terms
    const unsigned ka = static_cast<unsigned>(s.uniform(0, 2)), ma = static_cast<unsigned>(s.uniform(0, 2));
    const unsigned kb = static_cast<unsigned>(s.uniform(0, 2)), mb = static_cast<unsigned>(s.uniform(0, 2));
    const Parity pa = s.uniform(0, 1) ? Parity::odd : Parity::even;
    const Parity pb = s.uniform(0, 1) ? Parity::odd : Parity::even;
    GradedForm u = s.form(ka, ma, pa), w = s.form(kb, mb, pb);
    if (u.is_zero() || w.is_zero()) continue;
    const unsigned e = (ka + ma) * (kb + mb) + bit(pa) * bit(pb);
    GradedForm swapped = w * u;
    EXPECT_EQ(u * w, e % 2 ? -swapped : swapped);
    GradedForm uw = u * w;
    if (!uw.is_zero()) {
      EXPECT_EQ(uw.parity(), pa + pb);
      EXPECT_EQ(uw.form_degree(), ka + ma + kb + mb);
    }
  }
}

TEST(Properties, ProjectorsCommuteAndSumToIdentity) {
  Model m = jetvar::testing::mixed_model_2d();
  FormSampler s(m, 7);
  for (int trial = 0; trial < 100; ++trial) {
    GradedForm a = s.any_form() + s.any_form() + s.any_form();
    GradedForm sum;
    for (unsigned k = 0; k <= 3; ++k) {
      EXPECT_EQ(h_contact(h_contact(a, k), k), h_contact(a, k));
      for (unsigned mm = 0; mm <= 2; ++mm) {
        EXPECT_EQ(h_contact(h_horizontal(a, mm), k), h_horizontal(h_contact(a, k), mm));
        sum += h_contact(h_horizontal(a, mm), k);
      }
    }
    EXPECT_EQ(sum, a);
    GradedForm rebuilt;
    for (const auto& [key, piece] : bidegree_split(a)) rebuilt += piece;
    EXPECT_EQ(rebuilt, a);
  }
}
