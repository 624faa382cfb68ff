#include <gtest/gtest.h>

#include <random>

#include "nafree/field.hpp"
#include "oracle.hpp"

using namespace nafree;

namespace {

Laurent L(const char* s, std::uint32_t q = 2) { return parse_laurent(s, q); }

}  // namespace

TEST(Field, ValuationBasics) {
  EXPECT_EQ(Laurent::uniformizer(2).valuation().value, 1);
  EXPECT_TRUE(Laurent::zero(2).valuation().infinite());
  EXPECT_EQ(L("u^-3 + u").valuation().value, -3);
  const Valuation v = Laurent::unknown(2, 2).valuation();
  EXPECT_TRUE(v.undecidable());
  EXPECT_EQ(v.value, 2);
}

TEST(Field, AddExamples) {
  EXPECT_TRUE((L("1 + u") + L("1 + u^2")).identical(L("u + u^2")));
  const Laurent x = L("u^-1 + 1 + u^5");
  EXPECT_TRUE((x + Laurent::zero(2)).identical(x));
  const Laurent s = L("1 + O(u^2)") + L("1 + O(u^2)");
  EXPECT_FALSE(s.has_digits());
  EXPECT_EQ(s.known_to(), 2);
  EXPECT_FALSE(s.exact());
}

TEST(Field, MulExamples) {
  EXPECT_TRUE((Laurent::uniformizer(3) * Laurent::uniformizer(3)).identical(Laurent::monomial(3, 1, 2)));
  EXPECT_TRUE((L("u") * L("1 + u")).identical(L("u + u^2")));
  EXPECT_TRUE((L("1 + O(u^2)") * L("1 + O(u^2)")).identical(L("1 + O(u^2)")));
}

TEST(Field, MulPrecisionRule) {
  const Laurent x = L("u^-1 + O(u^3)");
  const Laurent y = L("u^2 + u^3 + O(u^6)");
  // min(-1 + 6, 2 + 3)
  EXPECT_EQ((x * y).known_to(), 5);
}

TEST(Field, InvExamples) {
  const Laurent y = inv(L("1 + u"), 4);
  EXPECT_EQ(equal_mod(y, L("1 + u + u^2 + u^3"), 4), Tri::True);
  EXPECT_EQ(equal_mod(L("1 + u") * y, Laurent::one(2), 4), Tri::True);
  EXPECT_TRUE(inv(Laurent::uniformizer(5), 10).identical(Laurent::monomial(5, 1, -1)));
  EXPECT_THROW(inv(L("u^2 + O(u^3)"), 3), InsufficientPrecision);
  EXPECT_THROW(inv(Laurent::unknown(2, 2), 3), ZeroOrUnknownLeadingDigit);
  EXPECT_THROW(inv(Laurent::zero(2), 3), ZeroOrUnknownLeadingDigit);
}

TEST(Field, ClassifyExamples) {
  EXPECT_EQ(classify(L("1 + u^2"), Region::OnePlusPiM), Tri::True);
  EXPECT_EQ(classify(L("1 + u"), Region::OnePlusPiM), Tri::False);
  EXPECT_EQ(classify(L("u"), Region::PiPlusPiM), Tri::True);
  EXPECT_EQ(classify(L("u^2"), Region::PiPlusPiM), Tri::False);
  EXPECT_EQ(classify(L("1 + O(u)"), Region::OnePlusPiM), Tri::Unknown);
  EXPECT_EQ(classify(L("u^-1"), Region::Integers), Tri::False);
  EXPECT_EQ(classify(L("u + O(u^2)"), Region::MaximalIdeal), Tri::True);
}

TEST(Field, ParseExamples) {
  const Laurent x = L("u^-2 + 1 + u^3");
  EXPECT_EQ(x.lead_val(), -2);
  EXPECT_EQ(std::vector<Digit>(x.digits().begin(), x.digits().end()), (std::vector<Digit>{1, 0, 1, 0, 0, 1}));
  EXPECT_TRUE(x.exact());
  const Laurent y = L("1 + O(u^2)");
  EXPECT_EQ(y.digits().size(), 1u);
  EXPECT_EQ(y.known_to(), 2);
  EXPECT_THROW(L("2*u"), DigitOutOfRange);
  EXPECT_THROW(L("1 + + u"), ParseError);
  EXPECT_THROW(L("u^"), ParseError);
  EXPECT_TRUE(L("-u", 3).identical(Laurent::monomial(3, 2, 1)));
}

TEST(Field, PowMatchesRepeatedProduct) {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 50; ++it) {
    const Laurent x = oracle::random_laurent(rng, 3, -2, 3);
    Laurent acc = Laurent::one(3);
    for (unsigned n = 0; n < 7; ++n) {
      EXPECT_TRUE(pow(x, n).identical(acc));
      acc *= x;
    }
  }
}

class FieldRandom : public ::testing::TestWithParam<std::uint32_t> {};

TEST_P(FieldRandom, ArithmeticAgreesWithOracle) {
  const std::uint32_t q = GetParam();
  std::mt19937_64 rng(q * 1000 + 1);
  for (int it = 0; it < 2000; ++it) {
    const Laurent x = oracle::random_laurent(rng, q, -3, 4);
    const Laurent y = oracle::random_laurent(rng, q, -2, 5);
    const auto ox = oracle::from(x), oy = oracle::from(y);
    EXPECT_EQ(oracle::from(x + y), oracle::add(ox, oy, q));
    EXPECT_EQ(oracle::from(x - y), oracle::add(ox, oracle::neg(oy, q), q));
    EXPECT_EQ(oracle::from(x * y), oracle::mul(ox, oy, q));
  }
}

TEST_P(FieldRandom, UltrametricLaw) {
  const std::uint32_t q = GetParam();
  std::mt19937_64 rng(q * 1000 + 2);
  for (int it = 0; it < 10000; ++it) {
    const Laurent x = oracle::random_laurent(rng, q, -3, 3);
    const Laurent y = oracle::random_laurent(rng, q, -3, 3);
    const std::int64_t vx = x.val_lower_bound(), vy = y.val_lower_bound();
    const std::int64_t vs = (x + y).val_lower_bound();
    EXPECT_GE(vs, std::min(vx, vy));
    if (vx != vy) EXPECT_EQ(vs, std::min(vx, vy));
  }
}

TEST_P(FieldRandom, PrecisionIsSoundUnderTailPerturbation) {
  const std::uint32_t q = GetParam();
  std::mt19937_64 rng(q * 1000 + 3);
  for (int it = 0; it < 1000; ++it) {
    const Laurent x = oracle::random_laurent(rng, q, -2, 6);
    const Laurent y = oracle::random_laurent(rng, q, 0, 6);
    const std::int64_t nx = 3, ny = 4;
    const Laurent ax = x.truncated(nx), ay = y.truncated(ny);
    const Laurent x2 = x + oracle::random_laurent(rng, q, nx, nx + 4);
    const Laurent y2 = y + oracle::random_laurent(rng, q, ny, ny + 4);
    const Laurent sum = ax + ay, prod = ax * ay;
    EXPECT_EQ(equal_mod(sum, x2 + y2, sum.known_to()), Tri::True);
    EXPECT_EQ(equal_mod(prod, x2 * y2, prod.known_to()), Tri::True);
    if (ay.has_digits() && ay.lead_val() < ny) {
      const std::int64_t v = ay.lead_val();
      const Laurent inv_a = inv(ay, ny - 2 * v);
      EXPECT_EQ(equal_mod(inv_a, inv(y2, ny - 2 * v), ny - 2 * v), Tri::True);
    }
  }
}

TEST_P(FieldRandom, InverseIsTwoSided) {
  const std::uint32_t q = GetParam();
  std::mt19937_64 rng(q * 1000 + 4);
  for (int it = 0; it < 1000; ++it) {
    Laurent x = oracle::random_laurent(rng, q, -3, 5);
    if (x.is_exact_zero()) continue;
    const std::int64_t v = x.lead_val();
    // inv(x, n) is known mod u^n, so the product is 1 mod u^(n + v).
    for (std::int64_t n : {1, 5, 17}) EXPECT_EQ(equal_mod(x * inv(x, n), Laurent::one(q), n + v), Tri::True);
    if (v >= 0) EXPECT_EQ(equal_mod(inv(x, 9) * x, Laurent::one(q), 9), Tri::True);
  }
}

TEST_P(FieldRandom, ClassifyConstantOnResidueClasses) {
  const std::uint32_t q = GetParam();
  // Every element of O / u^3, with random tails beyond.
  std::mt19937_64 rng(q * 1000 + 5);
  for (std::uint32_t code = 0; code < q * q * q; ++code) {
    const std::vector<std::int64_t> c{code % q, code / q % q, code / q / q};
    const Laurent base = Laurent::from_coeffs(q, 0, c);
    const Laurent ball = base.truncated(3);
    for (Region r : {Region::Integers, Region::MaximalIdeal, Region::OnePlusPiM, Region::PiPlusPiM}) {
      const Tri t = classify(ball, r);
      ASSERT_NE(t, Tri::Unknown);
      for (int k = 0; k < 5; ++k) EXPECT_EQ(classify(base + oracle::random_laurent(rng, q, 3, 6), r), t);
    }
  }
}

TEST_P(FieldRandom, TextRoundTrip) {
  const std::uint32_t q = GetParam();
  std::mt19937_64 rng(q * 1000 + 6);
  for (int it = 0; it < 10000; ++it) {
    Laurent x = oracle::random_laurent(rng, q, -4, 4);
    if (it % 3 == 0) x = x.truncated(static_cast<std::int64_t>(rng() % 9) - 2);
    const std::string s = to_string(x);
    const Laurent y = parse_laurent(s, q);
    EXPECT_TRUE(y.identical(x)) << s;
    EXPECT_EQ(to_string(y), s);
  }
}

INSTANTIATE_TEST_SUITE_P(Primes, FieldRandom, ::testing::Values(2u, 3u, 5u, 31u));

TEST(Field, Params) {
  EXPECT_NO_THROW((FieldParams{2, 32}.validate()));
  EXPECT_THROW((FieldParams{4, 32}.validate()), InvalidArgument);
  EXPECT_THROW((FieldParams{257, 32}.validate()), InvalidArgument);
  EXPECT_THROW((FieldParams{3, 4}.validate()), InvalidArgument);
}
