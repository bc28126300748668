#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "core/entropy.hpp"
#include "core/errors.hpp"
#include "support/fixtures.hpp"

using namespace entroflow;

namespace {

std::vector<RandomVariable> bits(std::initializer_list<const char*> names) {
  std::vector<RandomVariable> out;
  for (const char* n : names) out.push_back({n, 2});
  return out;
}

JointDistribution independent_bits() {
  return JointDistribution::uniform(bits({"X1", "X2"}), {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
}

JointDistribution duplicated_bit() { return JointDistribution::uniform(bits({"X1", "X2"}), {{0, 0}, {1, 1}}); }

JointDistribution xor_triple() {
  return JointDistribution::uniform(bits({"X1", "X2", "X3"}), {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
}

JointDistribution one_time_pad() {
  return JointDistribution::uniform(bits({"M", "K", "C"}), {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
}

EntropyVector vec2(double a, double b, double ab) {
  EntropyVector h(GroundSet::numbered(2));
  h.set(h.ground().subset({"1"}), a);
  h.set(h.ground().subset({"2"}), b);
  h.set(h.ground().full(), ab);
  return h;
}

// Entropy of a marginal computed straight from the pmf, for cross-checking.
double oracle_entropy(const JointDistribution& d, const std::vector<int>& idx) {
  std::map<Outcome, double> m;
  for (const auto& [o, p] : d.pmf()) {
    Outcome key;
    for (int i : idx) key.push_back(o[i]);
    m[key] += p.get_d();
  }
  double h = 0;
  for (const auto& [k, p] : m) h -= p * std::log2(p);
  return h;
}

JointDistribution random_distribution(std::mt19937_64& rng, int n_max = 4, int alphabet_max = 4) {
  std::uniform_int_distribution<int> nd(1, n_max), ad(1, alphabet_max);
  int n = nd(rng);
  std::vector<RandomVariable> vars;
  std::size_t space = 1;
  for (int i = 0; i < n; ++i) {
    vars.push_back({"X" + std::to_string(i + 1), ad(rng)});
    space *= static_cast<std::size_t>(vars.back().alphabet);
  }
  // pick a few support points with random weights
  std::uniform_int_distribution<std::size_t> pick(0, space - 1);
  std::uniform_int_distribution<int> points(1, 8);
  int k = points(rng);
  auto masses = fixtures::random_pmf(rng, k, 5);
  std::vector<std::pair<Outcome, Rational>> pmf;
  for (int j = 0; j < k; ++j) {
    std::size_t code = pick(rng);
    Outcome o(n);
    for (int i = n - 1; i >= 0; --i) {
      o[i] = static_cast<int>(code % vars[i].alphabet);
      code /= vars[i].alphabet;
    }
    pmf.emplace_back(o, masses[j]);
  }
  return JointDistribution(vars, pmf);
}

}  // namespace

TEST(EntropyVectorOf, IndependentBits) {
  auto h = entropy_vector_of(independent_bits()).entropy;
  EXPECT_NEAR(h.at({"X1"}), 1.0, 1e-12);
  EXPECT_NEAR(h.at({"X2"}), 1.0, 1e-12);
  EXPECT_NEAR(h.at({"X1", "X2"}), 2.0, 1e-12);
}

TEST(EntropyVectorOf, DuplicatedBit) {
  auto h = entropy_vector_of(duplicated_bit()).entropy;
  EXPECT_NEAR(h.at({"X1"}), 1.0, 1e-12);
  EXPECT_NEAR(h.at({"X2"}), 1.0, 1e-12);
  EXPECT_NEAR(h.at({"X1", "X2"}), 1.0, 1e-12);
}

TEST(EntropyVectorOf, XorTriple) {
  auto prof = entropy_vector_of(xor_triple());
  const auto& g = prof.entropy.ground();
  for (std::uint32_t m = 1; m < g.subset_count(); ++m) {
    double expected = __builtin_popcount(m) == 1 ? 1.0 : 2.0;
    EXPECT_NEAR(prof.entropy[SubsetIndex(m)], expected, 1e-12) << g.format(SubsetIndex(m));
  }
  EXPECT_EQ(prof.support.at({"X1", "X2", "X3"}), 4u);
  EXPECT_EQ(prof.support.at({"X3"}), 2u);
}

TEST(EntropyVectorOf, SubsetOfVariablesAndSidecar) {
  std::vector<std::string> vars{"C", "M"};
  auto prof = entropy_vector_of(one_time_pad(), vars);
  EXPECT_EQ(prof.entropy.ground().labels(), vars);
  EXPECT_NEAR(prof.entropy.at({"C", "M"}), 2.0, 1e-12);
  EXPECT_GT(prof.error_bound, 0.0);
  EXPECT_LT(prof.error_bound, 1e-12);
}

TEST(EntropyVectorOf, MatchesDirectSummation) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    auto d = random_distribution(rng);
    auto prof = entropy_vector_of(d);
    const auto& g = prof.entropy.ground();
    for (std::uint32_t m = 1; m < g.subset_count(); ++m) {
      std::vector<int> idx;
      for (int i = 0; i < g.size(); ++i)
        if ((m >> i) & 1U) idx.push_back(i);
      EXPECT_NEAR(prof.entropy[SubsetIndex(m)], oracle_entropy(d, idx), 1e-12);
    }
  }
}

TEST(Polymatroid, Examples) {
  EXPECT_TRUE(is_polymatroid(vec2(1, 1, 2), 1e-9).ok);

  auto sub = is_polymatroid(vec2(1, 1, 3), 1e-9);
  EXPECT_FALSE(sub.ok);
  ASSERT_FALSE(sub.violations.empty());
  EXPECT_NE(sub.violations[0].find("subadditivity"), std::string::npos) << sub.violations[0];

  auto mono = is_polymatroid(vec2(1, 2, 1), 1e-9);
  EXPECT_FALSE(mono.ok);
  bool found = false;
  for (const auto& v : mono.violations)
    if (v.find("monotonicity h({1,2}) >= h({2})") != std::string::npos) found = true;
  EXPECT_TRUE(found);
}

TEST(Polymatroid, ToleranceIsRespected) {
  EXPECT_TRUE(is_polymatroid(vec2(1, 1, 2 + 1e-10), 1e-9).ok);
  EXPECT_FALSE(is_polymatroid(vec2(1, 1, 2 + 1e-6), 1e-9).ok);
}

TEST(Elemental, Counts) {
  EXPECT_EQ(elemental_inequalities(1).size(), 1u);
  EXPECT_EQ(elemental_inequalities(2).size(), 3u);
  EXPECT_EQ(elemental_inequalities(3).size(), 9u);
  for (int n = 1; n <= 8; ++n) {
    std::size_t expected = n + (n * (n - 1) / 2) * (n >= 2 ? (1u << (n - 2)) : 0u);
    EXPECT_EQ(elemental_inequalities(n).size(), expected) << n;
  }
}

TEST(Elemental, RefusesAboveLimit) {
  EXPECT_THROW(elemental_inequalities(19), CapacityError);
  EXPECT_THROW(elemental_inequalities(6, 5), CapacityError);
}

TEST(Elemental, N2Shape) {
  // H(1|2) >= 0, H(2|1) >= 0, I(1;2) >= 0
  auto ineq = elemental_inequalities(2);
  auto h = vec2(1, 1, 2);
  for (const auto& f : ineq) EXPECT_TRUE(f.satisfied_by(h, 0));
  EXPECT_DOUBLE_EQ(ineq[0].evaluate(h) + ineq[1].evaluate(h) + ineq[2].evaluate(h), 2.0);
}

TEST(Elemental, AgreesWithPolymatroidAxiomsOnRandomPoints) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> val(0, 4);
  int agree_true = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 1 + trial % 4;
    RationalVector r(GroundSet::numbered(n));
    // mix raw random points with random polymatroids (sums of rank functions)
    if (trial % 2 == 0) {
      for (std::uint32_t m = 1; m < r.ground().subset_count(); ++m) r.set(SubsetIndex(m), Rational(val(rng), 2));
    } else {
      for (int term = 0; term < 3; ++term) {
        std::uint32_t a = static_cast<std::uint32_t>(rng() % r.ground().subset_count());
        Rational w(val(rng), 3);
        for (std::uint32_t m = 1; m < r.ground().subset_count(); ++m)
          if (m & a) r.set(SubsetIndex(m), r[SubsetIndex(m)] + w);
      }
    }
    auto h = to_double(r);
    bool elemental_ok = true;
    for (const auto& f : elemental_inequalities(n)) {
      Rational v = f.evaluate(r);
      if (sgn(v) < 0) elemental_ok = false;
    }
    bool poly_ok = is_polymatroid(h, 1e-12).ok;
    EXPECT_EQ(elemental_ok, poly_ok) << "trial " << trial;
    agree_true += poly_ok;
  }
  EXPECT_GT(agree_true, 100);
}

TEST(FunctionalDependency, Examples) {
  std::vector<std::string> x1{"X1"}, x2{"X2"};
  EXPECT_TRUE(check_functional_dependency(duplicated_bit(), x2, x1));
  EXPECT_FALSE(check_functional_dependency(independent_bits(), x2, x1));
  std::vector<std::string> m{"M"}, kc{"K", "C"}, c{"C"};
  EXPECT_TRUE(check_functional_dependency(one_time_pad(), m, kc));
  EXPECT_FALSE(check_functional_dependency(one_time_pad(), m, c));
}

TEST(FunctionalDependency, AgreesWithConditionalEntropy) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    auto d = random_distribution(rng, 3, 3);
    if (d.variable_count() < 2) continue;
    std::vector<std::string> t{d.variables()[1].name}, g{d.variables()[0].name};
    auto h = entropy_vector_of(d).entropy;
    double cond = h[h.ground().subset({d.variables()[0].name, d.variables()[1].name})] -
                  h[h.ground().subset({d.variables()[0].name})];
    EXPECT_EQ(check_functional_dependency(d, t, g), std::abs(cond) < 1e-9) << trial;
  }
}

TEST(Independence, Examples) {
  std::vector<std::string> x1{"X1"}, x2{"X2"};
  EXPECT_TRUE(check_independence(independent_bits(), x1, x2));
  EXPECT_FALSE(check_independence(duplicated_bit(), x1, x2));
  std::vector<std::string> m{"M"}, c{"C"};
  EXPECT_TRUE(check_independence(one_time_pad(), m, c));
}

TEST(Independence, RejectsBadGroups) {
  std::vector<std::string> x1{"X1"}, none;
  EXPECT_THROW(check_independence(independent_bits(), x1, none), std::invalid_argument);
  EXPECT_THROW(check_independence(independent_bits(), x1, x1), std::invalid_argument);
}

TEST(Independence, SymmetricAndMatchesMutualInformation) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    auto d = random_distribution(rng, 3, 3);
    if (d.variable_count() < 2) continue;
    std::vector<std::string> a{d.variables()[0].name}, b{d.variables()[1].name};
    bool ab = check_independence(d, a, b);
    EXPECT_EQ(ab, check_independence(d, b, a));
    auto h = entropy_vector_of(d).entropy;
    const auto& g = h.ground();
    double mi = h[g.subset(a)] + h[g.subset(b)] - h[g.subset(a) | g.subset(b)];
    if (ab) EXPECT_NEAR(mi, 0.0, 1e-9);
    if (mi > 1e-9) EXPECT_FALSE(ab);
  }
}

TEST(QuasiUniform, Examples) {
  EXPECT_TRUE(is_quasi_uniform(duplicated_bit()));
  JointDistribution skew(bits({"X1", "X2"}),
                         {{{0, 0}, Rational(1, 2)}, {{0, 1}, Rational(1, 4)}, {{1, 1}, Rational(1, 4)}});
  EXPECT_FALSE(is_quasi_uniform(skew));
  EXPECT_TRUE(is_quasi_uniform(xor_triple()));
}

TEST(QuasiUniform, VectorOf) {
  auto h = quasi_uniform_vector_of(duplicated_bit());
  EXPECT_DOUBLE_EQ(h.at({"X1", "X2"}), 1.0);
  auto h2 = quasi_uniform_vector_of(independent_bits());
  EXPECT_DOUBLE_EQ(h2.at({"X1", "X2"}), 2.0);
  auto h3 = quasi_uniform_vector_of(xor_triple());
  const auto& g = h3.ground();
  for (std::uint32_t m = 1; m < g.subset_count(); ++m)
    EXPECT_DOUBLE_EQ(h3[SubsetIndex(m)], __builtin_popcount(m) == 1 ? 1.0 : 2.0);
  JointDistribution skew(bits({"X1", "X2"}),
                         {{{0, 0}, Rational(1, 2)}, {{0, 1}, Rational(1, 4)}, {{1, 1}, Rational(1, 4)}});
  EXPECT_THROW(quasi_uniform_vector_of(skew), PreconditionError);
}

TEST(QuasiUniform, AgreesWithEntropyForRandomUniformSupports) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    auto d = random_distribution(rng, 3, 3);
    std::vector<Outcome> support;
    for (const auto& [o, p] : d.pmf()) support.push_back(o);
    auto u = JointDistribution::uniform(d.variables(), support);
    if (!is_quasi_uniform(u)) continue;
    auto a = quasi_uniform_vector_of(u);
    auto b = entropy_vector_of(u).entropy;
    for (std::uint32_t m = 1; m < a.ground().subset_count(); ++m)
      EXPECT_NEAR(a[SubsetIndex(m)], b[SubsetIndex(m)], 1e-9);
  }
}

TEST(Distribution, Validation) {
  EXPECT_THROW(JointDistribution(bits({"X"}), {{{0}, Rational(1, 2)}}), std::invalid_argument);
  EXPECT_THROW(JointDistribution(bits({"X"}), {{{2}, Rational(1)}}), std::invalid_argument);
  EXPECT_THROW(JointDistribution(bits({"X"}), {{{0}, Rational(3, 2)}, {{1}, Rational(-1, 2)}}),
               std::invalid_argument);
  EXPECT_THROW(JointDistribution({{"X", 0}}, {}), std::invalid_argument);
  JointDistribution merged(bits({"X"}), {{{0}, Rational(1, 4)}, {{0}, Rational(1, 4)}, {{1}, Rational(1, 2)},
                                          {{1}, Rational(0)}});
  EXPECT_EQ(merged.support_size(), 2u);
  EXPECT_EQ(merged.probability({0}), Rational(1, 2));
}

TEST(ShannonSoundness, RandomDistributionsArePolymatroids) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    auto d = random_distribution(rng);
    auto h = entropy_vector_of(d).entropy;
    auto report = is_polymatroid(h, 1e-9);
    EXPECT_TRUE(report.ok) << (report.violations.empty() ? "" : report.violations[0]);
    for (const auto& f : elemental_inequalities(h.size())) EXPECT_GE(f.evaluate(h), -1e-9);
  }
}

TEST(ZhangYeung, Examples) {
  std::vector<RandomVariable> vars = bits({"A", "B", "C", "D"});
  std::vector<Outcome> all;
  for (int m = 0; m < 16; ++m) all.push_back({m >> 3 & 1, m >> 2 & 1, m >> 1 & 1, m & 1});
  EXPECT_TRUE(zhang_yeung_check(entropy_vector_of(JointDistribution::uniform(vars, all)).entropy, 1e-9));
  EXPECT_TRUE(zhang_yeung_check(EntropyVector(GroundSet::numbered(4)), 1e-9));
  EXPECT_THROW(zhang_yeung_check(EntropyVector(GroundSet::numbered(3)), 1e-9), std::invalid_argument);
}

TEST(ZhangYeung, HoldsOnRandomDistributions) {
  std::mt19937_64 rng(17);
  int checked = 0;
  while (checked < 500) {
    auto d = random_distribution(rng, 4, 3);
    if (d.variable_count() != 4) continue;
    EXPECT_TRUE(zhang_yeung_check(entropy_vector_of(d).entropy, 1e-9));
    ++checked;
  }
}

TEST(ZhangYeung, DetectsAKnownPolymatroidViolation) {
  // The Vamos-style point: a polymatroid that breaks Zhang-Yeung.
  RationalVector r(GroundSet::numbered(4));
  const auto& g = r.ground();
  for (std::uint32_t m = 1; m < 16; ++m) {
    int k = __builtin_popcount(m);
    Rational v = k == 1 ? 2 : (k == 2 ? 3 : 4);
    r.set(SubsetIndex(m), v);
  }
  r.set(g.subset({"1", "2"}), 4);  // A,B pair at full rank
  auto h = to_double(r);
  ASSERT_TRUE(is_polymatroid(h, 1e-12).ok);
  EXPECT_FALSE(zhang_yeung_check(h, 1e-9));
}

TEST(EntropicSearch, Examples) {
  auto r1 = entropic_search(vec2(1, 1, 2));
  ASSERT_EQ(r1.status, SearchStatus::kFound);
  ASSERT_TRUE(r1.witness);
  EXPECT_TRUE(check_independence(*r1.witness, std::vector<std::string>{"1"}, std::vector<std::string>{"2"}));

  auto r2 = entropic_search(vec2(1, 1, 3));
  EXPECT_EQ(r2.status, SearchStatus::kNotPolymatroid);
  EXPECT_FALSE(r2.witness);

  auto r3 = entropic_search(vec2(1, 1, 1));
  ASSERT_EQ(r3.status, SearchStatus::kFound);
  EXPECT_TRUE(check_functional_dependency(*r3.witness, std::vector<std::string>{"2"}, std::vector<std::string>{"1"}));
}

TEST(EntropicSearch, WitnessesMatchTarget) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    auto d = random_distribution(rng, 3, 2);
    auto h = entropy_vector_of(d).entropy;
    if (h.size() > 3) continue;
    auto r = entropic_search(h, {2, 1e-9, 200000, 6, 3});
    if (r.status != SearchStatus::kFound) continue;
    auto w = entropy_vector_of(*r.witness).entropy;
    for (std::uint32_t m = 1; m < h.ground().subset_count(); ++m)
      EXPECT_NEAR(w[SubsetIndex(m)], h[SubsetIndex(m)], 1e-9);
  }
}

TEST(EntropicSearch, XorTripleAndLimits) {
  auto h = quasi_uniform_vector_of(xor_triple());
  auto r = entropic_search(h);
  ASSERT_EQ(r.status, SearchStatus::kFound);
  EXPECT_TRUE(is_quasi_uniform(*r.witness));

  // h(i) = 2 bits cannot be met with binary alphabets
  EntropyVector big = vec2(2, 2, 4);
  EXPECT_EQ(entropic_search(big).status, SearchStatus::kExhausted);
  EXPECT_THROW(entropic_search(EntropyVector(GroundSet::numbered(4))), PreconditionError);
}

TEST(EntropicSearch, BudgetIsReportedDistinctly) {
  EntropyVector h = vec2(0.5, 0.5, 0.9);
  auto r = entropic_search(h, {4, 1e-9, 10, 6, 3});
  EXPECT_EQ(r.status, SearchStatus::kBudgetExceeded);
}
