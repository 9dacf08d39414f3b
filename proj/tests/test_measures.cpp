#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "generators.hpp"
#include "oracles.hpp"
#include "lqdim/histogram.hpp"
#include "lqdim/measure.hpp"
#include "lqdim/spectrum.hpp"

using namespace lqdim;

namespace {

Rational R(long a, long b = 1) { return make_rational(a, b); }

DiscreteMeasure two_point() { return DiscreteMeasure::from_atoms({{Scalar(0), R(1, 2)}, {Scalar(1), R(1, 2)}}); }

/// The measure placing each bin's mass at the bin's left endpoint.
DiscreteMeasure as_grid_measure(const DyadicHistogram& h) {
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < h.size(); ++i)
        atoms.push_back({scale_pow2(Scalar(static_cast<long>(h.bins[i])), -h.level), (*h.exact_mass)[i]});
    return DiscreteMeasure::from_atoms(std::move(atoms));
}

Rational bin_power_sum(const DyadicHistogram& h, unsigned q) { return exact_power_sum(*h.exact_mass, q); }

/// Masses of intervals [k w, (k+1) w) + offset, exact.
std::map<BigInt, Rational> interval_masses(const DiscreteMeasure& mu, const Rational& width, const Rational& offset) {
    std::map<BigInt, Rational> out;
    for (const auto& a : mu.atoms()) {
        Rational y = (a.position.as_rational() - offset) / width;
        BigInt k;
        mpz_fdiv_q(k.get_mpz_t(), y.get_num_mpz_t(), y.get_den_mpz_t());
        out[k] += a.mass;
    }
    return out;
}

Rational power_sum(const std::map<BigInt, Rational>& m, unsigned q) {
    std::vector<Rational> v;
    for (const auto& [k, x] : m) v.push_back(x);
    return exact_power_sum(v, q);
}

} // namespace

TEST(Measures, TwoPointSelfConvolution) {
    DiscreteMeasure c = convolve(two_point(), two_point());
    ASSERT_EQ(c.size(), 3u);
    EXPECT_EQ(c.atoms()[0].position, Scalar(0));
    EXPECT_EQ(c.atoms()[0].mass, R(1, 4));
    EXPECT_EQ(c.atoms()[1].position, Scalar(1));
    EXPECT_EQ(c.atoms()[1].mass, R(1, 2));
    EXPECT_EQ(c.atoms()[2].mass, R(1, 4));
}

TEST(Measures, DiracConvolutionTranslates) {
    gen::Rng rng(31);
    DiscreteMeasure mu = rng.measure(6);
    Scalar c(R(5, 7));
    DiscreteMeasure a = convolve(DiscreteMeasure::dirac(c), mu);
    DiscreteMeasure b = translate(mu, c);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a.atoms()[i].position, b.atoms()[i].position);
        EXPECT_EQ(a.atoms()[i].mass, b.atoms()[i].mass);
    }
    EXPECT_EQ(exact_q_sum(a, 2), exact_q_sum(mu, 2));
}

TEST(Measures, GoldenLevelThree) {
    DiscreteMeasure mu = level_n_measure(preset("golden"), 3);
    ASSERT_EQ(mu.size(), 7u);
    std::size_t eighths = 0, quarters = 0;
    for (const auto& a : mu.atoms()) {
        if (a.mass == R(1, 8)) ++eighths;
        if (a.mass == R(1, 4)) {
            ++quarters;
            EXPECT_EQ(a.position, Scalar(1));
        }
    }
    EXPECT_EQ(eighths, 6u);
    EXPECT_EQ(quarters, 1u);
    EXPECT_EQ(exact_q_sum(mu, 2), R(5, 32));
    EXPECT_DOUBLE_EQ(entropy(mu), 2.75);

    auto brute = oracle::golden_atoms(3);
    EXPECT_EQ(brute.size(), 7u);
    EXPECT_EQ(oracle::sum_of_squares(brute), R(5, 32));
    EXPECT_DOUBLE_EQ(oracle::entropy_bits(brute), 2.75);
}

TEST(Measures, GoldenAgreesWithWordEnumeration) {
    for (int n = 1; n <= 10; ++n) {
        DiscreteMeasure mu = level_n_measure(preset("golden"), n);
        auto brute = oracle::golden_atoms(n);
        ASSERT_EQ(mu.size(), brute.size()) << n;
        ASSERT_EQ(exact_q_sum(mu, 2), oracle::sum_of_squares(brute)) << n;
        // the oracle keys Q(√5) lexicographically, so order its atoms by value first
        std::vector<std::pair<double, Rational>> sorted;
        for (const auto& [x, p] : brute) sorted.emplace_back(x.value(), p);
        std::sort(sorted.begin(), sorted.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
        auto it = sorted.begin();
        for (const auto& a : mu.atoms()) {
            ASSERT_NEAR(a.position.approx(), it->first, 1e-12);
            ASSERT_EQ(a.mass, it->second);
            ++it;
        }
    }
}

TEST(Measures, ScaleExamples) {
    DiscreteMeasure mu = two_point();
    DiscreteMeasure same = scale(mu, Scalar(1));
    EXPECT_EQ(same.atoms()[1].position, Scalar(1));
    DiscreteMeasure third = scale(mu, Scalar(R(1, 3)));
    EXPECT_EQ(third.atoms()[1].position, Scalar(R(1, 3)));
    EXPECT_EQ(third.atoms()[1].mass, R(1, 2));
    try {
        scale(mu, Scalar(0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::domain);
    }
}

TEST(Measures, LevelNExamples) {
    DiscreteMeasure b = level_n_measure(bernoulli(Scalar(R(1, 2))), 3);
    ASSERT_EQ(b.size(), 8u);
    for (std::size_t k = 0; k < 8; ++k) {
        EXPECT_EQ(b.atoms()[k].position, Scalar(R(static_cast<long>(k), 4)));
        EXPECT_EQ(b.atoms()[k].mass, R(1, 8));
    }
    Wifs w = preset("cantor");
    DiscreteMeasure one = level_n_measure(w, 1);
    DiscreteMeasure delta = DiscreteMeasure::delta_of(w);
    ASSERT_EQ(one.size(), delta.size());
    for (std::size_t i = 0; i < one.size(); ++i) EXPECT_EQ(one.atoms()[i].position, delta.atoms()[i].position);
}

TEST(Measures, AtomCapRaisesResource) {
    try {
        level_n_measure(preset("cantor"), 12, 1000);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::resource);
        EXPECT_NE(std::string(e.what()).find("histogram"), std::string::npos);
    }
}

TEST(Measures, NormExamples) {
    EXPECT_EQ(exact_q_sum(two_point(), 2), R(1, 2));
    EXPECT_NEAR(q_norm(two_point(), 2), std::sqrt(0.5), 1e-15);
    EXPECT_EQ(q_norm(level_n_measure(preset("golden"), 3), INFINITY), 0.25);
    EXPECT_THROW(log2_q_sum(two_point(), 1.0), Error);
}

TEST(Measures, FloatAtomsCollapseByBits) {
    DiscreteMeasure m = DiscreteMeasure::from_atoms(
        {{Scalar::floating(0.1), R(1, 2)}, {Scalar::floating(0.1), R(1, 4)}, {Scalar::floating(0.3), R(1, 4)}});
    EXPECT_TRUE(m.approximate());
    EXPECT_EQ(m.size(), 2u);
    EXPECT_EQ(m.atoms()[0].mass, R(3, 4));
}

TEST(Measures, BinningExamples) {
    DyadicHistogram h = dyadic_bin(DiscreteMeasure::dirac(Scalar(R(1, 2))), 1);
    ASSERT_EQ(h.size(), 1u);
    EXPECT_EQ(h.bins[0], 1);

    for (int m : {1, 5, 12}) {
        DyadicHistogram u = uniform_histogram(m, std::int64_t(1) << m);
        MomentSum s = moment_sums(u, 2);
        ASSERT_TRUE(s.exact);
        EXPECT_EQ(*s.exact, Rational(1, 1) / Rational(BigInt(1) << m));
    }

    DyadicHistogram c = dyadic_bin(level_n_measure(preset("cantor"), 10), 15);
    Rational total(0);
    for (const auto& x : *c.exact_mass) total += x;
    EXPECT_EQ(total, 1);
}

TEST(Measures, HistogramCsv) {
    std::ostringstream os;
    write_histogram_csv(os, dyadic_bin(two_point(), 2));
    EXPECT_EQ(os.str(), "j,bin_left,mass\n0,0,0.5\n4,1,0.5\n");
}

TEST(Measures, BoundaryAmbiguousFloats) {
    DiscreteMeasure m = DiscreteMeasure::from_atoms({{Scalar::floating(0.5), R(1, 2)}, {Scalar::floating(0.3), R(1, 2)}});
    DyadicHistogram h = dyadic_bin(m, 3);
    EXPECT_EQ(h.boundary_ambiguous, 1u);
    EXPECT_TRUE(h.approximate);
}

TEST(Measures, RestrictExamples) {
    DiscreteMeasure c = convolve(two_point(), two_point());
    DiscreteMeasure r = restrict_normalize(c, Scalar(1), Scalar(3));
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r.atoms()[0].mass, R(2, 3));
    EXPECT_EQ(r.atoms()[1].mass, R(1, 3));
    DiscreteMeasure all = restrict_normalize(c, Scalar(-1), Scalar(5));
    EXPECT_EQ(exact_q_sum(all, 2), exact_q_sum(c, 2));
    try {
        restrict_normalize(c, Scalar(R(1, 3)), Scalar(R(2, 3)));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::empty_restriction);
    }
}

TEST(Measures, CantorRestrictionIsScaledCopy) {
    Wifs w = preset("cantor");
    DiscreteMeasure left = restrict_normalize(level_n_measure(w, 5), Scalar(0), Scalar(R(1, 3)));
    DiscreteMeasure copy = scale(level_n_measure(w, 4), Scalar(R(1, 3)));
    ASSERT_EQ(left.size(), copy.size());
    for (std::size_t i = 0; i < left.size(); ++i) {
        EXPECT_EQ(left.atoms()[i].position, copy.atoms()[i].position);
        EXPECT_EQ(left.atoms()[i].mass, copy.atoms()[i].mass);
    }
}

TEST(Measures, InvariantHistogramBernoulliHalfIsFlat) {
    Wifs w = normalize_to_unit(bernoulli(Scalar(R(1, 2)))).wifs; // attractor [0, 1/2]
    InvariantHistogramResult r = invariant_histogram(w, 10);
    const auto& h = r.histogram;
    ASSERT_EQ(h.size(), 512u);
    for (double x : h.mass) ASSERT_NEAR(x, 1.0 / 512, 1e-9);
    EXPECT_NEAR(static_cast<double>(h.total()), 1.0, 1e-12);
}

TEST(Measures, InvariantHistogramAvoidsCantorGaps) {
    InvariantHistogramResult r = invariant_histogram(preset("cantor"), 12);
    // level-8 Cantor intervals have length 3^-8 < 2^-12, so bins missing all of them lie in gaps
    auto pts = oracle::cantor_level(3, {0, 2}, 8);
    std::vector<bool> touches(4096, false);
    for (double x : pts) {
        int a = static_cast<int>(std::floor(std::ldexp(x, 12)));
        int b = static_cast<int>(std::floor(std::ldexp(x + std::pow(3.0, -8), 12)));
        for (int j = a; j <= std::min(b, 4095); ++j) touches[static_cast<std::size_t>(j)] = true;
    }
    std::size_t checked = 0;
    for (std::size_t i = 0; i < r.histogram.size(); ++i)
        if (!touches[static_cast<std::size_t>(r.histogram.bins[i])]) {
            ++checked;
            ASSERT_LE(r.histogram.mass[i], 1e-10) << "bin " << r.histogram.bins[i];
        }
    SUCCEED() << checked << " gap bins carried mass";
}

TEST(Measures, InvariantHistogramRejectsNonUnitAttractor) {
    EXPECT_THROW(invariant_histogram(bernoulli(Scalar(R(1, 2))), 8), Error);
}

// Properties

TEST(MeasureProperties, MassConservation) {
    gen::Rng rng(32);
    for (int i = 0; i < 100; ++i) {
        DiscreteMeasure a = rng.measure(5), b = rng.measure(7);
        ASSERT_EQ(convolve(a, b).total_mass(), 1);
        ASSERT_EQ(scale(a, Scalar(rng.rational(5, 5) + 6)).total_mass(), 1);
        ASSERT_EQ(translate(a, Scalar(rng.rational())).total_mass(), 1);
        DyadicHistogram h = dyadic_bin(convolve(a, b), static_cast<int>(rng.integer(0, 12)));
        Rational t(0);
        for (const auto& x : *h.exact_mass) t += x;
        ASSERT_EQ(t, 1);
    }
}

TEST(MeasureProperties, ScaleKeepsNorms) {
    gen::Rng rng(33);
    for (int i = 0; i < 100; ++i) {
        DiscreteMeasure a = rng.measure(8);
        Rational c = rng.rational();
        if (c == 0) continue;
        ASSERT_EQ(exact_q_sum(scale(a, Scalar(c)), 3), exact_q_sum(a, 3));
        ASSERT_NEAR(static_cast<double>(log2_q_sum(scale(a, Scalar(c)), 1.5)), static_cast<double>(log2_q_sum(a, 1.5)),
                    1e-15);
    }
}

TEST(MeasureProperties, YoungInequality) {
    gen::Rng rng(34);
    for (int i = 0; i < 200; ++i) {
        DiscreteMeasure a = rng.measure(static_cast<std::size_t>(rng.integer(1, 8)));
        DiscreteMeasure b = rng.measure(static_cast<std::size_t>(rng.integer(1, 8)));
        DiscreteMeasure ab = convolve(a, b);
        ASSERT_LE(exact_q_sum(ab, 2), exact_q_sum(a, 2));
        ASSERT_LE(exact_q_sum(ab, 3), exact_q_sum(a, 3));
        ASSERT_LE(log2_q_sum(ab, 1.5), log2_q_sum(a, 1.5) + 1e-15L);
    }
}

TEST(MeasureProperties, MergingRaisesPowerSums) {
    gen::Rng rng(35);
    for (int i = 0; i < 200; ++i) {
        auto p = rng.weights(static_cast<std::size_t>(rng.integer(2, 8)));
        std::vector<Atom> distinct, collided;
        for (std::size_t k = 0; k < p.size(); ++k) {
            distinct.push_back({Scalar(static_cast<long>(k)), p[k]});
            // random collisions: several atoms land on the same few positions
            collided.push_back({Scalar(rng.integer(0, 2)), p[k]});
        }
        DiscreteMeasure a = DiscreteMeasure::from_atoms(distinct), b = DiscreteMeasure::from_atoms(collided);
        for (unsigned q : {2u, 3u}) ASSERT_GE(exact_q_sum(b, q), exact_q_sum(a, q));
        ASSERT_GE(log2_q_sum(b, 1.5) + 1e-15L, log2_q_sum(a, 1.5));
    }
}

TEST(MeasureProperties, HolderCoveringBound) {
    gen::Rng rng(36);
    for (int i = 0; i < 100; ++i) {
        DiscreteMeasure mu = rng.measure(20, 64);
        int m = static_cast<int>(rng.integer(1, 5));
        Rational w = Rational(1) / Rational(BigInt(1) << m);
        for (unsigned q : {2u, 3u}) {
            // M = 2: half-shifted level-m intervals against level-m intervals
            Rational lhs2 = power_sum(interval_masses(mu, w, w / 2), q);
            Rational rhs = power_sum(interval_masses(mu, w, 0), q);
            ASSERT_LE(lhs2, Rational(BigInt(1) << q) * rhs);
            // M = 3: intervals of three bins against single bins
            Rational lhs3 = power_sum(interval_masses(mu, 3 * w, 0), q);
            Rational three_q(1);
            for (unsigned k = 0; k < q; ++k) three_q *= 3;
            ASSERT_LE(lhs3, three_q * rhs);
        }
    }
}

TEST(MeasureProperties, AlmostDisjointSupports) {
    gen::Rng rng(37);
    for (int i = 0; i < 100; ++i) {
        int M = static_cast<int>(rng.integer(2, 3));
        std::vector<DiscreteMeasure> parts;
        std::vector<Atom> sum;
        Rational parts_sum2(0), parts_sum3(0);
        for (int k = 0; k < M; ++k) {
            DiscreteMeasure nu = rng.measure(6, 4); // positions on a shared 1/4 grid
            parts_sum2 += exact_q_sum(nu, 2);
            parts_sum3 += exact_q_sum(nu, 3);
            for (const auto& a : nu.atoms()) sum.push_back(a);
        }
        DiscreteMeasure total = DiscreteMeasure::from_atoms(sum);
        ASSERT_LE(exact_q_sum(total, 2), Rational(M) * parts_sum2);
        ASSERT_LE(exact_q_sum(total, 3), Rational(M * M) * parts_sum3);
    }
}

TEST(MeasureProperties, DiscretizedConvolutionComparable) {
    gen::Rng rng(38);
    for (int i = 0; i < 100; ++i) {
        DiscreteMeasure a = scale(rng.measure(10, 64), Scalar(R(1, 2))); // positions in [0, 1)
        DiscreteMeasure b = scale(rng.measure(10, 64), Scalar(R(1, 2)));
        int m = static_cast<int>(rng.integer(1, 6));
        for (unsigned q : {2u, 3u}) {
            Rational exact_first = bin_power_sum(dyadic_bin(convolve(a, b), m), q);
            Rational binned_first = exact_q_sum(convolve(as_grid_measure(dyadic_bin(a, m)), as_grid_measure(dyadic_bin(b, m))), q);
            double ratio = Rational(exact_first / binned_first).get_d();
            ASSERT_GE(ratio, std::pow(2.0, -double(q)));
            ASSERT_LE(ratio, std::pow(2.0, double(q)));
        }
    }
}

TEST(MeasureProperties, InvariantHistogramMatchesLevelMeasure) {
    const int m = 12;
    InvariantHistogramResult r = invariant_histogram(preset("cantor"), m);
    DyadicHistogram exact = dyadic_bin(level_n_measure(preset("cantor"), 12), m);
    std::map<std::int64_t, double> diff;
    for (std::size_t i = 0; i < r.histogram.size(); ++i) diff[r.histogram.bins[i]] += r.histogram.mass[i];
    for (std::size_t i = 0; i < exact.size(); ++i) diff[exact.bins[i]] -= exact.mass[i];
    double tv = 0;
    for (auto [j, d] : diff) tv += std::fabs(d);
    tv /= 2;
    int iteration_bound = static_cast<int>(std::ceil((m + 16) / std::log2(3.0)));
    EXPECT_LE(tv, std::ldexp(iteration_bound, -m));
}

TEST(MeasureProperties, MomentSumMatchesDirectSummation) {
    gen::Rng rng(39);
    for (int i = 0; i < 40; ++i) {
        Wifs w = rng.homogeneous_wifs(2, 3, false);
        int n = static_cast<int>(rng.integer(1, 6));
        DiscreteMeasure mu = level_n_measure(w, n);
        std::vector<Rational> t;
        for (const auto& f : w.maps) t.push_back(f.translation.as_rational());
        auto brute = oracle::rational_atoms(w.ratio().as_rational(), t, w.weights, n);
        int m = static_cast<int>(rng.integer(0, 8));
        for (double q : {1.5, 2.0, 3.0}) {
            double lib = moment_sums(dyadic_bin(mu, m), q).value();
            ASSERT_NEAR(lib, oracle::dyadic_moment(brute, m, q), 1e-13 * lib);
        }
    }
}
