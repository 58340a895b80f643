#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "qph/functionals.hpp"
#include "qph/gf2.hpp"
#include "qph/persistence.hpp"
#include "qph/states.hpp"

using namespace qph;

namespace {

SubsetFunctional k3_functional() { return make_total_correlation_functional(graph_state(Graph::complete(3)), 2.0); }

MultipartiteState pure_product(std::size_t n, std::uint64_t seed) {
    auto s = random_pure_state({2}, seed);
    for (std::size_t k = 1; k < n; ++k) s = tensor(s, random_pure_state({k % 2 ? 3u : 2u}, seed + k));
    return s;
}

Barcode barcode_of(const SubsetFunctional &f, FiltrationMode mode) { return compute_barcode(build_filtration(f, mode)); }

/// Simplices of G(eps) by the definition, for comparison with complex_at.
std::vector<PartyMask> brute_sublevel(const SubsetFunctional &f, double eps) {
    std::vector<PartyMask> out;
    for (PartyMask j = 1; j <= f.all_parties(); ++j) {
        if (f(j) <= eps) out.push_back(j);
    }
    return out;
}

MultipartiteState random_state(Rng &rng, std::uint64_t seed, std::size_t lo, std::size_t hi) {
    std::vector<std::size_t> dims(rng.uniform_int(lo, hi));
    for (auto &d : dims) d = rng.coin() ? 3 : 2;
    return rng.coin() ? random_pure_state(dims, seed) : random_mixed_state(dims, seed);
}

}  // namespace

TEST(Gf2, RankMatchesSmallCases) {
    BitVector a(5), b(5), c(5);
    a.set(0);
    a.set(2);
    b.set(2);
    b.set(4);
    c.set(0);
    c.set(4);  // c = a + b
    EXPECT_EQ(gf2_rank({a, b, c}), 2u);
    EXPECT_EQ(gf2_rank({a, b}), 2u);
    EXPECT_EQ(gf2_rank({BitVector(5)}), 0u);
    BitVector wide(130);
    wide.set(129);
    wide.set(64);
    EXPECT_EQ(wide.highest(), 129);
    EXPECT_EQ(wide.lowest(), 64);
    EXPECT_TRUE(wide.test(64));
    wide.flip(64);
    EXPECT_FALSE(wide.test(64));
}

TEST(Gf2, RankMatchesSubsetEnumeration) {
    // rank = log2 of the number of distinct XOR combinations
    Rng rng(3);
    for (int t = 0; t < 30; ++t) {
        const std::size_t rows = 1 + rng.uniform_int(0, 5), cols = 1 + rng.uniform_int(0, 7);
        std::vector<BitVector> m;
        std::vector<unsigned> packed;
        for (std::size_t r = 0; r < rows; ++r) {
            BitVector v(cols);
            unsigned p = 0;
            for (std::size_t c = 0; c < cols; ++c) {
                if (rng.coin()) {
                    v.set(c);
                    p |= 1u << c;
                }
            }
            m.push_back(v);
            packed.push_back(p);
        }
        std::vector<unsigned> span;
        for (unsigned sel = 0; sel < (1u << rows); ++sel) {
            unsigned x = 0;
            for (std::size_t r = 0; r < rows; ++r) {
                if (sel >> r & 1u) x ^= packed[r];
            }
            span.push_back(x);
        }
        std::sort(span.begin(), span.end());
        span.erase(std::unique(span.begin(), span.end()), span.end());
        EXPECT_EQ(std::size_t{1} << gf2_rank(m), span.size());
    }
}

TEST(Filtration, ProductPairOrder) {
    const auto f = make_total_correlation_functional(pure_product(2, 1), 2.0);
    const auto cx = build_filtration(f, FiltrationMode::absolute());
    ASSERT_EQ(cx.cells().size(), 3u);
    EXPECT_EQ(cx.cells()[0].simplex, 0b01u);
    EXPECT_EQ(cx.cells()[1].simplex, 0b10u);
    EXPECT_EQ(cx.cells()[2].simplex, 0b11u);
    for (const auto &c : cx.cells()) EXPECT_NEAR(c.value, 0.0, 1e-12);
}

TEST(Filtration, TriangleValues) {
    const auto cx = build_filtration(k3_functional(), FiltrationMode::absolute());
    ASSERT_EQ(cx.cells().size(), 7u);
    const auto values = cx.filtration_values();
    ASSERT_EQ(values.size(), 3u);
    EXPECT_NEAR(values[0], 0.0, 1e-9);
    EXPECT_NEAR(values[1], 0.5, 1e-9);
    EXPECT_NEAR(values[2], 1.5, 1e-9);
    for (std::size_t k = 0; k < 7; ++k) EXPECT_EQ(cx.cells()[k].dim, k < 3 ? 0 : k < 6 ? 1 : 2);
}

TEST(Filtration, RelativeRemovesSubcomplex) {
    const auto f = make_total_correlation_functional(random_mixed_state({2, 2, 2}, 4), 1.0);
    const auto cx = build_filtration(f, FiltrationMode::relative_to(3, 0b011));
    std::vector<PartyMask> got;
    for (const auto &c : cx.cells()) got.push_back(c.simplex);
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, (std::vector<PartyMask>{0b100, 0b101, 0b110, 0b111}));
}

TEST(Filtration, FacesPrecedeCofaces) {
    Rng rng(8);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto f = make_total_correlation_functional(random_state(rng, seed, 2, 4), 1.5);
        for (const auto &mode : {FiltrationMode::absolute(), FiltrationMode::reduced()}) {
            const auto cx = build_filtration(f, mode);
            for (std::size_t k = 0; k < cx.cells().size(); ++k) {
                const PartyMask j = cx.cells()[k].simplex;
                for (PartyMask sub = (j - 1) & j; sub != 0; sub = (sub - 1) & j) {
                    EXPECT_LT(static_cast<std::size_t>(cx.position(sub)), k);
                }
                if (j != 0 && mode.kind == HomologyMode::Reduced) EXPECT_LT(cx.position(0), static_cast<long>(k));
            }
        }
    }
}

TEST(Filtration, RejectsNonMonotoneAndBadSubcomplex) {
    SubsetFunctional bad(2, {0.0, 0.0, 1.0, 0.5}, "bad");
    try {
        build_filtration(bad, FiltrationMode::absolute());
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::MonotonicityViolation);
    }
    std::vector<bool> members(8, false);
    members[0b011] = true;  // {A,B} without its faces
    EXPECT_THROW(Subcomplex(3, members), Error);
    EXPECT_THROW(Subcomplex::generated_by(3, 0b1000), Error);
    EXPECT_EQ(Subcomplex::generated_by(3, 0b011).facets(), (std::vector<PartyMask>{0b011}));
}

TEST(Filtration, HullIsIdentityOnMonotoneInput) {
    const auto f = make_total_correlation_functional(random_mixed_state({2, 3, 2}, 2), 1.0);
    ASSERT_TRUE(check_monotone(f));
    const auto h = monotone_hull(f);
    // strictly monotone random functional: bit-identical
    for (PartyMask j = 1; j < 8; ++j) EXPECT_EQ(h[j], f(j));
    SubsetFunctional noisy(2, {0.0, 0.0, 0.0, -1e-17}, "noisy");
    EXPECT_EQ(monotone_hull(noisy)[3], 0.0);
}

TEST(Barcode, TriangleReduced) {
    const auto bc = barcode_of(k3_functional(), FiltrationMode::reduced());
    const auto bars = bc.nonzero();
    ASSERT_EQ(bars.size(), 3u);
    for (int k = 0; k < 2; ++k) {
        EXPECT_EQ(bars[k].dim, 0);
        EXPECT_NEAR(bars[k].birth, 0.0, 1e-9);
        EXPECT_NEAR(bars[k].death, 0.5, 1e-9);
    }
    EXPECT_EQ(bars[2].dim, 1);
    EXPECT_NEAR(bars[2].birth, 0.5, 1e-9);
    EXPECT_NEAR(bars[2].death, 1.5, 1e-9);
    EXPECT_EQ(bars[2].death_simplex, std::optional<PartyMask>(0b111));
    for (const auto &iv : bc.intervals) EXPECT_LE(iv.birth, iv.death);
    // the augmentation pairs with the first vertex at the same value
    const auto minus = bc.of_dim(-1);
    ASSERT_EQ(minus.size(), 1u);
    EXPECT_TRUE(minus[0].zero_length);
}

TEST(Barcode, ProductStateAllZeroLength) {
    for (std::size_t n = 2; n <= 4; ++n) {
        const auto bc = barcode_of(make_total_correlation_functional(pure_product(n, n), 2.0), FiltrationMode::reduced());
        for (const auto &iv : bc.intervals) {
            EXPECT_TRUE(iv.finite());
            EXPECT_LE(iv.length(), 1e-12);  // zero up to rounding in the marginal entropies
        }
        EXPECT_TRUE(significant_intervals(bc).empty());
    }
}

TEST(Barcode, Ghz3AbsoluteHasOneInfiniteBar) {
    const auto bc = barcode_of(make_total_correlation_functional(ghz(3), 2.0), FiltrationMode::absolute());
    std::size_t infinite = 0;
    for (const auto &iv : bc.intervals) {
        if (iv.finite()) continue;
        ++infinite;
        EXPECT_EQ(iv.dim, 0);
        EXPECT_EQ(iv.birth, 0.0);
    }
    EXPECT_EQ(infinite, 1u);
}

TEST(Barcode, ReducedIsAbsoluteMinusInfiniteBar) {
    Rng rng(5);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto f = make_total_correlation_functional(random_state(rng, seed, 2, 4), 2.0);
        auto abs_bars = significant_intervals(barcode_of(f, FiltrationMode::absolute()));
        auto red_bars = significant_intervals(barcode_of(f, FiltrationMode::reduced()));
        ASSERT_EQ(abs_bars.size(), red_bars.size() + 1);
        const auto inf = std::find_if(abs_bars.begin(), abs_bars.end(), [](const Interval &iv) { return !iv.finite(); });
        ASSERT_NE(inf, abs_bars.end());
        EXPECT_EQ(inf->dim, 0);
        abs_bars.erase(inf);
        for (std::size_t k = 0; k < red_bars.size(); ++k) {
            EXPECT_EQ(abs_bars[k].dim, red_bars[k].dim);
            EXPECT_EQ(abs_bars[k].birth, red_bars[k].birth);
            EXPECT_EQ(abs_bars[k].death, red_bars[k].death);
        }
    }
}

TEST(Barcode, RelativeBarsAreFinite) {
    Rng rng(6);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = random_state(rng, seed, 2, 4);
        const auto f = make_total_correlation_functional(s, 1.0);
        const PartyMask gen = static_cast<PartyMask>(rng.uniform_int(1, f.all_parties() - 1));
        for (const auto &iv : barcode_of(f, FiltrationMode::relative_to(f.num_parties(), gen)).intervals) {
            EXPECT_TRUE(iv.finite());
        }
    }
}

TEST(Barcode, LocalUnitaryInvariance) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto s = random_mixed_state({2, 3, 2}, seed);
        const auto t = apply_local_unitaries(s, random_local_unitaries(s.dims(), seed + 50));
        for (double q : {1.0, 2.0}) {
            const auto a = barcode_of(make_total_correlation_functional(s, q), FiltrationMode::reduced());
            const auto b = barcode_of(make_total_correlation_functional(t, q), FiltrationMode::reduced());
            EXPECT_LE(barcode_distance(a, b), 1e-9);
        }
    }
}

TEST(BettiCurve, Triangle) {
    const auto bc = barcode_of(k3_functional(), FiltrationMode::reduced());
    const auto c1 = betti_curve(bc, 1);
    EXPECT_EQ(c1.at(0.25), 0);
    EXPECT_EQ(c1.at(0.5), 1);
    EXPECT_EQ(c1.at(1.0), 1);
    EXPECT_EQ(c1.at(1.49), 1);
    EXPECT_EQ(c1.at(1.5), 0);
    EXPECT_EQ(c1.at(10.0), 0);
    const auto c0 = betti_curve(bc, 0);
    EXPECT_EQ(c0.at(-1.0), 0);
    EXPECT_EQ(c0.at(0.0), 2);
    EXPECT_EQ(c0.at(0.5), 0);
}

TEST(BettiCurve, ProductAndContractible) {
    const auto f = make_total_correlation_functional(pure_product(3, 2), 2.0);
    const auto bc = barcode_of(f, FiltrationMode::reduced());
    for (int k = 1; k < 3; ++k) {
        for (double e : {-1.0, 0.0, 0.5, 2.0}) EXPECT_EQ(betti_curve(bc, k).at(e), 0);
    }
    const auto g = make_total_correlation_functional(random_mixed_state({2, 2, 3}, 3), 1.0);
    const auto ab = barcode_of(g, FiltrationMode::absolute());
    const double top = ab.epsilon_max;
    EXPECT_EQ(ab.count_containing(0, top), 1u);
    for (int k = 1; k < 3; ++k) EXPECT_EQ(ab.count_containing(k, top), 0u);
}

TEST(Oracle, TriangleExamples) {
    const auto f = k3_functional();
    const auto mode = FiltrationMode::reduced();
    EXPECT_EQ(oracle_betti(f, 1.0, 1, mode), 1u);
    EXPECT_EQ(oracle_betti(f, 1.5, 1, mode), 0u);
    for (int k = -1; k < 3; ++k) EXPECT_EQ(oracle_betti(f, -0.1, k, mode), 0u);
    // hand-counted: at 0.25 three points, reduced beta_0 = 2
    EXPECT_EQ(oracle_betti(f, 0.25, 0, mode), 2u);
    EXPECT_EQ(oracle_betti(f, 0.25, 0, FiltrationMode::absolute()), 3u);
}

TEST(Oracle, MatchesBarcodeCountsInAllModes) {
    Rng rng(21);
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto s = random_state(rng, seed, 2, 5);
        const auto f = make_total_correlation_functional(s, seed % 2 ? 1.0 : 2.0);
        const PartyMask gen = static_cast<PartyMask>(rng.uniform_int(1, f.all_parties() - 1));
        for (const auto &mode : {FiltrationMode::absolute(), FiltrationMode::reduced(),
                                 FiltrationMode::relative_to(f.num_parties(), gen)}) {
            const auto cx = build_filtration(f, mode);
            const auto bc = compute_barcode(cx);
            std::vector<double> eps = cx.filtration_values();
            for (int k = 0; k < 20; ++k) eps.push_back(rng.uniform(-0.2, cx.epsilon_max() + 0.2));
            for (double e : eps) {
                for (int k = -1; k < static_cast<int>(f.num_parties()); ++k) {
                    EXPECT_EQ(bc.count_containing(k, e), oracle_betti(f, e, k, mode))
                        << "seed " << seed << " mode " << to_string(mode.kind) << " eps " << e << " k " << k;
                }
            }
        }
    }
}

TEST(Oracle, EulerPoincareAtEveryValue) {
    Rng rng(4);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto f = make_total_correlation_functional(random_state(rng, seed, 2, 4), 1.5);
        const auto bc = barcode_of(f, FiltrationMode::absolute());
        for (int t = 0; t < 20; ++t) {
            const double e = rng.uniform(-0.1, bc.epsilon_max + 0.1);
            long betti_sum = 0, simplex_sum = 0;
            for (int k = 0; k < static_cast<int>(f.num_parties()); ++k) {
                const long b = static_cast<long>(bc.count_containing(k, e));
                betti_sum += (k % 2 == 0) ? b : -b;
            }
            for (const auto j : complex_at(f, e).simplices) simplex_sum += (party_count(j) % 2 == 1) ? 1 : -1;
            EXPECT_EQ(betti_sum, simplex_sum) << e;
        }
    }
}

TEST(ComplexAt, GhzFourAtThreeQuarters) {
    const auto f = make_total_correlation_functional(ghz(4), 2.0);
    const auto got = complex_at(f, 0.75);
    std::vector<PartyMask> expected;
    for (PartyMask j = 1; j < 16; ++j) {
        if (party_count(j) <= 2) expected.push_back(j);
    }
    EXPECT_EQ(got.simplices, expected);
}

TEST(ComplexAt, FullAndEmpty) {
    const auto f = make_total_correlation_functional(random_mixed_state({2, 2, 2}, 1), 1.0);
    const auto all = complex_at(f, 1e9);
    EXPECT_EQ(all.simplices.size(), 7u);
    EXPECT_EQ(all.evaluations, 1u);
    const auto none = complex_at(f, -1.0);
    EXPECT_TRUE(none.simplices.empty());
    EXPECT_EQ(none.evaluations, 7u);
}

TEST(ComplexAt, MatchesBruteForce) {
    Rng rng(31);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto f = make_total_correlation_functional(random_state(rng, seed, 2, 4), 2.0);
        const double e = rng.uniform(-0.1, 1.2 * f(f.all_parties()));
        EXPECT_EQ(complex_at(f, e).simplices, brute_sublevel(f, e)) << seed;
    }
}
