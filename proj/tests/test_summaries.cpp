#include <gtest/gtest.h>

#include <cmath>

#include "qph/functionals.hpp"
#include "qph/persistence.hpp"
#include "qph/states.hpp"
#include "qph/summaries.hpp"

using namespace qph;

namespace {

Barcode reduced_barcode(const MultipartiteState &s, double q) {
    return compute_barcode(build_filtration(make_total_correlation_functional(s, q), FiltrationMode::reduced()));
}

MultipartiteState k3() { return graph_state(Graph::complete(3)); }

MultipartiteState pure_product(std::size_t n, std::uint64_t seed) {
    auto s = random_pure_state({2}, seed);
    for (std::size_t k = 1; k < n; ++k) s = tensor(s, random_pure_state({2}, seed + k));
    return s;
}

/// Integral of the alternating Betti sum from 0 to `upto` by midpoint
/// sampling between breakpoints of the counting function; independent of the
/// bar-length bookkeeping in the library.
double iec_by_sampling(const Barcode &bc, int max_dim, double upto) {
    std::vector<double> cuts{0.0, upto};
    for (const auto &iv : bc.intervals) {
        cuts.push_back(std::clamp(iv.birth, 0.0, upto));
        if (iv.finite()) cuts.push_back(std::clamp(iv.death, 0.0, upto));
    }
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double a = cuts[k], b = cuts[k + 1];
        if (b <= a) continue;
        const double mid = 0.5 * (a + b);
        long chi = 0;
        for (int d = -1; d <= max_dim; ++d) {
            const long c = static_cast<long>(bc.count_containing(d, mid));
            chi += (d % 2 == 0) ? c : -c;
        }
        total += static_cast<double>(chi) * (b - a);
    }
    return total;
}

}  // namespace

TEST(IntegratedBetti, Triangle) {
    const auto bc = reduced_barcode(k3(), 2.0);
    EXPECT_NEAR(integrated_betti(bc, 1, 1.5), 1.0, 1e-12);
    EXPECT_NEAR(integrated_betti(bc, 0, 1.5), 1.0, 1e-12);
    EXPECT_NEAR(integrated_betti(bc, 1, 1.0), 0.5, 1e-12);
    EXPECT_NEAR(total_persistence(bc, 1.5), 2.0, 1e-12);
}

TEST(IntegratedBetti, ProductIsZero) {
    const auto bc = reduced_barcode(pure_product(3, 1), 2.0);
    for (int k = -1; k < 3; ++k) {
        for (double e : {0.0, 0.5, 2.0}) EXPECT_NEAR(integrated_betti(bc, k, e), 0.0, 1e-12);
    }
}

TEST(Iec, Examples) {
    EXPECT_NEAR(integrated_euler_characteristic(reduced_barcode(k3(), 2.0), 1.5), 0.0, 1e-12);
    EXPECT_NEAR(iec_at_infinity(reduced_barcode(ghz(2), 2.0)), 1.0, 1e-12);
    EXPECT_NEAR(iec_at_infinity(reduced_barcode(pure_product(4, 3), 2.0)), 0.0, 1e-12);
    const auto bell = reduced_barcode(ghz(2), 2.0).nonzero();
    ASSERT_EQ(bell.size(), 1u);
    EXPECT_EQ(bell[0].dim, 0);
    EXPECT_NEAR(bell[0].death, 1.0, 1e-12);
}

TEST(Iec, MatchesSampledIntegral) {
    Rng rng(2);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto s = random_mixed_state({2, 3, 2}, seed);
        const auto bc = reduced_barcode(s, 1.5);
        const double upto = rng.uniform(0.0, bc.epsilon_max * 1.2);
        EXPECT_NEAR(integrated_euler_characteristic(bc, upto), iec_by_sampling(bc, 2, upto), 1e-12);
    }
}

TEST(Iec, InfiniteBarsRejected) {
    const auto bc = compute_barcode(build_filtration(make_total_correlation_functional(ghz(3), 2.0), FiltrationMode::absolute()));
    EXPECT_TRUE(has_infinite_bar(bc));
    try {
        iec_at_infinity(bc);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::InfiniteBar);
    }
    // at a finite horizon the absolute IEC picks up the infinite component
    const auto f = make_total_correlation_functional(ghz(3), 2.0);
    EXPECT_NEAR(integrated_euler_characteristic(bc, bc.epsilon_max), bc.epsilon_max + closed_form_iec(f), 1e-12);
}

TEST(ClosedForm, Examples) {
    EXPECT_NEAR(closed_form_iec(make_total_correlation_functional(ghz(2), 2.0)), 1.0, 1e-14);
    EXPECT_NEAR(closed_form_iec(make_total_correlation_functional(ghz(4), 2.0)), 1.0, 1e-13);
    const auto f = make_total_correlation_functional(random_mixed_state({2, 3, 2}, 5), 1.5);
    for (double s : {0.5, 2.0, 7.0}) EXPECT_NEAR(closed_form_iec(f.rescaled(s)) * s, closed_form_iec(f), 1e-9);
}

TEST(ClosedForm, AgreesWithBarcodeRoute) {
    Rng rng(9);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::vector<std::size_t> dims(2 + rng.uniform_int(0, 2));
        for (auto &d : dims) d = rng.coin() ? 3 : 2;
        const auto f = make_total_correlation_functional(random_mixed_state(dims, seed), rng.coin() ? 1.0 : 2.0);
        EXPECT_NEAR(reduced_iec(f), closed_form_iec(f), 1e-9);
    }
}

TEST(ClosedForm, GeneralFunctionalOffsetByMinimumVertex) {
    // a monotone functional with nonzero vertex values
    SubsetFunctional f(2, {0.0, 0.3, 0.7, 1.0}, "custom");
    EXPECT_NEAR(reduced_iec(f), closed_form_iec(f) + 0.3, 1e-15);
}

TEST(RelativeIec, Examples) {
    const auto g = relative_iec(make_total_correlation_functional(ghz(3), 1.0), 0b011);
    EXPECT_NEAR(g.barcode_route, -std::log(2.0), 1e-12);
    EXPECT_LE(g.residual(), 1e-12);
    const auto b = relative_iec(make_total_correlation_functional(ghz(2), 1.0), 0b01);
    EXPECT_NEAR(b.barcode_route, 2.0 * std::log(2.0), 1e-12);
    EXPECT_THROW(relative_iec(make_total_correlation_functional(ghz(2), 1.0), 0b11), Error);
}

TEST(RelativeIec, NonPositiveForRandomTripartite) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto c = verify_thm3(random_mixed_state({2, 2, 2}, seed));
        EXPECT_LE(c.relative_iec, 1e-10);
        EXPECT_TRUE(c.non_positive);
        EXPECT_LE(c.residual, 1e-8);
    }
}

TEST(Verify, ReducedIecMatchesInteractionInformationMixedDims) {
    const auto c = verify_thm1(random_mixed_state({2, 3, 2}, 17), 1.5);
    EXPECT_LE(c.residual, 1e-8);
    EXPECT_NEAR(c.iec, c.interaction_information, 1e-8);
}

TEST(Verify, TangleRoutesAgreeOnGhz6) {
    const auto c = verify_thm2(ghz(6));
    EXPECT_LE(c.iec_vs_interaction, 1e-8);
    EXPECT_LE(c.interaction_vs_minkowski, 1e-8);
    EXPECT_LE(c.minkowski_vs_tangle, 1e-8);
    EXPECT_NEAR(c.iec, 1.0, 1e-8);
    EXPECT_THROW(verify_thm2(ghz(3)), Error);
    EXPECT_THROW(verify_thm2(random_pure_state({2, 3}, 1)), Error);
}

TEST(Verify, RelativeIecIsMinusConditionalMutualInformation) {
    const auto c = verify_thm3(random_mixed_state({2, 2, 2}, 99));
    EXPECT_LE(c.residual, 1e-8);
    EXPECT_LE(c.relative_iec, 1e-10);
}

TEST(Verify, BipartiteRelativeIecIsMutualInformation) {
    const auto c = verify_corollary_bipartite(ghz(2));
    EXPECT_NEAR(c.relative_iec, 2.0 * std::log(2.0), 1e-12);
    EXPECT_TRUE(c.non_negative);
    EXPECT_LE(c.residual, 1e-12);
}

TEST(GraphParity, Examples) {
    EXPECT_NEAR(iec_at_infinity(reduced_barcode(k3(), 2.0)), 0.0, 1e-12);
    EXPECT_NEAR(iec_at_infinity(reduced_barcode(graph_state(Graph{2, {{0, 1}}}), 2.0)), 1.0, 1e-12);
    EXPECT_NEAR(iec_at_infinity(reduced_barcode(graph_state(Graph::complete(6)), 2.0)), 1.0, 1e-8);
    EXPECT_NEAR(iec_at_infinity(reduced_barcode(graph_state(Graph::star(6)), 2.0)), 1.0, 1e-8);
    // path on 4 vertices has even degrees
    EXPECT_NEAR(iec_at_infinity(reduced_barcode(graph_state(Graph{4, {{0, 1}, {1, 2}, {2, 3}}}), 2.0)), 0.0, 1e-8);
}

TEST(Stability, SmallDepolarizationMovesIecLittle) {
    const double delta = 1e-4;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto s = random_mixed_state({2, 2, 2}, seed);
        auto rho = s.rho() * (1.0 - delta) + ComplexMatrix::identity(8) * (delta / 8.0);
        const MultipartiteState t(rho, s.dims());
        EXPECT_LE(std::abs(iec_at_infinity(reduced_barcode(s, 2.0)) - iec_at_infinity(reduced_barcode(t, 2.0))), 0.01);
    }
}

TEST(Summary, ReportResidualsAndRescale) {
    const auto s = ghz(4);
    const auto f = make_total_correlation_functional(s, 2.0, 2.0);
    const auto mode = FiltrationMode::reduced();
    const auto bc = compute_barcode(build_filtration(f, mode));
    const auto r = summarize(s, f, bc, mode, 2.0);
    EXPECT_NEAR(r.iec, 0.5, 1e-12);
    EXPECT_NEAR(r.interaction_information, 1.0, 1e-12);
    ASSERT_TRUE(r.n_tangle.has_value());
    EXPECT_NEAR(*r.n_tangle, 1.0, 1e-12);
    ASSERT_EQ(r.integrated_betti.size(), 4u);
    for (const auto &[name, v] : r.residuals) EXPECT_LE(v, 1e-8) << name;
    // non-qubit party: no tangle or Minkowski length
    const auto m = random_mixed_state({2, 3}, 1);
    const auto g = make_total_correlation_functional(m, 2.0);
    const auto r2 = summarize(m, g, compute_barcode(build_filtration(g, mode)), mode, 1.0);
    EXPECT_FALSE(r2.n_tangle.has_value());
    EXPECT_FALSE(r2.minkowski_length.has_value());
}
