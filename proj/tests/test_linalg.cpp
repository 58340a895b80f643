#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "qph/linalg.hpp"

using namespace qph;

namespace {

ComplexMatrix bell_rho() {
    const double r = 1.0 / std::sqrt(2.0);
    std::vector<cplx> v{r, 0, 0, r};
    return ComplexMatrix::outer(v);
}

MultipartiteState bell() { return MultipartiteState(bell_rho(), {2, 2}); }

}  // namespace

TEST(Kron, IdentityTimesIdentity) {
    EXPECT_EQ(kron(ComplexMatrix::identity(2), ComplexMatrix::identity(2)), ComplexMatrix::identity(4));
}

TEST(Kron, SigmaZSignPattern) {
    const auto z = kron(pauli::sigma(3), pauli::sigma(3));
    const double expected[] = {1, -1, -1, 1};
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(z(i, j), cplx(i == j ? expected[i] : 0.0));
    }
}

TEST(Kron, AgreesWithEntrywiseExpansion) {
    std::vector<cplx> zero{1, 0};
    const auto p0 = ComplexMatrix::outer(zero);
    const auto k = kron(p0, pauli::sigma(1));
    EXPECT_EQ(max_abs_diff(k, oracle::kron(p0, pauli::sigma(1))), 0.0);
    // acting on |01> gives |00>
    std::vector<cplx> ket01{0, 1, 0, 0};
    for (std::size_t i = 0; i < 4; ++i) {
        cplx acc = 0;
        for (std::size_t j = 0; j < 4; ++j) acc += k(i, j) * ket01[j];
        EXPECT_EQ(acc, cplx(i == 0 ? 1.0 : 0.0));
    }
}

TEST(Kron, AssociativeOnRandomTriples) {
    Rng rng(11);
    for (int t = 0; t < 20; ++t) {
        std::vector<ComplexMatrix> m;
        for (int k = 0; k < 3; ++k) {
            ComplexMatrix a(2);
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t j = 0; j < 2; ++j) a(i, j) = rng.complex_normal();
            m.push_back(a);
        }
        EXPECT_LE(max_abs_diff(kron(kron(m[0], m[1]), m[2]), kron(m[0], kron(m[1], m[2]))), 1e-13);
    }
}

TEST(PartialTrace, BellMarginalIsMaximallyMixed) {
    const auto r = partial_trace(bell(), 0b01);
    EXPECT_LE(max_abs_diff(r, ComplexMatrix::identity(2) * 0.5), 1e-15);
}

TEST(PartialTrace, ProductStateFactor) {
    const auto a = random_mixed_state({2}, 1);
    const auto b = random_mixed_state({3}, 2);
    const auto ab = tensor(a, b);
    EXPECT_LE(max_abs_diff(partial_trace(ab, 0b01), a.rho()), 1e-14);
    EXPECT_LE(max_abs_diff(partial_trace(ab, 0b10), b.rho()), 1e-14);
}

TEST(PartialTrace, Ghz3KeepAB) {
    std::vector<cplx> amp(8, 0.0);
    amp[0] = amp[7] = 1.0 / std::sqrt(2.0);
    const auto s = MultipartiteState::from_amplitudes(amp, {2, 2, 2});
    const auto r = partial_trace(s, 0b011);
    ComplexMatrix expected(4);
    expected(0, 0) = 0.5;
    expected(3, 3) = 0.5;
    EXPECT_LE(max_abs_diff(r, expected), 1e-15);
}

TEST(PartialTrace, MatchesIndexOracleOnMixedDims) {
    const auto s = random_mixed_state({2, 3, 2}, 5);
    for (PartyMask keep = 1; keep < 8; ++keep) {
        EXPECT_LE(max_abs_diff(partial_trace(s, keep), oracle::partial_trace(s.rho(), s.dims(), keep)), 1e-14)
            << "keep " << keep;
    }
}

TEST(PartialTrace, Composes) {
    const auto s = random_mixed_state({2, 3, 2, 2}, 9);
    const PartyMask j = 0b1011, i = 0b0011;
    // tracing to J gives a 3-party state whose parties are 0, 1, 3; I = {0, 1} is its first two.
    const auto mid = marginal_state(s, j);
    const auto twice = partial_trace(mid, 0b011);
    EXPECT_LE(max_abs_diff(twice, partial_trace(s, i)), 1e-12);
}

TEST(PartialTrace, RejectsEmptyAndOutOfRange) {
    const auto s = bell();
    try {
        partial_trace(s, 0);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptySubset);
    }
    try {
        partial_trace(s, 0b100);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidSubset);
    }
}

TEST(PartialTranspose, ProductSpectrumUnchanged) {
    const auto s = tensor(random_mixed_state({2}, 3), random_mixed_state({2}, 4));
    const auto before = hermitian_eigenvalues(s.rho());
    const auto after = hermitian_eigenvalues(partial_transpose(s, 0b10));
    for (std::size_t k = 0; k < before.size(); ++k) EXPECT_NEAR(before[k], after[k], 1e-12);
}

TEST(PartialTranspose, BellSpectrum) {
    const auto e = hermitian_eigenvalues(partial_transpose(bell(), 0b10));
    ASSERT_EQ(e.size(), 4u);
    EXPECT_NEAR(e[0], -0.5, 1e-12);
    for (int k = 1; k < 4; ++k) EXPECT_NEAR(e[k], 0.5, 1e-12);
    // the bisection oracle sees the same spectrum
    const auto o = oracle::bisection_eigenvalues(partial_transpose(bell(), 0b10));
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(e[k], o[k], 1e-10);
}

TEST(PartialTranspose, Involution) {
    const auto s = random_mixed_state({2, 3}, 8);
    const auto twice = partial_transpose(partial_transpose(s.rho(), s.dims(), 0b01), s.dims(), 0b01);
    EXPECT_EQ(max_abs_diff(twice, s.rho()), 0.0);
}

TEST(Eigen, SimpleSpectra) {
    const auto a = hermitian_eigenvalues(ComplexMatrix::identity(2) * 0.5);
    EXPECT_DOUBLE_EQ(a[0], 0.5);
    EXPECT_DOUBLE_EQ(a[1], 0.5);
    const auto x = hermitian_eigenvalues(pauli::sigma(1));
    EXPECT_NEAR(x[0], -1.0, 1e-15);
    EXPECT_NEAR(x[1], 1.0, 1e-15);
}

TEST(Eigen, MatchesBisectionOracle) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto a = oracle::random_hermitian(8, seed);
        const auto e = hermitian_eigenvalues(a);
        const auto o = oracle::bisection_eigenvalues(a);
        for (std::size_t k = 0; k < 8; ++k) EXPECT_NEAR(e[k], o[k], 1e-10) << "seed " << seed << " k " << k;
    }
}

TEST(Eigen, VectorsDiagonalize) {
    const auto a = oracle::random_hermitian(12, 77);
    const auto eig = hermitian_eigen(a);
    const auto &v = eig.vectors;
    const auto d = v.adjoint() * a * v;
    for (std::size_t i = 0; i < 12; ++i) {
        for (std::size_t j = 0; j < 12; ++j) {
            const cplx expected = i == j ? cplx(eig.values[i]) : cplx(0.0);
            EXPECT_LE(std::abs(d(i, j) - expected), 1e-10);
        }
    }
    EXPECT_LE(max_abs_diff(v.adjoint() * v, ComplexMatrix::identity(12)), 1e-12);
    EXPECT_TRUE(std::is_sorted(eig.values.begin(), eig.values.end()));
}

TEST(Eigen, RejectsNonHermitian) {
    ComplexMatrix a(2);
    a(0, 1) = 1.0;
    try {
        hermitian_eigenvalues(a);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotHermitian);
        EXPECT_TRUE(e.is_numerical());
    }
}

TEST(TraceNorm, Examples) {
    EXPECT_NEAR(trace_norm(random_mixed_state({2, 2}, 3).rho()), 1.0, 1e-12);
    EXPECT_NEAR(trace_norm(partial_transpose(bell(), 0b10)), 2.0, 1e-12);
    EXPECT_EQ(trace_norm(ComplexMatrix(4)), 0.0);
}

TEST(TracePower, MatchesSpectrum) {
    const auto s = random_mixed_state({3, 2}, 21);
    const auto e = hermitian_eigenvalues(s.rho());
    for (int p = 2; p <= 4; ++p) {
        double expected = 0.0;
        for (double l : e) expected += std::pow(l, p);
        EXPECT_NEAR(trace_power(s.rho(), p), expected, 1e-13);
    }
}

TEST(RandomStates, DeterministicAndValid) {
    const auto a = random_mixed_state({2, 3}, 42);
    const auto b = random_mixed_state({2, 3}, 42);
    EXPECT_EQ(a.rho(), b.rho());
    const auto p = random_pure_state({2, 2, 3}, 42);
    EXPECT_EQ(p.rho(), random_pure_state({2, 2, 3}, 42).rho());
    EXPECT_NEAR(trace_power(p.rho(), 2), 1.0, 1e-12);
    EXPECT_NEAR(a.rho().trace().real(), 1.0, 1e-12);
    EXPECT_GE(hermitian_eigenvalues(a.rho()).front(), -1e-10);
}

TEST(RandomStates, LocalUnitariesPreserveMarginalSpectra) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto s = random_mixed_state({2, 3, 2}, seed);
        const auto us = random_local_unitaries(s.dims(), seed + 100);
        for (const auto &u : us) EXPECT_LE(max_abs_diff(u * u.adjoint(), ComplexMatrix::identity(u.dim())), 1e-12);
        const auto t = apply_local_unitaries(s, us);
        // full product of unitaries, by the oracle Kronecker
        const auto big = oracle::kron(oracle::kron(us[0], us[1]), us[2]);
        EXPECT_LE(max_abs_diff(t.rho(), big * s.rho() * big.adjoint()), 1e-12);
        for (PartyMask keep = 1; keep < 8; ++keep) {
            const auto x = hermitian_eigenvalues(partial_trace(s, keep));
            const auto y = hermitian_eigenvalues(partial_trace(t, keep));
            for (std::size_t k = 0; k < x.size(); ++k) EXPECT_NEAR(x[k], y[k], 1e-9);
        }
    }
}

TEST(MultipartiteState, Validation) {
    EXPECT_THROW(MultipartiteState(ComplexMatrix::identity(4) * 0.25, {2, 3}), Error);
    EXPECT_THROW(MultipartiteState(ComplexMatrix::identity(4), {2, 2}), Error);
    EXPECT_THROW(MultipartiteState(ComplexMatrix::identity(2) * 0.5, {1, 2}), Error);
    try {
        MultipartiteState::from_amplitudes({0, 0}, {2});
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::ZeroState);
    }
    const auto s = MultipartiteState::from_amplitudes({3, 4}, {2});
    EXPECT_NEAR(s.rho()(0, 0).real(), 9.0 / 25.0, 1e-15);
    EXPECT_EQ(bell().labels(), (std::vector<std::string>{"A1", "A2"}));
}
