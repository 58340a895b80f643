#pragma once

// Dense complex linear algebra for small multipartite states.
//
// Tensor ordering: party 0 is the most significant factor, so a basis index
// i = sum_k digit_k * stride_k with stride_{n-1} = 1.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qph/error.hpp"

namespace qph {

using cplx = std::complex<double>;

/// Largest total Hilbert-space dimension accepted for dense states.
inline constexpr std::size_t kMaxStateDim = 2048;

/// Subset of parties, bit k set means party k is a member.
using PartyMask = std::uint32_t;

inline int party_count(PartyMask mask) { return std::popcount(mask); }

inline PartyMask full_mask(std::size_t n) { return n >= 32 ? ~PartyMask{0} : ((PartyMask{1} << n) - 1); }

inline std::vector<int> mask_members(PartyMask mask) {
    std::vector<int> out;
    for (int k = 0; mask != 0; ++k, mask >>= 1) {
        if (mask & 1u) out.push_back(k);
    }
    return out;
}

class ComplexMatrix {
public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}
    ComplexMatrix(std::size_t dim, std::vector<cplx> entries) : dim_(dim), data_(std::move(entries)) {
        if (data_.size() != dim_ * dim_) {
            throw Error(ErrorKind::DimensionMismatch, "matrix entry count does not match dim*dim");
        }
    }

    static ComplexMatrix identity(std::size_t dim) {
        ComplexMatrix m(dim);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    static ComplexMatrix diagonal(std::span<const double> values) {
        ComplexMatrix m(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
        return m;
    }

    /// |v><v|
    static ComplexMatrix outer(std::span<const cplx> v) {
        ComplexMatrix m(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[i] * std::conj(v[j]);
        }
        return m;
    }

    std::size_t dim() const { return dim_; }
    cplx &operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
    const cplx &operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }
    std::span<const cplx> entries() const { return data_; }
    std::span<cplx> entries() { return data_; }

    cplx trace() const {
        cplx t = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
        return t;
    }

    ComplexMatrix adjoint() const {
        ComplexMatrix m(dim_);
        for (std::size_t i = 0; i < dim_; ++i) {
            for (std::size_t j = 0; j < dim_; ++j) m(j, i) = std::conj((*this)(i, j));
        }
        return m;
    }

    ComplexMatrix conjugate() const {
        ComplexMatrix m(dim_);
        for (std::size_t k = 0; k < data_.size(); ++k) m.data_[k] = std::conj(data_[k]);
        return m;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto &z : data_) s += std::norm(z);
        return std::sqrt(s);
    }

    /// Largest entrywise deviation from the adjoint.
    double hermiticity_error() const {
        double worst = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
            for (std::size_t j = i; j < dim_; ++j) {
                worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
            }
        }
        return worst;
    }

    bool is_hermitian(double tol) const { return hermiticity_error() <= tol; }

    /// Replace by (M + M^dagger) / 2.
    void hermitize() {
        for (std::size_t i = 0; i < dim_; ++i) {
            (*this)(i, i) = (*this)(i, i).real();
            for (std::size_t j = i + 1; j < dim_; ++j) {
                cplx avg = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
                (*this)(i, j) = avg;
                (*this)(j, i) = std::conj(avg);
            }
        }
    }

    ComplexMatrix &operator*=(cplx s) {
        for (auto &z : data_) z *= s;
        return *this;
    }

    friend ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b) {
        if (a.dim_ != b.dim_) throw Error(ErrorKind::DimensionMismatch, "matrix product of unequal sizes");
        const std::size_t n = a.dim_;
        ComplexMatrix c(n);
        for (std::size_t i = 0; i < n; ++i) {
            cplx *crow = &c.data_[i * n];
            for (std::size_t k = 0; k < n; ++k) {
                const cplx aik = a.data_[i * n + k];
                if (aik == cplx{}) continue;
                const cplx *brow = &b.data_[k * n];
                for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
            }
        }
        return c;
    }

    friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b) {
        if (a.dim_ != b.dim_) throw Error(ErrorKind::DimensionMismatch, "matrix sum of unequal sizes");
        for (std::size_t k = 0; k < a.data_.size(); ++k) a.data_[k] += b.data_[k];
        return a;
    }

    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b) {
        if (a.dim_ != b.dim_) throw Error(ErrorKind::DimensionMismatch, "matrix difference of unequal sizes");
        for (std::size_t k = 0; k < a.data_.size(); ++k) a.data_[k] -= b.data_[k];
        return a;
    }

    friend bool operator==(const ComplexMatrix &, const ComplexMatrix &) = default;

private:
    std::size_t dim_ = 0;
    std::vector<cplx> data_;
};

inline double max_abs_diff(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "comparing matrices of unequal size");
    double worst = 0.0;
    auto ea = a.entries();
    auto eb = b.entries();
    for (std::size_t k = 0; k < ea.size(); ++k) worst = std::max(worst, std::abs(ea[k] - eb[k]));
    return worst;
}

/// Tr(A B) without forming the product.
inline cplx trace_of_product(const ComplexMatrix &a, const ComplexMatrix &b) {
    cplx t = 0.0;
    const std::size_t n = a.dim();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) t += a(i, j) * b(j, i);
    }
    return t;
}

inline ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    const std::size_t na = a.dim(), nb = b.dim(), n = na * nb;
    ComplexMatrix c(n);
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < na; ++j) {
            const cplx aij = a(i, j);
            for (std::size_t k = 0; k < nb; ++k) {
                for (std::size_t l = 0; l < nb; ++l) c(i * nb + k, j * nb + l) = aij * b(k, l);
            }
        }
    }
    return c;
}

namespace pauli {
inline ComplexMatrix sigma(int which) {
    const cplx i{0.0, 1.0};
    switch (which) {
        case 0: return ComplexMatrix(2, {1.0, 0.0, 0.0, 1.0});
        case 1: return ComplexMatrix(2, {0.0, 1.0, 1.0, 0.0});
        case 2: return ComplexMatrix(2, {0.0, -i, i, 0.0});
        case 3: return ComplexMatrix(2, {1.0, 0.0, 0.0, -1.0});
        default: throw Error(ErrorKind::Precondition, "Pauli index must be 0..3");
    }
}
}  // namespace pauli

// ---------------------------------------------------------------------------
// Party structure

/// Row-major strides for a tensor product with party 0 most significant.
inline std::vector<std::size_t> tensor_strides(std::span<const std::size_t> dims) {
    std::vector<std::size_t> strides(dims.size());
    std::size_t s = 1;
    for (std::size_t k = dims.size(); k-- > 0;) {
        strides[k] = s;
        s *= dims[k];
    }
    return strides;
}

inline std::size_t product_of(std::span<const std::size_t> dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

/// Offsets of every basis index of the parties in `mask` inside the full space,
/// enumerated in the sub-space's own row-major order.
inline std::vector<std::size_t> subsystem_offsets(std::span<const std::size_t> dims, PartyMask mask) {
    auto strides = tensor_strides(dims);
    std::vector<std::size_t> offsets{0};
    for (std::size_t k = 0; k < dims.size(); ++k) {
        if (!(mask & (PartyMask{1} << k))) continue;
        std::vector<std::size_t> next;
        next.reserve(offsets.size() * dims[k]);
        for (std::size_t base : offsets) {
            for (std::size_t d = 0; d < dims[k]; ++d) next.push_back(base + d * strides[k]);
        }
        offsets = std::move(next);
    }
    return offsets;
}

class MultipartiteState {
public:
    MultipartiteState() = default;

    MultipartiteState(ComplexMatrix rho, std::vector<std::size_t> dims, std::vector<std::string> labels = {})
        : rho_(std::move(rho)), dims_(std::move(dims)), labels_(std::move(labels)) {
        if (dims_.empty()) throw Error(ErrorKind::DimensionMismatch, "state needs at least one party");
        if (dims_.size() > 20) throw Error(ErrorKind::TooLarge, "at most 20 parties are representable");
        for (auto d : dims_) {
            if (d < 2) throw Error(ErrorKind::DimensionMismatch, "local dimensions must be at least 2");
        }
        if (product_of(dims_) != rho_.dim()) {
            throw Error(ErrorKind::DimensionMismatch, "density matrix size does not equal product of local dimensions");
        }
        if (labels_.empty()) {
            for (std::size_t k = 0; k < dims_.size(); ++k) labels_.push_back("A" + std::to_string(k + 1));
        }
        if (labels_.size() != dims_.size()) throw Error(ErrorKind::DimensionMismatch, "one label per party required");
        if (!rho_.is_hermitian(1e-12)) throw Error(ErrorKind::InvalidState, "density matrix is not Hermitian");
        if (std::abs(rho_.trace() - 1.0) > 1e-10) throw Error(ErrorKind::InvalidState, "density matrix trace is not 1");
    }

    /// Pure state |psi><psi| from an amplitude vector (normalized here).
    static MultipartiteState from_amplitudes(std::vector<cplx> amplitudes, std::vector<std::size_t> dims) {
        if (amplitudes.size() > kMaxStateDim) throw Error(ErrorKind::TooLarge, "state dimension exceeds dense limit");
        double norm2 = 0.0;
        for (const auto &a : amplitudes) norm2 += std::norm(a);
        if (!(norm2 > 0.0)) throw Error(ErrorKind::ZeroState, "amplitude vector is zero");
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto &a : amplitudes) a *= inv;
        auto rho = ComplexMatrix::outer(amplitudes);
        rho.hermitize();
        return MultipartiteState(std::move(rho), std::move(dims));
    }

    const ComplexMatrix &rho() const { return rho_; }
    const std::vector<std::size_t> &dims() const { return dims_; }
    const std::vector<std::string> &labels() const { return labels_; }
    std::size_t num_parties() const { return dims_.size(); }
    PartyMask all_parties() const { return full_mask(dims_.size()); }
    bool all_qubits() const {
        return std::all_of(dims_.begin(), dims_.end(), [](std::size_t d) { return d == 2; });
    }

    std::size_t subsystem_dim(PartyMask mask) const {
        std::size_t d = 1;
        for (int k : mask_members(mask)) d *= dims_[static_cast<std::size_t>(k)];
        return d;
    }

private:
    ComplexMatrix rho_;
    std::vector<std::size_t> dims_;
    std::vector<std::string> labels_;
};

inline void check_mask_in_range(const MultipartiteState &s, PartyMask mask) {
    if (mask & ~s.all_parties()) throw Error(ErrorKind::InvalidSubset, "subset names a party that does not exist");
}

/// Marginal on the parties in `keep`, in their original relative order.
inline ComplexMatrix partial_trace(const ComplexMatrix &rho, std::span<const std::size_t> dims, PartyMask keep) {
    if (keep == 0) throw Error(ErrorKind::EmptySubset, "partial_trace needs a nonempty set of kept parties");
    const PartyMask all = full_mask(dims.size());
    if (keep & ~all) throw Error(ErrorKind::InvalidSubset, "subset names a party that does not exist");
    if (keep == all) return rho;
    auto kept = subsystem_offsets(dims, keep);
    auto traced = subsystem_offsets(dims, all & ~keep);
    const std::size_t dk = kept.size();
    ComplexMatrix out(dk);
    for (std::size_t a = 0; a < dk; ++a) {
        for (std::size_t b = 0; b < dk; ++b) {
            cplx sum = 0.0;
            for (std::size_t t : traced) sum += rho(kept[a] + t, kept[b] + t);
            out(a, b) = sum;
        }
    }
    return out;
}

inline ComplexMatrix partial_trace(const MultipartiteState &s, PartyMask keep) {
    return partial_trace(s.rho(), s.dims(), keep);
}

/// Sub-dimensions of the parties in `mask`, in order.
inline std::vector<std::size_t> sub_dims(std::span<const std::size_t> dims, PartyMask mask) {
    std::vector<std::size_t> out;
    for (int k : mask_members(mask)) out.push_back(dims[static_cast<std::size_t>(k)]);
    return out;
}

inline MultipartiteState marginal_state(const MultipartiteState &s, PartyMask keep) {
    std::vector<std::string> labels;
    for (int k : mask_members(keep)) labels.push_back(s.labels()[static_cast<std::size_t>(k)]);
    auto rho = partial_trace(s, keep);
    rho.hermitize();
    return MultipartiteState(std::move(rho), sub_dims(s.dims(), keep), std::move(labels));
}

/// Transpose of the tensor factors listed in `part`.
inline ComplexMatrix partial_transpose(const ComplexMatrix &rho, std::span<const std::size_t> dims, PartyMask part) {
    const PartyMask all = full_mask(dims.size());
    if (part == 0 || part == all || (part & ~all)) {
        throw Error(ErrorKind::InvalidSubset, "partial transpose needs a proper nonempty subset");
    }
    const std::size_t n = rho.dim();
    // part_offset[i]: contribution of the transposed parties' digits to index i.
    std::vector<std::size_t> part_offset(n);
    {
        auto offs = subsystem_offsets(dims, part);
        auto rest = subsystem_offsets(dims, all & ~part);
        for (std::size_t p : offs) {
            for (std::size_t r : rest) part_offset[p + r] = p;
        }
    }
    ComplexMatrix out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t pi = part_offset[i], ri = i - pi;
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t pj = part_offset[j], rj = j - pj;
            out(i, j) = rho(ri + pj, rj + pi);
        }
    }
    return out;
}

inline ComplexMatrix partial_transpose(const MultipartiteState &s, PartyMask part) {
    return partial_transpose(s.rho(), s.dims(), part);
}

// ---------------------------------------------------------------------------
// Hermitian eigensolver (cyclic complex Jacobi)

struct HermitianEigen {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // column k is the eigenvector of values[k]
};

namespace detail {

inline double off_diagonal_norm2(const ComplexMatrix &a) {
    double s = 0.0;
    const std::size_t n = a.dim();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) s += std::norm(a(i, j));
        }
    }
    return s;
}

}  // namespace detail

inline constexpr int kJacobiMaxSweeps = 100;
inline constexpr double kJacobiRelTol = 1e-12;

/// Eigen-decomposition of a Hermitian matrix. Converges when the off-diagonal
/// Frobenius norm drops below 1e-12 times the matrix norm.
inline HermitianEigen hermitian_eigen(const ComplexMatrix &m, bool want_vectors = true) {
    if (!m.is_hermitian(1e-10)) throw Error(ErrorKind::NotHermitian, "eigensolver input is not Hermitian");
    const std::size_t n = m.dim();
    ComplexMatrix a = m;
    a.hermitize();
    ComplexMatrix v = want_vectors ? ComplexMatrix::identity(n) : ComplexMatrix{};

    const double scale = a.frobenius_norm();
    const double target = kJacobiRelTol * scale;
    int sweep = 0;
    for (;; ++sweep) {
        if (std::sqrt(detail::off_diagonal_norm2(a)) <= target) break;
        if (sweep >= kJacobiMaxSweeps) throw Error(ErrorKind::EigFailed, "Jacobi iteration did not converge");
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double r = std::abs(apq);
                if (r == 0.0 || r < 1e-300) continue;
                const cplx phase = apq / r;  // e^{i phi}
                const double app = a(p, p).real(), aqq = a(q, q).real();
                const double tau = (aqq - app) / (2.0 * r);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cplx sp = s * std::conj(phase);  // s e^{-i phi}
                const cplx cp = c * std::conj(phase);  // c e^{-i phi}
                // A <- A G with G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on (p, q).
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - sp * akq;
                    a(k, q) = s * akp + cp * akq;
                }
                // A <- G^dagger A
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - std::conj(sp) * aqk;
                    a(q, k) = s * apk + std::conj(cp) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = app - t * r;
                a(q, q) = aqq + t * r;
                if (want_vectors) {
                    for (std::size_t k = 0; k < n; ++k) {
                        const cplx vkp = v(k, p), vkq = v(k, q);
                        v(k, p) = c * vkp - sp * vkq;
                        v(k, q) = s * vkp + cp * vkq;
                    }
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
    HermitianEigen out;
    out.values.reserve(n);
    for (std::size_t k : order) out.values.push_back(a(k, k).real());
    if (want_vectors) {
        out.vectors = ComplexMatrix(n);
        for (std::size_t col = 0; col < n; ++col) {
            for (std::size_t row = 0; row < n; ++row) out.vectors(row, col) = v(row, order[col]);
        }
    }
    return out;
}

inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix &m) {
    return hermitian_eigen(m, false).values;
}

/// Schatten 1-norm of a Hermitian matrix.
inline double trace_norm(const ComplexMatrix &m) {
    double s = 0.0;
    for (double l : hermitian_eigenvalues(m)) s += std::abs(l);
    return s;
}

/// Tr(M^power) for integer power >= 1 by repeated multiplication.
inline double trace_power(const ComplexMatrix &m, int power) {
    if (power < 1) throw Error(ErrorKind::Precondition, "trace_power needs power >= 1");
    if (power == 1) return m.trace().real();
    if (power == 2) {
        // Hermitian: Tr(M^2) = sum |m_ij|^2
        double s = 0.0;
        for (const auto &z : m.entries()) s += std::norm(z);
        return s;
    }
    ComplexMatrix acc = m;
    for (int k = 2; k < power; ++k) acc = acc * m;
    return trace_of_product(acc, m).real();
}

// ---------------------------------------------------------------------------
// Seeded sampling

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double normal() { return normal_(engine_); }
    cplx complex_normal() {
        const double re = normal();
        const double im = normal();
        return {re, im};
    }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
        return std::uniform_int_distribution<std::uint64_t>(lo, hi)(engine_);
    }
    bool coin() { return uniform_int(0, 1) == 1; }
    std::mt19937_64 &engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

inline void check_dims(std::span<const std::size_t> dims) {
    if (dims.empty()) throw Error(ErrorKind::DimensionMismatch, "at least one party required");
    double total = 1.0;
    for (auto d : dims) {
        if (d < 2) throw Error(ErrorKind::DimensionMismatch, "local dimensions must be at least 2");
        total *= static_cast<double>(d);
    }
    if (total > static_cast<double>(kMaxStateDim)) throw Error(ErrorKind::TooLarge, "state dimension exceeds dense limit");
}

/// Haar-random pure state: i.i.d. complex Gaussian amplitudes, normalized.
inline MultipartiteState random_pure_state(std::vector<std::size_t> dims, std::uint64_t seed) {
    check_dims(dims);
    Rng rng(seed);
    std::vector<cplx> amps(product_of(dims));
    for (auto &a : amps) a = rng.complex_normal();
    return MultipartiteState::from_amplitudes(std::move(amps), std::move(dims));
}

/// G G^dagger / Tr(G G^dagger) with a square complex Gaussian G.
inline MultipartiteState random_mixed_state(std::vector<std::size_t> dims, std::uint64_t seed) {
    check_dims(dims);
    Rng rng(seed);
    const std::size_t d = product_of(dims);
    ComplexMatrix g(d);
    for (auto &z : g.entries()) z = rng.complex_normal();
    ComplexMatrix rho = g * g.adjoint();
    const double tr = rho.trace().real();
    rho *= 1.0 / tr;
    rho.hermitize();
    return MultipartiteState(std::move(rho), std::move(dims));
}

/// Haar unitary via Gram-Schmidt on a complex Gaussian matrix. The R factor of
/// the implied QR has a positive diagonal, which fixes the phase ambiguity.
inline ComplexMatrix random_unitary(std::size_t d, Rng &rng) {
    std::vector<std::vector<cplx>> cols(d, std::vector<cplx>(d));
    for (auto &col : cols) {
        for (auto &z : col) z = rng.complex_normal();
    }
    for (std::size_t j = 0; j < d; ++j) {
        // two passes of modified Gram-Schmidt
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < j; ++k) {
                cplx proj = 0.0;
                for (std::size_t i = 0; i < d; ++i) proj += std::conj(cols[k][i]) * cols[j][i];
                for (std::size_t i = 0; i < d; ++i) cols[j][i] -= proj * cols[k][i];
            }
        }
        double nrm = 0.0;
        for (const auto &z : cols[j]) nrm += std::norm(z);
        nrm = std::sqrt(nrm);
        for (auto &z : cols[j]) z /= nrm;
    }
    ComplexMatrix u(d);
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t i = 0; i < d; ++i) u(i, j) = cols[j][i];
    }
    return u;
}

inline std::vector<ComplexMatrix> random_local_unitaries(std::span<const std::size_t> dims, std::uint64_t seed) {
    check_dims(dims);
    Rng rng(seed);
    std::vector<ComplexMatrix> out;
    out.reserve(dims.size());
    for (auto d : dims) out.push_back(random_unitary(d, rng));
    return out;
}

/// rho -> (U_k on party k) rho (U_k on party k)^dagger, without forming the
/// full tensor product.
inline ComplexMatrix apply_local_operator(const ComplexMatrix &rho, std::span<const std::size_t> dims,
                                          std::size_t party, const ComplexMatrix &u) {
    if (u.dim() != dims[party]) throw Error(ErrorKind::DimensionMismatch, "local operator has wrong size");
    const std::size_t n = rho.dim();
    const std::size_t stride = tensor_strides(dims)[party];
    const std::size_t d = dims[party];
    auto digit = [&](std::size_t idx) { return (idx / stride) % d; };

    // left multiplication on rows
    ComplexMatrix left(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t di = digit(i), base = i - di * stride;
        for (std::size_t a = 0; a < d; ++a) {
            const cplx uia = u(di, a);
            if (uia == cplx{}) continue;
            const std::size_t src = base + a * stride;
            for (std::size_t j = 0; j < n; ++j) left(i, j) += uia * rho(src, j);
        }
    }
    // right multiplication by U^dagger on columns
    ComplexMatrix out(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t dj = digit(j), base = j - dj * stride;
        for (std::size_t b = 0; b < d; ++b) {
            const cplx ujb = std::conj(u(dj, b));
            if (ujb == cplx{}) continue;
            const std::size_t src = base + b * stride;
            for (std::size_t i = 0; i < n; ++i) out(i, j) += left(i, src) * ujb;
        }
    }
    return out;
}

inline MultipartiteState apply_local_unitaries(const MultipartiteState &s, std::span<const ComplexMatrix> us) {
    if (us.size() != s.num_parties()) throw Error(ErrorKind::DimensionMismatch, "one unitary per party required");
    ComplexMatrix rho = s.rho();
    for (std::size_t k = 0; k < us.size(); ++k) rho = apply_local_operator(rho, s.dims(), k, us[k]);
    rho.hermitize();
    return MultipartiteState(std::move(rho), s.dims(), s.labels());
}

/// Tensor product of two states with concatenated party lists.
inline MultipartiteState tensor(const MultipartiteState &a, const MultipartiteState &b) {
    auto dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    auto rho = kron(a.rho(), b.rho());
    rho.hermitize();
    return MultipartiteState(std::move(rho), std::move(dims));
}

}  // namespace qph
