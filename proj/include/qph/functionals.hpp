#pragma once

// Entropic and entanglement functionals of multipartite states, and the
// subset functional that drives the filtration.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qph/error.hpp"
#include "qph/linalg.hpp"

namespace qph {

/// Eigenvalues in [-kClampTolerance, 0) are treated as exact zeros.
inline constexpr double kClampTolerance = 1e-10;

/// For q < 1, lambda^q magnifies rounding noise in zero eigenvalues (1e-16
/// becomes 1e-8 at q = 1/2), so eigenvalues at or below the eigensolver
/// resolution count as zero there.
inline constexpr double kSubunitNoiseFloor = 1e-12;

inline double clamp_eigenvalue(double lambda) {
    if (lambda >= 0.0) return lambda;
    if (lambda >= -kClampTolerance) return 0.0;
    throw Error(ErrorKind::InvalidState, "density matrix has eigenvalue " + std::to_string(lambda));
}

/// S_q of a density matrix. q = 1 is the von Neumann entropy (natural log).
inline double tsallis_entropy(const ComplexMatrix &rho, double q) {
    if (!(q > 0.0)) throw Error(ErrorKind::Precondition, "Tsallis parameter q must be positive");
    if (q == 1.0) {
        double s = 0.0;
        for (double l : hermitian_eigenvalues(rho)) {
            const double p = clamp_eigenvalue(l);
            if (p > 0.0) s -= p * std::log(p);
        }
        return s;
    }
    double tr_pow;
    if (q >= 2.0 && q == std::floor(q) && q <= 64.0) {
        tr_pow = trace_power(rho, static_cast<int>(q));
    } else {
        tr_pow = 0.0;
        for (double l : hermitian_eigenvalues(rho)) {
            const double p = clamp_eigenvalue(l);
            if (p > (q < 1.0 ? kSubunitNoiseFloor : 0.0)) tr_pow += std::pow(p, q);
        }
    }
    return (tr_pow - 1.0) / (1.0 - q);
}

inline double tsallis_entropy(const MultipartiteState &s, PartyMask subset, double q) {
    if (subset == 0) throw Error(ErrorKind::EmptySubset, "entropy of the empty subset");
    check_mask_in_range(s, subset);
    return tsallis_entropy(partial_trace(s, subset), q);
}

/// S_q(J) for every subset J, indexed by mask; entry 0 is S_q(empty) = 0.
inline std::vector<double> entropy_table(const MultipartiteState &s, double q) {
    const PartyMask all = s.all_parties();
    std::vector<double> table(std::size_t{all} + 1, 0.0);
    for (PartyMask j = 1; j <= all; ++j) table[j] = tsallis_entropy(partial_trace(s, j), q);
    return table;
}

/// C_q(J) = sum_{v in J} S_q(v) - S_q(J).
inline double total_correlation(const MultipartiteState &s, PartyMask subset, double q) {
    if (subset == 0) throw Error(ErrorKind::EmptySubset, "total correlation of the empty subset");
    check_mask_in_range(s, subset);
    if (party_count(subset) == 1) return 0.0;
    double sum = 0.0;
    for (int v : mask_members(subset)) sum += tsallis_entropy(s, PartyMask{1} << v, q);
    return sum - tsallis_entropy(s, subset, q);
}

inline double interaction_information_from_entropies(std::span<const double> entropies) {
    double sum = 0.0;
    for (std::size_t j = 1; j < entropies.size(); ++j) {
        const double sign = (party_count(static_cast<PartyMask>(j)) % 2 == 1) ? 1.0 : -1.0;
        sum += sign * entropies[j];
    }
    return sum;
}

/// I_q = sum over nonempty J of (-1)^{|J|-1} S_q(J).
inline double interaction_information(const MultipartiteState &s, double q) {
    return interaction_information_from_entropies(entropy_table(s, q));
}

/// I(A:B|R) = S(AR) + S(BR) - S(R) - S(ABR) with parties ordered (A, B, R).
inline double conditional_mutual_information(const MultipartiteState &s, double q = 1.0) {
    if (s.num_parties() != 3) throw Error(ErrorKind::Precondition, "conditional mutual information needs 3 parties");
    constexpr PartyMask A = 1, B = 2, R = 4;
    return tsallis_entropy(s, A | R, q) + tsallis_entropy(s, B | R, q) - tsallis_entropy(s, R, q) -
           tsallis_entropy(s, A | B | R, q);
}

inline void require_qubits(const MultipartiteState &s, const char *what) {
    if (!s.all_qubits()) throw Error(ErrorKind::Precondition, std::string(what) + " needs every party to be a qubit");
}

/// tau_n = Tr(rho Y rho* Y) with Y = sigma_y^{(x)n}. Y maps |a> to a phase
/// times |a with all bits flipped>, so the product is evaluated entrywise.
inline double n_tangle_direct(const MultipartiteState &s) {
    require_qubits(s, "n-tangle");
    const std::size_t n = s.num_parties();
    const std::size_t d = s.rho().dim();
    const std::size_t flip = d - 1;
    // <a|Y|flip(a)> = prod_j (a_j == 0 ? -i : i) = i^{ones - zeros}
    const cplx powers_of_i[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    std::vector<cplx> phase(d);
    for (std::size_t a = 0; a < d; ++a) {
        const int ones = std::popcount(a);
        const int zeros = static_cast<int>(n) - ones;
        phase[a] = powers_of_i[static_cast<std::size_t>(((ones - zeros) % 4 + 4) % 4)];
    }
    const auto &rho = s.rho();
    cplx tau = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < d; ++b) {
            const cplx m_ab = phase[a] * std::conj(rho(a ^ flip, b ^ flip)) * phase[b ^ flip];
            tau += rho(b, a) * m_ab;
        }
    }
    if (std::abs(tau.imag()) > kClampTolerance) {
        throw Error(ErrorKind::InvalidState, "n-tangle has a non-negligible imaginary part");
    }
    return tau.real();
}

// ---------------------------------------------------------------------------
// Generalized Bloch vector

inline constexpr std::size_t kMaxBlochQubits = 8;

/// Coefficients Q_iota = Tr(rho sigma_iota) over the n-fold Pauli basis.
/// Index iota is read in base 4 with qubit 0 as the most significant digit.
class BlochVector {
public:
    BlochVector(std::size_t n, std::vector<double> coefficients) : n_(n), q_(std::move(coefficients)) {}

    std::size_t num_qubits() const { return n_; }
    std::span<const double> coefficients() const { return q_; }
    double operator[](std::size_t iota) const { return q_[iota]; }

    /// Pauli letter (0..3) acting on `qubit` in string `iota`.
    int letter(std::size_t iota, std::size_t qubit) const {
        return static_cast<int>((iota >> (2 * (n_ - 1 - qubit))) & 3u);
    }

    /// Qubits on which sigma_iota acts non-trivially.
    PartyMask support(std::size_t iota) const {
        PartyMask m = 0;
        for (std::size_t k = 0; k < n_; ++k) {
            if (letter(iota, k) != 0) m |= PartyMask{1} << k;
        }
        return m;
    }

    int weight(std::size_t iota) const { return party_count(support(iota)); }

    static std::size_t index_of(std::span<const int> letters) {
        std::size_t idx = 0;
        for (int l : letters) idx = (idx << 2) | static_cast<std::size_t>(l);
        return idx;
    }

private:
    std::size_t n_;
    std::vector<double> q_;
};

/// Pauli coefficients via one 4-point transform per qubit: O(4^n n).
inline BlochVector bloch_vector(const MultipartiteState &s) {
    require_qubits(s, "Bloch vector");
    const std::size_t n = s.num_parties();
    if (n > kMaxBlochQubits) throw Error(ErrorKind::TooLarge, "Bloch vector limited to 8 qubits");
    const std::size_t d = std::size_t{1} << n;
    const std::size_t total = d * d;
    const auto &rho = s.rho();

    // T[iota] with base-4 digit 2 r_j + c_j per qubit j.
    std::vector<cplx> t(total);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            std::size_t idx = 0;
            for (std::size_t j = 0; j < n; ++j) {
                const std::size_t shift = n - 1 - j;
                const std::size_t digit = 2 * ((r >> shift) & 1u) + ((c >> shift) & 1u);
                idx = (idx << 2) | digit;
            }
            t[idx] = rho(r, c);
        }
    }
    const cplx i{0.0, 1.0};
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t stride = std::size_t{1} << (2 * (n - 1 - j));
        for (std::size_t base = 0; base < total; ++base) {
            if ((base / stride) % 4 != 0) continue;
            const cplx x00 = t[base], x01 = t[base + stride], x10 = t[base + 2 * stride], x11 = t[base + 3 * stride];
            t[base] = x00 + x11;
            t[base + stride] = x01 + x10;
            t[base + 2 * stride] = i * x01 - i * x10;
            t[base + 3 * stride] = x00 - x11;
        }
    }
    std::vector<double> q(total);
    for (std::size_t k = 0; k < total; ++k) {
        if (std::abs(t[k].imag()) > kClampTolerance) {
            throw Error(ErrorKind::NotHermitian, "Pauli coefficient has a non-negligible imaginary part");
        }
        q[k] = t[k].real();
    }
    return BlochVector(n, std::move(q));
}

/// Q^2_(n) = 2^{-n} sum_iota (-1)^{|iota|} Q_iota^2.
inline double minkowski_length(const BlochVector &b) {
    double sum = 0.0;
    const auto q = b.coefficients();
    for (std::size_t k = 0; k < q.size(); ++k) sum += (b.weight(k) % 2 == 0 ? 1.0 : -1.0) * q[k] * q[k];
    return std::ldexp(sum, -static_cast<int>(b.num_qubits()));
}

/// S_2(J) = 1 - 2^{-|J|} sum over Pauli strings supported inside J.
inline double linear_entropy_via_bloch(const BlochVector &b, PartyMask subset) {
    if (subset == 0) throw Error(ErrorKind::EmptySubset, "linear entropy of the empty subset");
    if (subset & ~full_mask(b.num_qubits())) throw Error(ErrorKind::InvalidSubset, "subset out of range");
    double sum = 0.0;
    const auto q = b.coefficients();
    for (std::size_t k = 0; k < q.size(); ++k) {
        if ((b.support(k) & ~subset) == 0) sum += q[k] * q[k];
    }
    return 1.0 - std::ldexp(sum, -party_count(subset));
}

/// C_D^2 = 2 I_2.
inline double distributed_concurrence_squared(const MultipartiteState &s) { return 2.0 * interaction_information(s, 2.0); }

/// log || rho^{T_{complement of J}} ||_1.
inline double log_negativity(const MultipartiteState &s, PartyMask subset) {
    const PartyMask all = s.all_parties();
    if (subset == 0 || subset == all || (subset & ~all)) {
        throw Error(ErrorKind::InvalidSubset, "log-negativity needs a proper nonempty subset");
    }
    auto pt = partial_transpose(s, all & ~subset);
    pt.hermitize();
    return std::log(trace_norm(pt));
}

// ---------------------------------------------------------------------------
// Subset functionals

/// A real function on the nonempty subsets of n parties, evaluated eagerly
/// and immutable afterwards.
class SubsetFunctional {
public:
    SubsetFunctional(std::size_t n, std::vector<double> values, std::string name, double q = 0.0,
                     std::string fingerprint = {})
        : n_(n), values_(std::move(values)), name_(std::move(name)), q_(q), fingerprint_(std::move(fingerprint)) {
        if (n_ == 0 || n_ > 20) throw Error(ErrorKind::TooLarge, "subset functional needs 1..20 parties");
        if (values_.size() != (std::size_t{1} << n_)) {
            throw Error(ErrorKind::DimensionMismatch, "functional needs one value per subset mask");
        }
        values_[0] = 0.0;
    }

    template <typename Fn>
    static SubsetFunctional from_callable(std::size_t n, Fn &&fn, std::string name, double q = 0.0,
                                          std::string fingerprint = {}) {
        if (n == 0 || n > 20) throw Error(ErrorKind::TooLarge, "subset functional needs 1..20 parties");
        std::vector<double> values(std::size_t{1} << n, 0.0);
        for (std::size_t j = 1; j < values.size(); ++j) values[j] = fn(static_cast<PartyMask>(j));
        return SubsetFunctional(n, std::move(values), std::move(name), q, std::move(fingerprint));
    }

    std::size_t num_parties() const { return n_; }
    PartyMask all_parties() const { return full_mask(n_); }
    const std::string &name() const { return name_; }
    double q() const { return q_; }
    const std::string &fingerprint() const { return fingerprint_; }

    double operator()(PartyMask subset) const {
        if (subset == 0 || subset > all_parties()) throw Error(ErrorKind::InvalidSubset, "functional evaluated off its domain");
        return values_[subset];
    }

    /// Indexed by mask; entry 0 (the empty set) is 0.
    std::span<const double> values() const { return values_; }

    SubsetFunctional rescaled(double divisor) const {
        if (!(divisor > 0.0)) throw Error(ErrorKind::Precondition, "rescale divisor must be positive");
        auto v = values_;
        for (auto &x : v) x /= divisor;
        return SubsetFunctional(n_, std::move(v), name_, q_, fingerprint_);
    }

private:
    std::size_t n_;
    std::vector<double> values_;
    std::string name_;
    double q_;
    std::string fingerprint_;
};

/// FNV-1a over dims and matrix bytes, as 16 hex digits.
inline std::string state_fingerprint(const MultipartiteState &s) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](const void *data, std::size_t len) {
        const auto *p = static_cast<const unsigned char *>(data);
        for (std::size_t k = 0; k < len; ++k) {
            h ^= p[k];
            h *= 1099511628211ull;
        }
    };
    for (auto d : s.dims()) {
        const std::uint64_t dd = d;
        mix(&dd, sizeof dd);
    }
    const auto e = s.rho().entries();
    mix(e.data(), e.size() * sizeof(cplx));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// C_q(J) / rescale for every nonempty J.
inline SubsetFunctional make_total_correlation_functional(const MultipartiteState &s, double q, double rescale = 1.0) {
    if (!(rescale > 0.0)) throw Error(ErrorKind::Precondition, "rescale must be positive");
    const auto entropies = entropy_table(s, q);
    const std::size_t n = s.num_parties();
    std::vector<double> values(entropies.size(), 0.0);
    for (PartyMask j = 1; j < values.size(); ++j) {
        if (party_count(j) == 1) continue;  // exactly zero
        double sum = 0.0;
        for (int v : mask_members(j)) sum += entropies[PartyMask{1} << v];
        values[j] = (sum - entropies[j]) / rescale;
    }
    char name[64];
    std::snprintf(name, sizeof name, "C_q(q=%g)", q);
    return SubsetFunctional(n, std::move(values), name, q, state_fingerprint(s));
}

struct MonotonicityWitness {
    PartyMask face = 0;
    PartyMask coface = 0;
    double face_value = 0.0;
    double coface_value = 0.0;
};

inline constexpr double kMonotoneTolerance = 1e-9;

/// Largest F(J \ v) - F(J) over covering pairs (negative when strictly monotone).
inline double max_monotonicity_violation(const SubsetFunctional &f, MonotonicityWitness *witness = nullptr) {
    double worst = -std::numeric_limits<double>::infinity();
    const PartyMask all = f.all_parties();
    for (PartyMask j = 1; j <= all; ++j) {
        if (party_count(j) < 2) continue;
        for (int v : mask_members(j)) {
            const PartyMask face = j & ~(PartyMask{1} << v);
            const double gap = f(face) - f(j);
            if (gap > worst) {
                worst = gap;
                if (witness) *witness = {face, j, f(face), f(j)};
            }
        }
    }
    return worst;
}

inline std::optional<MonotonicityWitness> find_monotonicity_violation(const SubsetFunctional &f,
                                                                      double tol = kMonotoneTolerance) {
    MonotonicityWitness w;
    if (max_monotonicity_violation(f, &w) > tol) return w;
    return std::nullopt;
}

/// True when F(J \ v) <= F(J) + 1e-9 for every covering pair.
inline bool check_monotone(const SubsetFunctional &f) { return !find_monotonicity_violation(f).has_value(); }

inline std::string describe(const MonotonicityWitness &w) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "F(mask %u) = %.17g exceeds F(mask %u) = %.17g", w.face, w.face_value, w.coface,
                  w.coface_value);
    return buf;
}

inline void require_monotone(const SubsetFunctional &f) {
    if (auto w = find_monotonicity_violation(f)) throw Error(ErrorKind::MonotonicityViolation, describe(*w));
}

}  // namespace qph
