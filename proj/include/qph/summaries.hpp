#pragma once

// Topological summaries of barcodes and the closed-form identities they obey.
// Identities are reported as residuals; callers choose the tolerance.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qph/error.hpp"
#include "qph/functionals.hpp"
#include "qph/linalg.hpp"
#include "qph/persistence.hpp"

namespace qph {

/// Integral over [0, upto] of beta_k: sum of |[b, d) n [0, upto]| over dim-k bars.
inline double integrated_betti(const Barcode &bc, int k, double upto) {
    double sum = 0.0;
    for (const auto &iv : bc.intervals) {
        if (iv.dim != k) continue;
        const double lo = std::max(iv.birth, 0.0);
        const double hi = std::min(iv.death, upto);
        if (hi > lo) sum += hi - lo;
    }
    return sum;
}

inline double total_persistence(const Barcode &bc, double upto) {
    double sum = 0.0;
    for (int k = 0; k <= bc.max_dim(); ++k) sum += integrated_betti(bc, k, upto);
    return sum;
}

/// sum_k (-1)^k B_k(upto), including the (-1)-dimensional cell of the reduced complex.
inline double integrated_euler_characteristic(const Barcode &bc, double upto) {
    double sum = 0.0;
    for (int k = -1; k <= bc.max_dim(); ++k) {
        const double b = integrated_betti(bc, k, upto);
        sum += (k % 2 == 0) ? b : -b;
    }
    return sum;
}

inline bool has_infinite_bar(const Barcode &bc) {
    return std::any_of(bc.intervals.begin(), bc.intervals.end(), [](const Interval &iv) { return !iv.finite(); });
}

/// IEC at infinity; Betti curves vanish past epsilon_max when every bar is finite.
inline double iec_at_infinity(const Barcode &bc) {
    if (has_infinite_bar(bc)) {
        throw Error(ErrorKind::InfiniteBar, "IEC at infinity diverges on a barcode with infinite bars");
    }
    return integrated_euler_characteristic(bc, bc.epsilon_max);
}

/// Bar-by-bar sum of (-1)^k (d - b).
inline double barcode_alternating_sum(const Barcode &bc) {
    double sum = 0.0;
    for (const auto &iv : bc.intervals) {
        if (!iv.finite()) throw Error(ErrorKind::InfiniteBar, "alternating sum needs finite bars");
        const double len = iv.death - iv.birth;
        sum += (iv.dim % 2 == 0) ? len : -len;
    }
    return sum;
}

/// sum over nonempty J of (-1)^{|J|} F(J).
inline double closed_form_iec(const SubsetFunctional &f) {
    double sum = 0.0;
    const auto v = f.values();
    for (PartyMask j = 1; j < v.size(); ++j) sum += (party_count(j) % 2 == 0) ? v[j] : -v[j];
    return sum;
}

/// Same sum restricted to simplices outside the subcomplex.
inline double relative_closed_form_iec(const SubsetFunctional &f, const Subcomplex &k) {
    double sum = 0.0;
    const auto v = f.values();
    for (PartyMask j = 1; j < v.size(); ++j) {
        if (k.contains(j)) continue;
        sum += (party_count(j) % 2 == 0) ? v[j] : -v[j];
    }
    return sum;
}

struct RelativeIec {
    double barcode_route = 0.0;
    double closed_form = 0.0;
    double residual() const { return std::abs(barcode_route - closed_form); }
};

/// IEC relative to the subcomplex of all subsets of `generator`.
inline RelativeIec relative_iec(const SubsetFunctional &f, PartyMask generator) {
    if (generator == 0 || generator == f.all_parties() || (generator & ~f.all_parties())) {
        throw Error(ErrorKind::InvalidSubset, "relative IEC needs a proper nonempty subset");
    }
    auto k = Subcomplex::generated_by(f.num_parties(), generator);
    const auto bc = compute_barcode(build_filtration(f, FiltrationMode::relative(k)));
    return {iec_at_infinity(bc), relative_closed_form_iec(f, k)};
}

inline double reduced_iec(const SubsetFunctional &f) {
    return iec_at_infinity(compute_barcode(build_filtration(f, FiltrationMode::reduced())));
}

// ---------------------------------------------------------------------------
// Identity checks

/// Reduced IEC of the C_q complex against I_q.
struct Thm1Check {
    double iec = 0.0;
    double closed_form = 0.0;
    double interaction_information = 0.0;
    double residual = 0.0;  // max pairwise difference
};

inline Thm1Check verify_thm1(const MultipartiteState &s, double q) {
    const auto f = make_total_correlation_functional(s, q);
    Thm1Check c;
    c.iec = reduced_iec(f);
    c.closed_form = closed_form_iec(f);
    c.interaction_information = interaction_information(s, q);
    c.residual = std::max({std::abs(c.iec - c.interaction_information), std::abs(c.iec - c.closed_form),
                           std::abs(c.closed_form - c.interaction_information)});
    return c;
}

/// For an even number of qubits: IEC (q = 2) = I_2 = Minkowski length = n-tangle.
struct Thm2Check {
    double iec = 0.0;
    double closed_form = 0.0;
    double interaction_information = 0.0;
    double minkowski_length = 0.0;
    double n_tangle = 0.0;
    double iec_vs_interaction = 0.0;
    double interaction_vs_minkowski = 0.0;
    double minkowski_vs_tangle = 0.0;
    double max_pairwise = 0.0;
};

inline Thm2Check verify_thm2(const MultipartiteState &s) {
    require_qubits(s, "n-tangle identity");
    if (s.num_parties() % 2 != 0) throw Error(ErrorKind::Precondition, "n-tangle identity needs an even number of qubits");
    const auto f = make_total_correlation_functional(s, 2.0);
    Thm2Check c;
    c.iec = reduced_iec(f);
    c.closed_form = closed_form_iec(f);
    c.interaction_information = interaction_information(s, 2.0);
    c.minkowski_length = minkowski_length(bloch_vector(s));
    c.n_tangle = n_tangle_direct(s);
    c.iec_vs_interaction = std::abs(c.iec - c.interaction_information);
    c.interaction_vs_minkowski = std::abs(c.interaction_information - c.minkowski_length);
    c.minkowski_vs_tangle = std::abs(c.minkowski_length - c.n_tangle);
    const double routes[] = {c.iec, c.closed_form, c.interaction_information, c.minkowski_length, c.n_tangle};
    for (double a : routes) {
        for (double b : routes) c.max_pairwise = std::max(c.max_pairwise, std::abs(a - b));
    }
    return c;
}

/// Relative IEC of (A, B, R) with respect to the {A, B} subcomplex against -I(A:B|R), q -> 1.
struct Thm3Check {
    double relative_iec = 0.0;
    double closed_form = 0.0;
    double conditional_mutual_information = 0.0;
    double residual = 0.0;
    bool non_positive = false;  // relative_iec <= 1e-10
};

inline constexpr double kSignTolerance = 1e-10;

inline Thm3Check verify_thm3(const MultipartiteState &s) {
    if (s.num_parties() != 3) throw Error(ErrorKind::Precondition, "relative IEC identity needs 3 parties");
    const auto f = make_total_correlation_functional(s, 1.0);
    const auto rel = relative_iec(f, 0b011);
    Thm3Check c;
    c.relative_iec = rel.barcode_route;
    c.closed_form = rel.closed_form;
    c.conditional_mutual_information = conditional_mutual_information(s, 1.0);
    c.residual = std::max(std::abs(c.relative_iec + c.conditional_mutual_information), rel.residual());
    c.non_positive = c.relative_iec <= kSignTolerance;
    return c;
}

/// Two parties, relative to {A}: relative IEC = reduced IEC = I(A:B) >= 0, q -> 1.
struct CorollaryCheck {
    double relative_iec = 0.0;
    double reduced_iec = 0.0;
    double mutual_information = 0.0;
    double residual = 0.0;
    bool non_negative = false;
};

inline CorollaryCheck verify_corollary_bipartite(const MultipartiteState &s) {
    if (s.num_parties() != 2) throw Error(ErrorKind::Precondition, "bipartite relative identity needs 2 parties");
    const auto f = make_total_correlation_functional(s, 1.0);
    const auto rel = relative_iec(f, 0b01);
    CorollaryCheck c;
    c.relative_iec = rel.barcode_route;
    c.reduced_iec = reduced_iec(f);
    c.mutual_information = tsallis_entropy(s, 0b01, 1.0) + tsallis_entropy(s, 0b10, 1.0) - tsallis_entropy(s, 0b11, 1.0);
    c.residual = std::max({std::abs(c.relative_iec - c.mutual_information), std::abs(c.reduced_iec - c.mutual_information),
                           rel.residual()});
    c.non_negative = c.relative_iec >= -kSignTolerance;
    return c;
}

// ---------------------------------------------------------------------------
// Per-state report

struct SummaryReport {
    HomologyMode mode = HomologyMode::Reduced;
    double q = 2.0;
    double rescale = 1.0;
    double epsilon_max = 0.0;
    std::vector<double> integrated_betti;  // index k = dimension 0..n-1
    double total_persistence = 0.0;
    double iec = 0.0;              // at epsilon_max
    double closed_form_iec = 0.0;  // mode-matched closed form
    double interaction_information = 0.0;
    std::optional<double> minkowski_length;
    std::optional<double> n_tangle;
    std::vector<std::pair<std::string, double>> residuals;
};

inline SummaryReport summarize(const MultipartiteState &s, const SubsetFunctional &f, const Barcode &bc,
                               const FiltrationMode &mode, double rescale) {
    SummaryReport r;
    r.mode = mode.kind;
    r.q = f.q();
    r.rescale = rescale;
    r.epsilon_max = bc.epsilon_max;
    for (std::size_t k = 0; k < s.num_parties(); ++k) {
        r.integrated_betti.push_back(integrated_betti(bc, static_cast<int>(k), bc.epsilon_max));
    }
    r.total_persistence = total_persistence(bc, bc.epsilon_max);
    r.iec = integrated_euler_characteristic(bc, bc.epsilon_max);
    switch (mode.kind) {
        case HomologyMode::Reduced: r.closed_form_iec = closed_form_iec(f); break;
        case HomologyMode::Absolute: r.closed_form_iec = bc.epsilon_max + closed_form_iec(f); break;
        case HomologyMode::Relative: r.closed_form_iec = relative_closed_form_iec(f, *mode.subcomplex); break;
    }
    r.interaction_information = interaction_information(s, f.q());
    r.residuals.emplace_back("iec_vs_closed_form", std::abs(r.iec - r.closed_form_iec));
    if (mode.kind == HomologyMode::Reduced) {
        r.residuals.emplace_back("iec_vs_interaction_information", std::abs(r.iec - r.interaction_information / rescale));
    }
    if (s.all_qubits() && s.num_parties() <= kMaxBlochQubits) {
        r.minkowski_length = minkowski_length(bloch_vector(s));
        if (s.num_parties() % 2 == 0) {
            r.n_tangle = n_tangle_direct(s);
            r.residuals.emplace_back("minkowski_vs_n_tangle", std::abs(*r.minkowski_length - *r.n_tangle));
            if (mode.kind == HomologyMode::Reduced && f.q() == 2.0) {
                r.residuals.emplace_back("iec_vs_n_tangle", std::abs(r.iec - *r.n_tangle / rescale));
            }
        }
    }
    return r;
}

}  // namespace qph
