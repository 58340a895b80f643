#pragma once

// Sublevel-set filtration of the powerset complex and its Z/2 persistence.
//
// Every nonempty subset J of the n parties is a simplex of dimension |J|-1,
// born at F(J). The reduced flavour adds the empty simplex as a (-1)-cell;
// the relative flavour quotients out a fixed subcomplex K.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "qph/error.hpp"
#include "qph/functionals.hpp"
#include "qph/gf2.hpp"
#include "qph/linalg.hpp"

namespace qph {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// A downward-closed family of nonempty subsets, stored as a mask indicator.
class Subcomplex {
public:
    Subcomplex() = default;
    Subcomplex(std::size_t n, std::vector<bool> members) : n_(n), members_(std::move(members)) {
        if (members_.size() != (std::size_t{1} << n_)) {
            throw Error(ErrorKind::DimensionMismatch, "subcomplex indicator needs one entry per mask");
        }
        members_[0] = false;
        for (PartyMask j = 1; j < members_.size(); ++j) {
            if (!members_[j]) continue;
            for (int v : mask_members(j)) {
                const PartyMask face = j & ~(PartyMask{1} << v);
                if (face != 0 && !members_[face]) {
                    throw Error(ErrorKind::InvalidSubset, "relative subcomplex is not closed under faces");
                }
            }
        }
    }

    /// All nonempty subsets of `generator`.
    static Subcomplex generated_by(std::size_t n, PartyMask generator) {
        if (generator == 0 || (generator & ~full_mask(n))) {
            throw Error(ErrorKind::InvalidSubset, "subcomplex generator must be a nonempty subset of the parties");
        }
        std::vector<bool> members(std::size_t{1} << n, false);
        for (PartyMask sub = generator; sub != 0; sub = (sub - 1) & generator) members[sub] = true;
        return Subcomplex(n, std::move(members));
    }

    std::size_t num_parties() const { return n_; }
    bool contains(PartyMask j) const { return j != 0 && j < members_.size() && members_[j]; }

    /// Maximal simplices, ascending.
    std::vector<PartyMask> facets() const {
        std::vector<PartyMask> out;
        for (PartyMask j = 1; j < members_.size(); ++j) {
            if (!members_[j]) continue;
            bool maximal = true;
            for (std::size_t v = 0; v < n_ && maximal; ++v) {
                const PartyMask up = j | (PartyMask{1} << v);
                if (up != j && members_[up]) maximal = false;
            }
            if (maximal) out.push_back(j);
        }
        return out;
    }

private:
    std::size_t n_ = 0;
    std::vector<bool> members_;
};

enum class HomologyMode { Absolute, Reduced, Relative };

inline const char *to_string(HomologyMode m) {
    switch (m) {
        case HomologyMode::Absolute: return "absolute";
        case HomologyMode::Reduced: return "reduced";
        case HomologyMode::Relative: return "relative";
    }
    return "?";
}

struct FiltrationMode {
    HomologyMode kind = HomologyMode::Reduced;
    std::optional<Subcomplex> subcomplex;  // Relative only

    static FiltrationMode absolute() { return {HomologyMode::Absolute, std::nullopt}; }
    static FiltrationMode reduced() { return {HomologyMode::Reduced, std::nullopt}; }
    static FiltrationMode relative(Subcomplex k) { return {HomologyMode::Relative, std::move(k)}; }
    static FiltrationMode relative_to(std::size_t n, PartyMask generator) {
        return relative(Subcomplex::generated_by(n, generator));
    }

    bool excludes(PartyMask j) const { return kind == HomologyMode::Relative && subcomplex->contains(j); }
};

struct Cell {
    PartyMask simplex = 0;  // 0 is the empty (augmentation) cell
    int dim = 0;
    double value = 0.0;
};

class FilteredComplex {
public:
    FilteredComplex(std::size_t n, FiltrationMode mode, std::vector<Cell> cells, double q)
        : n_(n), mode_(std::move(mode)), cells_(std::move(cells)), q_(q) {
        epsilon_max_ = 0.0;
        for (const auto &c : cells_) epsilon_max_ = std::max(epsilon_max_, c.value);
        position_.assign(std::size_t{1} << n_, -1);
        for (std::size_t k = 0; k < cells_.size(); ++k) position_[cells_[k].simplex] = static_cast<long>(k);
    }

    std::size_t num_parties() const { return n_; }
    const FiltrationMode &mode() const { return mode_; }
    std::span<const Cell> cells() const { return cells_; }
    double epsilon_max() const { return epsilon_max_; }
    double q() const { return q_; }

    /// Filtration index of a simplex, or -1 when it is not a cell.
    long position(PartyMask j) const { return position_[j]; }

    /// Distinct filtration values, ascending.
    std::vector<double> filtration_values() const {
        std::vector<double> v;
        for (const auto &c : cells_) v.push_back(c.value);
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    }

private:
    std::size_t n_;
    FiltrationMode mode_;
    std::vector<Cell> cells_;
    std::vector<long> position_;
    double q_;
    double epsilon_max_;
};

/// Smallest monotone majorant: G(J) = max(F(J), max_v G(J \ v)). Equals F
/// bit-for-bit when F is monotone; absorbs sub-tolerance rounding otherwise.
inline std::vector<double> monotone_hull(const SubsetFunctional &f) {
    auto v = std::vector<double>(f.values().begin(), f.values().end());
    for (PartyMask j = 1; j < v.size(); ++j) {
        if (party_count(j) < 2) continue;
        for (int u : mask_members(j)) v[j] = std::max(v[j], v[j & ~(PartyMask{1} << u)]);
    }
    return v;
}

inline FilteredComplex build_filtration(const SubsetFunctional &f, FiltrationMode mode) {
    require_monotone(f);
    const std::size_t n = f.num_parties();
    if (mode.kind == HomologyMode::Relative) {
        if (!mode.subcomplex || mode.subcomplex->num_parties() != n) {
            throw Error(ErrorKind::Precondition, "relative mode needs a subcomplex on the same parties");
        }
    }
    const auto values = monotone_hull(f);
    std::vector<Cell> cells;
    cells.reserve(values.size());
    for (PartyMask j = 1; j < values.size(); ++j) {
        if (mode.excludes(j)) continue;
        cells.push_back({j, party_count(j) - 1, values[j]});
    }
    if (mode.kind == HomologyMode::Reduced) {
        double lowest = kInfinity;
        for (std::size_t v = 0; v < n; ++v) lowest = std::min(lowest, values[PartyMask{1} << v]);
        cells.push_back({0, -1, lowest});
    }
    std::sort(cells.begin(), cells.end(), [](const Cell &a, const Cell &b) {
        return std::tie(a.value, a.dim, a.simplex) < std::tie(b.value, b.dim, b.simplex);
    });
    FilteredComplex complex(n, std::move(mode), std::move(cells), f.q());
    for (std::size_t k = 0; k < complex.cells().size(); ++k) {
        const PartyMask j = complex.cells()[k].simplex;
        if (j == 0) continue;
        for (int v : mask_members(j)) {
            const PartyMask face = j & ~(PartyMask{1} << v);
            const long p = complex.position(face);
            if (p >= 0 && static_cast<std::size_t>(p) > k) {
                throw Error(ErrorKind::MonotonicityViolation, "a face follows its coface in the filtration order");
            }
        }
    }
    return complex;
}

// ---------------------------------------------------------------------------
// Barcodes

struct Interval {
    int dim = 0;
    double birth = 0.0;
    double death = kInfinity;
    PartyMask birth_simplex = 0;
    std::optional<PartyMask> death_simplex;
    bool zero_length = false;

    bool finite() const { return death_simplex.has_value(); }
    double length() const { return death - birth; }
    bool contains(double eps) const { return birth <= eps && eps < death; }
};

struct Barcode {
    std::vector<Interval> intervals;  // sorted by (dim, birth, death, birth simplex)
    HomologyMode mode = HomologyMode::Reduced;
    double q = 0.0;
    double epsilon_max = 0.0;

    std::vector<Interval> of_dim(int k) const {
        std::vector<Interval> out;
        for (const auto &iv : intervals) {
            if (iv.dim == k) out.push_back(iv);
        }
        return out;
    }

    /// Intervals of positive length.
    std::vector<Interval> nonzero() const {
        std::vector<Interval> out;
        for (const auto &iv : intervals) {
            if (!iv.zero_length) out.push_back(iv);
        }
        return out;
    }

    int max_dim() const {
        int k = -1;
        for (const auto &iv : intervals) k = std::max(k, iv.dim);
        return k;
    }

    std::size_t count_containing(int k, double eps) const {
        std::size_t c = 0;
        for (const auto &iv : intervals) {
            if (iv.dim == k && iv.contains(eps)) ++c;
        }
        return c;
    }
};

inline void sort_intervals(std::vector<Interval> &intervals) {
    std::sort(intervals.begin(), intervals.end(), [](const Interval &a, const Interval &b) {
        return std::tie(a.dim, a.birth, a.death, a.birth_simplex) < std::tie(b.dim, b.birth, b.death, b.birth_simplex);
    });
}

/// Standard column reduction of the Z/2 boundary matrix in filtration order.
inline Barcode compute_barcode(const FilteredComplex &complex) {
    const auto cells = complex.cells();
    const std::size_t m = cells.size();
    const auto &mode = complex.mode();

    std::vector<BitVector> columns;
    columns.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
        BitVector col(m);
        const PartyMask j = cells[k].simplex;
        if (j != 0) {
            if (party_count(j) == 1) {
                if (mode.kind == HomologyMode::Reduced) col.set(static_cast<std::size_t>(complex.position(0)));
            } else {
                for (int v : mask_members(j)) {
                    const long p = complex.position(j & ~(PartyMask{1} << v));
                    if (p >= 0) col.set(static_cast<std::size_t>(p));  // absent faces lie in K
                }
            }
        }
        columns.push_back(std::move(col));
    }

    std::vector<long> owner(m, -1);  // owner[row] = column whose pivot is row
    std::vector<bool> killed(m, false);
    std::vector<Interval> intervals;
    for (std::size_t k = 0; k < m; ++k) {
        auto &col = columns[k];
        long low = col.highest();
        while (low >= 0 && owner[static_cast<std::size_t>(low)] >= 0) {
            col ^= columns[static_cast<std::size_t>(owner[static_cast<std::size_t>(low)])];
            low = col.highest();
        }
        if (low < 0) continue;
        owner[static_cast<std::size_t>(low)] = static_cast<long>(k);
        killed[static_cast<std::size_t>(low)] = true;
        const Cell &born = cells[static_cast<std::size_t>(low)];
        const Cell &dies = cells[k];
        Interval iv;
        iv.dim = born.dim;
        iv.birth = born.value;
        iv.death = dies.value;
        iv.birth_simplex = born.simplex;
        iv.death_simplex = dies.simplex;
        iv.zero_length = (born.value == dies.value);
        intervals.push_back(iv);
    }
    for (std::size_t k = 0; k < m; ++k) {
        if (killed[k] || !columns[k].none()) continue;
        Interval iv;
        iv.dim = cells[k].dim;
        iv.birth = cells[k].value;
        iv.birth_simplex = cells[k].simplex;
        intervals.push_back(iv);
    }
    sort_intervals(intervals);
    return Barcode{std::move(intervals), mode.kind, complex.q(), complex.epsilon_max()};
}

/// Piecewise-constant Betti curve: value counts[i] on [points[i], points[i+1]),
/// zero before points[0]; the last value extends to +infinity.
struct BettiCurve {
    std::vector<double> points;
    std::vector<int> counts;

    int at(double eps) const {
        auto it = std::upper_bound(points.begin(), points.end(), eps);
        if (it == points.begin()) return 0;
        return counts[static_cast<std::size_t>(it - points.begin() - 1)];
    }
};

inline BettiCurve betti_curve(const Barcode &bc, int k) {
    std::vector<std::pair<double, int>> events;
    for (const auto &iv : bc.intervals) {
        if (iv.dim != k || iv.zero_length) continue;
        events.emplace_back(iv.birth, +1);
        if (iv.finite()) events.emplace_back(iv.death, -1);
    }
    std::sort(events.begin(), events.end());
    BettiCurve curve;
    int running = 0;
    for (std::size_t e = 0; e < events.size();) {
        const double x = events[e].first;
        while (e < events.size() && events[e].first == x) running += events[e++].second;
        if (!curve.counts.empty() && curve.counts.back() == running) continue;
        curve.points.push_back(x);
        curve.counts.push_back(running);
    }
    return curve;
}

/// Bars longer than `min_length` (infinite bars included), in barcode order.
inline std::vector<Interval> significant_intervals(const Barcode &bc, double min_length = 1e-9) {
    std::vector<Interval> out;
    for (const auto &iv : bc.intervals) {
        if (!iv.finite() || iv.length() > min_length) out.push_back(iv);
    }
    return out;
}

/// Largest endpoint difference under a greedy matching of significant bars
/// of equal dimension; infinity when the bars cannot be paired up.
inline double barcode_distance(const Barcode &a, const Barcode &b, double min_length = 1e-9) {
    const auto x = significant_intervals(a, min_length);
    const auto y = significant_intervals(b, min_length);
    if (x.size() != y.size()) return kInfinity;
    auto gap = [](const Interval &u, const Interval &v) {
        if (u.dim != v.dim || u.finite() != v.finite()) return kInfinity;
        double d = std::abs(u.birth - v.birth);
        if (u.finite()) d = std::max(d, std::abs(u.death - v.death));
        return d;
    };
    std::vector<bool> used(y.size(), false);
    double worst = 0.0;
    for (const auto &u : x) {
        std::size_t best = y.size();
        double best_gap = kInfinity;
        for (std::size_t k = 0; k < y.size(); ++k) {
            if (used[k]) continue;
            const double g = gap(u, y[k]);
            if (g < best_gap) {
                best_gap = g;
                best = k;
            }
        }
        if (best == y.size()) return kInfinity;
        used[best] = true;
        worst = std::max(worst, best_gap);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Rank oracle

inline constexpr std::size_t kOracleMaxParties = 6;

/// beta_k of G(eps) = dim C_k - rank d_k - rank d_{k+1}, by Gaussian
/// elimination on the complex present at eps. No persistence pairing involved.
inline std::size_t oracle_betti(const SubsetFunctional &f, double eps, int k, const FiltrationMode &mode) {
    const std::size_t n = f.num_parties();
    if (n > kOracleMaxParties) throw Error(ErrorKind::TooLarge, "rank oracle limited to 6 parties");
    if (mode.kind == HomologyMode::Relative && (!mode.subcomplex || mode.subcomplex->num_parties() != n)) {
        throw Error(ErrorKind::Precondition, "relative mode needs a subcomplex on the same parties");
    }
    const PartyMask all = f.all_parties();

    // A simplex is present when its value is below eps and all its facets are.
    std::vector<bool> present(std::size_t{all} + 1, false);
    for (PartyMask j = 1; j <= all; ++j) {
        bool ok = f(j) <= eps;
        if (party_count(j) > 1) {
            for (int v : mask_members(j)) ok = ok && present[j & ~(PartyMask{1} << v)];
        }
        present[j] = ok;
    }
    bool empty_cell = false;
    if (mode.kind == HomologyMode::Reduced) {
        double lowest = kInfinity;
        for (std::size_t v = 0; v < n; ++v) lowest = std::min(lowest, f(PartyMask{1} << v));
        empty_cell = lowest <= eps;
    }

    // Chain basis of dimension d, as simplex masks (0 for the empty cell).
    auto basis = [&](int d) {
        std::vector<PartyMask> out;
        if (d == -1) {
            if (empty_cell) out.push_back(0);
            return out;
        }
        for (PartyMask j = 1; j <= all; ++j) {
            if (present[j] && party_count(j) == d + 1 && !mode.excludes(j)) out.push_back(j);
        }
        return out;
    };
    // Rank of the boundary map from dimension d to d-1.
    auto boundary_rank = [&](int d) -> std::size_t {
        if (d < 0) return 0;
        const auto domain = basis(d);
        const auto codomain = basis(d - 1);
        if (domain.empty() || codomain.empty()) return 0;
        std::vector<BitVector> rows;
        for (PartyMask sigma : domain) {
            BitVector row(codomain.size());
            for (std::size_t r = 0; r < codomain.size(); ++r) {
                const PartyMask tau = codomain[r];
                const bool is_facet = (tau & sigma) == tau && party_count(sigma) == party_count(tau) + 1;
                if (is_facet) row.set(r);
            }
            rows.push_back(std::move(row));
        }
        return gf2_rank(std::move(rows));
    };

    const auto chains = basis(k).size();
    const auto rank_k = boundary_rank(k);
    const auto rank_k1 = boundary_rank(k + 1);
    return chains - rank_k - rank_k1;
}

// ---------------------------------------------------------------------------
// Sublevel sets by a top-down lattice walk

struct SublevelSet {
    std::vector<PartyMask> simplices;  // ascending
    std::size_t evaluations = 0;
};

/// {J : F(J) <= eps} for monotone F. Subsets are visited by decreasing size;
/// once F(K) <= eps every subset of K is admitted without evaluating it.
template <typename Fn>
SublevelSet complex_at(std::size_t n, Fn &&evaluate, double eps) {
    const PartyMask all = full_mask(n);
    std::vector<bool> admitted(std::size_t{all} + 1, false);
    SublevelSet out;
    for (int size = static_cast<int>(n); size >= 1; --size) {
        for (PartyMask j = 1; j <= all; ++j) {
            if (party_count(j) != size || admitted[j]) continue;
            ++out.evaluations;
            if (evaluate(j) <= eps) {
                for (PartyMask sub = j; sub != 0; sub = (sub - 1) & j) admitted[sub] = true;
            }
        }
    }
    for (PartyMask j = 1; j <= all; ++j) {
        if (admitted[j]) out.simplices.push_back(j);
    }
    return out;
}

inline SublevelSet complex_at(const SubsetFunctional &f, double eps) {
    return complex_at(f.num_parties(), [&](PartyMask j) { return f(j); }, eps);
}

}  // namespace qph
