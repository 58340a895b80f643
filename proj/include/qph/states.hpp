#pragma once

// Named multipartite states and the JSON state-spec format.

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qph/error.hpp"
#include "qph/linalg.hpp"

namespace qph {

struct Graph {
    std::size_t n = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;

    std::vector<std::size_t> degrees() const {
        std::vector<std::size_t> deg(n, 0);
        for (auto [u, v] : edges) {
            ++deg[u];
            ++deg[v];
        }
        return deg;
    }

    bool all_degrees_odd() const {
        for (auto d : degrees()) {
            if (d % 2 == 0) return false;
        }
        return true;
    }

    static Graph complete(std::size_t n) {
        Graph g{n, {}};
        for (std::size_t u = 0; u < n; ++u) {
            for (std::size_t v = u + 1; v < n; ++v) g.edges.emplace_back(u, v);
        }
        return g;
    }

    static Graph star(std::size_t n) {
        Graph g{n, {}};
        for (std::size_t v = 1; v < n; ++v) g.edges.emplace_back(0, v);
        return g;
    }

    /// Erdos-Renyi G(n, 1/2).
    static Graph random(std::size_t n, Rng &rng) {
        Graph g{n, {}};
        for (std::size_t u = 0; u < n; ++u) {
            for (std::size_t v = u + 1; v < n; ++v) {
                if (rng.coin()) g.edges.emplace_back(u, v);
            }
        }
        return g;
    }
};

inline void validate_graph(const Graph &g) {
    if (g.n < 2) throw Error(ErrorKind::Precondition, "graph needs at least 2 vertices");
    if (g.n > 20) throw Error(ErrorKind::TooLarge, "graph has too many vertices");
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (auto [u, v] : g.edges) {
        if (u >= g.n || v >= g.n) throw Error(ErrorKind::Precondition, "edge endpoint out of range");
        if (u == v) throw Error(ErrorKind::Precondition, "graph has a self-loop");
        if (!seen.insert(std::minmax(u, v)).second) throw Error(ErrorKind::Precondition, "graph has a repeated edge");
    }
}

namespace detail {

inline int qubit_bit(std::size_t basis, std::size_t qubit, std::size_t n) {
    return static_cast<int>((basis >> (n - 1 - qubit)) & 1u);
}

/// Amplitudes of a product of GHZ factors, each factor on a list of qubits.
inline std::vector<cplx> ghz_network(std::size_t n, const std::vector<std::vector<std::size_t>> &groups) {
    std::vector<cplx> amps(std::size_t{1} << n);
    for (std::size_t x = 0; x < amps.size(); ++x) {
        double a = 1.0;
        for (const auto &g : groups) {
            const int first = qubit_bit(x, g.front(), n);
            for (std::size_t q : g) {
                if (qubit_bit(x, q, n) != first) a = 0.0;
            }
            a *= M_SQRT1_2;
        }
        amps[x] = a;
    }
    return amps;
}

inline std::size_t basis_index(const char *bits) {
    std::size_t x = 0;
    for (const char *c = bits; *c; ++c) x = (x << 1) | static_cast<std::size_t>(*c == '1');
    return x;
}

}  // namespace detail

/// (|0...0> + |1...1>) / sqrt(2) on n qubits.
inline MultipartiteState ghz(std::size_t n) {
    if (n < 2) throw Error(ErrorKind::Precondition, "GHZ state needs n >= 2");
    if (n > 20) throw Error(ErrorKind::TooLarge, "GHZ state too large");
    std::vector<cplx> amps(std::size_t{1} << n);
    amps.front() = M_SQRT1_2;
    amps.back() = M_SQRT1_2;
    return MultipartiteState::from_amplitudes(std::move(amps), std::vector<std::size_t>(n, 2));
}

/// Product of CZ gates over the edges applied to |+>^n. Each CZ contributes a
/// sign (-1)^{x_u x_v}, so the amplitude depends only on the edge-count parity.
inline MultipartiteState graph_state(const Graph &g) {
    validate_graph(g);
    const std::size_t n = g.n;
    std::vector<cplx> amps(std::size_t{1} << n);
    const double mag = std::pow(2.0, -0.5 * static_cast<double>(n));
    for (std::size_t x = 0; x < amps.size(); ++x) {
        unsigned parity = 0;
        for (auto [u, v] : g.edges) {
            parity ^= static_cast<unsigned>(detail::qubit_bit(x, u, n) & detail::qubit_bit(x, v, n));
        }
        amps[x] = parity ? -mag : mag;
    }
    return MultipartiteState::from_amplitudes(std::move(amps), std::vector<std::size_t>(n, 2));
}

/// 6-qubit state (1/t)|111111> + (1/t)|111100> + t|000010> + t|000001>, normalized.
inline MultipartiteState chi4(double t) {
    if (!(t > 0.0)) throw Error(ErrorKind::Precondition, "chi4 needs t > 0");
    std::vector<cplx> amps(64);
    amps[detail::basis_index("111111")] = 1.0 / t;
    amps[detail::basis_index("111100")] = 1.0 / t;
    amps[detail::basis_index("000010")] = t;
    amps[detail::basis_index("000001")] = t;
    return MultipartiteState::from_amplitudes(std::move(amps), std::vector<std::size_t>(6, 2));
}

/// 6-qubit state (sqrt2/t)|111111> + (1/t)|111000> + t(|000100> + |000010> + |000001>), normalized.
inline MultipartiteState chi5(double t) {
    if (!(t > 0.0)) throw Error(ErrorKind::Precondition, "chi5 needs t > 0");
    std::vector<cplx> amps(64);
    amps[detail::basis_index("111111")] = std::sqrt(2.0) / t;
    amps[detail::basis_index("111000")] = 1.0 / t;
    amps[detail::basis_index("000100")] = t;
    amps[detail::basis_index("000010")] = t;
    amps[detail::basis_index("000001")] = t;
    return MultipartiteState::from_amplitudes(std::move(amps), std::vector<std::size_t>(6, 2));
}

// Three parties of two qubits each. Qubit A_{i,j} sits at tensor position
// 2(i-1) + (j-1), so each party's qubits are adjacent and the pair forms a
// dimension-4 party with A_{i,1} as the more significant factor.

/// Bell pairs on (A11,A21), (A12,A31), (A22,A32).
inline MultipartiteState psi1() {
    auto amps = detail::ghz_network(6, {{0, 2}, {1, 4}, {3, 5}});
    return MultipartiteState::from_amplitudes(std::move(amps), {4, 4, 4});
}

/// GHZ triples on (A11,A21,A31) and (A12,A22,A32).
inline MultipartiteState psi2() {
    auto amps = detail::ghz_network(6, {{0, 2, 4}, {1, 3, 5}});
    return MultipartiteState::from_amplitudes(std::move(amps), {4, 4, 4});
}

// ---------------------------------------------------------------------------
// State-spec documents

struct StateSpecOptions {
    /// Seed used by random_* kinds that omit "seed".
    std::uint64_t default_seed = 0;
};

namespace detail {

using nlohmann::json;

[[noreturn]] inline void parse_fail(const std::string &path, const std::string &what) {
    throw Error(ErrorKind::ParseError, path + ": " + what);
}

inline void require_fields(const json &doc, const std::string &path, std::initializer_list<const char *> required,
                           std::initializer_list<const char *> optional = {}) {
    for (const char *f : required) {
        if (!doc.contains(f)) parse_fail(path, std::string("missing field \"") + f + "\"");
    }
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        bool known = it.key() == "kind";
        for (const char *f : required) known = known || it.key() == f;
        for (const char *f : optional) known = known || it.key() == f;
        if (!known) parse_fail(path, "unknown field \"" + it.key() + "\"");
    }
}

inline std::size_t get_count(const json &v, const std::string &path) {
    if (!v.is_number_integer() || v.get<long long>() < 0) parse_fail(path, "expected a nonnegative integer");
    return v.get<std::size_t>();
}

inline double get_number(const json &v, const std::string &path) {
    if (!v.is_number()) parse_fail(path, "expected a number");
    return v.get<double>();
}

inline cplx get_complex(const json &v, const std::string &path) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (!v.is_array() || v.size() != 2) parse_fail(path, "expected [re, im]");
    return {get_number(v[0], path + "[0]"), get_number(v[1], path + "[1]")};
}

inline std::vector<cplx> get_complex_list(const json &v, const std::string &path) {
    if (!v.is_array()) parse_fail(path, "expected a list of [re, im] pairs");
    std::vector<cplx> out;
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(get_complex(v[k], path + "[" + std::to_string(k) + "]"));
    return out;
}

inline std::vector<std::size_t> get_dims(const json &v, const std::string &path) {
    if (!v.is_array() || v.empty()) parse_fail(path, "expected a nonempty list of local dimensions");
    std::vector<std::size_t> dims;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const auto d = get_count(v[k], path + "[" + std::to_string(k) + "]");
        if (d < 2) parse_fail(path + "[" + std::to_string(k) + "]", "local dimension must be >= 2");
        dims.push_back(d);
    }
    if (dims.size() > 20) parse_fail(path, "too many parties");
    double total = 1.0;
    for (auto d : dims) total *= static_cast<double>(d);
    if (total > static_cast<double>(kMaxStateDim)) parse_fail(path, "total dimension exceeds the dense limit");
    return dims;
}

inline std::uint64_t get_seed(const json &doc, const std::string &path, const StateSpecOptions &opts) {
    if (!doc.contains("seed")) return opts.default_seed;
    const auto &v = doc["seed"];
    if (!v.is_number_integer()) parse_fail(path + ".seed", "expected an integer");
    return v.is_number_unsigned() ? v.get<std::uint64_t>() : static_cast<std::uint64_t>(v.get<long long>());
}

inline MultipartiteState parse_spec_at(const json &doc, const std::string &path, const StateSpecOptions &opts) {
    if (!doc.is_object()) parse_fail(path, "state spec must be an object");
    if (!doc.contains("kind") || !doc["kind"].is_string()) parse_fail(path, "missing string field \"kind\"");
    const std::string kind = doc["kind"].get<std::string>();

    try {
        if (kind == "ghz") {
            require_fields(doc, path, {"n"});
            return ghz(get_count(doc["n"], path + ".n"));
        }
        if (kind == "graph") {
            require_fields(doc, path, {"n", "edges"});
            Graph g;
            g.n = get_count(doc["n"], path + ".n");
            const auto &edges = doc["edges"];
            if (!edges.is_array()) parse_fail(path + ".edges", "expected a list of [i, j] pairs");
            for (std::size_t k = 0; k < edges.size(); ++k) {
                const std::string ep = path + ".edges[" + std::to_string(k) + "]";
                if (!edges[k].is_array() || edges[k].size() != 2) parse_fail(ep, "expected [i, j]");
                g.edges.emplace_back(get_count(edges[k][0], ep + "[0]"), get_count(edges[k][1], ep + "[1]"));
            }
            return graph_state(g);
        }
        if (kind == "product") {
            require_fields(doc, path, {"factors"});
            const auto &factors = doc["factors"];
            if (!factors.is_array() || factors.empty()) parse_fail(path + ".factors", "expected a nonempty list");
            std::optional<MultipartiteState> acc;
            for (std::size_t k = 0; k < factors.size(); ++k) {
                const std::string fp = path + ".factors[" + std::to_string(k) + "]";
                auto amps = get_complex_list(factors[k], fp);
                if (amps.size() < 2) parse_fail(fp, "factor needs at least 2 amplitudes");
                const std::size_t d = amps.size();
                auto f = MultipartiteState::from_amplitudes(std::move(amps), {d});
                acc = acc ? tensor(*acc, f) : f;
            }
            return *acc;
        }
        if (kind == "amplitudes") {
            require_fields(doc, path, {"dims", "values"});
            auto dims = get_dims(doc["dims"], path + ".dims");
            auto amps = get_complex_list(doc["values"], path + ".values");
            if (amps.size() != product_of(dims)) parse_fail(path + ".values", "length does not match product of dims");
            return MultipartiteState::from_amplitudes(std::move(amps), std::move(dims));
        }
        if (kind == "density") {
            require_fields(doc, path, {"dims", "matrix"});
            auto dims = get_dims(doc["dims"], path + ".dims");
            auto entries = get_complex_list(doc["matrix"], path + ".matrix");
            const std::size_t d = product_of(dims);
            if (entries.size() != d * d) parse_fail(path + ".matrix", "expected dim*dim row-major entries");
            ComplexMatrix rho(d, std::move(entries));
            if (!rho.is_hermitian(1e-10)) parse_fail(path + ".matrix", "matrix is not Hermitian");
            const double tr = rho.trace().real();
            if (!(tr > 0.0)) throw Error(ErrorKind::ZeroState, path + ".matrix: trace is not positive");
            rho *= 1.0 / tr;
            rho.hermitize();
            const auto evals = hermitian_eigenvalues(rho);
            if (evals.front() < -1e-10) parse_fail(path + ".matrix", "matrix is not positive semidefinite");
            return MultipartiteState(std::move(rho), std::move(dims));
        }
        if (kind == "chi4" || kind == "chi5") {
            require_fields(doc, path, {"t"});
            const double t = get_number(doc["t"], path + ".t");
            return kind == "chi4" ? chi4(t) : chi5(t);
        }
        if (kind == "psi1" || kind == "psi2") {
            require_fields(doc, path, {});
            return kind == "psi1" ? psi1() : psi2();
        }
        if (kind == "random_pure" || kind == "random_mixed") {
            require_fields(doc, path, {"dims"}, {"seed"});
            auto dims = get_dims(doc["dims"], path + ".dims");
            const auto seed = get_seed(doc, path, opts);
            return kind == "random_pure" ? random_pure_state(std::move(dims), seed)
                                         : random_mixed_state(std::move(dims), seed);
        }
        if (kind == "tensor") {
            require_fields(doc, path, {"factors"});
            const auto &factors = doc["factors"];
            if (!factors.is_array() || factors.empty()) parse_fail(path + ".factors", "expected a nonempty list");
            std::optional<MultipartiteState> acc;
            for (std::size_t k = 0; k < factors.size(); ++k) {
                auto f = parse_spec_at(factors[k], path + ".factors[" + std::to_string(k) + "]", opts);
                acc = acc ? tensor(*acc, f) : f;
            }
            if (acc->num_parties() > 20) parse_fail(path, "too many parties");
            return *acc;
        }
    } catch (const Error &e) {
        if (e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::ZeroState) throw;
        throw Error(e.kind(), path + ": " + e.what());
    }
    parse_fail(path + ".kind", "unknown kind \"" + kind + "\"");
}

}  // namespace detail

inline MultipartiteState parse_state_spec(const nlohmann::json &doc, const StateSpecOptions &opts = {}) {
    return detail::parse_spec_at(doc, "$", opts);
}

inline MultipartiteState parse_state_spec(const std::string &text, const StateSpecOptions &opts = {}) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw Error(ErrorKind::ParseError, std::string("$: invalid JSON: ") + e.what());
    }
    return parse_state_spec(doc, opts);
}

inline MultipartiteState parse_state_spec(const char *text, const StateSpecOptions &opts = {}) {
    return parse_state_spec(std::string(text), opts);
}

}  // namespace qph
