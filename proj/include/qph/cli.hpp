#pragma once

// The qph command line: barcode, summary and verify subcommands.
// run() takes argv and output streams so the whole interface is testable
// in-process.
//
// Exit codes: 0 ok, 1 identity violated, 2 parse error, 3 precondition,
// 4 numerical failure.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qph/document.hpp"
#include "qph/error.hpp"
#include "qph/functionals.hpp"
#include "qph/linalg.hpp"
#include "qph/persistence.hpp"
#include "qph/states.hpp"
#include "qph/summaries.hpp"

namespace qph::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kParseError = 2, kPrecondition = 3, kNumerical = 4 };

inline constexpr std::size_t kMaxCliParties = 10;

inline int exit_code_for(const Error &e) {
    if (e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::ZeroState) return kParseError;
    if (e.is_numerical()) return kNumerical;
    return kPrecondition;
}

inline std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::ParseError, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Inline JSON, or @path for a file.
inline MultipartiteState load_state(const std::string &arg, std::uint64_t seed) {
    const std::string text = (!arg.empty() && arg[0] == '@') ? read_file(arg.substr(1)) : arg;
    auto s = parse_state_spec(text, StateSpecOptions{seed});
    if (s.num_parties() > kMaxCliParties) {
        throw Error(ErrorKind::TooLarge, std::to_string(s.num_parties()) + " parties; the command line accepts at most 10");
    }
    return s;
}

/// Comma list of 0-based party indices or party labels.
inline PartyMask parse_party_list(const std::string &text, const MultipartiteState &s) {
    PartyMask mask = 0;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const auto b = tok.find_first_not_of(" \t");
        const auto e = tok.find_last_not_of(" \t");
        if (b == std::string::npos) throw Error(ErrorKind::ParseError, "empty entry in party list \"" + text + "\"");
        tok = tok.substr(b, e - b + 1);
        std::optional<std::size_t> idx;
        for (std::size_t k = 0; k < s.num_parties(); ++k) {
            if (s.labels()[k] == tok) idx = k;
        }
        if (!idx) {
            if (tok.find_first_not_of("0123456789") != std::string::npos) {
                throw Error(ErrorKind::ParseError, "unknown party \"" + tok + "\"");
            }
            idx = std::stoul(tok);
        }
        if (*idx >= s.num_parties()) throw Error(ErrorKind::InvalidSubset, "party index " + tok + " out of range");
        mask |= PartyMask{1} << *idx;
    }
    return mask;
}

inline std::vector<std::size_t> parse_dims_list(const std::string &text) {
    std::vector<std::size_t> dims;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty() || tok.find_first_not_of("0123456789 ") != std::string::npos) {
            throw Error(ErrorKind::ParseError, "--parties expects a comma list of local dimensions");
        }
        dims.push_back(std::stoul(tok));
    }
    check_dims(dims);
    return dims;
}

struct PipelineOptions {
    double q = 2.0;
    std::string mode = "reduced";
    std::string relative_to;
    double rescale = 1.0;
};

struct PipelineResult {
    FiltrationMode mode;
    std::optional<PartyMask> relative_to;
    Barcode barcode;
    SummaryReport report;
};

inline PipelineResult run_pipeline(const MultipartiteState &s, const PipelineOptions &o) {
    if (!(o.rescale > 0.0) || !std::isfinite(o.rescale)) throw Error(ErrorKind::Precondition, "--rescale must be positive");
    PipelineResult r;
    if (o.mode == "absolute") {
        r.mode = FiltrationMode::absolute();
    } else if (o.mode == "reduced") {
        r.mode = FiltrationMode::reduced();
    } else if (o.mode == "relative") {
        if (o.relative_to.empty()) throw Error(ErrorKind::Precondition, "relative mode needs --relative-to");
        r.relative_to = parse_party_list(o.relative_to, s);
        r.mode = FiltrationMode::relative_to(s.num_parties(), *r.relative_to);
    } else {
        throw Error(ErrorKind::ParseError, "--mode must be absolute, reduced or relative");
    }
    if (!o.relative_to.empty() && o.mode != "relative") {
        throw Error(ErrorKind::Precondition, "--relative-to only applies to relative mode");
    }
    const auto f = make_total_correlation_functional(s, o.q, o.rescale);
    r.barcode = compute_barcode(build_filtration(f, r.mode));
    r.report = summarize(s, f, r.barcode, r.mode, o.rescale);
    return r;
}

inline void write_output(const std::string &path, const std::string &text, std::ostream &out) {
    if (path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::Precondition, "cannot write " + path);
    f << text;
}

// ---------------------------------------------------------------------------
// verify suites

struct TrialSetup {
    nlohmann::json spec;
    double q = 1.0;
};

struct SuiteOutcome {
    double max_residual = 0.0;
    std::optional<double> max_value;  // suites with a sign condition
    std::string value_label;
    bool failed = false;
    std::string failure;
};

inline constexpr double kSuiteTolerance = 1e-8;

inline std::string fmt_g(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

inline std::vector<std::size_t> draw_dims(Rng &rng, std::size_t lo, std::size_t hi) {
    const std::size_t n = rng.uniform_int(lo, hi);
    std::vector<std::size_t> dims(n);
    for (auto &d : dims) d = rng.coin() ? 3 : 2;
    return dims;
}

inline nlohmann::json random_spec(bool pure, const std::vector<std::size_t> &dims, std::uint64_t seed) {
    return {{"kind", pure ? "random_pure" : "random_mixed"}, {"dims", dims}, {"seed", seed}};
}

/// One trial: returns {residual, value}; value is only used by sign-checked suites.
struct TrialResult {
    double residual = 0.0;
    double value = 0.0;
    bool ok = true;
    std::string note;
};

inline int cmd_verify(const std::string &which, int trials, std::uint64_t seed, const std::string &parties,
                      std::ostream &out, std::ostream &err) {
    if (trials < 1) throw Error(ErrorKind::Precondition, "--trials must be at least 1");
    std::optional<std::vector<std::size_t>> fixed;
    if (!parties.empty()) fixed = parse_dims_list(parties);

    auto dims_or = [&](Rng &rng, std::size_t lo, std::size_t hi) { return fixed ? *fixed : draw_dims(rng, lo, hi); };
    auto need_parties = [&](std::size_t n, const char *what) {
        if (fixed && fixed->size() != n) throw Error(ErrorKind::Precondition, std::string(what) + " needs " + std::to_string(n) + " parties");
    };

    std::function<TrialResult(std::uint64_t, TrialSetup &)> trial;
    std::string value_label;
    bool sign_checked = false;
    double tolerance = kSuiteTolerance;

    if (which == "thm1") {
        trial = [&](std::uint64_t ts, TrialSetup &t) {
            Rng rng(ts);
            const auto dims = dims_or(rng, 3, 5);
            const double qs[] = {1.0, 1.5, 2.0};
            t.q = qs[rng.uniform_int(0, 2)];
            t.spec = random_spec(rng.coin(), dims, ts);
            const auto c = verify_thm1(parse_state_spec(t.spec), t.q);
            return TrialResult{c.residual, c.iec, c.residual <= kSuiteTolerance, ""};
        };
    } else if (which == "thm2") {
        if (fixed) {
            for (auto d : *fixed) {
                if (d != 2) throw Error(ErrorKind::Precondition, "thm2 needs qubits");
            }
            if (fixed->size() % 2) throw Error(ErrorKind::Precondition, "thm2 needs an even number of qubits");
        }
        trial = [&](std::uint64_t ts, TrialSetup &t) {
            t.q = 2.0;
            t.spec = random_spec(true, fixed ? *fixed : std::vector<std::size_t>{2, 2, 2, 2}, ts);
            const auto c = verify_thm2(parse_state_spec(t.spec));
            return TrialResult{c.max_pairwise, c.n_tangle, c.max_pairwise <= kSuiteTolerance, ""};
        };
    } else if (which == "thm3") {
        need_parties(3, "thm3");
        value_label = "max relative IEC";
        sign_checked = true;
        trial = [&](std::uint64_t ts, TrialSetup &t) {
            t.spec = random_spec(false, fixed ? *fixed : std::vector<std::size_t>{2, 2, 2}, ts);
            const auto c = verify_thm3(parse_state_spec(t.spec));
            return TrialResult{c.residual, c.relative_iec, c.residual <= kSuiteTolerance && c.non_positive,
                               c.non_positive ? "" : "relative IEC is positive"};
        };
    } else if (which == "corollary") {
        need_parties(2, "corollary");
        value_label = "min relative IEC";
        sign_checked = true;
        trial = [&](std::uint64_t ts, TrialSetup &t) {
            Rng rng(ts);
            const auto dims = fixed ? *fixed : draw_dims(rng, 2, 2);
            t.spec = random_spec(rng.coin(), dims, ts);
            const auto c = verify_corollary_bipartite(parse_state_spec(t.spec));
            return TrialResult{c.residual, c.relative_iec, c.residual <= kSuiteTolerance && c.non_negative,
                               c.non_negative ? "" : "relative IEC is negative"};
        };
    } else if (which == "monotonicity") {
        value_label = "max violation";
        tolerance = kMonotoneTolerance;
        trial = [&](std::uint64_t ts, TrialSetup &t) {
            Rng rng(ts);
            const auto dims = dims_or(rng, 2, 4);
            const double qs[] = {1.0, 1.5, 2.0, 3.0};
            t.q = qs[rng.uniform_int(0, 3)];
            t.spec = random_spec(rng.coin(), dims, ts);
            const auto f = make_total_correlation_functional(parse_state_spec(t.spec), t.q);
            MonotonicityWitness w;
            const double v = max_monotonicity_violation(f, &w);
            const double r = std::max(v, 0.0);
            return TrialResult{r, v, r <= kMonotoneTolerance, r <= kMonotoneTolerance ? "" : describe(w)};
        };
    } else if (which == "lu-invariance") {
        tolerance = 1e-9;
        trial = [&](std::uint64_t ts, TrialSetup &t) {
            Rng rng(ts);
            const auto dims = dims_or(rng, 2, 4);
            t.q = rng.coin() ? 2.0 : 1.0;
            t.spec = random_spec(rng.coin(), dims, ts);
            const auto s = parse_state_spec(t.spec);
            const auto us = random_local_unitaries(s.dims(), ts ^ 0x9e3779b97f4a7c15ULL);
            const auto s2 = apply_local_unitaries(s, us);
            const auto mode = FiltrationMode::reduced();
            const auto a = compute_barcode(build_filtration(make_total_correlation_functional(s, t.q), mode));
            const auto b = compute_barcode(build_filtration(make_total_correlation_functional(s2, t.q), mode));
            const double d = barcode_distance(a, b);
            return TrialResult{d, 0.0, d <= 1e-9, ""};
        };
    } else if (which == "oracle") {
        tolerance = 0.0;
        trial = [&](std::uint64_t ts, TrialSetup &t) {
            Rng rng(ts);
            const auto dims = dims_or(rng, 2, 5);
            if (dims.size() > kOracleMaxParties) throw Error(ErrorKind::TooLarge, "oracle suite limited to 6 parties");
            const double qs[] = {1.0, 2.0};
            t.q = qs[rng.uniform_int(0, 1)];
            t.spec = random_spec(rng.coin(), dims, ts);
            const auto f = make_total_correlation_functional(parse_state_spec(t.spec), t.q);
            const PartyMask all = f.all_parties();
            const PartyMask gen = static_cast<PartyMask>(rng.uniform_int(1, all - 1));
            const FiltrationMode modes[] = {FiltrationMode::absolute(), FiltrationMode::reduced(),
                                            FiltrationMode::relative_to(f.num_parties(), gen)};
            std::size_t mismatches = 0;
            for (const auto &mode : modes) {
                const auto cx = build_filtration(f, mode);
                const auto bc = compute_barcode(cx);
                auto values = cx.filtration_values();
                std::vector<double> eps;
                for (int k = 0; k < 20; ++k) {
                    eps.push_back(k % 2 == 0 ? values[rng.uniform_int(0, values.size() - 1)]
                                             : rng.uniform(-0.1, cx.epsilon_max() + 0.1));
                }
                for (double e : eps) {
                    for (int k = -1; k < static_cast<int>(f.num_parties()); ++k) {
                        if (bc.count_containing(k, e) != oracle_betti(f, e, k, mode)) ++mismatches;
                    }
                }
            }
            return TrialResult{static_cast<double>(mismatches), 0.0, mismatches == 0,
                               mismatches ? std::to_string(mismatches) + " Betti mismatches" : ""};
        };
    } else {
        throw Error(ErrorKind::ParseError, "unknown suite \"" + which + "\"");
    }

    SuiteOutcome o;
    std::optional<double> extreme;
    for (int i = 0; i < trials; ++i) {
        const std::uint64_t ts = seed + static_cast<std::uint64_t>(i);
        TrialSetup setup;
        const auto r = trial(ts, setup);
        o.max_residual = std::max(o.max_residual, r.residual);
        if (sign_checked) {
            if (!extreme) extreme = r.value;
            else extreme = (which == "corollary") ? std::min(*extreme, r.value) : std::max(*extreme, r.value);
        } else if (which == "monotonicity") {
            extreme = extreme ? std::max(*extreme, r.value) : r.value;
        }
        if (!r.ok && !o.failed) {
            o.failed = true;
            std::ostringstream msg;
            msg << "violation at trial " << i << " (seed " << ts << ", q " << setup.q << "): state " << setup.spec.dump();
            if (!r.note.empty()) msg << ": " << r.note;
            msg << " (residual " << fmt_g(r.residual) << ")";
            o.failure = msg.str();
        }
    }

    out << which << ": " << trials << " trials, seed " << seed << ", max residual " << fmt_g(o.max_residual)
        << " (tolerance " << fmt_g(tolerance) << ")";
    if (extreme && !value_label.empty()) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.3e", *extreme);
        out << ", " << value_label << " " << buf;
    }
    out << "\n";
    if (o.failed) {
        err << o.failure << "\n";
        out << "FAIL\n";
        return kVerifyFailed;
    }
    out << "ok\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// summary table

inline std::string format_row(const std::string &name, const std::string &value) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-40s %s\n", name.c_str(), value.c_str());
    return buf;
}

inline std::string format_value(double x) {
    char buf[40];
    if (x == 0.0) x = 0.0;
    std::snprintf(buf, sizeof buf, "%.10f", x);
    return buf;
}

inline std::string summary_table(const PipelineResult &r) {
    const auto &rep = r.report;
    std::string s;
    s += format_row("quantity", "value");
    s += format_row("mode", to_string(rep.mode));
    s += format_row("q", format_value(rep.q));
    s += format_row("rescale", format_value(rep.rescale));
    s += format_row("epsilon_max", format_value(rep.epsilon_max));
    s += format_row("iec", format_value(rep.iec));
    s += format_row("closed_form_iec", format_value(rep.closed_form_iec));
    s += format_row("interaction_information", format_value(rep.interaction_information));
    s += format_row("n_tangle", rep.n_tangle ? format_value(*rep.n_tangle) : "n/a");
    s += format_row("minkowski_length", rep.minkowski_length ? format_value(*rep.minkowski_length) : "n/a");
    for (std::size_t k = 0; k < rep.integrated_betti.size(); ++k) {
        s += format_row("integrated_betti[" + std::to_string(k) + "]", format_value(rep.integrated_betti[k]));
    }
    s += format_row("total_persistence", format_value(rep.total_persistence));
    for (const auto &[name, v] : rep.residuals) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.3e", v);
        s += format_row("residual " + name, buf);
    }
    return s;
}

// ---------------------------------------------------------------------------
// entry point

inline int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Persistent homology of multipartite quantum correlations"};
    app.name("qph");
    app.require_subcommand(1);

    std::string state_arg, mode = "reduced", relative_to, json_path, svg_path;
    double q = 2.0, rescale = 1.0, min_length = 0.0;
    std::uint64_t seed = 0;

    auto add_state_flags = [&](CLI::App *cmd) {
        cmd->add_option("--state", state_arg, "state spec as inline JSON or @file")->required();
        cmd->add_option("--q", q, "Tsallis index")->capture_default_str();
        cmd->add_option("--mode", mode, "absolute, reduced or relative")->capture_default_str();
        cmd->add_option("--relative-to", relative_to, "comma list of party indices or labels");
        cmd->add_option("--rescale", rescale, "divide the functional by this factor")->capture_default_str();
        cmd->add_option("--seed", seed, "seed for random_* specs without their own")->capture_default_str();
    };

    auto *barcode = app.add_subcommand("barcode", "compute a barcode and write JSON and/or SVG");
    add_state_flags(barcode);
    barcode->add_option("--min-length", min_length, "drop finite bars shorter than this from the output")
        ->capture_default_str();
    barcode->add_option("--json", json_path, "JSON output path, - for stdout");
    barcode->add_option("--svg", svg_path, "SVG output path, - for stdout");

    auto *summary = app.add_subcommand("summary", "print summary quantities as a table");
    add_state_flags(summary);

    std::string which, parties;
    int trials = 50;
    std::uint64_t verify_seed = 0;
    auto *verify = app.add_subcommand("verify", "run a seeded identity suite");
    verify->add_option("which", which, "thm1|thm2|thm3|corollary|monotonicity|lu-invariance|oracle")->required();
    verify->add_option("--trials", trials, "number of trials")->capture_default_str();
    verify->add_option("--seed", verify_seed, "base seed; trial i uses seed + i")->capture_default_str();
    verify->add_option("--parties", parties, "comma list of local dimensions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError &e) {
        app.exit(e, out, err);
        return kParseError;
    }

    try {
        if (verify->parsed()) return cmd_verify(which, trials, verify_seed, parties, out, err);

        const auto s = load_state(state_arg, seed);
        const auto r = run_pipeline(s, PipelineOptions{q, mode, relative_to, rescale});
        if (summary->parsed()) {
            out << summary_table(r);
            return kOk;
        }
        if (!(min_length >= 0.0)) throw Error(ErrorKind::Precondition, "--min-length must be nonnegative");
        const auto doc = make_document(r.barcode, r.report, r.relative_to, rescale, min_length);
        if (json_path.empty() && svg_path.empty()) json_path = "-";
        if (!json_path.empty()) write_output(json_path, serialize(doc), out);
        if (!svg_path.empty()) write_output(svg_path, render_svg(doc), out);
        return kOk;
    } catch (const Error &e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kPrecondition;
    }
}

}  // namespace qph::cli
