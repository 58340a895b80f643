#pragma once

// JSON barcode documents and SVG barcode plots.
//
// Numbers are written with 17 significant digits and keys in a fixed order,
// so serialize(parse(serialize(doc))) reproduces the same bytes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "qph/error.hpp"
#include "qph/linalg.hpp"
#include "qph/persistence.hpp"
#include "qph/states.hpp"
#include "qph/summaries.hpp"

namespace qph {

struct DocInterval {
    int dim = 0;
    double birth = 0.0;
    std::optional<double> death;  // nullopt = infinite
    std::vector<int> birth_simplex;
    std::optional<std::vector<int>> death_simplex;
    bool zero_length = false;

    friend bool operator==(const DocInterval &, const DocInterval &) = default;
};

struct DocSummaries {
    double iec = 0.0;
    double closed_form_iec = 0.0;
    double interaction_information = 0.0;
    std::vector<double> integrated_betti;
    double total_persistence = 0.0;
    std::optional<double> n_tangle;
    std::optional<double> minkowski_length;

    friend bool operator==(const DocSummaries &, const DocSummaries &) = default;
};

struct BarcodeDocument {
    std::string schema_version = "1";
    double q = 2.0;
    std::string mode = "reduced";
    std::optional<std::vector<int>> relative_to;
    double rescale = 1.0;
    double epsilon_max = 0.0;
    std::vector<DocInterval> intervals;
    DocSummaries summaries;

    friend bool operator==(const BarcodeDocument &, const BarcodeDocument &) = default;
};

/// Builds the document. Bars shorter than `min_length` are dropped from the
/// interval list (infinite bars are always kept); summaries use every bar.
inline BarcodeDocument make_document(const Barcode &bc, const SummaryReport &report,
                                     std::optional<PartyMask> relative_to, double rescale, double min_length = 0.0) {
    BarcodeDocument doc;
    doc.q = bc.q;
    doc.mode = to_string(bc.mode);
    if (relative_to) doc.relative_to = mask_members(*relative_to);
    doc.rescale = rescale;
    doc.epsilon_max = bc.epsilon_max;
    for (const auto &iv : bc.intervals) {
        if (iv.finite() && iv.length() < min_length) continue;
        DocInterval d;
        d.dim = iv.dim;
        d.birth = iv.birth;
        if (iv.finite()) {
            d.death = iv.death;
            d.death_simplex = mask_members(*iv.death_simplex);
        }
        d.birth_simplex = mask_members(iv.birth_simplex);
        d.zero_length = iv.zero_length;
        doc.intervals.push_back(std::move(d));
    }
    doc.summaries.iec = report.iec;
    doc.summaries.closed_form_iec = report.closed_form_iec;
    doc.summaries.interaction_information = report.interaction_information;
    doc.summaries.integrated_betti = report.integrated_betti;
    doc.summaries.total_persistence = report.total_persistence;
    doc.summaries.n_tangle = report.n_tangle;
    doc.summaries.minkowski_length = report.minkowski_length;
    return doc;
}

namespace detail {

inline std::string format_number(double x) {
    if (!std::isfinite(x)) throw Error(ErrorKind::Precondition, "document numbers must be finite");
    if (x == 0.0) x = 0.0;  // drop the sign of -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string format_optional(const std::optional<double> &x) { return x ? format_number(*x) : "null"; }

inline std::string format_int_list(const std::vector<int> &v) {
    std::string s = "[";
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) s += ", ";
        s += std::to_string(v[k]);
    }
    return s + "]";
}

inline std::string format_number_list(const std::vector<double> &v) {
    std::string s = "[";
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) s += ", ";
        s += format_number(v[k]);
    }
    return s + "]";
}

}  // namespace detail

inline std::string serialize(const BarcodeDocument &doc) {
    using detail::format_number;
    std::string s = "{\n";
    s += "  \"schema_version\": \"" + doc.schema_version + "\",\n";
    s += "  \"q\": " + format_number(doc.q) + ",\n";
    s += "  \"mode\": \"" + doc.mode + "\",\n";
    s += "  \"relative_to\": " + (doc.relative_to ? detail::format_int_list(*doc.relative_to) : std::string("null")) + ",\n";
    s += "  \"rescale\": " + format_number(doc.rescale) + ",\n";
    s += "  \"epsilon_max\": " + format_number(doc.epsilon_max) + ",\n";
    s += "  \"intervals\": [";
    for (std::size_t k = 0; k < doc.intervals.size(); ++k) {
        const auto &iv = doc.intervals[k];
        s += k ? ",\n    " : "\n    ";
        s += "{\"dim\": " + std::to_string(iv.dim);
        s += ", \"birth\": " + format_number(iv.birth);
        s += ", \"death\": " + detail::format_optional(iv.death);
        s += ", \"birth_simplex\": " + detail::format_int_list(iv.birth_simplex);
        s += ", \"death_simplex\": " + (iv.death_simplex ? detail::format_int_list(*iv.death_simplex) : std::string("null"));
        s += std::string(", \"zero_length\": ") + (iv.zero_length ? "true" : "false") + "}";
    }
    s += doc.intervals.empty() ? "],\n" : "\n  ],\n";
    const auto &sm = doc.summaries;
    s += "  \"summaries\": {\n";
    s += "    \"iec\": " + format_number(sm.iec) + ",\n";
    s += "    \"closed_form_iec\": " + format_number(sm.closed_form_iec) + ",\n";
    s += "    \"interaction_information\": " + format_number(sm.interaction_information) + ",\n";
    s += "    \"integrated_betti\": " + detail::format_number_list(sm.integrated_betti) + ",\n";
    s += "    \"total_persistence\": " + format_number(sm.total_persistence) + ",\n";
    s += "    \"n_tangle\": " + detail::format_optional(sm.n_tangle) + ",\n";
    s += "    \"minkowski_length\": " + detail::format_optional(sm.minkowski_length) + "\n";
    s += "  }\n}\n";
    return s;
}

namespace detail {

using nlohmann::json;

inline void expect_keys(const json &obj, const std::string &path, std::initializer_list<const char *> keys) {
    if (!obj.is_object()) parse_fail(path, "expected an object");
    for (const char *k : keys) {
        if (!obj.contains(k)) parse_fail(path, std::string("missing field \"") + k + "\"");
    }
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char *k : keys) known = known || it.key() == k;
        if (!known) parse_fail(path, "unknown field \"" + it.key() + "\"");
    }
}

inline std::optional<double> get_optional_number(const json &v, const std::string &path) {
    if (v.is_null()) return std::nullopt;
    return get_number(v, path);
}

inline std::vector<int> get_int_list(const json &v, const std::string &path) {
    if (!v.is_array()) parse_fail(path, "expected a list of integers");
    std::vector<int> out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (!v[k].is_number_integer()) parse_fail(path + "[" + std::to_string(k) + "]", "expected an integer");
        out.push_back(v[k].get<int>());
    }
    return out;
}

}  // namespace detail

inline BarcodeDocument parse_document(const std::string &text) {
    using namespace detail;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw Error(ErrorKind::ParseError, std::string("$: invalid JSON: ") + e.what());
    }
    expect_keys(j, "$",
                {"schema_version", "q", "mode", "relative_to", "rescale", "epsilon_max", "intervals", "summaries"});
    BarcodeDocument doc;
    if (!j["schema_version"].is_string() || j["schema_version"] != "1") parse_fail("$.schema_version", "expected \"1\"");
    doc.q = get_number(j["q"], "$.q");
    if (!j["mode"].is_string()) parse_fail("$.mode", "expected a string");
    doc.mode = j["mode"].get<std::string>();
    if (doc.mode != "absolute" && doc.mode != "reduced" && doc.mode != "relative") {
        parse_fail("$.mode", "expected absolute, reduced or relative");
    }
    if (!j["relative_to"].is_null()) doc.relative_to = get_int_list(j["relative_to"], "$.relative_to");
    doc.rescale = get_number(j["rescale"], "$.rescale");
    doc.epsilon_max = get_number(j["epsilon_max"], "$.epsilon_max");
    const auto &ivs = j["intervals"];
    if (!ivs.is_array()) parse_fail("$.intervals", "expected a list");
    for (std::size_t k = 0; k < ivs.size(); ++k) {
        const std::string p = "$.intervals[" + std::to_string(k) + "]";
        expect_keys(ivs[k], p, {"dim", "birth", "death", "birth_simplex", "death_simplex", "zero_length"});
        DocInterval iv;
        if (!ivs[k]["dim"].is_number_integer()) parse_fail(p + ".dim", "expected an integer");
        iv.dim = ivs[k]["dim"].get<int>();
        iv.birth = get_number(ivs[k]["birth"], p + ".birth");
        iv.death = get_optional_number(ivs[k]["death"], p + ".death");
        iv.birth_simplex = get_int_list(ivs[k]["birth_simplex"], p + ".birth_simplex");
        if (!ivs[k]["death_simplex"].is_null()) iv.death_simplex = get_int_list(ivs[k]["death_simplex"], p + ".death_simplex");
        if (!ivs[k]["zero_length"].is_boolean()) parse_fail(p + ".zero_length", "expected a boolean");
        iv.zero_length = ivs[k]["zero_length"].get<bool>();
        doc.intervals.push_back(std::move(iv));
    }
    const auto &sm = j["summaries"];
    expect_keys(sm, "$.summaries",
                {"iec", "closed_form_iec", "interaction_information", "integrated_betti", "total_persistence", "n_tangle",
                 "minkowski_length"});
    doc.summaries.iec = get_number(sm["iec"], "$.summaries.iec");
    doc.summaries.closed_form_iec = get_number(sm["closed_form_iec"], "$.summaries.closed_form_iec");
    doc.summaries.interaction_information =
        get_number(sm["interaction_information"], "$.summaries.interaction_information");
    if (!sm["integrated_betti"].is_array()) parse_fail("$.summaries.integrated_betti", "expected a list");
    for (std::size_t k = 0; k < sm["integrated_betti"].size(); ++k) {
        doc.summaries.integrated_betti.push_back(
            get_number(sm["integrated_betti"][k], "$.summaries.integrated_betti[" + std::to_string(k) + "]"));
    }
    doc.summaries.total_persistence = get_number(sm["total_persistence"], "$.summaries.total_persistence");
    doc.summaries.n_tangle = get_optional_number(sm["n_tangle"], "$.summaries.n_tangle");
    doc.summaries.minkowski_length = get_optional_number(sm["minkowski_length"], "$.summaries.minkowski_length");
    return doc;
}

// ---------------------------------------------------------------------------
// SVG

namespace detail {

inline std::string fmt(const char *pattern, double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, pattern, x);
    return buf;
}

}  // namespace detail

/// Stacked horizontal bars grouped by dimension; infinite bars run to the
/// right margin and end in an arrowhead. Zero-length bars are not drawn.
/// Width 800, height 20 * (drawn bars) + 80.
inline std::string render_svg(const BarcodeDocument &doc) {
    constexpr double width = 800.0, left = 60.0, right = 760.0, top = 20.0, row = 20.0, bar_h = 12.0;
    const char *palette[] = {"#8c8c8c", "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#e377c2"};

    std::vector<DocInterval> bars;
    for (const auto &iv : doc.intervals) {
        if (!iv.zero_length) bars.push_back(iv);
    }
    std::stable_sort(bars.begin(), bars.end(), [](const DocInterval &a, const DocInterval &b) {
        const double da = a.death.value_or(INFINITY), db = b.death.value_or(INFINITY);
        if (a.dim != b.dim) return a.dim < b.dim;
        if (a.birth != b.birth) return a.birth < b.birth;
        return da < db;
    });

    std::set<double> ticks;
    double lo = 0.0, hi = doc.epsilon_max;
    for (const auto &b : bars) {
        ticks.insert(b.birth);
        lo = std::min(lo, b.birth);
        if (b.death) {
            ticks.insert(*b.death);
            hi = std::max(hi, *b.death);
        }
    }
    if (!(hi > lo)) hi = lo + 1.0;
    auto x_of = [&](double v) { return left + (right - left) * (v - lo) / (hi - lo); };

    const double height = row * static_cast<double>(bars.size()) + 80.0;
    const double axis_y = top + row * static_cast<double>(bars.size()) + 20.0;
    using detail::fmt;
    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fmt("%.0f", width) + "\" height=\"" +
         fmt("%.0f", height) + "\" viewBox=\"0 0 " + fmt("%.0f", width) + " " + fmt("%.0f", height) + "\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"" + fmt("%.0f", width) + "\" height=\"" + fmt("%.0f", height) +
         "\" fill=\"white\"/>\n";

    int last_dim = -2;
    for (std::size_t k = 0; k < bars.size(); ++k) {
        const auto &b = bars[k];
        const double y = top + row * static_cast<double>(k);
        const char *color = palette[static_cast<std::size_t>(b.dim + 1) % 8];
        if (b.dim != last_dim) {
            s += "<text x=\"8\" y=\"" + fmt("%.2f", y + bar_h - 2.0) + "\" font-family=\"sans-serif\" font-size=\"11\">H" +
                 std::to_string(b.dim) + "</text>\n";
            last_dim = b.dim;
        }
        const double x0 = x_of(b.birth);
        if (b.death) {
            const double w = std::max(x_of(*b.death) - x0, 1.0);
            s += "<rect x=\"" + fmt("%.2f", x0) + "\" y=\"" + fmt("%.2f", y) + "\" width=\"" + fmt("%.2f", w) +
                 "\" height=\"" + fmt("%.2f", bar_h) + "\" fill=\"" + color + "\"/>\n";
        } else {
            const double tip = right + 25.0;
            s += "<rect x=\"" + fmt("%.2f", x0) + "\" y=\"" + fmt("%.2f", y) + "\" width=\"" +
                 fmt("%.2f", tip - 8.0 - x0) + "\" height=\"" + fmt("%.2f", bar_h) + "\" fill=\"" + color + "\"/>\n";
            s += "<polygon points=\"" + fmt("%.2f", tip - 8.0) + "," + fmt("%.2f", y - 3.0) + " " + fmt("%.2f", tip) + "," +
                 fmt("%.2f", y + bar_h / 2.0) + " " + fmt("%.2f", tip - 8.0) + "," + fmt("%.2f", y + bar_h + 3.0) +
                 "\" fill=\"" + color + "\"/>\n";
        }
    }

    s += "<line x1=\"" + fmt("%.2f", left) + "\" y1=\"" + fmt("%.2f", axis_y) + "\" x2=\"" + fmt("%.2f", right) +
         "\" y2=\"" + fmt("%.2f", axis_y) + "\" stroke=\"black\"/>\n";
    for (double t : ticks) {
        const double x = x_of(t);
        s += "<line x1=\"" + fmt("%.2f", x) + "\" y1=\"" + fmt("%.2f", axis_y) + "\" x2=\"" + fmt("%.2f", x) +
             "\" y2=\"" + fmt("%.2f", axis_y + 5.0) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + fmt("%.2f", x) + "\" y=\"" + fmt("%.2f", axis_y + 18.0) +
             "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">" + fmt("%.6g", t) + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

}  // namespace qph
