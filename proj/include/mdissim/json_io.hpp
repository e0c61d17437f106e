#pragma once

// JSON file formats. Rationals are strings "p/q" (integers without "/1");
// keys are comma-separated strictly increasing leaf indices.
//
//   distance matrix   {"n": 4, "entries": {"1,2": "2", "1,3": "3", ...}}
//   tensor            {"n": 4, "m": 3, "entries": {"1,2,3": "4", ...}}
//   pairing point     {"n": 4, "entries": {"1,2;3,4": "5", ...}}

#include "mdissim/dissim.hpp"
#include "mdissim/dissim_tensor.hpp"
#include "mdissim/distance_matrix.hpp"
#include "mdissim/puiseux.hpp"
#include "mdissim/verdict.hpp"

#include <json.hpp>

#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdissim {

using ojson = nlohmann::ordered_json;

class format_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string join_indices(std::span<const int> idx, char sep = ',') {
    std::string out;
    for (std::size_t t = 0; t < idx.size(); ++t) {
        if (t) out += sep;
        out += std::to_string(idx[t]);
    }
    return out;
}

inline std::vector<int> split_indices(const std::string& key, char sep = ',') {
    std::vector<int> out;
    std::stringstream in(key);
    std::string part;
    while (std::getline(in, part, sep)) {
        if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
            throw format_error("malformed index key '" + key + "'");
        out.push_back(std::stoi(part));
    }
    return out;
}

inline Rational rational_from_json(const nlohmann::json& v, const std::string& where) {
    try {
        if (v.is_string()) return parse_rational(v.get<std::string>());
        if (v.is_number_integer()) return Rational(std::to_string(v.get<long long>()));
    } catch (const std::invalid_argument& e) {
        throw format_error(where + ": " + e.what());
    }
    throw format_error(where + ": value must be a \"p/q\" string or an integer");
}

inline int size_field(const nlohmann::json& j, const char* name, int lo) {
    if (!j.contains(name) || !j[name].is_number_integer()) throw format_error(std::string("missing integer field '") + name + "'");
    int v = j[name].get<int>();
    if (v < lo) throw format_error(std::string("field '") + name + "' must be at least " + std::to_string(lo));
    return v;
}

inline const nlohmann::json& entries_field(const nlohmann::json& j) {
    if (!j.is_object()) throw format_error("expected a JSON object");
    if (!j.contains("entries") || !j["entries"].is_object()) throw format_error("missing object field 'entries'");
    return j["entries"];
}

template <class Set>
void fill_entries(const nlohmann::json& entries, int n, std::size_t arity, std::size_t expected, Set&& set) {
    std::set<std::vector<int>> seen;
    for (const auto& [key, value] : entries.items()) {
        std::vector<int> idx = split_indices(key);
        if (idx.size() != arity) throw format_error("key '" + key + "' needs " + std::to_string(arity) + " indices");
        if (!is_strictly_increasing(idx) || idx.front() < 1 || idx.back() > n)
            throw format_error("key '" + key + "' must be strictly increasing indices in [1," + std::to_string(n) + "]");
        if (!seen.insert(idx).second) throw format_error("duplicate key '" + key + "'");
        set(idx, rational_from_json(value, "entry '" + key + "'"));
    }
    if (seen.size() != expected)
        throw format_error("expected " + std::to_string(expected) + " entries, found " + std::to_string(seen.size()));
}

inline nlohmann::json parse_text(const std::string& text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw format_error(std::string("invalid JSON: ") + e.what());
    }
}

}  // namespace detail

inline ojson to_json(const DistanceMatrix& d) {
    ojson entries = ojson::object();
    for_each_subset(d.size(), 2, [&](const Subset& p) { entries[detail::join_indices(p)] = to_string(d(p[0], p[1])); });
    return ojson{{"n", d.size()}, {"entries", std::move(entries)}};
}

inline ojson to_json(const DissimTensor& w) {
    ojson entries = ojson::object();
    for_each_subset(w.size(), w.order(),
                    [&](const Subset& s) { entries[detail::join_indices(s)] = to_string(w.at_rank(subset_rank(s))); });
    return ojson{{"n", w.size()}, {"m", w.order()}, {"entries", std::move(entries)}};
}

inline ojson to_json(const PiPoint& p) {
    ojson entries = ojson::object();
    for_each_subset(p.size(), 4, [&](const Subset& q) {
        for (int s = 0; s < 6; ++s) {
            auto pr = PiPoint::slot_pairs(q, s);
            std::string key = std::to_string(pr[0]) + "," + std::to_string(pr[1]) + ";" + std::to_string(pr[2]) + "," +
                              std::to_string(pr[3]);
            entries[key] = to_string(p.quadruple(q)[static_cast<std::size_t>(s)]);
        }
    });
    return ojson{{"n", p.size()}, {"entries", std::move(entries)}};
}

inline ojson to_json(const Witness& w) {
    ojson out = ojson::object();
    if (!w.fixed.empty()) out["R"] = w.fixed;
    out["indices"] = w.indices;
    ojson values = ojson::array();
    for (const auto& v : w.values) values.push_back(to_string(v));
    out["values"] = std::move(values);
    return out;
}

inline ojson to_json(const Verdict& v) {
    ojson out{{"pass", v.pass}};
    out["witness"] = v.witness ? to_json(*v.witness) : ojson(nullptr);
    if (!v.note.empty()) out["note"] = v.note;
    return out;
}

inline DistanceMatrix distance_matrix_from_json(const nlohmann::json& j) {
    const auto& entries = detail::entries_field(j);
    int n = detail::size_field(j, "n", 2);
    DistanceMatrix d(n);
    detail::fill_entries(entries, n, 2, static_cast<std::size_t>(binomial(n, 2)),
                         [&](const std::vector<int>& idx, const Rational& v) { d.set(idx[0], idx[1], v); });
    return d;
}

inline DissimTensor tensor_from_json(const nlohmann::json& j) {
    const auto& entries = detail::entries_field(j);
    int n = detail::size_field(j, "n", 2);
    int m = detail::size_field(j, "m", 2);
    if (m > n) throw format_error("tensor order m exceeds n");
    DissimTensor w(n, m);
    detail::fill_entries(entries, n, static_cast<std::size_t>(m), static_cast<std::size_t>(binomial(n, m)),
                         [&](const std::vector<int>& idx, const Rational& v) { w.set(idx, v); });
    return w;
}

inline PiPoint pi_point_from_json(const nlohmann::json& j) {
    const auto& entries = detail::entries_field(j);
    int n = detail::size_field(j, "n", 4);
    PiPoint p(n);
    std::set<std::string> seen;
    for (const auto& [key, value] : entries.items()) {
        auto semi = key.find(';');
        if (semi == std::string::npos) throw format_error("pairing key '" + key + "' lacks ';'");
        auto a = detail::split_indices(key.substr(0, semi));
        auto b = detail::split_indices(key.substr(semi + 1));
        if (a.size() != 2 || b.size() != 2 || a[0] >= a[1] || b[0] >= b[1])
            throw format_error("pairing key '" + key + "' must be 'i,j;k,l' with i<j and k<l");
        if (!seen.insert(key).second) throw format_error("duplicate key '" + key + "'");
        try {
            p.set(a[0], a[1], b[0], b[1], detail::rational_from_json(value, "entry '" + key + "'"));
        } catch (const std::invalid_argument& e) {
            throw format_error("pairing key '" + key + "': " + e.what());
        }
    }
    if (seen.size() != p.dimension())
        throw format_error("expected " + std::to_string(p.dimension()) + " entries, found " + std::to_string(seen.size()));
    return p;
}

// ---------------------------------------------------------------------------
// Certificates: polynomials are arrays of [exponent, coefficient] pairs.

inline ojson to_json(const PuiseuxPoly& p) {
    ojson out = ojson::array();
    for (const auto& t : p.terms()) out.push_back(ojson::array({to_string(t.exponent), to_string(t.coefficient)}));
    return out;
}

inline PuiseuxPoly puiseux_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw format_error("polynomial must be an array of [exponent, coefficient] pairs");
    std::vector<PuiseuxTerm> terms;
    for (const auto& t : j) {
        if (!t.is_array() || t.size() != 2) throw format_error("polynomial term must be [exponent, coefficient]");
        terms.push_back({detail::rational_from_json(t[0], "exponent"), detail::rational_from_json(t[1], "coefficient")});
    }
    return PuiseuxPoly::from_terms(terms);
}

inline ojson to_json(const Certificate3& c) {
    ojson edges = ojson::array();
    for (const auto& e : c.edges)
        edges.push_back(ojson{{"clade", e.clade}, {"height", to_string(e.height)}, {"label", e.label}});
    ojson x = ojson::array();
    for (const auto& p : c.x) x.push_back(to_json(p));
    ojson matrix = ojson::array();
    for (const auto& row : c.matrix) {
        ojson r = ojson::array();
        for (const auto& p : row) r.push_back(to_json(p));
        matrix.push_back(std::move(r));
    }
    return ojson{{"newick", c.newick},
                 {"n", c.n},
                 {"E", to_string(c.E)},
                 {"equidistant_newick", c.equidistant_newick},
                 {"edges", std::move(edges)},
                 {"x", std::move(x)},
                 {"matrix", std::move(matrix)}};
}

inline Certificate3 certificate_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw format_error("certificate must be a JSON object");
    Certificate3 c;
    try {
        c.newick = j.at("newick").get<std::string>();
        c.n = j.at("n").get<int>();
        c.E = detail::rational_from_json(j.at("E"), "E");
        c.equidistant_newick = j.at("equidistant_newick").get<std::string>();
        for (const auto& e : j.at("edges"))
            c.edges.push_back({e.at("clade").get<std::vector<int>>(), detail::rational_from_json(e.at("height"), "height"),
                               e.at("label").get<long>()});
        for (const auto& p : j.at("x")) c.x.push_back(puiseux_from_json(p));
        const auto& m = j.at("matrix");
        if (!m.is_array() || m.size() != 3) throw format_error("certificate matrix must have 3 rows");
        for (std::size_t r = 0; r < 3; ++r)
            for (const auto& p : m[r]) c.matrix[r].push_back(puiseux_from_json(p));
    } catch (const nlohmann::json::exception& e) {
        throw format_error(std::string("certificate: ") + e.what());
    }
    for (const auto& row : c.matrix)
        if (static_cast<int>(row.size()) != c.n) throw format_error("certificate matrix rows must have n columns");
    return c;
}

}  // namespace mdissim
