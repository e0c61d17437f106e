#pragma once

#include "mdissim/rational.hpp"

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdissim {

/// The tuple at which a check failed, with the compared values.
struct Witness {
    std::vector<int> fixed;    // the (m-2)-subset R for Plücker checks, else empty
    std::vector<int> indices;  // quadruple, triple, ...
    std::vector<Rational> values;

    bool operator==(const Witness&) const = default;
};

/// Outcome of a predicate. `witness` is set exactly when `pass` is false.
struct Verdict {
    bool pass = true;
    std::optional<Witness> witness;
    std::string note;

    static Verdict ok(std::string note = {}) { return Verdict{true, std::nullopt, std::move(note)}; }
    static Verdict fail(Witness w, std::string note = {}) {
        return Verdict{false, std::move(w), std::move(note)};
    }

    explicit operator bool() const { return pass; }
};

inline std::string describe(const Witness& w) {
    std::ostringstream out;
    auto join = [&](const std::vector<int>& v) {
        for (std::size_t t = 0; t < v.size(); ++t) out << (t ? "," : "") << v[t];
    };
    if (!w.fixed.empty()) {
        out << "R={";
        join(w.fixed);
        out << "} ";
    }
    out << "{";
    join(w.indices);
    out << "} values (";
    for (std::size_t t = 0; t < w.values.size(); ++t) out << (t ? ", " : "") << to_string(w.values[t]);
    out << ")";
    return out.str();
}

inline std::string describe(const Verdict& v) {
    if (v.pass) return v.note.empty() ? "pass" : "pass (" + v.note + ")";
    std::string text = "fail at " + describe(*v.witness);
    if (!v.note.empty()) text += ": " + v.note;
    return text;
}

/// Thrown when an operation's mathematical precondition is violated and a
/// witness of the violation exists (e.g. reconstructing a non-tree metric).
class verdict_error : public std::runtime_error {
public:
    verdict_error(const std::string& what, Verdict verdict)
        : std::runtime_error(what + ": " + describe(verdict)), verdict_(std::move(verdict)) {}

    const Verdict& verdict() const noexcept { return verdict_; }

private:
    Verdict verdict_;
};

}  // namespace mdissim
