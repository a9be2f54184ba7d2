#pragma once

#include <charconv>
#include <cctype>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "ndsl/coefficients.hpp"

namespace ndsl {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal formatting (std::to_chars), used everywhere a
/// floating-point value is serialized so identical runs are byte-identical.
inline std::string format_double(double v) {
    char buf[48];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace io_detail {

inline void skip_ws(const std::string& s, std::size_t& i) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
}

inline bool consume(const std::string& s, std::size_t& i, char c) {
    skip_ws(s, i);
    if (i < s.size() && s[i] == c) {
        ++i;
        return true;
    }
    return false;
}

inline double parse_number(const std::string& s, std::size_t& i) {
    skip_ws(s, i);
    std::size_t j = i;
    while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) ||
                            s[j] == '+' || s[j] == '-' || s[j] == '.' ||
                            s[j] == 'e' || s[j] == 'E'))
        ++j;
    double v = 0.0;
    auto res = std::from_chars(s.data() + i, s.data() + j, v);
    if (res.ec != std::errc() || res.ptr == s.data() + i)
        throw ParseError("expected a number at '" + s.substr(i, 12) + "'");
    i = res.ptr - s.data();
    return v;
}

inline std::string parse_word(const std::string& s, std::size_t& i) {
    skip_ws(s, i);
    std::size_t j = i;
    while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) ||
                            s[j] == '_' || s[j] == '.'))
        ++j;
    if (j == i) throw ParseError("expected a word at '" + s.substr(i, 12) + "'");
    std::string w = s.substr(i, j - i);
    i = j;
    return w;
}

// { upto: <real>, kind: const|poly, values: [v0, v1, ...] }
inline Segment parse_segment(const std::string& s, std::size_t& i) {
    if (!consume(s, i, '{')) throw ParseError("expected '{' opening a segment");
    Segment seg{};
    bool have_upto = false, have_kind = false, have_values = false;
    while (!consume(s, i, '}')) {
        const std::string key = parse_word(s, i);
        if (!consume(s, i, ':')) throw ParseError("expected ':' after " + key);
        if (key == "upto") {
            seg.upto = parse_number(s, i);
            have_upto = true;
        } else if (key == "kind") {
            const std::string kind = parse_word(s, i);
            if (kind == "const")
                seg.kind = SegmentKind::kConstant;
            else if (kind == "poly")
                seg.kind = SegmentKind::kPolynomial;
            else
                throw ParseError("unknown segment kind: " + kind);
            have_kind = true;
        } else if (key == "values") {
            if (!consume(s, i, '[')) throw ParseError("expected '[' for values");
            std::vector<double> vals;
            if (!consume(s, i, ']')) {
                do {
                    vals.push_back(parse_number(s, i));
                } while (consume(s, i, ','));
                if (!consume(s, i, ']')) throw ParseError("expected ']'");
            }
            if (vals.empty() || vals.size() > 4)
                throw ParseError("segment needs 1..4 values (degree <= 3)");
            for (std::size_t k = 0; k < vals.size(); ++k) seg.c[k] = vals[k];
            have_values = true;
        } else {
            throw ParseError("unknown segment field: " + key);
        }
        consume(s, i, ',');
    }
    if (!have_upto || !have_kind || !have_values)
        throw ParseError("segment needs upto, kind, values");
    if (seg.kind == SegmentKind::kConstant)
        for (int k = 1; k < 4; ++k)
            if (seg.c[k] != 0.0)
                throw ParseError("const segment takes a single value");
    return seg;
}

}  // namespace io_detail

/// Problem definition file. Line comments start with '#'. Grammar:
///   interval.a = <real>
///   interval.b = <real>
///   <p|q|w> = <segment> <segment> ...
///   segment := { upto: <real>, kind: const|poly, values: [c0, c1, ...] }
/// Segments cover (previous breakpoint, upto] left to right starting at a;
/// polynomial values are global-x coefficients, constant first.
inline Problem parse_problem(std::istream& in, const std::string& name = "") {
    std::string text, line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        text += line;
        text += '\n';
    }
    std::size_t i = 0;
    double a = 0, b = 0;
    bool have_a = false, have_b = false;
    std::vector<Segment> segs_p, segs_q, segs_w;
    io_detail::skip_ws(text, i);
    while (i < text.size()) {
        const std::string key = io_detail::parse_word(text, i);
        if (!io_detail::consume(text, i, '='))
            throw ParseError("expected '=' after " + key);
        if (key == "interval.a") {
            a = io_detail::parse_number(text, i);
            have_a = true;
        } else if (key == "interval.b") {
            b = io_detail::parse_number(text, i);
            have_b = true;
        } else if (key == "p" || key == "q" || key == "w") {
            auto& target = key == "p" ? segs_p : key == "q" ? segs_q : segs_w;
            if (!target.empty()) throw ParseError("duplicate coefficient " + key);
            io_detail::skip_ws(text, i);
            while (i < text.size() && text[i] == '{')
                target.push_back(io_detail::parse_segment(text, i)),
                    io_detail::skip_ws(text, i);
            if (target.empty()) throw ParseError(key + " needs segments");
        } else {
            throw ParseError("unknown key: " + key);
        }
        io_detail::skip_ws(text, i);
    }
    if (!have_a || !have_b) throw ParseError("missing interval.a / interval.b");
    if (segs_p.empty() || segs_q.empty() || segs_w.empty())
        throw ParseError("missing coefficient (need p, q, w)");
    Interval iv(a, b);
    auto finish = [&](std::vector<Segment> segs, const char* which) {
        if (std::abs(segs.back().upto - b) > 1e-12 * (1 + std::abs(b)))
            throw ParseError(std::string(which) +
                             ": last segment upto must equal interval.b");
        segs.back().upto = b;
        return PiecewiseCoefficient(a, std::move(segs));
    };
    return Problem(iv, finish(segs_p, "p"), finish(segs_q, "q"),
                   finish(segs_w, "w"), name);
}

inline void write_coefficient(std::ostream& os, const char* key,
                              const PiecewiseCoefficient& c) {
    os << key << " =";
    for (const auto& s : c.segments()) {
        os << " { upto: " << format_double(s.upto) << ", kind: "
           << (s.kind == SegmentKind::kConstant ? "const" : "poly")
           << ", values: [";
        const int deg = s.kind == SegmentKind::kConstant ? 0 : s.degree();
        for (int k = 0; k <= deg; ++k)
            os << (k ? ", " : "") << format_double(s.c[k]);
        os << "] }";
    }
    os << '\n';
}

inline void write_problem(std::ostream& os, const Problem& prob) {
    os << "# Dirichlet problem -(p y')' + q y = lambda w y, y(a)=y(b)=0\n";
    os << "interval.a = " << format_double(prob.interval.a) << '\n';
    os << "interval.b = " << format_double(prob.interval.b) << '\n';
    write_coefficient(os, "p", prob.p);
    write_coefficient(os, "q", prob.q);
    write_coefficient(os, "w", prob.w);
}

}  // namespace ndsl
