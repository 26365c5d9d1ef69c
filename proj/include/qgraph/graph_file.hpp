#pragma once

// Text format for a graph, its vertex conditions, the vertex set B and a
// spectral window.
//
//   # comment
//   [vertices]
//   count = 2
//   alpha = 0 0            # optional, one value per vertex
//   [edges]
//   0 1 1                  # origin terminus length
//   1 1 pi q 2             # constant potential
//   0 1 2 q 0 @1 3         # piecewise: value, then (@breakpoint value)...
//   [B]
//   0
//   [window]
//   lo = 0.5
//   hi = 20
//   grid_step = 0.01       # optional
//
// Numbers accept pi, e, sqrt(...), + - * / and parentheses, without spaces.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"

namespace qgraph {

class ParseError : public Error {
public:
    ParseError(int line, int column, const std::string& message)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                message),
          line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

/// The document parsed but describes an invalid model.
class ValidationError : public Error {
public:
    enum class Kind { Graph, EmptyB };

    explicit ValidationError(const GraphError& cause)
        : Error(cause.what()), kind_(Kind::Graph), graph_kind_(cause.kind()) {}
    ValidationError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }
    std::optional<GraphError::Kind> graph_kind() const noexcept { return graph_kind_; }

private:
    Kind kind_;
    std::optional<GraphError::Kind> graph_kind_;
};

struct Window {
    double lo = 0.0;
    double hi = 0.0;
    std::optional<double> grid_step;

    bool operator==(const Window&) const = default;
};

struct GraphFile {
    MetricGraph graph;
    VertexConditions alpha;
    VertexSet B;
    std::optional<Window> window;

    bool operator==(const GraphFile&) const = default;
};

namespace detail {

/// Recursive-descent evaluator for numeric literals.
class ExpressionParser {
public:
    ExpressionParser(std::string_view text, int line, int column)
        : text_(text), line_(line), column_(column) {}

    double parse() {
        const double v = sum();
        if (pos_ != text_.size())
            fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        if (!std::isfinite(v))
            fail("value is not finite");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(line_, column_ + static_cast<int>(pos_), msg);
    }

    bool eat(char c) {
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    double sum() {
        double v = product();
        for (;;) {
            if (eat('+'))
                v += product();
            else if (eat('-'))
                v -= product();
            else
                return v;
        }
    }

    double product() {
        double v = unary();
        for (;;) {
            if (eat('*')) {
                v *= unary();
            } else if (eat('/')) {
                const double d = unary();
                if (d == 0.0)
                    fail("division by zero");
                v /= d;
            } else {
                return v;
            }
        }
    }

    double unary() {
        if (eat('-'))
            return -unary();
        if (eat('+'))
            return unary();
        return atom();
    }

    double atom() {
        if (eat('(')) {
            const double v = sum();
            if (!eat(')'))
                fail("expected ')'");
            return v;
        }
        if (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            const auto name = text_.substr(start, pos_ - start);
            if (name == "pi")
                return M_PI;
            if (name == "e")
                return M_E;
            if (name == "sqrt") {
                if (!eat('('))
                    fail("expected '(' after sqrt");
                const double v = sum();
                if (!eat(')'))
                    fail("expected ')'");
                if (v < 0.0)
                    fail("sqrt of a negative number");
                return std::sqrt(v);
            }
            pos_ = start;
            fail("unknown name '" + std::string(name) + "'");
        }
        const std::string rest(text_.substr(pos_));
        std::size_t used = 0;
        double v = 0.0;
        // stod honours the C locale here; the CLI never changes it.
        try {
            if (rest.empty() || !(std::isdigit(static_cast<unsigned char>(rest[0])) || rest[0] == '.'))
                throw std::invalid_argument("");
            v = std::stod(rest, &used);
        } catch (const std::exception&) {
            fail("expected a number");
        }
        pos_ += used;
        return v;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_;
    int column_;
};

struct Token {
    std::string text;
    int column;
};

inline std::vector<Token> split_tokens(const std::string& line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
            ++i;
        if (i >= line.size())
            break;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
            ++i;
        out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return out;
}

inline double parse_number(const Token& t, int line) {
    return ExpressionParser(t.text, line, t.column).parse();
}

inline int parse_index(const Token& t, int line) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(t.text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != t.text.size() || t.text.empty() || v < 0 || v > 1000000)
        throw ParseError(line, t.column, "expected a vertex index, got '" + t.text + "'");
    return static_cast<int>(v);
}

inline std::string format_exact(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace detail

/// Parses and validates a document. Throws ParseError or ValidationError.
inline GraphFile parse_graph_text(const std::string& text) {
    using detail::Token;
    enum class Section { None, Vertices, Edges, B, Window };
    Section section = Section::None;
    std::set<std::string> seen_sections;
    std::map<std::string, int> seen_keys;
    std::optional<int> count;
    std::optional<std::vector<double>> alpha;
    std::vector<Edge> edges;
    std::vector<int> b_members;
    std::set<int> b_seen;
    std::optional<double> lo, hi, step;

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
        const auto tokens = detail::split_tokens(line);
        if (tokens.empty())
            continue;
        const Token& head = tokens.front();
        if (head.text.front() == '[') {
            if (tokens.size() != 1 || head.text.back() != ']')
                throw ParseError(line_no, head.column, "malformed section header");
            const std::string name = head.text.substr(1, head.text.size() - 2);
            if (name == "vertices")
                section = Section::Vertices;
            else if (name == "edges")
                section = Section::Edges;
            else if (name == "B")
                section = Section::B;
            else if (name == "window")
                section = Section::Window;
            else
                throw ParseError(line_no, head.column, "unknown section '" + name + "'");
            if (!seen_sections.insert(name).second)
                throw ParseError(line_no, head.column, "duplicate section '" + name + "'");
            continue;
        }

        const auto key_value = [&]() -> std::pair<std::string, std::vector<Token>> {
            if (tokens.size() < 3 || tokens[1].text != "=")
                throw ParseError(line_no, head.column, "expected 'key = value'");
            const std::string key = head.text;
            const auto [it, fresh] = seen_keys.emplace(
                (section == Section::Vertices ? "vertices." : "window.") + key, line_no);
            if (!fresh)
                throw ParseError(line_no, head.column,
                                 "duplicate key '" + key + "' (first on line " +
                                     std::to_string(it->second) + ")");
            return {key, std::vector<Token>(tokens.begin() + 2, tokens.end())};
        };
        const auto single = [&](const std::vector<Token>& v) -> const Token& {
            if (v.size() != 1)
                throw ParseError(line_no, v[1].column, "expected a single value");
            return v.front();
        };

        switch (section) {
        case Section::None:
            throw ParseError(line_no, head.column, "content outside a section");
        case Section::Vertices: {
            const auto [key, vals] = key_value();
            if (key == "count") {
                count = detail::parse_index(single(vals), line_no);
            } else if (key == "alpha") {
                alpha.emplace();
                for (const auto& t : vals)
                    alpha->push_back(detail::parse_number(t, line_no));
            } else {
                throw ParseError(line_no, head.column, "unknown key '" + key + "'");
            }
            break;
        }
        case Section::Window: {
            const auto [key, vals] = key_value();
            const double v = detail::parse_number(single(vals), line_no);
            if (key == "lo")
                lo = v;
            else if (key == "hi")
                hi = v;
            else if (key == "grid_step")
                step = v;
            else
                throw ParseError(line_no, head.column, "unknown key '" + key + "'");
            break;
        }
        case Section::Edges: {
            if (tokens.size() < 3)
                throw ParseError(line_no, head.column, "expected 'origin terminus length'");
            Edge e;
            e.origin = detail::parse_index(tokens[0], line_no);
            e.terminus = detail::parse_index(tokens[1], line_no);
            e.length = detail::parse_number(tokens[2], line_no);
            if (tokens.size() > 3) {
                if (tokens[3].text != "q")
                    throw ParseError(line_no, tokens[3].column, "expected 'q'");
                if (tokens.size() < 5)
                    throw ParseError(line_no, tokens[3].column, "missing potential value");
                e.potential.values = {detail::parse_number(tokens[4], line_no)};
                e.potential.breakpoints.clear();
                for (std::size_t k = 5; k < tokens.size(); k += 2) {
                    const Token& at = tokens[k];
                    if (at.text.size() < 2 || at.text.front() != '@')
                        throw ParseError(line_no, at.column, "expected '@breakpoint'");
                    if (k + 1 >= tokens.size())
                        throw ParseError(line_no, at.column, "breakpoint without a value");
                    e.potential.breakpoints.push_back(
                        detail::parse_number(Token{at.text.substr(1), at.column + 1}, line_no));
                    e.potential.values.push_back(detail::parse_number(tokens[k + 1], line_no));
                }
            }
            edges.push_back(std::move(e));
            break;
        }
        case Section::B:
            for (const auto& t : tokens) {
                const int v = detail::parse_index(t, line_no);
                if (!b_seen.insert(v).second)
                    throw ParseError(line_no, t.column, "vertex " + t.text + " repeated in B");
                b_members.push_back(v);
            }
            break;
        }
    }

    const int end_line = line_no + 1;
    for (const char* required : {"vertices", "edges", "B"})
        if (!seen_sections.count(required))
            throw ParseError(end_line, 1, std::string("missing section [") + required + "]");
    if (!count)
        throw ParseError(end_line, 1, "missing 'count' in [vertices]");
    if (seen_sections.count("window") && (!lo || !hi))
        throw ParseError(end_line, 1, "[window] needs both 'lo' and 'hi'");

    GraphFile out;
    out.graph = MetricGraph{std::move(edges), *count};
    out.alpha = alpha ? VertexConditions{*alpha} : VertexConditions::standard(*count);
    out.B = VertexSet(b_members);
    if (lo)
        out.window = Window{*lo, *hi, step};
    try {
        validate(out.graph, out.alpha);
        if (out.B.empty())
            throw ValidationError(ValidationError::Kind::EmptyB, "EmptyB: the vertex set B is empty");
        validate_vertex_set(out.graph, out.B);
    } catch (const GraphError& err) {
        throw ValidationError(err);
    }
    if (out.window && !(out.window->lo < out.window->hi))
        throw ParseError(end_line, 1, "window needs lo < hi");
    if (out.window && out.window->grid_step && !(*out.window->grid_step > 0.0))
        throw ParseError(end_line, 1, "grid_step must be positive");
    return out;
}

inline GraphFile parse_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_graph_text(buf.str());
}

/// Canonical text form; parse_graph_text(to_text(f)) == f.
inline std::string to_text(const GraphFile& f) {
    using detail::format_exact;
    std::ostringstream out;
    out << "[vertices]\ncount = " << f.graph.vertex_count << "\n";
    const bool standard = std::all_of(f.alpha.alpha.begin(), f.alpha.alpha.end(),
                                      [](double a) { return a == 0.0; });
    if (!standard) {
        out << "alpha =";
        for (double a : f.alpha.alpha)
            out << ' ' << format_exact(a);
        out << "\n";
    }
    out << "[edges]\n";
    for (const auto& e : f.graph.edges) {
        out << e.origin << ' ' << e.terminus << ' ' << format_exact(e.length);
        const auto& p = e.potential;
        if (!(p.is_constant() && p.values.front() == 0.0)) {
            out << " q " << format_exact(p.values.front());
            for (std::size_t k = 0; k < p.breakpoints.size(); ++k)
                out << " @" << format_exact(p.breakpoints[k]) << ' ' << format_exact(p.values[k + 1]);
        }
        out << "\n";
    }
    out << "[B]\n";
    for (std::size_t k = 0; k < f.B.members.size(); ++k)
        out << (k ? " " : "") << f.B.members[k];
    out << "\n";
    if (f.window) {
        out << "[window]\nlo = " << format_exact(f.window->lo)
            << "\nhi = " << format_exact(f.window->hi) << "\n";
        if (f.window->grid_step)
            out << "grid_step = " << format_exact(*f.window->grid_step) << "\n";
    }
    return out.str();
}

} // namespace qgraph
