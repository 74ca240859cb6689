#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "udam/util.hpp"

namespace udam {

enum class ParseErrorKind {
    Syntax,
    UnsupportedRequirement,
    UndeclaredType,
    UnknownPredicate,
    ArityMismatch,
    UnknownObject,
    UnknownAction,
    TypeMismatch,
};

class ParseError : public std::runtime_error {
public:
    ParseError(ParseErrorKind kind, std::string message, int line = 0, int col = 0)
        : std::runtime_error(format(message, line, col)), kind_(kind), line_(line), col_(col) {}

    ParseErrorKind kind() const { return kind_; }
    int line() const { return line_; }
    int col() const { return col_; }

private:
    static std::string format(const std::string& msg, int line, int col) {
        if (line <= 0) return msg;
        return std::to_string(line) + ":" + std::to_string(col) + ": " + msg;
    }
    ParseErrorKind kind_;
    int line_;
    int col_;
};

// A node of the s-expression tree. Atoms are lowercased at lexing time since
// PDDL identifiers are case-insensitive.
struct Sexpr {
    bool is_list = false;
    std::string atom;
    std::vector<Sexpr> items;
    int line = 0;
    int col = 0;

    bool is_atom() const { return !is_list; }
    bool head_is(std::string_view name) const {
        return is_list && !items.empty() && items[0].is_atom() && items[0].atom == name;
    }
};

namespace detail {

class SexprReader {
public:
    explicit SexprReader(std::string_view text) : text_(text) {}

    std::vector<Sexpr> read_all() {
        std::vector<Sexpr> result;
        skip_ws();
        while (!eof()) {
            result.push_back(read());
            skip_ws();
        }
        return result;
    }

private:
    Sexpr read() {
        skip_ws();
        if (eof()) throw ParseError(ParseErrorKind::Syntax, "unexpected end of input", line_, col_);
        if (peek() == '(') {
            Sexpr node;
            node.is_list = true;
            node.line = line_;
            node.col = col_;
            advance();
            skip_ws();
            while (!eof() && peek() != ')') {
                node.items.push_back(read());
                skip_ws();
            }
            if (eof()) throw ParseError(ParseErrorKind::Syntax, "missing ')'", node.line, node.col);
            advance();  // consume ')'
            return node;
        }
        if (peek() == ')')
            throw ParseError(ParseErrorKind::Syntax, "unexpected ')'", line_, col_);
        Sexpr node;
        node.line = line_;
        node.col = col_;
        std::string atom;
        while (!eof() && !is_delim(peek())) {
            atom += peek();
            advance();
        }
        node.atom = to_lower(atom);
        return node;
    }

    static bool is_delim(char c) {
        return c == '(' || c == ')' || c == ';' || std::isspace(static_cast<unsigned char>(c));
    }

    void skip_ws() {
        while (!eof()) {
            char c = peek();
            if (c == ';') {
                while (!eof() && peek() != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace detail

inline std::vector<Sexpr> read_sexprs(std::string_view text) {
    return detail::SexprReader(text).read_all();
}

inline Sexpr read_single_sexpr(std::string_view text) {
    auto all = read_sexprs(text);
    if (all.size() != 1)
        throw ParseError(ParseErrorKind::Syntax, "expected exactly one top-level form");
    return all[0];
}

}  // namespace udam
