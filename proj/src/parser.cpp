#include "vrel/parser.hpp"

#include <cctype>
#include <optional>
#include <set>
#include <sstream>

namespace vrel {

namespace {

enum class TokKind { Name, LParen, RParen, Comma, Colon, Arrow, End };

struct Token {
    TokKind kind;
    std::string text;
    int column;  // 1-based
};

class Lexer {
public:
    Lexer(const std::string& line, int line_number) : line_(line), line_number_(line_number) {}

    Token next() {
        while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
        int col = static_cast<int>(pos_) + 1;
        if (pos_ >= line_.size()) return {TokKind::End, "", col};
        char c = line_[pos_];
        if (c == '(') { ++pos_; return {TokKind::LParen, "(", col}; }
        if (c == ')') { ++pos_; return {TokKind::RParen, ")", col}; }
        if (c == ',') { ++pos_; return {TokKind::Comma, ",", col}; }
        if (c == ':') { ++pos_; return {TokKind::Colon, ":", col}; }
        if (c == '-') {
            if (pos_ + 1 < line_.size() && line_[pos_ + 1] == '>') {
                pos_ += 2;
                return {TokKind::Arrow, "->", col};
            }
            throw ParseError(line_number_, col, "expected '->' after '-'");
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < line_.size() &&
                   (std::isalnum(static_cast<unsigned char>(line_[pos_])) || line_[pos_] == '_'))
                ++pos_;
            return {TokKind::Name, line_.substr(start, pos_ - start), col};
        }
        throw ParseError(line_number_, col, std::string("unexpected character '") + c + "'");
    }

private:
    const std::string& line_;
    int line_number_;
    std::size_t pos_ = 0;
};

class LineParser {
public:
    LineParser(const std::string& line, const Signature& sig, int line_number)
        : lexer_(line, line_number), sig_(sig), line_(line_number) {
        advance();
    }

    FormulaPtr parse() {
        expect_keyword("forall");
        std::vector<std::string> vars = parse_varlist();
        bound_.insert(vars.begin(), vars.end());
        if (bound_.size() != vars.size()) fail("duplicate quantified variable");
        if (tok_.kind != TokKind::Colon) fail("expected ':' after variable list");
        advance();
        FormulaPtr body = parse_body();
        if (tok_.kind != TokKind::End) fail("trailing input after formula");
        return make_forall(std::move(vars), std::move(body));
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(line_, tok_.column, msg);
    }

    void advance() { tok_ = lexer_.next(); }

    bool at_keyword(const char* kw) const { return tok_.kind == TokKind::Name && tok_.text == kw; }

    void expect_keyword(const char* kw) {
        if (!at_keyword(kw)) fail(std::string("expected '") + kw + "'");
        advance();
    }

    static bool is_reserved(const std::string& s) {
        return s == "forall" || s == "not" || s == "and" || s == "or";
    }

    std::vector<std::string> parse_varlist() {
        std::vector<std::string> vars;
        while (true) {
            if (tok_.kind != TokKind::Name || is_reserved(tok_.text)) fail("expected variable name");
            vars.push_back(tok_.text);
            advance();
            if (tok_.kind != TokKind::Comma) break;
            advance();
        }
        return vars;
    }

    FormulaPtr parse_body() {  // implication, right-associative
        FormulaPtr lhs = parse_disjunction();
        if (tok_.kind == TokKind::Arrow) {
            advance();
            return make_implies(std::move(lhs), parse_body());
        }
        return lhs;
    }

    FormulaPtr parse_disjunction() {
        FormulaPtr f = parse_conjunction();
        while (at_keyword("or")) {
            advance();
            f = make_or(std::move(f), parse_conjunction());
        }
        return f;
    }

    FormulaPtr parse_conjunction() {
        FormulaPtr f = parse_unary();
        while (at_keyword("and")) {
            advance();
            f = make_and(std::move(f), parse_unary());
        }
        return f;
    }

    FormulaPtr parse_unary() {
        if (at_keyword("not")) {
            advance();
            return make_not(parse_unary());
        }
        if (tok_.kind == TokKind::LParen) {
            advance();
            FormulaPtr f = parse_body();
            if (tok_.kind != TokKind::RParen) fail("expected ')'");
            advance();
            return f;
        }
        return parse_atom();
    }

    FormulaPtr parse_atom() {
        if (tok_.kind != TokKind::Name || is_reserved(tok_.text)) fail("expected predicate name");
        std::string pred = tok_.text;
        int pred_col = tok_.column;
        advance();
        if (!sig_.is_predicate(pred))
            throw ParseError(line_, pred_col, "unknown predicate '" + pred + "'");
        if (tok_.kind != TokKind::LParen) fail("expected '(' after predicate name");
        advance();
        std::vector<Term> terms;
        while (true) {
            if (tok_.kind != TokKind::Name || is_reserved(tok_.text)) fail("expected term");
            if (bound_.count(tok_.text)) {
                terms.push_back(Term::variable(tok_.text));
            } else if (sig_.has_constant(tok_.text)) {
                terms.push_back(Term::constant(tok_.text));
            } else {
                fail("unbound variable '" + tok_.text + "'");
            }
            advance();
            if (tok_.kind == TokKind::Comma) {
                advance();
                continue;
            }
            break;
        }
        if (tok_.kind != TokKind::RParen) fail("expected ')'");
        advance();
        if (static_cast<int>(terms.size()) != sig_.arity(pred))
            throw ParseError(line_, pred_col,
                             "arity mismatch: " + pred + " takes " +
                                 std::to_string(sig_.arity(pred)) + " argument(s), got " +
                                 std::to_string(terms.size()));
        return make_atom(std::move(pred), std::move(terms));
    }

    Lexer lexer_;
    const Signature& sig_;
    int line_;
    Token tok_{TokKind::End, "", 1};
    std::set<std::string> bound_;
};

}  // namespace

FormulaPtr parse_formula(const std::string& line, const Signature& sig, int line_number) {
    return LineParser(line, sig, line_number).parse();
}

std::vector<FormulaPtr> parse_constraints(const std::string& text, const Signature& sig) {
    std::vector<FormulaPtr> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) { blank = false; break; }
        if (blank) continue;
        out.push_back(parse_formula(line, sig, lineno));
    }
    return out;
}

}  // namespace vrel
