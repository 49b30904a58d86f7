#include "flowmc/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>

namespace flowmc {

namespace {

constexpr std::array kReserved = {
    "true", "false", "old", "any", "id", "requires", "ensures", "assigns", "when", "contract",
};

enum class Tok { Ident, Int, Op, LParen, RParen, Prime, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int column = 0;
};

class Lexer {
public:
    Lexer(std::string_view text, int column_base) : text_(text), base_(column_base) {}

    std::vector<Token> run()
    {
        std::vector<Token> out;
        while (true) {
            while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            int col = base_ + static_cast<int>(pos_);
            if (pos_ >= text_.size()) {
                out.push_back({Tok::End, "", col});
                return out;
            }
            char c = text_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t start = pos_;
                while (pos_ < text_.size()
                       && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                    ++pos_;
                out.push_back({Tok::Ident, std::string(text_.substr(start, pos_ - start)), col});
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                std::size_t start = pos_;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
                out.push_back({Tok::Int, std::string(text_.substr(start, pos_ - start)), col});
            } else if (c == '(') {
                out.push_back({Tok::LParen, "(", col});
                ++pos_;
            } else if (c == ')') {
                out.push_back({Tok::RParen, ")", col});
                ++pos_;
            } else if (c == '\'') {
                out.push_back({Tok::Prime, "'", col});
                ++pos_;
            } else {
                static constexpr std::array kOps = {"=>", "==", "!=", "<=", ">=", "&&", "||", "=", "!",
                                                    "<",  ">",  "+",  "-",  "*",  "/",  "%"};
                bool matched = false;
                for (std::string_view op : kOps) {
                    if (text_.substr(pos_, op.size()) == op) {
                        out.push_back({Tok::Op, std::string(op), col});
                        pos_ += op.size();
                        matched = true;
                        break;
                    }
                }
                if (!matched)
                    throw SyntaxError(col, std::string("unexpected character '") + c + "'");
            }
        }
    }

private:
    std::string_view text_;
    int base_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Expr parse_all()
    {
        Expr e = parse_implies();
        if (peek().kind != Tok::End)
            fail("unexpected '" + peek().text + "'");
        return e;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    bool at_op(std::string_view op) const { return peek().kind == Tok::Op && peek().text == op; }
    Token take() { return toks_[pos_++]; }

    [[noreturn]] void fail(const std::string& msg) const
    {
        throw SyntaxError(peek().column, peek().kind == Tok::End ? msg + " at end of expression" : msg);
    }

    void expect(Tok kind, const char* what)
    {
        if (peek().kind != kind)
            fail(std::string("expected ") + what);
        ++pos_;
    }

    Expr parse_implies()
    {
        Expr lhs = parse_or();
        if (at_op("=>")) {
            take();
            return binary(BinaryOp::Implies, lhs, parse_implies());
        }
        return lhs;
    }

    Expr parse_or()
    {
        Expr lhs = parse_and();
        while (at_op("||")) {
            take();
            lhs = binary(BinaryOp::Or, lhs, parse_and());
        }
        return lhs;
    }

    Expr parse_and()
    {
        Expr lhs = parse_eq();
        while (at_op("&&")) {
            take();
            lhs = binary(BinaryOp::And, lhs, parse_eq());
        }
        return lhs;
    }

    Expr parse_eq()
    {
        Expr lhs = parse_rel();
        while (at_op("=") || at_op("==") || at_op("!=")) {
            BinaryOp op = take().text == "!=" ? BinaryOp::Ne : BinaryOp::Eq;
            lhs = binary(op, lhs, parse_rel());
        }
        return lhs;
    }

    Expr parse_rel()
    {
        Expr lhs = parse_add();
        while (at_op("<") || at_op("<=") || at_op(">") || at_op(">=")) {
            std::string op = take().text;
            BinaryOp b = op == "<" ? BinaryOp::Lt : op == "<=" ? BinaryOp::Le : op == ">" ? BinaryOp::Gt : BinaryOp::Ge;
            lhs = binary(b, lhs, parse_add());
        }
        return lhs;
    }

    Expr parse_add()
    {
        Expr lhs = parse_mul();
        while (at_op("+") || at_op("-")) {
            BinaryOp op = take().text == "+" ? BinaryOp::Add : BinaryOp::Sub;
            lhs = binary(op, lhs, parse_mul());
        }
        return lhs;
    }

    Expr parse_mul()
    {
        Expr lhs = parse_unary();
        while (at_op("*") || at_op("/") || at_op("%")) {
            std::string op = take().text;
            BinaryOp b = op == "*" ? BinaryOp::Mul : op == "/" ? BinaryOp::Div : BinaryOp::Mod;
            lhs = binary(b, lhs, parse_unary());
        }
        return lhs;
    }

    Expr parse_unary()
    {
        if (at_op("!")) {
            take();
            return unary(UnaryOp::Not, parse_unary());
        }
        if (at_op("-")) {
            take();
            if (peek().kind == Tok::Int)
                return int_lit(parse_int(take(), true));
            return unary(UnaryOp::Neg, parse_unary());
        }
        return parse_primary();
    }

    std::int64_t parse_int(const Token& t, bool negative)
    {
        std::string digits = (negative ? "-" : "") + t.text;
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
        if (ec != std::errc() || ptr != digits.data() + digits.size())
            throw SyntaxError(t.column, "integer literal out of range: " + digits);
        return v;
    }

    Expr parse_primary()
    {
        const Token& t = peek();
        switch (t.kind) {
        case Tok::Int:
            return int_lit(parse_int(take(), false));
        case Tok::LParen: {
            take();
            Expr e = parse_implies();
            expect(Tok::RParen, "')'");
            return e;
        }
        case Tok::Ident: {
            Token id = take();
            if (id.text == "true")
                return bool_lit(true);
            if (id.text == "false")
                return bool_lit(false);
            if (id.text == "old") {
                expect(Tok::LParen, "'(' after old");
                if (peek().kind != Tok::Ident || is_reserved_word(peek().text))
                    fail("expected a variable name inside old(...)");
                std::string name = take().text;
                expect(Tok::RParen, "')'");
                return old(name);
            }
            if (is_reserved_word(id.text))
                throw SyntaxError(id.column, "reserved word '" + id.text + "' used as a variable");
            bool primed = false;
            if (peek().kind == Tok::Prime) {
                take();
                primed = true;
            }
            return var(id.text, primed);
        }
        default:
            fail(t.kind == Tok::End ? "expected an operand" : "unexpected '" + t.text + "'");
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

bool is_reserved_word(std::string_view word)
{
    for (std::string_view r : kReserved)
        if (r == word)
            return true;
    return false;
}

bool is_identifier(std::string_view word)
{
    if (word.empty() || !(std::isalpha(static_cast<unsigned char>(word[0])) || word[0] == '_'))
        return false;
    for (char c : word)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
            return false;
    return !is_reserved_word(word);
}

Expr parse_expr(std::string_view text, int column_base)
{
    Lexer lexer(text, column_base);
    Parser parser(lexer.run());
    return parser.parse_all();
}

}  // namespace flowmc
