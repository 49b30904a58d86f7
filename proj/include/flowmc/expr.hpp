#pragma once

#include "flowmc/error.hpp"
#include "flowmc/value.hpp"

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace flowmc {

enum class ExprKind {
    IntLit,
    BoolLit,
    Var,        // x or x' (primed)
    Old,        // old(x), only meaningful inside ensures clauses
    Unary,
    Binary,
    Any,        // any(domain); only as the right operand of `=` in contract lowerings
    Unchanged,  // id over a variable list: conjunction of x' = x
};

enum class UnaryOp { Neg, Not };

enum class BinaryOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or, Implies };

class Expr;

struct ExprNode {
    ExprKind kind = ExprKind::BoolLit;
    Value literal;
    std::string name;
    bool primed = false;
    UnaryOp unary_op = UnaryOp::Not;
    BinaryOp binary_op = BinaryOp::And;
    std::vector<Expr> args;
    Domain domain;
    std::vector<std::string> vars;
};

/// Immutable, shared expression tree. A default-constructed Expr is null.
class Expr {
public:
    Expr() = default;
    explicit Expr(ExprNode node) : node_(std::make_shared<const ExprNode>(std::move(node))) {}

    explicit operator bool() const { return static_cast<bool>(node_); }
    const ExprNode& node() const { return *node_; }
    const ExprNode* operator->() const { return node_.get(); }
    ExprKind kind() const { return node_->kind; }

    /// Structural equality.
    friend bool operator==(const Expr& a, const Expr& b);

private:
    std::shared_ptr<const ExprNode> node_;
};

// Builders.
Expr int_lit(std::int64_t v);
Expr bool_lit(bool b);
Expr literal(const Value& v);
Expr var(std::string name, bool primed = false);
Expr old(std::string name);
Expr unary(UnaryOp op, Expr e);
Expr binary(BinaryOp op, Expr a, Expr b);
Expr any_of(const Domain& d);
Expr unchanged(std::vector<std::string> vars);

/// a ∧ b; a null operand is treated as `true`.
Expr conj(Expr a, Expr b);
/// Left-nested conjunction; empty input yields `true`.
Expr conj(const std::vector<Expr>& parts);
/// Flattens nested ∧ into its operands.
std::vector<Expr> conjuncts(const Expr& e);
Expr negate(Expr e);

bool is_true_literal(const Expr& e);

/// Concrete syntax shared with the .apg format (C precedence, `x'`, `old(x)`).
std::string to_string(const Expr& e);
std::string to_string(BinaryOp op);

/// Raised by the expression parser; column is 1-based and absolute when a
/// base column is passed to parse_expr.
class SyntaxError : public Error {
public:
    SyntaxError(int column, const std::string& msg)
        : Error(ErrorCode::SyntaxError, msg), column_(column), message_(msg) {}

    int column() const { return column_; }
    const std::string& message() const { return message_; }

private:
    int column_;
    std::string message_;
};

Expr parse_expr(std::string_view text, int column_base = 1);

/// True for identifiers that cannot name variables, blocks or procedures.
bool is_reserved_word(std::string_view word);
bool is_identifier(std::string_view word);

struct VarSets {
    std::set<std::string> reads;   // unprimed occurrences (including old(x))
    std::set<std::string> writes;  // primed occurrences
};

VarSets variables(const Expr& e);
bool mentions_primed(const Expr& e);

/// Applies `rename` to every variable name (primed or not).
Expr rename_vars(const Expr& e, const std::function<std::string(const std::string&)>& rename);

/// Rewrites an ensures clause into action form: old(x) ↦ x, x ↦ x'.
Expr ensures_to_action(const Expr& ensures);

/// Replaces primed occurrences of the given variables by their unprimed form
/// and drops them from Unchanged lists.
Expr unprime(const Expr& e, const std::set<std::string>& names);

using TypeEnv = std::map<std::string, Type>;

/// Static typing: comparisons and arithmetic on integers, connectives on
/// booleans, `=`/`!=` on two operands of the same type. Throws TypeError or
/// UnknownVariable.
Type typecheck(const Expr& e, const TypeEnv& env);

/// Evaluates over a pre-state and an optional post-state. Throws
/// UnboundVariable, TypeError, or InvalidArgument (division by zero).
Value evaluate(const Expr& e, const Valuation& pre, const Valuation* post = nullptr);

}  // namespace flowmc
