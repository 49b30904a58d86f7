#include "flowmc/expr.hpp"

#include <sstream>

namespace flowmc {

bool operator==(const Expr& a, const Expr& b)
{
    if (a.node_ == b.node_)
        return true;
    if (!a.node_ || !b.node_)
        return false;
    const ExprNode& x = *a.node_;
    const ExprNode& y = *b.node_;
    if (x.kind != y.kind)
        return false;
    switch (x.kind) {
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
        return x.literal == y.literal;
    case ExprKind::Var:
        return x.name == y.name && x.primed == y.primed;
    case ExprKind::Old:
        return x.name == y.name;
    case ExprKind::Unary:
        return x.unary_op == y.unary_op && x.args == y.args;
    case ExprKind::Binary:
        return x.binary_op == y.binary_op && x.args == y.args;
    case ExprKind::Any:
        return x.domain == y.domain;
    case ExprKind::Unchanged:
        return x.vars == y.vars;
    }
    return false;
}

Expr int_lit(std::int64_t v)
{
    ExprNode n;
    n.kind = ExprKind::IntLit;
    n.literal = Value::integer(v);
    return Expr(std::move(n));
}

Expr bool_lit(bool b)
{
    ExprNode n;
    n.kind = ExprKind::BoolLit;
    n.literal = Value::boolean(b);
    return Expr(std::move(n));
}

Expr literal(const Value& v)
{
    return v.is_bool() ? bool_lit(v.as_bool()) : int_lit(v.as_int());
}

Expr var(std::string name, bool primed)
{
    ExprNode n;
    n.kind = ExprKind::Var;
    n.name = std::move(name);
    n.primed = primed;
    return Expr(std::move(n));
}

Expr old(std::string name)
{
    ExprNode n;
    n.kind = ExprKind::Old;
    n.name = std::move(name);
    return Expr(std::move(n));
}

Expr unary(UnaryOp op, Expr e)
{
    ExprNode n;
    n.kind = ExprKind::Unary;
    n.unary_op = op;
    n.args = {std::move(e)};
    return Expr(std::move(n));
}

Expr binary(BinaryOp op, Expr a, Expr b)
{
    ExprNode n;
    n.kind = ExprKind::Binary;
    n.binary_op = op;
    n.args = {std::move(a), std::move(b)};
    return Expr(std::move(n));
}

Expr any_of(const Domain& d)
{
    ExprNode n;
    n.kind = ExprKind::Any;
    n.domain = d;
    return Expr(std::move(n));
}

Expr unchanged(std::vector<std::string> vars)
{
    ExprNode n;
    n.kind = ExprKind::Unchanged;
    n.vars = std::move(vars);
    return Expr(std::move(n));
}

Expr conj(Expr a, Expr b)
{
    if (!a)
        return b ? b : bool_lit(true);
    if (!b)
        return a;
    return binary(BinaryOp::And, std::move(a), std::move(b));
}

Expr conj(const std::vector<Expr>& parts)
{
    Expr out;
    for (const auto& p : parts)
        out = conj(out, p);
    return out ? out : bool_lit(true);
}

std::vector<Expr> conjuncts(const Expr& e)
{
    if (e.kind() == ExprKind::Binary && e->binary_op == BinaryOp::And) {
        auto left = conjuncts(e->args[0]);
        auto right = conjuncts(e->args[1]);
        left.insert(left.end(), right.begin(), right.end());
        return left;
    }
    return {e};
}

Expr negate(Expr e)
{
    return unary(UnaryOp::Not, std::move(e));
}

bool is_true_literal(const Expr& e)
{
    return e && e.kind() == ExprKind::BoolLit && e->literal.as_bool();
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(BinaryOp op)
{
    switch (op) {
    case BinaryOp::Implies: return 1;
    case BinaryOp::Or: return 2;
    case BinaryOp::And: return 3;
    case BinaryOp::Eq:
    case BinaryOp::Ne: return 4;
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return 5;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 6;
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod: return 7;
    }
    return 0;
}

constexpr int kUnaryPrecedence = 8;
constexpr int kAtomPrecedence = 9;

int precedence(const Expr& e)
{
    switch (e.kind()) {
    case ExprKind::Binary: return precedence(e->binary_op);
    case ExprKind::Unary: return kUnaryPrecedence;
    default: return kAtomPrecedence;
    }
}

void print(std::ostream& os, const Expr& e);

void print_operand(std::ostream& os, const Expr& e, bool parens)
{
    if (parens)
        os << '(';
    print(os, e);
    if (parens)
        os << ')';
}

void print(std::ostream& os, const Expr& e)
{
    const ExprNode& n = e.node();
    switch (n.kind) {
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
        os << n.literal.to_string();
        return;
    case ExprKind::Var:
        os << n.name << (n.primed ? "'" : "");
        return;
    case ExprKind::Old:
        os << "old(" << n.name << ')';
        return;
    case ExprKind::Unary:
        os << (n.unary_op == UnaryOp::Not ? "!" : "-");
        // the parser folds `-<digits>` into a literal, so a negated literal keeps its parens
        print_operand(os, n.args[0],
                      precedence(n.args[0]) < kUnaryPrecedence || n.args[0].kind() == ExprKind::Unary
                          || n.args[0].kind() == ExprKind::IntLit);
        return;
    case ExprKind::Binary: {
        int p = precedence(n.binary_op);
        bool right_assoc = n.binary_op == BinaryOp::Implies;
        int lp = precedence(n.args[0]);
        int rp = precedence(n.args[1]);
        print_operand(os, n.args[0], right_assoc ? lp <= p : lp < p);
        os << ' ' << to_string(n.binary_op) << ' ';
        print_operand(os, n.args[1], right_assoc ? rp < p : rp <= p);
        return;
    }
    case ExprKind::Any:
        os << "any(" << n.domain.to_string() << ')';
        return;
    case ExprKind::Unchanged: {
        os << "id(";
        for (std::size_t i = 0; i < n.vars.size(); ++i)
            os << (i ? ", " : "") << n.vars[i];
        os << ')';
        return;
    }
    }
}

}  // namespace

std::string to_string(BinaryOp op)
{
    switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Eq: return "=";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
    case BinaryOp::Implies: return "=>";
    }
    return "?";
}

std::string to_string(const Expr& e)
{
    if (!e)
        return "<null>";
    std::ostringstream os;
    print(os, e);
    return os.str();
}

// ---------------------------------------------------------------------------
// Variable sets and rewriting

namespace {

void collect(const Expr& e, VarSets& out)
{
    const ExprNode& n = e.node();
    switch (n.kind) {
    case ExprKind::Var:
        (n.primed ? out.writes : out.reads).insert(n.name);
        break;
    case ExprKind::Old:
        out.reads.insert(n.name);
        break;
    case ExprKind::Unchanged:
        for (const auto& v : n.vars) {
            out.reads.insert(v);
            out.writes.insert(v);
        }
        break;
    default:
        for (const auto& a : n.args)
            collect(a, out);
    }
}

Expr rebuild(const Expr& e, const std::function<Expr(const Expr&)>& leaf)
{
    const ExprNode& n = e.node();
    if (n.args.empty())
        return leaf(e);
    ExprNode copy = n;
    for (auto& a : copy.args)
        a = rebuild(a, leaf);
    return Expr(std::move(copy));
}

}  // namespace

VarSets variables(const Expr& e)
{
    VarSets out;
    if (e)
        collect(e, out);
    return out;
}

bool mentions_primed(const Expr& e)
{
    return !variables(e).writes.empty();
}

Expr rename_vars(const Expr& e, const std::function<std::string(const std::string&)>& rename)
{
    return rebuild(e, [&](const Expr& leaf) {
        const ExprNode& n = leaf.node();
        switch (n.kind) {
        case ExprKind::Var:
            return var(rename(n.name), n.primed);
        case ExprKind::Old:
            return old(rename(n.name));
        case ExprKind::Unchanged: {
            std::vector<std::string> vs;
            for (const auto& v : n.vars)
                vs.push_back(rename(v));
            return unchanged(std::move(vs));
        }
        default:
            return leaf;
        }
    });
}

Expr ensures_to_action(const Expr& ensures)
{
    return rebuild(ensures, [](const Expr& leaf) {
        const ExprNode& n = leaf.node();
        if (n.kind == ExprKind::Old)
            return var(n.name, false);
        if (n.kind == ExprKind::Var && !n.primed)
            return var(n.name, true);
        return leaf;
    });
}

Expr unprime(const Expr& e, const std::set<std::string>& names)
{
    return rebuild(e, [&](const Expr& leaf) {
        const ExprNode& n = leaf.node();
        if (n.kind == ExprKind::Var && n.primed && names.count(n.name))
            return var(n.name, false);
        if (n.kind == ExprKind::Unchanged) {
            std::vector<std::string> keep;
            for (const auto& v : n.vars)
                if (!names.count(v))
                    keep.push_back(v);
            return unchanged(std::move(keep));
        }
        return leaf;
    });
}

// ---------------------------------------------------------------------------
// Typing

namespace {

Type expect(const Expr& e, const TypeEnv& env, Type want);

Type check(const Expr& e, const TypeEnv& env)
{
    const ExprNode& n = e.node();
    switch (n.kind) {
    case ExprKind::IntLit:
        return Type::Int;
    case ExprKind::BoolLit:
        return Type::Bool;
    case ExprKind::Var:
    case ExprKind::Old: {
        auto it = env.find(n.name);
        if (it == env.end())
            throw Error(ErrorCode::UnknownVariable, "unknown variable '" + n.name + "'");
        return it->second;
    }
    case ExprKind::Unary:
        return expect(n.args[0], env, n.unary_op == UnaryOp::Not ? Type::Bool : Type::Int);
    case ExprKind::Any:
        throw Error(ErrorCode::TypeError, "any(...) may only appear as the right operand of '='");
    case ExprKind::Unchanged:
        for (const auto& v : n.vars)
            if (!env.count(v))
                throw Error(ErrorCode::UnknownVariable, "unknown variable '" + v + "'");
        return Type::Bool;
    case ExprKind::Binary:
        break;
    }
    const Expr& a = n.args[0];
    const Expr& b = n.args[1];
    switch (n.binary_op) {
    case BinaryOp::Add:
    case BinaryOp::Sub:
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod:
        expect(a, env, Type::Int);
        expect(b, env, Type::Int);
        return Type::Int;
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge:
        expect(a, env, Type::Int);
        expect(b, env, Type::Int);
        return Type::Bool;
    case BinaryOp::And:
    case BinaryOp::Or:
    case BinaryOp::Implies:
        expect(a, env, Type::Bool);
        expect(b, env, Type::Bool);
        return Type::Bool;
    case BinaryOp::Eq:
    case BinaryOp::Ne: {
        Type ta = check(a, env);
        if (b.kind() == ExprKind::Any) {
            if (n.binary_op != BinaryOp::Eq)
                throw Error(ErrorCode::TypeError, "any(...) may only appear as the right operand of '='");
            if (b->domain.type() != ta)
                throw Error(ErrorCode::TypeError, "any(" + b->domain.to_string() + ") compared with " + to_string(ta));
            return Type::Bool;
        }
        Type tb = check(b, env);
        if (ta != tb)
            throw Error(ErrorCode::TypeError, "operands of '" + to_string(n.binary_op) + "' have types "
                                                  + to_string(ta) + " and " + to_string(tb) + " in "
                                                  + to_string(e));
        return Type::Bool;
    }
    }
    return Type::Bool;
}

Type expect(const Expr& e, const TypeEnv& env, Type want)
{
    Type got = check(e, env);
    if (got != want)
        throw Error(ErrorCode::TypeError,
                    "expected " + to_string(want) + " but '" + to_string(e) + "' has type " + to_string(got));
    return got;
}

}  // namespace

Type typecheck(const Expr& e, const TypeEnv& env)
{
    return check(e, env);
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

const Value& lookup(const Valuation* vals, const std::string& name, bool primed)
{
    if (vals) {
        auto it = vals->find(name);
        if (it != vals->end())
            return it->second;
    }
    throw Error(ErrorCode::UnboundVariable,
                "variable '" + name + (primed ? "'" : "") + "' is not bound in the " + (primed ? "post" : "pre")
                    + "-state");
}

std::int64_t as_int(const Value& v, const Expr& e)
{
    if (!v.is_int())
        throw Error(ErrorCode::TypeError, "expected an integer in '" + to_string(e) + "'");
    return v.as_int();
}

bool as_bool(const Value& v, const Expr& e)
{
    if (!v.is_bool())
        throw Error(ErrorCode::TypeError, "expected a boolean in '" + to_string(e) + "'");
    return v.as_bool();
}

Value eval(const Expr& e, const Valuation& pre, const Valuation* post)
{
    const ExprNode& n = e.node();
    switch (n.kind) {
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
        return n.literal;
    case ExprKind::Var:
        return n.primed ? lookup(post, n.name, true) : lookup(&pre, n.name, false);
    case ExprKind::Old:
        return lookup(&pre, n.name, false);
    case ExprKind::Unary: {
        Value v = eval(n.args[0], pre, post);
        if (n.unary_op == UnaryOp::Not)
            return Value::boolean(!as_bool(v, e));
        return Value::integer(-as_int(v, e));
    }
    case ExprKind::Any:
        throw Error(ErrorCode::TypeError, "any(...) may only appear as the right operand of '='");
    case ExprKind::Unchanged:
        for (const auto& v : n.vars)
            if (lookup(&pre, v, false) != lookup(post, v, true))
                return Value::boolean(false);
        return Value::boolean(true);
    case ExprKind::Binary:
        break;
    }

    const Expr& a = n.args[0];
    const Expr& b = n.args[1];
    switch (n.binary_op) {
    case BinaryOp::And:
        return Value::boolean(as_bool(eval(a, pre, post), e) && as_bool(eval(b, pre, post), e));
    case BinaryOp::Or:
        return Value::boolean(as_bool(eval(a, pre, post), e) || as_bool(eval(b, pre, post), e));
    case BinaryOp::Implies:
        return Value::boolean(!as_bool(eval(a, pre, post), e) || as_bool(eval(b, pre, post), e));
    case BinaryOp::Eq:
    case BinaryOp::Ne: {
        Value va = eval(a, pre, post);
        bool equal;
        if (b.kind() == ExprKind::Any) {
            if (n.binary_op != BinaryOp::Eq)
                throw Error(ErrorCode::TypeError, "any(...) may only appear as the right operand of '='");
            equal = b->domain.contains(va);
        } else {
            Value vb = eval(b, pre, post);
            if (va.is_bool() != vb.is_bool())
                throw Error(ErrorCode::TypeError, "mixed boolean/integer comparison in '" + to_string(e) + "'");
            equal = va == vb;
        }
        return Value::boolean(n.binary_op == BinaryOp::Eq ? equal : !equal);
    }
    default:
        break;
    }

    std::int64_t x = as_int(eval(a, pre, post), e);
    std::int64_t y = as_int(eval(b, pre, post), e);
    switch (n.binary_op) {
    case BinaryOp::Add: return Value::integer(x + y);
    case BinaryOp::Sub: return Value::integer(x - y);
    case BinaryOp::Mul: return Value::integer(x * y);
    case BinaryOp::Div:
    case BinaryOp::Mod:
        if (y == 0)
            throw Error(ErrorCode::InvalidArgument, "division by zero in '" + to_string(e) + "'");
        // C semantics: quotient truncates toward zero, remainder takes the dividend's sign.
        return Value::integer(n.binary_op == BinaryOp::Div ? x / y : x % y);
    case BinaryOp::Lt: return Value::boolean(x < y);
    case BinaryOp::Le: return Value::boolean(x <= y);
    case BinaryOp::Gt: return Value::boolean(x > y);
    case BinaryOp::Ge: return Value::boolean(x >= y);
    default: break;
    }
    throw Error(ErrorCode::TypeError, "unhandled operator in '" + to_string(e) + "'");
}

}  // namespace

Value evaluate(const Expr& e, const Valuation& pre, const Valuation* post)
{
    return eval(e, pre, post);
}

}  // namespace flowmc
