#include "flowmc/expr.hpp"

#include <doctest.h>

using namespace flowmc;

namespace {

Value eval(const std::string& text, const Valuation& pre = {}, const Valuation* post = nullptr)
{
    return evaluate(parse_expr(text), pre, post);
}

Valuation vals(std::initializer_list<std::pair<const std::string, Value>> init)
{
    return Valuation(init);
}

}  // namespace

TEST_CASE("values and domains")
{
    CHECK(Value::boolean(true).to_string() == "true");
    CHECK(Value::integer(-3).to_string() == "-3");
    CHECK(Value::boolean(false) != Value::integer(0));
    CHECK(Domain::range(0, 2).to_string() == "int 0..2");
    CHECK(Domain::boolean().to_string() == "bool");
    CHECK(Domain::unbounded().to_string() == "int");
    CHECK(Domain::range(1, 3).size() == 3);
    CHECK(Domain::range(1, 3).contains(Value::integer(3)));
    CHECK_FALSE(Domain::range(1, 3).contains(Value::integer(4)));
    CHECK_FALSE(Domain::range(1, 3).contains(Value::boolean(true)));
    CHECK(Domain::boolean().values() == std::vector<Value>{Value::boolean(false), Value::boolean(true)});
    CHECK_THROWS_AS(Domain::unbounded().values(), Error);
}

TEST_CASE("parser precedence and printing")
{
    CHECK(to_string(parse_expr("a && b || c")) == "a && b || c");
    CHECK(to_string(parse_expr("a && (b || c)")) == "a && (b || c)");
    CHECK(to_string(parse_expr("1 + 2 * 3")) == "1 + 2 * 3");
    CHECK(to_string(parse_expr("(1 + 2) * 3")) == "(1 + 2) * 3");
    CHECK(to_string(parse_expr("x' = !y")) == "x' = !y");
    CHECK(to_string(parse_expr("old(x) + 1 = x")) == "old(x) + 1 = x");
    CHECK(to_string(parse_expr("a => b => c")) == "a => b => c");
    CHECK(parse_expr("1 - 2 - 3") == parse_expr("(1 - 2) - 3"));
    CHECK(parse_expr("a => b => c") == parse_expr("a => (b => c)"));
}

TEST_CASE("parser errors carry columns")
{
    try {
        parse_expr("x + ", 10);
        FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
        CHECK(e.code() == ErrorCode::SyntaxError);
        CHECK(e.column() >= 10);
    }
    CHECK_THROWS_AS(parse_expr("(a && b"), SyntaxError);
    CHECK_THROWS_AS(parse_expr("a b"), SyntaxError);
    CHECK_THROWS_AS(parse_expr(""), SyntaxError);
}

TEST_CASE("evaluation")
{
    CHECK(eval("1 + 2 * 3").as_int() == 7);
    CHECK(eval("7 / 2").as_int() == 3);
    CHECK(eval("-7 / 2").as_int() == -3);
    CHECK(eval("-7 % 2").as_int() == -1);
    CHECK(eval("1 != 0").as_bool());
    CHECK_FALSE(eval("1 = 0").as_bool());
    CHECK(eval("false => x").as_bool());
    CHECK(eval("x && !y", vals({{"x", Value::boolean(true)}, {"y", Value::boolean(false)}})).as_bool());
    CHECK_THROWS_AS(eval("1 / 0"), Error);
    CHECK_THROWS_AS(eval("z"), Error);

    Valuation pre = vals({{"x", Value::integer(1)}});
    Valuation post = vals({{"x", Value::integer(2)}});
    CHECK(eval("x' = x + 1", pre, &post).as_bool());
    CHECK_THROWS_AS(eval("x' = x + 1", pre), Error);
}

TEST_CASE("typing")
{
    TypeEnv env{{"x", Type::Int}, {"b", Type::Bool}};
    CHECK(typecheck(parse_expr("x + 1 < 3 && b"), env) == Type::Bool);
    CHECK(typecheck(parse_expr("x * 2"), env) == Type::Int);
    CHECK_THROWS_AS(typecheck(parse_expr("x && b"), env), Error);
    CHECK_THROWS_AS(typecheck(parse_expr("x = b"), env), Error);
    try {
        typecheck(parse_expr("y"), env);
        FAIL("expected UnknownVariable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownVariable);
    }
}

TEST_CASE("variables, renaming and the ensures rewrite")
{
    Expr e = parse_expr("x' = old(y) + z");
    VarSets vs = variables(e);
    CHECK(vs.writes == std::set<std::string>{"x"});
    CHECK(vs.reads == std::set<std::string>{"y", "z"});
    CHECK(mentions_primed(e));

    Expr renamed = rename_vars(parse_expr("a && b'"), [](const std::string& n) { return "p__" + n; });
    CHECK(to_string(renamed) == "p__a && p__b'");

    CHECK(ensures_to_action(parse_expr("x = !old(x)")) == parse_expr("x' = !x"));
    CHECK(unprime(parse_expr("x' = y'"), {"y"}) == parse_expr("x' = y"));
}

TEST_CASE("conjunction helpers")
{
    Expr a = parse_expr("a"), b = parse_expr("b"), c = parse_expr("c");
    CHECK(conj(Expr(), a) == a);
    CHECK(conj(a, Expr()) == a);
    CHECK(conj(std::vector<Expr>{}) == bool_lit(true));
    CHECK(conjuncts(conj({a, b, c})) == std::vector<Expr>{a, b, c});
    CHECK(is_true_literal(bool_lit(true)));
    CHECK_FALSE(is_true_literal(a));
}

TEST_CASE("identifiers")
{
    CHECK(is_identifier("prim_ok"));
    CHECK_FALSE(is_identifier("1x"));
    CHECK_FALSE(is_identifier("x-y"));
    CHECK(is_reserved_word("true"));
    CHECK(is_reserved_word("old"));
    CHECK_FALSE(is_reserved_word("counter"));
}
