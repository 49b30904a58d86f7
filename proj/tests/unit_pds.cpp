#include "support.hpp"

#include <doctest.h>

using namespace flowmc;
using namespace flowmc::test;

namespace {

Value B(bool b)
{
    return Value::boolean(b);
}

InducedPds pds_of(const std::string& fixture)
{
    return induce(translate(load_fixture(fixture)));
}

InducedPds pds_of_text(const std::string& text)
{
    ParseResult r = parse_program(text);
    REQUIRE(r.ok());
    return induce(translate(*r.program));
}

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("initial configurations")
{
    InducedPds pds = pds_of("stee");
    REQUIRE(pds.initial.size() == 4);
    for (const auto& c : pds.initial) {
        REQUIRE(c.stack.size() == 1);
        CHECK(c.top().node == "n_m_1");
        CHECK(c.top().local.empty());
        CHECK(c.global.at("sndary_active") == B(false));
    }
    CHECK(std::is_sorted(pds.initial.begin(), pds.initial.end()));

    FlowGraph fg = translate(load_fixture("annotated_callee"));
    CHECK(induce(fg, fg.global_domains(), bool_lit(true)).initial.size() == 4);
    CHECK(induce(fg, fg.global_domains(), Expr()).initial.size() == 4);
    CHECK(code_of([&] { induce(fg, fg.global_domains(), bool_lit(false)); }) == ErrorCode::UnsatisfiableInit);
    CHECK(code_of([&] { induce(translate(load_fixture("unbounded")), {{"counter", Domain::unbounded()}}, Expr()); })
          == ErrorCode::InfiniteDomain);

    // A domain override makes an unbounded program explorable.
    FlowGraph ub = translate(load_fixture("unbounded"));
    InducedPds bounded = induce(ub, {{"counter", Domain::range(0, 5)}}, ub.init_globals);
    REQUIRE(bounded.initial.size() == 1);
    CHECK_FALSE(explore(bounded).truncated);
}

TEST_CASE("successors follow the three rule kinds")
{
    InducedPds pds = pds_of("stee");
    Valuation g{{"prim_ok", B(true)}, {"vehicle_moving", B(false)}, {"sndary_active", B(false)}};
    Configuration c{{{"n_m_1", {}}}, g};

    // Silent: the havoc contract rewrites prim_ok and vehicle_moving freely.
    auto next = successors(pds, c);
    CHECK(next.size() == 4 + 4);
    CHECK(std::is_sorted(next.begin(), next.end()));
    for (const auto& n : next)
        CHECK(n.global.at("sndary_active") == B(false));

    // Call: the guard 1 != 0 holds, globals survive, steering starts fresh.
    Configuration at_call{{{"n_m_2", {}}}, g};
    auto pushed = successors(pds, at_call);
    REQUIRE(pushed.size() == 1);
    Valuation fresh{{"primary_info", B(false)}, {"sndary_info", B(false)}};
    CHECK(pushed[0].stack == std::vector<StackFrame>{{"n_s_1", fresh}, {"n_m_3", {}}});
    CHECK(pushed[0].global == g);

    // Pop at steering's return node.
    Configuration at_ret{{{"n_s_4", fresh}, {"n_m_3", {}}}, g};
    auto popped = successors(pds, at_ret);
    REQUIRE(popped.size() == 1);
    CHECK(popped[0].stack == std::vector<StackFrame>{{"n_m_3", {}}});

    // The unsatisfiable branch of main.
    CHECK(successors(pds, Configuration{{{"n_m_4", {}}}, g}).empty());

    CHECK(code_of([&] { successors(pds, Configuration{{{"n_nope", {}}}, g}); })
          == ErrorCode::MalformedConfiguration);
    CHECK(code_of([&] { successors(pds, Configuration{{{"n_s_1", {}}}, g}); })
          == ErrorCode::MalformedConfiguration);
    CHECK(code_of([&] { successors(pds, Configuration{{}, g}); }) == ErrorCode::MalformedConfiguration);
}

TEST_CASE("exploration")
{
    SUBCASE("minimal stutters in place")
    {
        ExploreReport r = explore(pds_of("minimal"));
        REQUIRE(r.visited.size() == 1);
        CHECK(r.deadlocks.empty());
        CHECK_FALSE(r.truncated);
        CHECK(r.max_stack_depth == 1);
    }
    SUBCASE("steering agrees with the brute-force closure")
    {
        FlowGraph fg = translate(load_fixture("stee"));
        ExploreReport r = explore(induce(fg), kDefaultMaxSteps, 4);
        std::set<Configuration> oracle = BruteForcePds(fg).reachable(4);
        CHECK_FALSE(r.truncated);
        CHECK(r.visited == oracle);
        CHECK(r.max_stack_depth == 2);
        for (const auto& d : r.deadlocks)
            CHECK(d.top().node == "n_m_4");
        CHECK_FALSE(r.deadlocks.empty());
    }
    SUBCASE("an unsatisfiable node is a deadlock")
    {
        ExploreReport r = explore(pds_of_text("program q\nglobal g : bool\nprocedure main\n  block b\n"
                                              "    point a : skip\n    point r : return\n    edge a -> r when 1 = 0\n"));
        CHECK(r.deadlocks.size() == 2);
        CHECK(r.visited.size() == 4);
    }
    SUBCASE("bounds truncate")
    {
        InducedPds pds = pds_of("stee");
        ExploreReport r = explore(pds, 2, 4);
        CHECK(r.truncated);
        CHECK(r.depth == 2);
        CHECK(explore(pds, kDefaultMaxSteps, 1).truncated);
    }
}

TEST_CASE("invariants")
{
    InducedPds stee = pds_of("stee");
    Verdict v = check_invariant(stee, bool_lit(true));
    CHECK(v.holds);
    CHECK_FALSE(v.truncated);
    CHECK(v.visited == explore(stee).visited.size());

    Verdict bad = check_invariant(stee, parse_expr("!sndary_active"));
    CHECK_FALSE(bad.holds);
    REQUIRE(bad.counterexample);
    const Trace& t = *bad.counterexample;
    CHECK(t.configurations.back().global.at("sndary_active") == B(true));
    for (std::size_t i = 0; i + 1 < t.configurations.size(); ++i) {
        auto next = successors(stee, t.configurations[i]);
        CHECK(std::find(next.begin(), next.end(), t.configurations[i + 1]) != next.end());
    }

    CHECK(code_of([&] { check_invariant(stee, parse_expr("primary_info")); }) == ErrorCode::NonGlobalVariable);
    CHECK(code_of([&] { check_invariant(stee, parse_expr("prim_ok'")); }) == ErrorCode::NonGlobalVariable);

    Verdict cut = check_invariant(stee, bool_lit(true), 1);
    CHECK(cut.holds);
    CHECK(cut.truncated);
}

TEST_CASE("mode fixtures")
{
    Verdict v = check_invariant(pds_of("mode_violation"), parse_expr("mode != 2"));
    REQUIRE_FALSE(v.holds);
    const Trace& t = *v.counterexample;
    REQUIRE(t.configurations.size() == 6);
    std::vector<std::string> nodes;
    for (const auto& c : t.configurations)
        nodes.push_back(c.top().node);
    CHECK(nodes == std::vector<std::string>{"n_m_1", "n_m_2", "n_s_1", "n_s_2", "n_s_3", "n_s_4"});
    CHECK(t.configurations.back().global.at("mode") == Value::integer(2));

    Verdict safe = check_invariant(pds_of("mode_safe"), parse_expr("mode != 2"));
    CHECK(safe.holds);
    CHECK_FALSE(safe.truncated);
}

TEST_CASE("sampled runs")
{
    InducedPds minimal = pds_of("minimal");
    Trace t = sample_run(minimal, 5, 1);
    CHECK(t.configurations.size() == 5);
    CHECK(t.complete);
    CHECK_FALSE(t.deadlocked);
    for (const auto& g : t.state_run)
        CHECK(g == t.state_run.front());

    InducedPds stee = pds_of("stee");
    CHECK(sample_run(stee, 12, 42).to_string() == sample_run(stee, 12, 42).to_string());
    CHECK(code_of([&] { sample_run(stee, 0, 1); }) == ErrorCode::InvalidArgument);

    InducedPds dead = pds_of_text("program q\nglobal g : bool\nprocedure main\n  block b\n"
                                  "    point a : skip\n    point r : return\n    edge a -> r when 1 = 0\n");
    Trace d = sample_run(dead, 5, 3);
    CHECK(d.deadlocked);
    CHECK_FALSE(d.complete);
    CHECK(d.configurations.size() == 2);

    FlowGraph fg = translate(load_fixture("annotated_callee"));
    InducedPds none = induce(fg, fg.global_domains(), Expr());
    none.initial.clear();
    CHECK(code_of([&] { sample_run(none, 3, 0); }) == ErrorCode::NoInitialConfiguration);
}

TEST_CASE("printing")
{
    Configuration c{{{"n_s_1", {{"x", B(true)}}}, {"n_m_3", {}}}, {{"g", B(false)}}};
    CHECK(to_string(c.stack[0]) == "(n_s_1: x=true)");
    CHECK(to_string(c.stack[1]) == "(n_m_3)");
    Trace t = make_trace({c});
    CHECK(t.state_run == std::vector<Valuation>{c.global});
    CHECK(t.to_string() == "0 | g=false | (n_s_1: x=true) (n_m_3)\n");
}
