#pragma once

#include "flowmc/expr.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace flowmc {

/// Boolean expression over unprimed (pre-state) and primed (post-state)
/// variables, denoting a relation on states. `reads`/`writes` are exactly the
/// unprimed/primed variables of `expr`.
class Action {
public:
    Action() : Action(bool_lit(true)) {}
    explicit Action(Expr expr);

    const Expr& expr() const { return expr_; }
    const std::set<std::string>& reads() const { return reads_; }
    const std::set<std::string>& writes() const { return writes_; }

    friend bool operator==(const Action& a, const Action& b) { return a.expr_ == b.expr_; }

private:
    Expr expr_;
    std::set<std::string> reads_;
    std::set<std::string> writes_;
};

Action operator&&(const Action& a, const Action& b);

/// A program state split into its local and global components.
struct State {
    Valuation local;
    Valuation global;

    /// Local and global bindings merged (names are disjoint).
    Valuation merged() const;

    auto operator<=>(const State&) const = default;
};

using Domains = std::map<std::string, Domain>;

bool eval_action(const Action& a, const State& pre, const State& post);

/// Conjunction of x' = x over `vars`; the empty set gives the constant-true action.
Action id_action(const std::vector<std::string>& vars);

struct Statement;
struct Contract;

/// Assign(x, e) ↦ x' = e ∧ id(frame \ {x}); Skip ↦ id(frame).
/// Throws UnsupportedStatement for Jump/Call/Return.
Action action_of_statement(const Statement& s, const std::vector<std::string>& frame);

/// requires ∧ ensures[old(x)↦x, x↦x'] ∧ id(frame \ assigns). Assigned variables
/// not pinned by an equation of the ensures clause receive `x' = any(domain)`.
/// Throws EmptyContract for c_ε.
Action action_of_contract(const Contract& c, const std::vector<std::string>& frame, const Domains& domains);

/// Guard read over the pre-state only. A null guard is b_ε (true).
/// Throws PrimedInGuard.
Action action_of_guard(const Expr& guard);

/// All post-states t with (pre, t) ∈ ⟦a⟧ that agree with pre outside a.writes.
/// Written variables are enumerated lexicographically by name, then by value.
/// Throws InfiniteDomain, UnboundVariable.
std::vector<State> enumerate_posts(const Action& a, const State& pre, const Domains& domains);

/// Every valuation of `domains` satisfying `constraint` (null means true),
/// in lexicographic order. Unbounded variables must be pinned by a top-level
/// `x = literal` conjunct of the constraint, otherwise InfiniteDomain.
std::vector<Valuation> enumerate_valuations(const Domains& domains, const Expr& constraint);

}  // namespace flowmc
