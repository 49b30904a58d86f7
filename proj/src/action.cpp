#include "flowmc/action.hpp"

#include "flowmc/program.hpp"

#include <algorithm>
#include <optional>

namespace flowmc {

Action::Action(Expr expr) : expr_(std::move(expr))
{
    auto vs = variables(expr_);
    reads_ = std::move(vs.reads);
    writes_ = std::move(vs.writes);
}

Action operator&&(const Action& a, const Action& b)
{
    return Action(conj(a.expr(), b.expr()));
}

Valuation State::merged() const
{
    Valuation out = global;
    out.insert(local.begin(), local.end());
    return out;
}

bool eval_action(const Action& a, const State& pre, const State& post)
{
    Valuation s = pre.merged();
    Valuation t = post.merged();
    Value v = evaluate(a.expr(), s, &t);
    if (!v.is_bool())
        throw Error(ErrorCode::TypeError, "action '" + to_string(a.expr()) + "' is not boolean");
    return v.as_bool();
}

Action id_action(const std::vector<std::string>& vars)
{
    return Action(unchanged(vars));
}

Action action_of_statement(const Statement& s, const std::vector<std::string>& frame)
{
    switch (s.kind) {
    case StmtKind::Assign: {
        std::vector<std::string> rest;
        std::copy_if(frame.begin(), frame.end(), std::back_inserter(rest),
                     [&](const std::string& v) { return v != s.target; });
        Expr assign = binary(BinaryOp::Eq, var(s.target, true), s.value);
        return Action(rest.empty() ? assign : conj(assign, unchanged(rest)));
    }
    case StmtKind::Skip:
        return id_action(frame);
    default:
        break;
    }
    throw Error(ErrorCode::UnsupportedStatement, "'" + to_string(s) + "' has no action form");
}

namespace {

/// x is pinned when some top-level conjunct of the lowered ensures is `x' = e`.
bool pinned(const Expr& lowered_ensures, const std::string& x)
{
    for (const Expr& c : conjuncts(lowered_ensures)) {
        if (c.kind() == ExprKind::Binary && c->binary_op == BinaryOp::Eq) {
            const Expr& lhs = c->args[0];
            if (lhs.kind() == ExprKind::Var && lhs->primed && lhs->name == x)
                return true;
        }
    }
    return false;
}

}  // namespace

Action action_of_contract(const Contract& c, const std::vector<std::string>& frame, const Domains& domains)
{
    if (c.kind == ContractKind::Empty)
        throw Error(ErrorCode::EmptyContract, "the empty contract has no action");

    Expr ensures = ensures_to_action(c.postcondition ? c.postcondition : bool_lit(true));
    std::vector<Expr> parts;
    if (c.precondition && !is_true_literal(c.precondition))
        parts.push_back(c.precondition);
    for (const auto& x : c.assigns) {
        if (pinned(ensures, x))
            continue;
        auto it = domains.find(x);
        if (it == domains.end())
            throw Error(ErrorCode::UnknownVariable, "assigned variable '" + x + "' has no declared domain");
        parts.push_back(binary(BinaryOp::Eq, var(x, true), any_of(it->second)));
    }
    if (!is_true_literal(ensures))
        parts.push_back(ensures);

    std::vector<std::string> kept;
    for (const auto& v : frame)
        if (std::find(c.assigns.begin(), c.assigns.end(), v) == c.assigns.end())
            kept.push_back(v);
    if (!kept.empty())
        parts.push_back(unchanged(kept));
    return Action(conj(parts));
}

Action action_of_guard(const Expr& guard)
{
    if (!guard)
        return Action(bool_lit(true));
    if (mentions_primed(guard))
        throw Error(ErrorCode::PrimedInGuard, "guard '" + to_string(guard) + "' mentions a primed variable");
    return Action(guard);
}

std::vector<State> enumerate_posts(const Action& a, const State& pre, const Domains& domains)
{
    Valuation s = pre.merged();

    struct Slot {
        std::string name;
        bool local = false;
        std::vector<Value> candidates;
    };
    std::vector<Slot> slots;

    // Values forced by top-level conjuncts avoid enumerating whole domains;
    // the full action is still evaluated on every candidate below.
    std::map<std::string, Value> forced;
    std::set<std::string> conflicting;
    auto force = [&](const std::string& x, const Value& v) {
        auto [it, inserted] = forced.emplace(x, v);
        if (!inserted && it->second != v)
            conflicting.insert(x);
    };
    for (const Expr& c : conjuncts(a.expr())) {
        if (c.kind() == ExprKind::Unchanged) {
            for (const auto& x : c->vars)
                if (auto it = s.find(x); it != s.end())
                    force(x, it->second);
        } else if (c.kind() == ExprKind::Binary && c->binary_op == BinaryOp::Eq) {
            const Expr& lhs = c->args[0];
            const Expr& rhs = c->args[1];
            if (lhs.kind() == ExprKind::Var && lhs->primed && rhs.kind() != ExprKind::Any && !mentions_primed(rhs)) {
                try {
                    force(lhs->name, evaluate(rhs, s));
                } catch (const Error&) {
                    // left to the full evaluation, which may short-circuit past it
                }
            }
        }
    }
    if (!conflicting.empty())
        return {};

    for (const auto& x : a.writes()) {
        Slot slot{x, false, {}};
        if (pre.local.count(x))
            slot.local = true;
        else if (!pre.global.count(x))
            throw Error(ErrorCode::UnboundVariable, "written variable '" + x + "' is not bound in the pre-state");
        auto dom = domains.find(x);
        if (dom == domains.end())
            throw Error(ErrorCode::UnknownVariable, "variable '" + x + "' has no declared domain");
        if (auto f = forced.find(x); f != forced.end()) {
            if (!dom->second.contains(f->second))
                return {};
            slot.candidates = {f->second};
        } else {
            if (!dom->second.finite())
                throw Error(ErrorCode::InfiniteDomain, "written variable '" + x + "' has an unbounded domain");
            slot.candidates = dom->second.values();
        }
        slots.push_back(std::move(slot));
    }

    std::vector<State> out;
    std::vector<std::size_t> index(slots.size(), 0);
    Valuation t = s;
    while (true) {
        State post = pre;
        for (std::size_t i = 0; i < slots.size(); ++i) {
            const Value& v = slots[i].candidates[index[i]];
            t[slots[i].name] = v;
            (slots[i].local ? post.local : post.global)[slots[i].name] = v;
        }
        Value ok = evaluate(a.expr(), s, &t);
        if (!ok.is_bool())
            throw Error(ErrorCode::TypeError, "action '" + to_string(a.expr()) + "' is not boolean");
        if (ok.as_bool())
            out.push_back(std::move(post));

        // odometer: the last (lexicographically greatest) variable varies fastest
        bool advanced = false;
        for (std::size_t i = slots.size(); i-- > 0;) {
            if (++index[i] < slots[i].candidates.size()) {
                advanced = true;
                break;
            }
            index[i] = 0;
        }
        if (!advanced)
            break;
    }
    return out;
}

std::vector<Valuation> enumerate_valuations(const Domains& domains, const Expr& constraint)
{
    Valuation pinned;
    if (constraint) {
        for (const Expr& c : conjuncts(constraint)) {
            if (c.kind() == ExprKind::Binary && c->binary_op == BinaryOp::Eq && c->args[0].kind() == ExprKind::Var
                && !c->args[0]->primed
                && (c->args[1].kind() == ExprKind::IntLit || c->args[1].kind() == ExprKind::BoolLit))
                pinned.emplace(c->args[0]->name, c->args[1]->literal);
        }
    }
    std::vector<std::pair<std::string, std::vector<Value>>> slots;
    for (const auto& [name, dom] : domains) {
        if (dom.finite())
            slots.emplace_back(name, dom.values());
        else if (auto it = pinned.find(name); it != pinned.end())
            slots.emplace_back(name, std::vector<Value>{it->second});
        else
            throw Error(ErrorCode::InfiniteDomain, "global '" + name + "' has an unbounded domain");
        if (slots.back().second.empty())
            return {};
    }
    std::vector<Valuation> out;
    std::vector<std::size_t> index(slots.size(), 0);
    while (true) {
        Valuation v;
        for (std::size_t i = 0; i < slots.size(); ++i)
            v.emplace(slots[i].first, slots[i].second[index[i]]);
        bool keep = true;
        if (constraint) {
            Value ok = evaluate(constraint, v);
            if (!ok.is_bool())
                throw Error(ErrorCode::TypeError, "initial predicate is not boolean");
            keep = ok.as_bool();
        }
        if (keep)
            out.push_back(std::move(v));
        std::size_t i = slots.size();
        while (i > 0 && ++index[i - 1] == slots[i - 1].second.size())
            index[--i] = 0;
        if (i == 0)
            break;
    }
    return out;
}

}  // namespace flowmc
