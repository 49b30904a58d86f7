#include "flowmc/sts.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace flowmc {

Expr StsAction::label() const
{
    return guard ? conj(base, guard) : base;
}

const StsVar* Sts::find_var(std::string_view name) const
{
    for (const auto& v : variables)
        if (v.name == name)
            return &v;
    return nullptr;
}

const StsProcedure& Sts::procedure(std::string_view name) const
{
    for (const auto& p : procedures)
        if (p.name == name)
            return p;
    throw Error(ErrorCode::UnknownProcedure, "no procedure '" + std::string(name) + "' in the transition system");
}

const StsProcedure& Sts::owner_of(std::string_view node) const
{
    for (const auto& p : procedures)
        if (std::find(p.nodes.begin(), p.nodes.end(), node) != p.nodes.end())
            return p;
    throw Error(ErrorCode::MalformedConfiguration, "unknown node '" + std::string(node) + "'");
}

std::vector<std::string> Sts::globals() const
{
    std::vector<std::string> out;
    for (const auto& v : variables)
        if (v.kind == StsVarKind::Scalar && v.owner.empty())
            out.push_back(v.name);
    return out;
}

std::vector<std::string> Sts::locals() const
{
    std::vector<std::string> out;
    for (const auto& v : variables)
        if (v.kind == StsVarKind::Scalar && !v.owner.empty())
            out.push_back(v.name);
    return out;
}

std::vector<std::string> Sts::scalars() const
{
    std::vector<std::string> out;
    for (const auto& v : variables)
        if (v.kind == StsVarKind::Scalar)
            out.push_back(v.name);
    return out;
}

Domains Sts::domains() const
{
    Domains out;
    for (const auto& v : variables)
        if (v.kind == StsVarKind::Scalar)
            out.emplace(v.name, v.domain);
    return out;
}

std::string mangle_local(const std::string& proc, const std::string& var)
{
    return proc + "__" + var;
}

namespace {

std::string short_name(const std::string& node)
{
    std::string s = node.rfind("n_", 0) == 0 ? node.substr(2) : node;
    s.erase(std::remove(s.begin(), s.end(), '_'), s.end());
    return s;
}

/// Local writes outside id(...) cannot be expressed next to a push or pop.
void require_frame_only(const Expr& label, const std::set<std::string>& locals, const std::string& what)
{
    for (const Expr& c : conjuncts(label)) {
        if (c.kind() == ExprKind::Unchanged)
            continue;
        for (const auto& w : variables(c).writes)
            if (locals.count(w))
                throw Error(ErrorCode::UnsupportedLabel,
                            what + " writes local '" + w + "' outside id(...): '" + to_string(label) + "'");
    }
}

std::string fresh(std::string name, const std::set<std::string>& taken)
{
    while (taken.count(name))
        name += "_";
    return name;
}

}  // namespace

Sts sts_of_flow_graph(const FlowGraph& fg, std::size_t stack_capacity)
{
    return sts_of_flow_graph(fg, {}, fg.init_globals, stack_capacity);
}

Sts sts_of_flow_graph(const FlowGraph& fg, const Domains& domains, const Expr& init_globals,
                      std::size_t stack_capacity)
{
    if (Diagnostics d = check_totality(fg); !d.empty())
        throw Error(ErrorCode::NonTotalFlowGraph, d.front().message);

    Sts sts;
    sts.main = fg.main;
    sts.stack_capacity = stack_capacity;
    sts.init_globals = init_globals;
    auto domain_of = [&](const VarDecl& v) {
        auto it = domains.find(v.name);
        return it == domains.end() ? v.domain : it->second;
    };

    std::set<std::string> taken;
    std::vector<StsVar> scalars;
    for (const auto& g : fg.globals) {
        scalars.push_back({g.name, StsVarKind::Scalar, domain_of(g), "", g.name});
        taken.insert(g.name);
    }
    for (const auto& p : fg.procedures) {
        StsProcedure sp{p.name, {}, {}, p.entry, p.ret};
        for (const auto& l : p.locals) {
            std::string m = mangle_local(p.name, l.name);
            if (!taken.insert(m).second)
                throw Error(ErrorCode::DuplicateName, "mangled local '" + m + "' clashes with another variable");
            scalars.push_back({m, StsVarKind::Scalar, domain_of(l), p.name, l.name});
            sp.locals.push_back(m);
            sts.init_locals[m] = p.init_locals.at(l.name);
        }
        for (const auto& n : p.nodes) {
            sp.nodes.push_back(n.id);
            sts.nodes.push_back(n.id);
        }
        sts.procedures.push_back(std::move(sp));
    }
    sts.node_var = fresh("n", taken);
    taken.insert(sts.node_var);
    sts.stack_var = fresh("st", taken);
    sts.variables.push_back({sts.node_var, StsVarKind::Node, Domain::unbounded(), "", "n"});
    sts.variables.push_back({sts.stack_var, StsVarKind::Stack, Domain::unbounded(), "", "st"});
    sts.variables.insert(sts.variables.end(), scalars.begin(), scalars.end());
    sts.init_node = fg.procedure(fg.main).entry;

    std::vector<std::string> all_locals = sts.locals();
    std::map<std::string, int> name_uses;
    auto add = [&](StsAction a) {
        int k = ++name_uses[a.name];
        if (k > 1)
            a.name += "_" + std::to_string(k);
        sts.actions.push_back(std::move(a));
    };

    for (const auto& p : fg.procedures) {
        const StsProcedure& sp = sts.procedure(p.name);
        std::set<std::string> own(sp.locals.begin(), sp.locals.end());
        std::set<std::string> plain;
        for (const auto& l : p.locals)
            plain.insert(l.name);
        auto mangle = [&](const Expr& e) {
            if (!e)
                return e;
            return rename_vars(e, [&](const std::string& x) {
                return plain.count(x) ? mangle_local(p.name, x) : x;
            });
        };
        std::vector<std::string> others;
        for (const auto& l : all_locals)
            if (!own.count(l))
                others.push_back(l);

        for (const auto& node : p.nodes) {
            Expr base = mangle(node.base);
            Expr guard = mangle(node.guard);
            for (const FlowEdge* e : p.out_edges(node.id)) {
                StsAction a;
                a.procedure = p.name;
                a.source = node.id;
                a.guard = guard;
                if (e->is_call()) {
                    const StsProcedure& q = sts.procedure(e->label);
                    require_frame_only(base, own, "call node '" + node.id + "'");
                    a.name = short_name(node.id) + "_call_" + e->label;
                    a.effect = StackEffect::Push;
                    a.target = q.entry;
                    a.return_site = e->to;
                    a.callee = q.name;
                    a.base = unprime(base, own);
                    std::set<std::string> reset(q.locals.begin(), q.locals.end());
                    for (const auto& l : q.locals)
                        a.resets[l] = sts.init_locals.at(l);
                    for (const auto& l : all_locals)
                        if (!reset.count(l))
                            a.unchanged.push_back(l);
                } else {
                    bool stutter = p.name == fg.main && node.id == p.ret && e->to == node.id;
                    a.name = short_name(node.id) + (stutter ? "_stutter" : "_to_" + short_name(e->to));
                    a.target = e->to;
                    a.base = base;
                    a.unchanged = others;
                }
                add(std::move(a));
            }
            if (node.id == p.ret && p.name != fg.main) {
                require_frame_only(base, own, "return node '" + node.id + "'");
                StsAction a;
                a.name = short_name(node.id) + "_return";
                a.effect = StackEffect::Pop;
                a.procedure = p.name;
                a.source = node.id;
                a.base = unprime(base, own);
                a.guard = guard;
                add(std::move(a));
            }
        }
    }
    return sts;
}

std::string to_string(const StsState& s)
{
    std::ostringstream os;
    os << "n=" << s.node << " | " << to_string(s.vars) << " | st=<";
    for (std::size_t i = 0; i < s.stack.size(); ++i)
        os << (i ? ", " : "") << "(" << s.stack[i].node << (s.stack[i].locals.empty() ? "" : ": ")
           << to_string(s.stack[i].locals) << ")";
    os << ">";
    return os.str();
}

StsStack stack_push(const StsStackEntry& entry, const StsStack& stack)
{
    StsStack out;
    out.reserve(stack.size() + 1);
    out.push_back(entry);
    out.insert(out.end(), stack.begin(), stack.end());
    return out;
}

std::pair<StsStackEntry, StsStack> stack_pop(const StsStack& stack)
{
    if (stack.empty())
        throw Error(ErrorCode::MalformedConfiguration, "pop from an empty stack");
    return {stack.front(), StsStack(stack.begin() + 1, stack.end())};
}

std::vector<StsState> sts_initial_states(const Sts& sts)
{
    Domains globals;
    for (const auto& v : sts.variables)
        if (v.kind == StsVarKind::Scalar && v.owner.empty())
            globals.emplace(v.name, v.domain);
    std::vector<StsState> out;
    for (auto& g : enumerate_valuations(globals, sts.init_globals)) {
        StsState s;
        s.node = sts.init_node;
        s.vars = std::move(g);
        for (const auto& [name, value] : sts.init_locals)
            s.vars[name] = value;
        out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<StsState> sts_successors(const Sts& sts, const StsState& s, bool* overflow)
{
    Domains domains = sts.domains();
    std::vector<std::string> scalars = sts.scalars();
    std::vector<StsState> out;
    for (const auto& a : sts.actions) {
        if (a.source && s.node != *a.source)
            continue;
        StsState next;
        Valuation fixed;
        switch (a.effect) {
        case StackEffect::None:
            next.node = a.target;
            next.stack = s.stack;
            break;
        case StackEffect::Push: {
            if (s.stack.size() >= sts.stack_capacity) {
                if (overflow)
                    *overflow = true;
                continue;
            }
            next.node = a.target;
            StsStackEntry saved{a.return_site, {}};
            for (const auto& l : sts.locals())
                saved.locals[l] = s.vars.at(l);
            next.stack = stack_push(saved, s.stack);
            fixed = a.resets;
            break;
        }
        case StackEffect::Pop: {
            if (s.stack.empty())
                continue;
            auto [top, rest] = stack_pop(s.stack);
            next.node = top.node;
            next.stack = std::move(rest);
            fixed = std::move(top.locals);
            break;
        }
        }
        for (const auto& x : a.unchanged)
            fixed.emplace(x, s.vars.at(x));

        Expr label = a.label();
        std::set<std::string> written = variables(label).writes;
        std::vector<Expr> parts{label};
        for (const auto& [x, v] : fixed)
            parts.push_back(binary(BinaryOp::Eq, var(x, true), literal(v)));
        for (const auto& x : scalars)
            if (!fixed.count(x) && !written.count(x))
                parts.push_back(binary(BinaryOp::Eq, var(x, true), any_of(domains.at(x))));

        for (State& t : enumerate_posts(Action(conj(parts)), State{{}, s.vars}, domains)) {
            StsState v = next;
            v.vars = std::move(t.global);
            out.push_back(std::move(v));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

StsReport execute_sts(const Sts& sts, std::size_t max_steps)
{
    StsReport report;
    std::vector<StsState> layer;
    for (auto& s : sts_initial_states(sts))
        if (report.reachable.insert(s).second)
            layer.push_back(std::move(s));
    for (std::size_t depth = 0; !layer.empty(); ++depth) {
        std::vector<StsState> next_layer;
        for (const auto& s : layer) {
            bool overflow = false;
            auto succ = sts_successors(sts, s, &overflow);
            if (succ.empty())
                report.deadlocks.push_back({s, overflow ? "StackOverflow" : "NoEnabledAction"});
            for (auto& v : succ) {
                if (report.reachable.count(v))
                    continue;
                if (depth >= max_steps) {
                    report.truncated = true;
                    continue;
                }
                report.reachable.insert(v);
                next_layer.push_back(std::move(v));
            }
        }
        layer = std::move(next_layer);
    }
    return report;
}

StsState encode(const Sts& sts, const Configuration& c)
{
    if (c.stack.empty())
        throw Error(ErrorCode::MalformedConfiguration, "empty stack");
    // views[i]: every local as seen with frame i on top.
    std::vector<Valuation> views(c.stack.size());
    Valuation view = sts.init_locals;
    for (std::size_t i = c.stack.size(); i-- > 0;) {
        const StackFrame& f = c.stack[i];
        const StsProcedure& p = sts.owner_of(f.node);
        for (const auto& m : p.locals) {
            const StsVar* v = sts.find_var(m);
            auto it = f.local.find(v->base);
            if (it == f.local.end())
                throw Error(ErrorCode::MalformedConfiguration, "frame of '" + f.node + "' lacks '" + v->base + "'");
            view[m] = it->second;
        }
        views[i] = view;
    }
    StsState s;
    s.node = c.top().node;
    s.vars = c.global;
    for (const auto& [name, value] : views[0])
        s.vars[name] = value;
    for (std::size_t i = 1; i < c.stack.size(); ++i)
        s.stack.push_back({c.stack[i].node, views[i]});
    return s;
}

EquivalenceVerdict compare_with_pds(const Sts& sts, const InducedPds& pds, std::size_t max_steps,
                                    std::size_t max_stack)
{
    if (max_stack > sts.stack_capacity)
        throw Error(ErrorCode::BoundMismatch, "max_stack " + std::to_string(max_stack)
                                                  + " exceeds the stack capacity "
                                                  + std::to_string(sts.stack_capacity));
    if (max_stack < 1 || max_steps < 1)
        throw Error(ErrorCode::InvalidArgument, "bounds must be at least 1");
    const std::size_t max_entries = max_stack - 1;

    EquivalenceVerdict verdict;
    auto diverge = [&](std::string witness) {
        verdict.equivalent = false;
        verdict.witness = std::move(witness);
        return verdict;
    };

    // Initial states.
    std::set<StsState> sts_init;
    for (auto& s : sts_initial_states(sts))
        sts_init.insert(std::move(s));
    std::set<StsState> pds_init;
    for (const auto& c : pds.initial)
        pds_init.insert(encode(sts, c));
    for (const auto& s : sts_init)
        if (!pds_init.count(s))
            return diverge("initial in STS only: " + to_string(s));
    for (const auto& s : pds_init)
        if (!sts_init.count(s))
            return diverge("initial in PDS only: " + to_string(s));

    // PDS side in BFS order, checking successor sets state by state.
    std::map<StsState, Configuration> seen;
    std::vector<Configuration> layer;
    for (const auto& c : pds.initial) {
        if (c.stack.size() > max_stack)
            continue;
        auto [it, inserted] = seen.emplace(encode(sts, c), c);
        if (!inserted && it->second != c)
            return diverge("configurations " + to_string(c) + " and " + to_string(it->second)
                           + " encode to the same STS state");
        if (inserted)
            layer.push_back(c);
    }
    for (std::size_t depth = 0; !layer.empty(); ++depth) {
        std::vector<Configuration> next_layer;
        for (const auto& c : layer) {
            StsState u = encode(sts, c);
            std::set<StsState> expected;
            for (const auto& d : successors(pds, c))
                if (d.stack.size() <= max_stack)
                    expected.insert(encode(sts, d));
            std::set<StsState> actual;
            for (auto& v : sts_successors(sts, u))
                if (v.stack.size() <= max_entries)
                    actual.insert(std::move(v));
            for (const auto& v : actual)
                if (!expected.count(v))
                    return diverge("step from " + to_string(u) + " to " + to_string(v) + " exists only in the STS");
            for (const auto& v : expected)
                if (!actual.count(v))
                    return diverge("step from " + to_string(u) + " to " + to_string(v) + " exists only in the PDS");

            for (const auto& d : successors(pds, c)) {
                if (d.stack.size() > max_stack) {
                    verdict.truncated = true;
                    continue;
                }
                StsState e = encode(sts, d);
                auto it = seen.find(e);
                if (it != seen.end()) {
                    if (it->second != d)
                        return diverge("configurations " + to_string(d) + " and " + to_string(it->second)
                                       + " encode to the same STS state");
                    continue;
                }
                if (depth >= max_steps) {
                    verdict.truncated = true;
                    continue;
                }
                seen.emplace(std::move(e), d);
                next_layer.push_back(d);
            }
        }
        layer = std::move(next_layer);
    }

    // STS side explored on its own.
    std::set<StsState> reach;
    std::vector<StsState> frontier;
    for (const auto& s : sts_init)
        if (reach.insert(s).second)
            frontier.push_back(s);
    for (std::size_t depth = 0; !frontier.empty(); ++depth) {
        std::vector<StsState> next;
        for (const auto& s : frontier) {
            for (auto& v : sts_successors(sts, s)) {
                if (v.stack.size() > max_entries || reach.count(v) || depth >= max_steps)
                    continue;
                reach.insert(v);
                next.push_back(std::move(v));
            }
        }
        frontier = std::move(next);
    }

    verdict.pds_states = seen.size();
    verdict.sts_states = reach.size();
    for (const auto& s : reach)
        if (!seen.count(s))
            return diverge("reachable in the STS only: " + to_string(s));
    for (const auto& [s, c] : seen)
        if (!reach.count(s))
            return diverge("reachable in the PDS only: " + to_string(c));
    return verdict;
}

std::string to_string(Mutation m)
{
    switch (m) {
    case Mutation::NegateGuard: return "negate-guard";
    case Mutation::DropFrame: return "drop-frame";
    case Mutation::SwapPush: return "swap-push";
    case Mutation::DropReturnTest: return "drop-return-test";
    case Mutation::WrongInit: return "wrong-init";
    }
    return "?";
}

std::vector<Mutation> all_mutations()
{
    return {Mutation::NegateGuard, Mutation::DropFrame, Mutation::SwapPush, Mutation::DropReturnTest,
            Mutation::WrongInit};
}

Mutation parse_mutation(std::string_view text)
{
    for (Mutation m : all_mutations())
        if (to_string(m) == text)
            return m;
    throw Error(ErrorCode::InvalidArgument, "unknown mutation '" + std::string(text) + "'");
}

namespace {

/// Removes the first variable of the first non-empty id(...) conjunct.
bool drop_frame_conjunct(Expr& base)
{
    std::vector<Expr> parts = conjuncts(base);
    for (auto& c : parts) {
        if (c.kind() == ExprKind::Unchanged && !c->vars.empty()) {
            std::vector<std::string> vars(c->vars.begin() + 1, c->vars.end());
            c = unchanged(std::move(vars));
            base = conj(parts);
            return true;
        }
    }
    return false;
}

}  // namespace

Sts mutate(const Sts& sts, Mutation m)
{
    Sts out = sts;
    auto none = [&]() -> Sts {
        throw Error(ErrorCode::InvalidArgument, "the transition system has no place for mutation " + to_string(m));
    };
    switch (m) {
    case Mutation::NegateGuard:
        for (auto& a : out.actions)
            if (a.guard) {
                a.guard = negate(a.guard);
                return out;
            }
        return none();
    case Mutation::DropFrame:
        for (auto& a : out.actions)
            if (drop_frame_conjunct(a.base))
                return out;
        for (auto& a : out.actions)
            if (!a.unchanged.empty()) {
                a.unchanged.erase(a.unchanged.begin());
                return out;
            }
        return none();
    case Mutation::SwapPush:
        for (auto& a : out.actions)
            if (a.effect == StackEffect::Push) {
                std::swap(a.target, a.return_site);
                return out;
            }
        return none();
    case Mutation::DropReturnTest:
        for (auto& a : out.actions)
            if (a.effect == StackEffect::Pop) {
                a.source.reset();
                return out;
            }
        return none();
    case Mutation::WrongInit:
        if (out.init_globals) {
            out.init_globals = negate(out.init_globals);
            return out;
        }
        for (const auto& l : out.procedure(out.main).locals) {
            const StsVar* v = out.find_var(l);
            if (!v->domain.finite() || v->domain.size() < 2)
                continue;
            for (const Value& alt : v->domain.values())
                if (alt != out.init_locals.at(l)) {
                    out.init_locals[l] = alt;
                    return out;
                }
        }
        for (const auto& n : out.procedure(out.main).nodes)
            if (n != out.init_node) {
                out.init_node = n;
                return out;
            }
        return none();
    }
    return none();
}

}  // namespace flowmc
