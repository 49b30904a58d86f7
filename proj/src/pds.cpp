#include "flowmc/pds.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <sstream>

namespace flowmc {

std::string to_string(const StackFrame& f)
{
    if (f.local.empty())
        return "(" + f.node + ")";
    return "(" + f.node + ": " + to_string(f.local) + ")";
}

std::string to_string(const Configuration& c)
{
    std::string out;
    for (const auto& f : c.stack)
        out += (out.empty() ? "" : " ") + to_string(f);
    return out + " | " + to_string(c.global);
}

const ProcedureFlowGraph& InducedPds::procedure_of(const std::string& node) const
{
    auto it = owner.find(node);
    if (it == owner.end())
        throw Error(ErrorCode::MalformedConfiguration, "unknown node '" + node + "'");
    return flow_graph.procedure(it->second);
}

namespace {

/// Variables whose post value a label fixes syntactically (x' = e with e
/// prime-free, or x inside id(...)); these need no enumeration.
std::set<std::string> determined(const Action& a)
{
    std::set<std::string> out;
    for (const Expr& c : conjuncts(a.expr())) {
        if (c.kind() == ExprKind::Unchanged) {
            out.insert(c->vars.begin(), c->vars.end());
        } else if (c.kind() == ExprKind::Binary && c->binary_op == BinaryOp::Eq) {
            const Expr& lhs = c->args[0];
            const Expr& rhs = c->args[1];
            if (lhs.kind() == ExprKind::Var && lhs->primed && rhs.kind() != ExprKind::Any && !mentions_primed(rhs))
                out.insert(lhs->name);
        }
    }
    return out;
}

void check_frame(const InducedPds& pds, const StackFrame& f)
{
    const ProcedureFlowGraph& p = pds.procedure_of(f.node);
    if (f.local.size() != p.locals.size())
        throw Error(ErrorCode::MalformedConfiguration, "frame " + to_string(f) + " does not match the locals of '"
                                                           + p.name + "'");
    for (const auto& l : p.locals)
        if (!f.local.count(l.name))
            throw Error(ErrorCode::MalformedConfiguration,
                        "frame " + to_string(f) + " lacks local '" + l.name + "' of '" + p.name + "'");
}

}  // namespace

InducedPds induce(const FlowGraph& fg)
{
    return induce(fg, {}, fg.init_globals);
}

InducedPds induce(const FlowGraph& fg, const Domains& domains, const Expr& init_globals)
{
    InducedPds pds;
    pds.flow_graph = fg;
    auto override = [&](Domains d) {
        for (auto& [name, dom] : d)
            if (auto it = domains.find(name); it != domains.end())
                dom = it->second;
        return d;
    };
    pds.globals = override(fg.global_domains());
    for (const auto& p : fg.procedures) {
        pds.frames[p.name] = override(fg.domains(p));
        for (const auto& n : p.nodes)
            pds.owner[n.id] = p.name;
    }

    for (const auto& p : fg.procedures) {
        const Domains& doms = pds.frames[p.name];
        for (const auto& n : p.nodes) {
            std::set<std::string> fixed = determined(n.action);
            for (const auto& x : n.action.writes()) {
                auto it = doms.find(x);
                if (it == doms.end())
                    throw Error(ErrorCode::UnknownVariable, "node '" + n.id + "' writes undeclared '" + x + "'");
                if (!it->second.finite() && !fixed.count(x))
                    throw Error(ErrorCode::InfiniteDomain,
                                "node '" + n.id + "' chooses a value of unbounded '" + x + "'");
            }
        }
    }

    if (init_globals) {
        TypeEnv env;
        for (const auto& [name, dom] : pds.globals)
            env[name] = dom.type();
        if (typecheck(init_globals, env) != Type::Bool)
            throw Error(ErrorCode::TypeError, "initial predicate is not boolean");
    }
    const ProcedureFlowGraph& main = fg.procedure(fg.main);
    for (auto& g : enumerate_valuations(pds.globals, init_globals))
        pds.initial.push_back(Configuration{{StackFrame{main.entry, main.init_locals}}, std::move(g)});
    if (pds.initial.empty())
        throw Error(ErrorCode::UnsatisfiableInit, "no global state satisfies the initial predicate");
    std::sort(pds.initial.begin(), pds.initial.end());
    return pds;
}

std::vector<Configuration> successors(const InducedPds& pds, const Configuration& c)
{
    if (c.stack.empty())
        throw Error(ErrorCode::MalformedConfiguration, "empty stack");
    for (const auto& f : c.stack)
        check_frame(pds, f);

    const StackFrame& top = c.top();
    const ProcedureFlowGraph& p = pds.procedure_of(top.node);
    const FlowNode& node = p.node(top.node);
    std::vector<State> posts = enumerate_posts(node.action, State{top.local, c.global}, pds.frames.at(p.name));

    std::vector<Configuration> out;
    for (const FlowEdge* e : p.out_edges(top.node)) {
        for (const State& t : posts) {
            Configuration next;
            next.global = t.global;
            if (e->is_call()) {
                const ProcedureFlowGraph& q = pds.flow_graph.procedure(e->label);
                next.stack.reserve(c.stack.size() + 1);
                next.stack.push_back({q.entry, q.init_locals});
            } else {
                next.stack.reserve(c.stack.size());
            }
            next.stack.push_back({e->to, t.local});
            next.stack.insert(next.stack.end(), c.stack.begin() + 1, c.stack.end());
            out.push_back(std::move(next));
        }
    }
    if (top.node == p.ret && p.name != pds.flow_graph.main && c.stack.size() > 1) {
        for (const State& t : posts)
            out.push_back(Configuration{{c.stack.begin() + 1, c.stack.end()}, t.global});
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

ExploreReport explore(const InducedPds& pds, std::size_t max_steps, std::size_t max_stack)
{
    if (max_steps < 1 || max_stack < 1)
        throw Error(ErrorCode::InvalidArgument, "exploration bounds must be at least 1");
    ExploreReport report;
    std::vector<Configuration> layer;
    for (const auto& c : pds.initial) {
        if (c.stack.size() > max_stack) {
            report.truncated = true;
            continue;
        }
        if (report.visited.insert(c).second)
            layer.push_back(c);
    }
    for (std::size_t depth = 0; !layer.empty(); ++depth) {
        std::vector<Configuration> next_layer;
        for (const auto& c : layer) {
            report.max_stack_depth = std::max(report.max_stack_depth, c.stack.size());
            std::vector<Configuration> succ = successors(pds, c);
            if (succ.empty())
                report.deadlocks.insert(c);
            for (auto& s : succ) {
                if (report.visited.count(s))
                    continue;
                if (s.stack.size() > max_stack || depth >= max_steps) {
                    report.truncated = true;
                    continue;
                }
                report.visited.insert(s);
                next_layer.push_back(std::move(s));
            }
        }
        report.depth = depth;
        layer = std::move(next_layer);
    }
    return report;
}

Trace make_trace(std::vector<Configuration> configurations)
{
    Trace t;
    t.configurations = std::move(configurations);
    for (const auto& c : t.configurations)
        t.state_run.push_back(c.global);
    return t;
}

std::string Trace::to_string() const
{
    std::ostringstream os;
    for (std::size_t i = 0; i < configurations.size(); ++i) {
        const Configuration& c = configurations[i];
        os << i << " | " << flowmc::to_string(c.global) << " |";
        for (const auto& f : c.stack)
            os << ' ' << flowmc::to_string(f);
        os << '\n';
    }
    return os.str();
}

Verdict check_invariant(const InducedPds& pds, const Expr& phi, std::size_t max_steps, std::size_t max_stack)
{
    if (max_steps < 1 || max_stack < 1)
        throw Error(ErrorCode::InvalidArgument, "exploration bounds must be at least 1");
    VarSets vs = variables(phi);
    if (!vs.writes.empty())
        throw Error(ErrorCode::NonGlobalVariable, "invariant '" + to_string(phi) + "' mentions primed variables");
    TypeEnv env;
    for (const auto& x : vs.reads) {
        auto it = pds.globals.find(x);
        if (it == pds.globals.end())
            throw Error(ErrorCode::NonGlobalVariable, "invariant reads '" + x + "', which is not a global variable");
        env[x] = it->second.type();
    }
    if (typecheck(phi, env) != Type::Bool)
        throw Error(ErrorCode::TypeError, "invariant '" + to_string(phi) + "' is not boolean");

    Verdict verdict;
    std::map<Configuration, const Configuration*> parent;
    std::deque<std::pair<const Configuration*, std::size_t>> queue;

    auto violated = [&](const Configuration& c) { return !evaluate(phi, c.global).as_bool(); };
    auto report = [&](const Configuration* c) {
        std::vector<Configuration> path;
        for (; c; c = parent.at(*c))
            path.push_back(*c);
        std::reverse(path.begin(), path.end());
        verdict.holds = false;
        verdict.visited = parent.size();
        verdict.counterexample = make_trace(std::move(path));
        verdict.counterexample->complete = true;
        return verdict;
    };

    for (const auto& c : pds.initial) {
        if (c.stack.size() > max_stack) {
            verdict.truncated = true;
            continue;
        }
        auto [it, inserted] = parent.emplace(c, nullptr);
        if (!inserted)
            continue;
        if (violated(c))
            return report(&it->first);
        queue.emplace_back(&it->first, 0);
    }
    while (!queue.empty()) {
        auto [c, depth] = queue.front();
        queue.pop_front();
        for (auto& s : successors(pds, *c)) {
            if (parent.count(s))
                continue;
            if (s.stack.size() > max_stack || depth >= max_steps) {
                verdict.truncated = true;
                continue;
            }
            auto it = parent.emplace(std::move(s), c).first;
            if (violated(it->first))
                return report(&it->first);
            queue.emplace_back(&it->first, depth + 1);
        }
    }
    verdict.visited = parent.size();
    return verdict;
}

namespace {

/// Classifies configurations by whether some infinite run starts there.
/// Configurations whose successors leave the stack bound, or whose
/// reachable set exceeds the budget, count as live.
class Liveness {
public:
    Liveness(const InducedPds& pds, std::size_t max_stack) : pds_(pds), max_stack_(max_stack) {}

    bool live(const Configuration& c)
    {
        if (auto it = known_.find(c); it != known_.end())
            return it->second;
        classify(c);
        return known_.at(c);
    }

private:
    void classify(const Configuration& root)
    {
        constexpr std::size_t kBudget = 200000;
        std::map<Configuration, std::vector<Configuration>> graph;
        std::vector<Configuration> work{root};
        bool open = false;
        while (!work.empty()) {
            Configuration c = std::move(work.back());
            work.pop_back();
            if (graph.count(c) || known_.count(c))
                continue;
            if (graph.size() >= kBudget) {
                open = true;
                break;
            }
            auto succ = successors(pds_, c);
            std::vector<Configuration> kept;
            for (auto& s : succ) {
                if (s.stack.size() > max_stack_) {
                    open = true;
                    continue;
                }
                kept.push_back(s);
                work.push_back(std::move(s));
            }
            graph.emplace(std::move(c), std::move(kept));
        }
        if (open) {
            known_[root] = true;
            return;
        }
        // Peel off configurations all of whose successors are dead.
        std::set<Configuration> dead;
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& [c, succ] : graph) {
                if (dead.count(c))
                    continue;
                bool all_dead = std::all_of(succ.begin(), succ.end(), [&](const Configuration& s) {
                    if (auto it = known_.find(s); it != known_.end())
                        return !it->second;
                    return dead.count(s) > 0;
                });
                if (all_dead) {
                    dead.insert(c);
                    changed = true;
                }
            }
        }
        for (const auto& [c, succ] : graph)
            known_[c] = !dead.count(c);
    }

    const InducedPds& pds_;
    std::size_t max_stack_;
    std::map<Configuration, bool> known_;
};

}  // namespace

Trace sample_run(const InducedPds& pds, std::size_t length, std::uint64_t seed, std::size_t max_stack)
{
    if (length < 1)
        throw Error(ErrorCode::InvalidArgument, "run length must be at least 1");
    if (pds.initial.empty())
        throw Error(ErrorCode::NoInitialConfiguration, "the pushdown system has no initial configuration");

    std::mt19937_64 rng(seed);
    Liveness liveness(pds, max_stack);
    // Live options first; when none is live the walk enters a dead end so
    // that the deadlock it stops at is a real configuration.
    auto pick = [&](const std::vector<Configuration>& options) -> std::optional<Configuration> {
        std::vector<const Configuration*> live, bounded;
        for (const auto& c : options) {
            if (c.stack.size() > max_stack)
                continue;
            bounded.push_back(&c);
            if (liveness.live(c))
                live.push_back(&c);
        }
        const auto& pool = live.empty() ? bounded : live;
        if (pool.empty())
            return std::nullopt;
        return *pool[rng() % pool.size()];
    };

    std::vector<Configuration> run;
    std::optional<Configuration> current = pick(pds.initial);
    if (!current)
        current = pds.initial[rng() % pds.initial.size()];
    run.push_back(*current);
    bool deadlocked = false;
    while (run.size() < length) {
        std::optional<Configuration> next = pick(successors(pds, run.back()));
        if (!next) {
            deadlocked = true;
            break;
        }
        run.push_back(std::move(*next));
    }
    Trace t = make_trace(std::move(run));
    t.complete = t.configurations.size() == length;
    t.deadlocked = deadlocked;
    return t;
}

}  // namespace flowmc
