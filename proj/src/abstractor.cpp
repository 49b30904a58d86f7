#include "flowmc/flow_graph.hpp"

#include <algorithm>
#include <map>

namespace flowmc {

std::string FlowNode::display() const
{
    std::string base;
    switch (origin) {
    case NodeOrigin::Contract: base = "a_C(" + source + ")"; break;
    case NodeOrigin::Statement: base = source; break;
    case NodeOrigin::Identity: base = "id"; break;
    }
    if (guard) {
        bool loose = guard.kind() == ExprKind::Binary
                     && (guard->binary_op == BinaryOp::Or || guard->binary_op == BinaryOp::Implies);
        base += loose ? " && (" + to_string(guard) + ")" : " && " + to_string(guard);
    }
    return base;
}

const FlowNode* ProcedureFlowGraph::find_node(std::string_view id) const
{
    for (const auto& n : nodes)
        if (n.id == id)
            return &n;
    return nullptr;
}

const FlowNode& ProcedureFlowGraph::node(std::string_view id) const
{
    if (const FlowNode* n = find_node(id))
        return *n;
    throw Error(ErrorCode::MalformedConfiguration,
                "node '" + std::string(id) + "' does not belong to procedure '" + name + "'");
}

std::vector<const FlowEdge*> ProcedureFlowGraph::out_edges(std::string_view id) const
{
    std::vector<const FlowEdge*> out;
    for (const auto& e : edges)
        if (e.from == id)
            out.push_back(&e);
    return out;
}

const ProcedureFlowGraph* FlowGraph::find(std::string_view proc) const
{
    for (const auto& p : procedures)
        if (p.name == proc)
            return &p;
    return nullptr;
}

const ProcedureFlowGraph& FlowGraph::procedure(std::string_view proc) const
{
    if (const auto* p = find(proc))
        return *p;
    throw Error(ErrorCode::UnknownProcedure, "no flow graph for procedure '" + std::string(proc) + "'");
}

const ProcedureFlowGraph* FlowGraph::owner_of(std::string_view node) const
{
    for (const auto& p : procedures)
        if (p.find_node(node))
            return &p;
    return nullptr;
}

std::vector<std::string> FlowGraph::frame(const ProcedureFlowGraph& p) const
{
    std::vector<std::string> out;
    for (const auto& g : globals)
        out.push_back(g.name);
    for (const auto& l : p.locals)
        out.push_back(l.name);
    return out;
}

Domains FlowGraph::global_domains() const
{
    Domains out;
    for (const auto& g : globals)
        out.emplace(g.name, g.domain);
    return out;
}

Domains FlowGraph::domains(const ProcedureFlowGraph& p) const
{
    Domains out = global_domains();
    for (const auto& l : p.locals)
        out.emplace(l.name, l.domain);
    return out;
}

namespace {

/// One level of jump inlining: the unannotated jump at `block.point`.
struct Inline {
    std::string block;
    std::string point;
};
using Context = std::vector<Inline>;

struct Target {
    Context ctx;
    std::string block;
    std::string point;
    Expr guard;
    bool is_return = false;

    std::string key() const
    {
        if (is_return)
            return "<return>";
        std::string k;
        for (const auto& f : ctx)
            k += f.block + "." + f.point + "/";
        return k + block + "." + point + "|" + (guard ? to_string(guard) : "");
    }
};

bool annotated_procedure(const AnnotatedProgram& prog, const std::string& name)
{
    const AnnotatedProcedure* q = prog.find_procedure(name);
    if (!q)
        throw Error(ErrorCode::DanglingReference, "call to undeclared procedure '" + name + "'");
    const AnnotatedBlock* b = q->find_block(q->entry_block);
    if (!b)
        throw Error(ErrorCode::DanglingReference, "procedure '" + name + "' has no entry block");
    return !b->contract.is_empty();
}

class ProcedureTranslator {
public:
    ProcedureTranslator(const AnnotatedProgram& prog, const AnnotatedProcedure& proc, std::string abbrev)
        : prog_(prog), proc_(proc), abbrev_(std::move(abbrev)), frame_(frame_of(prog, proc)),
          domains_(domains_of(prog, proc))
    {
        for (const auto& [name, dom] : domains_)
            types_[name] = dom.type();
        entry_block_ = &block(proc_.entry_block);
    }

    ProcedureFlowGraph run()
    {
        ProcedureFlowGraph out;
        out.name = proc_.name;
        out.locals = proc_.locals;
        out.init_locals = proc_.init_locals;

        Target start = resolve({}, proc_.entry_block, entry_block_->entry, Expr());
        if (start.is_return)
            return_guards_.push_back(Expr());
        std::string entry = visit(start);

        auto ret = index_.find("<return>");
        if (ret == index_.end())
            throw Error(ErrorCode::UnreachableExit, "the exit of procedure '" + proc_.name + "' is unreachable");
        finish_return_node(nodes_[ret->second]);

        out.entry = entry;
        out.ret = nodes_[ret->second].id;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            out.nodes.push_back(std::move(nodes_[i]));
            for (auto& e : edges_[i])
                out.edges.push_back(std::move(e));
        }
        return out;
    }

    std::set<std::string> callees() const { return callees_; }

private:
    const AnnotatedBlock& block(const std::string& id) const
    {
        const AnnotatedBlock* b = proc_.find_block(id);
        if (!b)
            throw Error(ErrorCode::DanglingReference,
                        "procedure '" + proc_.name + "' has no block '" + id + "'");
        return *b;
    }

    const Statement& stmt_at(const std::string& b, const std::string& p) const
    {
        const ControlPoint* pt = block(b).find_point(p);
        if (!pt)
            throw Error(ErrorCode::DanglingReference, "block '" + b + "' has no point '" + p + "'");
        return pt->stmt;
    }

    std::string where(const std::string& b, const std::string& p) const
    {
        return "procedure " + proc_.name + ", " + b + "." + p;
    }

    /// Follows unannotated jumps until a point that becomes a node.
    Target resolve(Context ctx, std::string b, std::string p, Expr guard) const
    {
        std::set<std::string> chain;
        while (true) {
            const Statement& s = stmt_at(b, p);
            bool root_exit = ctx.empty() && b == proc_.entry_block && p == entry_block_->exit;
            bool inlined_jump = s.kind == StmtKind::Jump && block(s.block).contract.is_empty();
            if (root_exit) {
                if (inlined_jump)
                    throw Error(ErrorCode::UnsupportedReturnPoint,
                                "the return point " + where(b, p) + " is an unannotated jump");
                if (s.kind == StmtKind::Call && !annotated_procedure(prog_, s.proc))
                    throw Error(ErrorCode::UnsupportedReturnPoint,
                                "the return point " + where(b, p) + " calls unannotated '" + s.proc + "'");
                Target t{ctx, b, p, guard, true};
                return t;
            }
            if (!inlined_jump)
                return Target{std::move(ctx), std::move(b), std::move(p), std::move(guard), false};

            Target probe{ctx, b, p, Expr(), false};
            if (!chain.insert(probe.key()).second)
                throw Error(ErrorCode::CyclicUnannotatedJumps,
                            "unannotated jumps starting at " + where(b, p) + " never reach a control point");

            // Re-entering a block already on the inlining path reuses its copy.
            std::size_t level = ctx.size();
            for (std::size_t i = 0; i <= ctx.size(); ++i) {
                const std::string& at = i < ctx.size() ? ctx[i].block : b;
                if (at == s.block) {
                    level = i;
                    break;
                }
            }
            if (level < ctx.size())
                ctx.resize(level);
            else if (level == ctx.size() && b != s.block)
                ctx.push_back({b, p});
            std::string target = s.block;
            b = target;
            p = block(target).entry;
        }
    }

    /// Targets following point p of block b in context ctx.
    std::vector<Target> successors(const Context& ctx, const std::string& b, const std::string& p) const
    {
        const AnnotatedBlock& blk = block(b);
        std::vector<Target> out;
        if (p == blk.exit) {
            if (ctx.empty())
                return out;
            if (stmt_at(b, p).kind == StmtKind::Return) {
                out.push_back(Target{{}, "", "", Expr(), true});
                return out;
            }
            Context parent(ctx.begin(), ctx.end() - 1);
            return successors(parent, ctx.back().block, ctx.back().point);
        }
        for (const BlockEdge* e : blk.out_edges(p))
            out.push_back(resolve(ctx, b, e->to, e->guard));
        if (out.empty())
            throw Error(ErrorCode::DeadEndPoint, "control point " + where(b, p) + " has no successor");
        return out;
    }

    Action base_label(const Statement& s, FlowNode& node) const
    {
        switch (s.kind) {
        case StmtKind::Jump: {
            const AnnotatedBlock& target = block(s.block);
            node.origin = NodeOrigin::Contract;
            node.source = s.block;
            return contract_label(target.contract, "block '" + s.block + "'");
        }
        case StmtKind::Call:
            if (annotated_procedure(prog_, s.proc)) {
                const AnnotatedProcedure& q = *prog_.find_procedure(s.proc);
                node.origin = NodeOrigin::Contract;
                node.source = s.proc;
                return contract_label(q.find_block(q.entry_block)->contract, "procedure '" + s.proc + "'");
            }
            break;
        case StmtKind::Assign:
            node.origin = NodeOrigin::Statement;
            node.source = to_string(s);
            return action_of_statement(s, frame_);
        default:
            break;
        }
        node.origin = NodeOrigin::Identity;
        return id_action(frame_);
    }

    Action contract_label(const Contract& c, const std::string& what) const
    {
        for (const auto& x : c.assigns)
            if (!domains_.count(x))
                throw Error(ErrorCode::UnknownVariable, "contract of " + what + " assigns '" + x
                                                            + "', which is not visible in procedure '"
                                                            + proc_.name + "'");
        return action_of_contract(c, frame_, domains_);
    }

    void label(FlowNode& node, const Statement& s, const Expr& guard) const
    {
        Action base = base_label(s, node);
        node.guard = guard;
        node.base = base.expr();
        node.action = guard ? base && action_of_guard(guard) : base;
        if (typecheck(node.action.expr(), types_) != Type::Bool)
            throw Error(ErrorCode::TypeError, "label of " + node.point + " is not boolean");
    }

    std::string visit(const Target& t)
    {
        std::string key = t.key();
        if (auto it = index_.find(key); it != index_.end())
            return nodes_[it->second].id;

        std::size_t idx = nodes_.size();
        index_.emplace(key, idx);
        FlowNode node;
        node.id = "n_" + abbrev_ + "_" + std::to_string(idx + 1);
        std::string b = t.is_return ? proc_.entry_block : t.block;
        std::string p = t.is_return ? entry_block_->exit : t.point;
        node.point = b + "." + p;
        const Statement& s = stmt_at(b, p);
        if (!t.is_return)
            label(node, s, t.guard);
        nodes_.push_back(node);
        edges_.emplace_back();

        std::string call;
        if (s.kind == StmtKind::Call && !annotated_procedure(prog_, s.proc)) {
            call = s.proc;
            callees_.insert(call);
        }

        if (t.is_return) {
            if (proc_.name == prog_.main)
                edges_[idx].push_back({nodes_[idx].id, "", nodes_[idx].id});
            return nodes_[idx].id;
        }
        for (const Target& next : successors(t.ctx, t.block, t.point)) {
            if (next.is_return)
                return_guards_.push_back(next.guard);
            std::string to = visit(next);
            FlowEdge e{nodes_[idx].id, call, to};
            if (std::find(edges_[idx].begin(), edges_[idx].end(), e) == edges_[idx].end())
                edges_[idx].push_back(std::move(e));
        }
        return nodes_[idx].id;
    }

    void finish_return_node(FlowNode& node) const
    {
        Expr merged;
        bool unguarded = false;
        std::vector<std::string> seen;
        for (const Expr& g : return_guards_) {
            if (!g) {
                unguarded = true;
                break;
            }
            std::string text = to_string(g);
            if (std::find(seen.begin(), seen.end(), text) != seen.end())
                continue;
            seen.push_back(text);
            merged = merged ? binary(BinaryOp::Or, merged, g) : g;
        }
        label(node, stmt_at(proc_.entry_block, entry_block_->exit), unguarded ? Expr() : merged);
    }

    const AnnotatedProgram& prog_;
    const AnnotatedProcedure& proc_;
    std::string abbrev_;
    std::vector<std::string> frame_;
    Domains domains_;
    TypeEnv types_;
    const AnnotatedBlock* entry_block_ = nullptr;

    std::map<std::string, std::size_t> index_;
    std::vector<FlowNode> nodes_;
    std::vector<std::vector<FlowEdge>> edges_;
    std::vector<Expr> return_guards_;
    std::set<std::string> callees_;
};

std::string shortest_unique_prefix(const std::string& name, const std::vector<std::string>& all)
{
    for (std::size_t len = 1; len < name.size(); ++len) {
        std::string prefix = name.substr(0, len);
        bool unique = std::none_of(all.begin(), all.end(), [&](const std::string& other) {
            return other != name && other.compare(0, len, prefix) == 0;
        });
        if (unique)
            return prefix;
    }
    return name;
}

}  // namespace

FlowGraph translate(const AnnotatedProgram& prog)
{
    if (!prog.find_procedure(prog.main))
        throw Error(ErrorCode::UnknownProcedure, "main procedure '" + prog.main + "' is not declared");

    // Pass 1: which procedures survive (main plus unannotated call targets).
    std::set<std::string> kept{prog.main};
    std::vector<std::string> work{prog.main};
    while (!work.empty()) {
        std::string name = work.back();
        work.pop_back();
        ProcedureTranslator t(prog, *prog.find_procedure(name), name);
        t.run();
        for (const auto& q : t.callees())
            if (kept.insert(q).second)
                work.push_back(q);
    }

    std::vector<std::string> order;
    for (const auto& p : prog.procedures)
        if (kept.count(p.name))
            order.push_back(p.name);

    // Pass 2: final node names.
    FlowGraph fg;
    fg.main = prog.main;
    fg.globals = prog.globals;
    fg.init_globals = prog.init_globals;
    for (const auto& name : order) {
        ProcedureTranslator t(prog, *prog.find_procedure(name), shortest_unique_prefix(name, order));
        fg.procedures.push_back(t.run());
    }
    return fg;
}

std::set<std::string> reachable_nodes(const FlowGraph& fg, std::string_view proc)
{
    const ProcedureFlowGraph& p = fg.procedure(proc);
    std::set<std::string> seen{p.entry};
    std::vector<std::string> work{p.entry};
    while (!work.empty()) {
        std::string n = work.back();
        work.pop_back();
        for (const FlowEdge* e : p.out_edges(n))
            if (seen.insert(e->to).second)
                work.push_back(e->to);
    }
    return seen;
}

Diagnostics check_totality(const FlowGraph& fg)
{
    Diagnostics out;
    for (const auto& p : fg.procedures) {
        for (const auto& n : reachable_nodes(fg, p.name)) {
            if (p.name != fg.main && n == p.ret)
                continue;
            if (p.out_edges(n).empty())
                out.push_back({"NonTotalNode", "node '" + n + "' has no outgoing edge",
                               "procedure " + p.name + "/node " + n, 0, 0});
        }
    }
    return out;
}

}  // namespace flowmc
