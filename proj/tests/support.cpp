#include "support.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace flowmc::test {

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fixture_path(const std::string& name)
{
    return std::string(FLOWMC_FIXTURE_DIR) + "/" + name + ".apg";
}

std::string fixture_text(const std::string& name)
{
    return read_file(fixture_path(name));
}

AnnotatedProgram load_fixture(const std::string& name)
{
    ParseResult r = parse_program(fixture_text(name));
    if (!r.ok()) {
        std::string msg = "fixture " + name + " does not load:";
        for (const auto& d : r.diagnostics)
            msg += " " + d.to_string();
        throw std::runtime_error(msg);
    }
    return *r.program;
}

std::string golden_mismatch(const std::string& file, const std::string& text)
{
    std::string path = std::string(FLOWMC_GOLDEN_DIR) + "/" + file;
    const char* update = std::getenv("FLOWMC_UPDATE_GOLDEN");
    if (update && std::string(update) == "1") {
        std::ofstream out(path, std::ios::binary);
        out << text;
        return out ? "" : "cannot write " + path;
    }
    std::string want;
    try {
        want = read_file(path);
    } catch (const std::exception&) {
        return "missing golden " + path;
    }
    std::string got = normalize_header(text);
    want = normalize_header(want);
    if (got == want)
        return "";
    std::size_t i = 0;
    while (i < got.size() && i < want.size() && got[i] == want[i])
        ++i;
    std::size_t line = 1 + std::count(got.begin(), got.begin() + static_cast<long>(i), '\n');
    return file + " differs from the golden at line " + std::to_string(line);
}

const std::vector<std::string>& emittable_fixtures()
{
    static const std::vector<std::string> names{"stee",           "minimal",   "call_return",
                                                "guarded_branch", "annotated_callee", "mode_violation",
                                                "mode_safe"};
    return names;
}

// ---------------------------------------------------------------------------
// Random expressions

namespace {

int pick(Rng& rng, int n)
{
    return std::uniform_int_distribution<int>(0, n - 1)(rng);
}

bool coin(Rng& rng, double p = 0.5)
{
    return std::bernoulli_distribution(p)(rng);
}

std::vector<std::string> of_type(const Domains& doms, Type t)
{
    std::vector<std::string> out;
    for (const auto& [name, d] : doms)
        if (d.type() == t)
            out.push_back(name);
    return out;
}

Expr leaf_var(Rng& rng, const std::vector<std::string>& names, bool primes)
{
    return var(names[pick(rng, static_cast<int>(names.size()))], primes && coin(rng));
}

}  // namespace

Expr random_int_expr(Rng& rng, const Domains& doms, int depth, bool primes)
{
    auto ints = of_type(doms, Type::Int);
    if (depth <= 0 || coin(rng, 0.4)) {
        if (!ints.empty() && coin(rng, 0.7))
            return leaf_var(rng, ints, primes);
        return int_lit(pick(rng, 4));
    }
    static const BinaryOp ops[] = {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div, BinaryOp::Mod};
    BinaryOp op = ops[pick(rng, 5)];
    Expr lhs = random_int_expr(rng, doms, depth - 1, primes);
    if (op == BinaryOp::Div || op == BinaryOp::Mod)
        return binary(op, lhs, int_lit(1 + pick(rng, 3)));
    return binary(op, lhs, random_int_expr(rng, doms, depth - 1, primes));
}

Expr random_bool_expr(Rng& rng, const Domains& doms, int depth, bool primes)
{
    auto bools = of_type(doms, Type::Bool);
    auto ints = of_type(doms, Type::Int);
    if (depth <= 0 || coin(rng, 0.3)) {
        int k = pick(rng, 3);
        if (k == 0 && !bools.empty())
            return leaf_var(rng, bools, primes);
        if (k == 1 && !ints.empty()) {
            static const BinaryOp cmp[] = {BinaryOp::Eq, BinaryOp::Ne, BinaryOp::Lt,
                                           BinaryOp::Le, BinaryOp::Gt, BinaryOp::Ge};
            return binary(cmp[pick(rng, 6)], random_int_expr(rng, doms, 1, primes), int_lit(pick(rng, 3)));
        }
        if (!bools.empty() && coin(rng, 0.7))
            return leaf_var(rng, bools, primes);
        return bool_lit(coin(rng));
    }
    switch (pick(rng, 5)) {
    case 0: return unary(UnaryOp::Not, random_bool_expr(rng, doms, depth - 1, primes));
    case 1:
        return binary(BinaryOp::Or, random_bool_expr(rng, doms, depth - 1, primes),
                      random_bool_expr(rng, doms, depth - 1, primes));
    case 2:
        return binary(BinaryOp::Implies, random_bool_expr(rng, doms, depth - 1, primes),
                      random_bool_expr(rng, doms, depth - 1, primes));
    case 3:
        if (!bools.empty())
            return binary(coin(rng) ? BinaryOp::Eq : BinaryOp::Ne, leaf_var(rng, bools, primes),
                          random_bool_expr(rng, doms, depth - 1, primes));
        [[fallthrough]];
    default:
        return binary(BinaryOp::And, random_bool_expr(rng, doms, depth - 1, primes),
                      random_bool_expr(rng, doms, depth - 1, primes));
    }
}

Valuation random_valuation(Rng& rng, const Domains& doms)
{
    Valuation v;
    for (const auto& [name, d] : doms) {
        if (d.kind == Domain::Kind::Bool)
            v[name] = Value::boolean(coin(rng));
        else
            v[name] = Value::integer(std::uniform_int_distribution<std::int64_t>(d.lo, d.hi)(rng));
    }
    return v;
}

std::vector<Valuation> all_valuations(const Domains& doms)
{
    std::vector<Valuation> out{Valuation{}};
    for (const auto& [name, d] : doms) {
        std::vector<Value> values;
        if (d.kind == Domain::Kind::Bool) {
            values = {Value::boolean(false), Value::boolean(true)};
        } else {
            if (d.kind == Domain::Kind::Unbounded)
                throw std::runtime_error("unbounded domain for " + name);
            for (auto x = d.lo; x <= d.hi; ++x)
                values.push_back(Value::integer(x));
        }
        std::vector<Valuation> next;
        for (const auto& partial : out)
            for (const auto& v : values) {
                Valuation w = partial;
                w[name] = v;
                next.push_back(std::move(w));
            }
        out = std::move(next);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Random programs

namespace {

struct Scope {
    std::vector<VarDecl> vars;

    Domains domains() const
    {
        Domains d;
        for (const auto& v : vars)
            d.emplace(v.name, v.domain);
        return d;
    }
};

class ProgramGen {
public:
    ProgramGen(Rng& rng, const GenOptions& o) : rng_(rng), o_(o) {}

    AnnotatedProgram run()
    {
        AnnotatedProgram p;
        p.name = "gen";
        int nglobals = 1 + pick(rng_, o_.max_globals);
        for (int i = 0; i < nglobals; ++i)
            p.globals.push_back({"g" + std::to_string(i), domain()});
        if (o_.init_globals && coin(rng_)) {
            const VarDecl& g = p.globals[pick(rng_, nglobals)];
            p.init_globals = binary(BinaryOp::Eq, var(g.name), literal(g.domain.values().front()));
        }

        int nprocs = 1 + pick(rng_, o_.max_procs + 1);
        for (int i = 0; i < nprocs; ++i)
            names_.push_back(i == 0 ? "main" : "p" + std::to_string(i));
        for (int i = 0; i < nprocs; ++i)
            annotated_.push_back(i > 0 && o_.contracts && coin(rng_, 0.4));

        for (int i = 0; i < nprocs; ++i)
            p.procedures.push_back(annotated_[i] ? annotated_procedure(p, i) : plain_procedure(p, i));
        return p;
    }

private:
    Domain domain()
    {
        if (!o_.ints || coin(rng_))
            return Domain::boolean();
        return Domain::range(0, 1 + pick(rng_, static_cast<int>(o_.max_hi)));
    }

    /// `v = rhs` with rhs over old values, `v != old(v)`, or nothing (havoc).
    Expr ensures_clause(const VarDecl& v, const Scope& scope)
    {
        int k = pick(rng_, 3);
        if (k == 2)
            return Expr();
        if (k == 1)
            return binary(BinaryOp::Ne, var(v.name), old(v.name));
        return binary(BinaryOp::Eq, var(v.name), olds(value_for(v, scope)));
    }

    static Expr olds(const Expr& e)
    {
        const ExprNode& n = e.node();
        if (n.kind == ExprKind::Var)
            return old(n.name);
        if (n.args.empty())
            return e;
        ExprNode copy = n;
        for (auto& a : copy.args)
            a = olds(a);
        return Expr(std::move(copy));
    }

    Contract contract(const Scope& scope)
    {
        std::vector<std::string> assigns;
        for (const auto& v : scope.vars)
            if (coin(rng_))
                assigns.push_back(v.name);
        Expr req = coin(rng_, 0.2) ? random_bool_expr(rng_, scope.domains(), 1, false) : bool_lit(true);
        Expr ens;
        for (const auto& name : assigns) {
            const VarDecl& v = *std::find_if(scope.vars.begin(), scope.vars.end(),
                                             [&](const VarDecl& d) { return d.name == name; });
            ens = conj(ens, ensures_clause(v, scope));
        }
        return Contract::spec(req, ens ? ens : bool_lit(true), assigns);
    }

    /// An expression of the variable's type that stays inside its domain.
    Expr value_for(const VarDecl& v, const Scope& scope)
    {
        Domains doms = scope.domains();
        if (v.domain.kind == Domain::Kind::Bool) {
            int k = pick(rng_, 3);
            if (k == 0)
                return bool_lit(coin(rng_));
            auto bools = of_type(doms, Type::Bool);
            if (k == 1 && !bools.empty())
                return unary(UnaryOp::Not, var(bools[pick(rng_, static_cast<int>(bools.size()))]));
            return random_bool_expr(rng_, doms, 1, false);
        }
        auto ints = of_type(doms, Type::Int);
        if (ints.empty() || coin(rng_, 0.3))
            return int_lit(pick(rng_, static_cast<int>(v.domain.hi) + 1));
        Expr w = var(ints[pick(rng_, static_cast<int>(ints.size()))]);
        return binary(BinaryOp::Mod, binary(BinaryOp::Add, w, int_lit(1 + pick(rng_, 2))), int_lit(v.domain.hi + 1));
    }

    AnnotatedProcedure annotated_procedure(const AnnotatedProgram& p, int i)
    {
        AnnotatedProcedure proc;
        proc.name = names_[i];
        proc.entry_block = "h";
        AnnotatedBlock b;
        b.id = "h";
        // Callers of any procedure see exactly the globals in common.
        b.contract = contract(Scope{p.globals});
        b.points.push_back({"r", Statement::ret()});
        b.entry = b.exit = "r";
        proc.blocks.push_back(std::move(b));
        return proc;
    }

    AnnotatedProcedure plain_procedure(const AnnotatedProgram& p, int i)
    {
        AnnotatedProcedure proc;
        proc.name = names_[i];
        int nlocals = pick(rng_, o_.max_locals + 1);
        for (int k = 0; k < nlocals; ++k) {
            VarDecl l{"l" + std::to_string(i) + "_" + std::to_string(k), domain()};
            auto values = l.domain.values();
            proc.init_locals[l.name] = values[pick(rng_, static_cast<int>(values.size()))];
            proc.locals.push_back(l);
        }
        Scope scope{p.globals};
        scope.vars.insert(scope.vars.end(), proc.locals.begin(), proc.locals.end());

        std::vector<int> callees;
        for (int k = 0; k < static_cast<int>(names_.size()); ++k)
            if (o_.recursion || k > i)
                callees.push_back(k);

        int njumps = o_.jumps ? pick(rng_, 3) : 0;
        proc.entry_block = "b0";
        proc.blocks.push_back(chain_block("b0", 1 + pick(rng_, 4), true, 0, njumps, scope, callees));
        for (int k = 1; k <= njumps; ++k) {
            std::string id = "j" + std::to_string(k);
            if (o_.contracts && coin(rng_)) {
                AnnotatedBlock b;
                b.id = id;
                b.contract = contract(scope);
                b.points.push_back({"s", Statement::skip()});
                b.entry = b.exit = "s";
                proc.blocks.push_back(std::move(b));
            } else {
                proc.blocks.push_back(chain_block(id, 1 + pick(rng_, 2), false, k, njumps, scope, callees));
            }
        }
        return proc;
    }

    Statement statement(int block_index, int njumps, const Scope& scope, const std::vector<int>& callees)
    {
        while (true) {
            switch (pick(rng_, 4)) {
            case 0: {
                const VarDecl& v = scope.vars[pick(rng_, static_cast<int>(scope.vars.size()))];
                return Statement::assign(v.name, value_for(v, scope));
            }
            case 1:
                if (!callees.empty())
                    return Statement::call(names_[callees[pick(rng_, static_cast<int>(callees.size()))]]);
                break;
            case 2:
                if (block_index < njumps)
                    return Statement::jump("j" + std::to_string(block_index + 1 + pick(rng_, njumps - block_index)));
                break;
            default: return Statement::skip();
            }
        }
    }

    Expr guard(const Scope& scope)
    {
        return random_bool_expr(rng_, scope.domains(), 1, false);
    }

    AnnotatedBlock chain_block(const std::string& id, int length, bool root, int block_index, int njumps,
                               const Scope& scope, const std::vector<int>& callees)
    {
        AnnotatedBlock b;
        b.id = id;
        auto pt = [](int k) { return "p" + std::to_string(k); };
        for (int k = 0; k < length; ++k) {
            bool last = k == length - 1;
            Statement s = root && last ? Statement::ret() : statement(block_index, njumps, scope, callees);
            b.points.push_back({pt(k), s});
        }
        b.entry = pt(0);
        b.exit = pt(length - 1);
        for (int k = 0; k + 1 < length; ++k) {
            int shape = o_.guards ? pick(rng_, 5) : 0;
            if (shape == 1) {
                Expr g = guard(scope);
                b.edges.push_back({pt(k), pt(k + 1), g});
                b.edges.push_back({pt(k), pt(k + 1), unary(UnaryOp::Not, g)});
            } else if (shape == 2 && k + 2 < length) {
                Expr g = guard(scope);
                b.edges.push_back({pt(k), pt(k + 1), g});
                b.edges.push_back({pt(k), pt(k + 2), unary(UnaryOp::Not, g)});
            } else if (shape == 3) {
                Expr g = guard(scope);
                b.edges.push_back({pt(k), pt(k + 1), g});
                b.edges.push_back({pt(k), pt(pick(rng_, k + 1)), unary(UnaryOp::Not, g)});
            } else {
                b.edges.push_back({pt(k), pt(k + 1), Expr()});
            }
        }
        return b;
    }

    Rng& rng_;
    const GenOptions& o_;
    std::vector<std::string> names_;
    std::vector<bool> annotated_;
};

}  // namespace

AnnotatedProgram random_program(Rng& rng, const GenOptions& o)
{
    return ProgramGen(rng, o).run();
}

// ---------------------------------------------------------------------------
// Brute-force PDS

BruteForcePds::BruteForcePds(const FlowGraph& fg) : fg_(fg)
{
    Domains globals;
    for (const auto& g : fg.globals)
        globals.emplace(g.name, g.domain);
    auto gvals = all_valuations(globals);

    for (const auto& p : fg.procedures) {
        Domains locals;
        for (const auto& l : p.locals)
            locals.emplace(l.name, l.domain);
        auto lvals = all_valuations(locals);
        for (const auto& n : p.nodes) {
            auto out = p.out_edges(n.id);
            bool pops = n.id == p.ret && p.name != fg.main;
            for (const auto& g : gvals)
                for (const auto& l : lvals) {
                    auto& rewrites = table_[Key{n.id, l, g}];
                    for (const auto& g2 : gvals)
                        for (const auto& l2 : lvals) {
                            if (!eval_action(n.action, State{l, g}, State{l2, g2}))
                                continue;
                            for (const FlowEdge* e : out) {
                                if (e->is_call()) {
                                    const ProcedureFlowGraph& q = fg.procedure(e->label);
                                    rewrites.push_back({g2, {{q.entry, q.init_locals}, {e->to, l2}}});
                                } else {
                                    rewrites.push_back({g2, {{e->to, l2}}});
                                }
                                ++rules_;
                            }
                            if (pops) {
                                rewrites.push_back({g2, {}});
                                ++rules_;
                            }
                        }
                }
        }
    }
}

std::vector<Configuration> BruteForcePds::initial() const
{
    Domains globals;
    for (const auto& g : fg_.globals)
        globals.emplace(g.name, g.domain);
    const ProcedureFlowGraph& main = fg_.procedure(fg_.main);
    std::vector<Configuration> out;
    for (const auto& g : all_valuations(globals))
        if (!fg_.init_globals || evaluate(fg_.init_globals, g).as_bool())
            out.push_back(Configuration{{{main.entry, main.init_locals}}, g});
    return out;
}

std::vector<Configuration> BruteForcePds::successors(const Configuration& c) const
{
    std::set<Configuration> out;
    const StackFrame& top = c.stack.front();
    auto it = table_.find(Key{top.node, top.local, c.global});
    if (it == table_.end())
        throw std::runtime_error("oracle: no rules for " + to_string(c));
    for (const auto& r : it->second) {
        Configuration next;
        next.global = r.global;
        next.stack = r.frames;
        next.stack.insert(next.stack.end(), c.stack.begin() + 1, c.stack.end());
        out.insert(std::move(next));
    }
    return {out.begin(), out.end()};
}

std::set<Configuration> BruteForcePds::reachable(std::size_t max_stack) const
{
    std::set<Configuration> seen;
    std::deque<Configuration> work;
    for (auto& c : initial())
        if (seen.insert(c).second)
            work.push_back(c);
    while (!work.empty()) {
        Configuration c = work.front();
        work.pop_front();
        for (auto& n : successors(c))
            if (n.stack.size() <= max_stack && seen.insert(n).second)
                work.push_back(n);
    }
    return seen;
}

}  // namespace flowmc::test
