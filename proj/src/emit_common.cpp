#include "emit_internal.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace flowmc {

std::uint64_t fnv1a64(std::string_view bytes)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string digest_hex(std::string_view bytes)
{
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a64(bytes);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4)
        out[i] = digits[h & 0xf];
    return out;
}

std::string normalize_header(std::string_view text)
{
    for (std::string_view prefix : {"\\* flowmc ", "-- flowmc ", "// flowmc "}) {
        if (text.substr(0, prefix.size()) == prefix) {
            auto eol = text.find('\n');
            return eol == std::string_view::npos ? std::string() : std::string(text.substr(eol + 1));
        }
    }
    return std::string(text);
}

long call_depth(const Sts& sts)
{
    std::map<std::string, std::set<std::string>> calls;
    for (const auto& a : sts.actions)
        if (a.effect == StackEffect::Push)
            calls[a.procedure].insert(a.callee);

    std::map<std::string, long> memo;
    std::set<std::string> active;
    bool cyclic = false;
    std::function<long(const std::string&)> depth = [&](const std::string& p) -> long {
        if (auto it = memo.find(p); it != memo.end())
            return it->second;
        if (!active.insert(p).second) {
            cyclic = true;
            return 0;
        }
        long best = 0;
        for (const auto& q : calls[p])
            best = std::max(best, 1 + depth(q));
        active.erase(p);
        return memo[p] = best;
    };
    long d = depth(sts.main);
    return cyclic ? -1 : d;
}

std::vector<ActionShape> action_shapes(const Sts& sts)
{
    std::vector<ActionShape> out;
    for (const auto& a : sts.actions)
        out.push_back({a.name, a.source.value_or(""), a.effect == StackEffect::Pop ? "" : a.target, a.effect});
    return out;
}

namespace detail {

namespace {

int level(BinaryOp op)
{
    switch (op) {
    case BinaryOp::And:
    case BinaryOp::Or:
    case BinaryOp::Implies: return 1;
    case BinaryOp::Eq:
    case BinaryOp::Ne:
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return 2;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 3;
    default: return 4;
    }
}

bool associative(BinaryOp op)
{
    return op == BinaryOp::And || op == BinaryOp::Or || op == BinaryOp::Add || op == BinaryOp::Mul;
}

const char* symbol(BinaryOp op, Backend b)
{
    bool tla = b == Backend::Tla;
    switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "mod";
    case BinaryOp::Eq: return "=";
    case BinaryOp::Ne: return tla ? "#" : "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return tla ? "=<" : "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return tla ? "/\\" : "&";
    case BinaryOp::Or: return tla ? "\\/" : "|";
    case BinaryOp::Implies: return tla ? "=>" : "->";
    }
    return "?";
}

std::string name_of(const std::string& x, bool primed, Backend b)
{
    if (!primed)
        return x;
    return b == Backend::Tla ? x + "'" : "next(" + x + ")";
}

bool is_call_form(const Expr& e, Backend b)
{
    return b == Backend::Tla && e.kind() == ExprKind::Binary
        && (e->binary_op == BinaryOp::Div || e->binary_op == BinaryOp::Mod);
}

// Effective operator of a node for parenthesization, if it is infix.
std::optional<BinaryOp> infix_op(const Expr& e, Backend b)
{
    switch (e.kind()) {
    case ExprKind::Binary:
        if (is_call_form(e, b))
            return std::nullopt;
        if (e->binary_op == BinaryOp::Eq && e->args[1].kind() == ExprKind::Any)
            return BinaryOp::Eq;
        return e->binary_op;
    case ExprKind::Unchanged:
        if (b == Backend::Nuxmv && e->vars.size() > 1)
            return BinaryOp::And;
        return e->vars.empty() ? std::nullopt : std::optional(BinaryOp::Eq);
    default: return std::nullopt;
    }
}

std::string print(const Expr& e, Backend b);

std::string operand(const Expr& e, Backend b, BinaryOp parent)
{
    std::string s = print(e, b);
    if (e.kind() == ExprKind::IntLit && e->literal.as_int() < 0)
        return "(" + s + ")";
    auto op = infix_op(e, b);
    if (!op)
        return s;
    int lc = level(*op), lp = level(parent);
    bool wrap = lc < lp || (lc == lp && !(*op == parent && associative(parent)));
    return wrap ? "(" + s + ")" : s;
}

std::string unary_operand(const Expr& e, Backend b)
{
    std::string s = print(e, b);
    bool atomic = e.kind() == ExprKind::Var || e.kind() == ExprKind::Old || e.kind() == ExprKind::BoolLit
               || (e.kind() == ExprKind::IntLit && e->literal.as_int() >= 0) || is_call_form(e, b);
    return atomic ? s : "(" + s + ")";
}

std::string print(const Expr& e, Backend b)
{
    const ExprNode& n = e.node();
    bool tla = b == Backend::Tla;
    switch (n.kind) {
    case ExprKind::IntLit:
    case ExprKind::BoolLit: return print_value(n.literal, b);
    case ExprKind::Var: return name_of(n.name, n.primed, b);
    case ExprKind::Old: return n.name;
    case ExprKind::Any: return print_set(n.domain, b);
    case ExprKind::Unary:
        if (n.unary_op == UnaryOp::Not)
            return (tla ? "~" : "!") + unary_operand(n.args[0], b);
        return "-" + unary_operand(n.args[0], b);
    case ExprKind::Unchanged: {
        if (n.vars.empty())
            return "TRUE";
        std::string s;
        if (tla) {
            s = "UNCHANGED <<";
            for (std::size_t i = 0; i < n.vars.size(); ++i)
                s += (i ? ", " : "") + n.vars[i];
            return s + ">>";
        }
        for (std::size_t i = 0; i < n.vars.size(); ++i)
            s += (i ? " & " : "") + name_of(n.vars[i], true, b) + " = " + n.vars[i];
        return s;
    }
    case ExprKind::Binary: {
        const Expr& l = n.args[0];
        const Expr& r = n.args[1];
        if (n.binary_op == BinaryOp::Eq && r.kind() == ExprKind::Any) {
            if (!r->domain.finite())
                return "TRUE";
            return operand(l, b, BinaryOp::Eq) + (tla ? " \\in " : " in ") + print_set(r->domain, b);
        }
        if (is_call_form(e, b))
            return std::string(n.binary_op == BinaryOp::Div ? "TDiv(" : "TMod(") + print(l, b) + ", " + print(r, b) + ")";
        return operand(l, b, n.binary_op) + " " + symbol(n.binary_op, b) + " " + operand(r, b, n.binary_op);
    }
    }
    return "?";
}

bool mentions_division(const Expr& e)
{
    if (!e)
        return false;
    if (e.kind() == ExprKind::Binary && (e->binary_op == BinaryOp::Div || e->binary_op == BinaryOp::Mod))
        return true;
    return std::any_of(e->args.begin(), e->args.end(), mentions_division);
}

const std::set<std::string>& reserved(Backend b)
{
    static const std::set<std::string> tla{
        "ACTION", "ASSUME", "ASSUMPTION", "AXIOM", "BOOLEAN", "BY", "CASE", "CHOOSE", "CONSTANT", "CONSTANTS",
        "COROLLARY", "DEF", "DEFINE", "DEFS", "DOMAIN", "ELSE", "ENABLED", "EXCEPT", "EXTENDS", "FALSE", "HAVE",
        "HIDE", "IF", "IN", "INSTANCE", "LAMBDA", "LEMMA", "LET", "LOCAL", "MODULE", "NEW", "OBVIOUS", "OMITTED",
        "ONLY", "OTHER", "PICK", "PROOF", "PROPOSITION", "QED", "RECURSIVE", "STATE", "STRING", "SUBSET",
        "SUFFICES", "TAKE", "TEMPORAL", "THEN", "THEOREM", "TRUE", "UNCHANGED", "UNION", "USE", "VARIABLE",
        "VARIABLES", "WITH", "WITNESS",
        // Integers, Sequences and the names generated here
        "Nat", "Int", "Seq", "Len", "Head", "Tail", "Append", "SubSeq", "SelectSeq", "Init", "Next", "Spec",
        "vars", "push", "pop", "top", "StackCapacity", "TDiv", "TMod"};
    static const std::set<std::string> smv{
        "MODULE", "DEFINE", "MDEFINE", "CONSTANTS", "VAR", "IVAR", "FROZENVAR", "INIT", "TRANS", "INVAR", "SPEC",
        "CTLSPEC", "LTLSPEC", "PSLSPEC", "COMPUTE", "NAME", "INVARSPEC", "FAIRNESS", "JUSTICE", "COMPASSION",
        "ISA", "ASSIGN", "CONSTRAINT", "SIMPWFF", "CTLWFF", "LTLWFF", "PSLWFF", "COMPWFF", "IN", "MIN", "MAX",
        "MIRROR", "PRED", "PREDICATES", "process", "array", "of", "boolean", "integer", "real", "word", "word1",
        "bool", "signed", "unsigned", "extend", "resize", "sizeof", "uwconst", "swconst", "EX", "AX", "EF", "AF",
        "EG", "AG", "E", "F", "O", "G", "H", "X", "Y", "Z", "A", "U", "S", "V", "T", "BU", "EBF", "ABF", "EBG",
        "ABG", "case", "esac", "mod", "next", "init", "union", "in", "xor", "xnor", "self", "TRUE", "FALSE",
        "count", "abs", "max", "min", "toint", "floor", "typeof", "time", "clock", "continuous", "integer",
        // generated here
        "depth", "nil_node", "stack_keep", "push_locals", "pop_frame", "stk_node"};
    return b == Backend::Tla ? tla : smv;
}

}  // namespace

std::string print_expr(const Expr& e, Backend b)
{
    return e ? print(e, b) : "TRUE";
}

std::vector<Expr> ordered_conjuncts(const Expr& e)
{
    std::vector<Expr> frames, defs, rest;
    if (!e)
        return {};
    for (const Expr& c : conjuncts(e)) {
        if (is_true_literal(c) || (c.kind() == ExprKind::Unchanged && c->vars.empty()))
            continue;
        if (c.kind() == ExprKind::Unchanged)
            frames.push_back(c);
        else if (c.kind() == ExprKind::Binary && c->binary_op == BinaryOp::Eq && c->args[0].kind() == ExprKind::Var
                 && c->args[0]->primed)
            defs.push_back(c);
        else
            rest.push_back(c);
    }
    // A definition goes after every pending definition of a primed variable it reads.
    std::vector<Expr> out = frames;
    while (!defs.empty()) {
        std::size_t pick = 0;
        for (std::size_t i = 0; i < defs.size(); ++i) {
            auto reads = variables(defs[i]->args[1]).writes;
            bool ready = std::none_of(defs.begin(), defs.end(), [&](const Expr& d) {
                return d != defs[i] && reads.count(d->args[0]->name);
            });
            if (ready) {
                pick = i;
                break;
            }
        }
        out.push_back(defs[pick]);
        defs.erase(defs.begin() + static_cast<long>(pick));
    }
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

std::vector<std::string> print_conjuncts(const Expr& e, Backend b)
{
    std::vector<std::string> out;
    for (const Expr& c : ordered_conjuncts(e))
        out.push_back(operand(c, b, BinaryOp::And));
    return out;
}

std::string print_value(const Value& v, Backend)
{
    if (v.is_bool())
        return v.as_bool() ? "TRUE" : "FALSE";
    return std::to_string(v.as_int());
}

std::string print_set(const Domain& d, Backend b)
{
    switch (d.kind) {
    case Domain::Kind::Bool: return b == Backend::Tla ? "BOOLEAN" : "{TRUE, FALSE}";
    case Domain::Kind::Range: return std::to_string(d.lo) + ".." + std::to_string(d.hi);
    case Domain::Kind::Unbounded: return b == Backend::Tla ? "Int" : "integer";
    }
    return "?";
}

bool uses_division(const Sts& sts)
{
    if (mentions_division(sts.init_globals))
        return true;
    return std::any_of(sts.actions.begin(), sts.actions.end(),
                       [](const StsAction& a) { return mentions_division(a.base) || mentions_division(a.guard); });
}

std::string header_line(std::string_view comment, const EmitterOptions& opts)
{
    return std::string(comment) + " flowmc " + kVersion + " fnv1a64:"
         + (opts.source_digest.empty() ? "none" : opts.source_digest) + "\n";
}

void claim_name(const std::string& name, Backend b, std::set<std::string>& taken, const char* what)
{
    const char* backend = b == Backend::Tla ? "TLA+" : "nuXmv";
    if (!is_identifier(name))
        throw Error(ErrorCode::InvalidArgument, std::string(what) + " '" + name + "' is not an identifier");
    if (reserved(b).count(name) || (b == Backend::Tla && (name.rfind("WF_", 0) == 0 || name.rfind("SF_", 0) == 0)))
        throw Error(ErrorCode::InvalidArgument,
                    std::string(what) + " '" + name + "' is a reserved word in " + backend);
    if (!taken.insert(name).second)
        throw Error(ErrorCode::InvalidArgument,
                    std::string(what) + " '" + name + "' clashes with another name in the " + backend + " output");
}

Frame frame_of(const Sts& sts, const StsAction& a)
{
    Frame f;
    Expr label = a.label();
    std::set<std::string> written = variables(label).writes;
    std::set<std::string> pinned;  // forced by id(...) or `x' = any(...)`
    for (const Expr& c : conjuncts(label)) {
        if (c.kind() == ExprKind::Unchanged)
            pinned.insert(c->vars.begin(), c->vars.end());
        else if (c.kind() == ExprKind::Binary && c->binary_op == BinaryOp::Eq && c->args[1].kind() == ExprKind::Any
                 && c->args[0].kind() == ExprKind::Var)
            pinned.insert(c->args[0]->name);
    }

    std::set<std::string> fixed;
    if (a.effect == StackEffect::Push) {
        f.fixed = a.resets;
        for (const auto& [x, v] : a.resets)
            fixed.insert(x);
    }
    if (a.effect == StackEffect::Pop)
        for (const auto& l : sts.locals())
            fixed.insert(l);
    for (const auto& x : a.unchanged)
        if (!fixed.count(x)) {
            f.kept.push_back(x);
            fixed.insert(x);
        }
    for (const auto& v : sts.variables) {
        if (v.kind != StsVarKind::Scalar)
            continue;
        if (!fixed.count(v.name) && !written.count(v.name))
            f.havoc.push_back(v.name);
        if (written.count(v.name) && !pinned.count(v.name) && v.domain.kind == Domain::Kind::Range)
            f.ranged.push_back(v.name);
    }
    return f;
}

}  // namespace detail
}  // namespace flowmc
