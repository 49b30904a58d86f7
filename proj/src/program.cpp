#include "flowmc/program.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace flowmc {

Statement Statement::assign(std::string target, Expr value)
{
    Statement s;
    s.kind = StmtKind::Assign;
    s.target = std::move(target);
    s.value = std::move(value);
    return s;
}

Statement Statement::jump(std::string block)
{
    Statement s;
    s.kind = StmtKind::Jump;
    s.block = std::move(block);
    return s;
}

Statement Statement::call(std::string proc)
{
    Statement s;
    s.kind = StmtKind::Call;
    s.proc = std::move(proc);
    return s;
}

Statement Statement::ret()
{
    Statement s;
    s.kind = StmtKind::Return;
    return s;
}

Statement Statement::skip()
{
    return {};
}

std::string to_string(const Statement& s)
{
    switch (s.kind) {
    case StmtKind::Assign: return s.target + " := " + to_string(s.value);
    case StmtKind::Jump: return "jump " + s.block;
    case StmtKind::Call: return "call " + s.proc;
    case StmtKind::Return: return "return";
    case StmtKind::Skip: return "skip";
    }
    return "?";
}

Contract Contract::spec(Expr requires_clause, Expr ensures_clause, std::vector<std::string> assigns)
{
    Contract c;
    c.kind = ContractKind::Spec;
    c.precondition = std::move(requires_clause);
    c.postcondition = std::move(ensures_clause);
    c.assigns = std::move(assigns);
    return c;
}

const ControlPoint* AnnotatedBlock::find_point(std::string_view point) const
{
    for (const auto& p : points)
        if (p.id == point)
            return &p;
    return nullptr;
}

std::vector<const BlockEdge*> AnnotatedBlock::out_edges(std::string_view point) const
{
    std::vector<const BlockEdge*> out;
    for (const auto& e : edges)
        if (e.from == point)
            out.push_back(&e);
    return out;
}

const AnnotatedBlock* AnnotatedProcedure::find_block(std::string_view block) const
{
    for (const auto& b : blocks)
        if (b.id == block)
            return &b;
    return nullptr;
}

const AnnotatedProcedure* AnnotatedProgram::find_procedure(std::string_view proc) const
{
    for (const auto& p : procedures)
        if (p.name == proc)
            return &p;
    return nullptr;
}

std::vector<std::string> frame_of(const AnnotatedProgram& prog, const AnnotatedProcedure& proc)
{
    std::vector<std::string> out;
    for (const auto& g : prog.globals)
        out.push_back(g.name);
    for (const auto& l : proc.locals)
        out.push_back(l.name);
    return out;
}

Domains global_domains(const AnnotatedProgram& prog)
{
    Domains out;
    for (const auto& g : prog.globals)
        out.emplace(g.name, g.domain);
    return out;
}

Domains domains_of(const AnnotatedProgram& prog, const AnnotatedProcedure& proc)
{
    Domains out = global_domains(prog);
    for (const auto& l : proc.locals)
        out.emplace(l.name, l.domain);
    return out;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

class Validator {
public:
    explicit Validator(const AnnotatedProgram& prog) : prog_(prog) {}

    Diagnostics run()
    {
        if (!prog_.find_procedure(prog_.main))
            add("MissingMain", "main procedure '" + prog_.main + "' is not declared", "program");

        std::set<std::string> globals;
        for (const auto& g : prog_.globals) {
            if (!globals.insert(g.name).second)
                add("DuplicateName", "global '" + g.name + "' declared twice", "global " + g.name);
            check_domain(g, "global " + g.name);
        }

        std::set<std::string> procs;
        for (const auto& p : prog_.procedures) {
            std::string path = "procedure " + p.name;
            if (!procs.insert(p.name).second)
                add("DuplicateName", "procedure '" + p.name + "' declared twice", path);
            procedure(p, globals, path);
        }
        return std::move(diags_);
    }

private:
    void add(std::string code, std::string message, std::string path)
    {
        diags_.push_back({std::move(code), std::move(message), std::move(path), 0, 0});
    }

    void check_domain(const VarDecl& v, const std::string& path)
    {
        if (v.domain.kind == Domain::Kind::Range && v.domain.lo > v.domain.hi)
            add("InvalidDomain", "empty range " + v.domain.to_string() + " for '" + v.name + "'", path);
    }

    void procedure(const AnnotatedProcedure& p, const std::set<std::string>& globals, const std::string& path)
    {
        std::set<std::string> locals;
        for (const auto& l : p.locals) {
            std::string lpath = path + "/local " + l.name;
            if (!locals.insert(l.name).second)
                add("DuplicateName", "local '" + l.name + "' declared twice", lpath);
            if (globals.count(l.name))
                add("DuplicateName", "local '" + l.name + "' shadows a global", lpath);
            check_domain(l, lpath);
            auto init = p.init_locals.find(l.name);
            if (init == p.init_locals.end())
                add("InvalidInitialValue", "local '" + l.name + "' has no initial value", lpath);
            else if (!l.domain.contains(init->second))
                add("InvalidInitialValue",
                    "initial value " + init->second.to_string() + " of '" + l.name + "' is outside "
                        + l.domain.to_string(),
                    lpath);
        }
        for (const auto& [name, value] : p.init_locals)
            if (!locals.count(name))
                add("InvalidInitialValue", "initial value for undeclared local '" + name + "'", path);

        if (!p.find_block(p.entry_block))
            add("DanglingReference", "entry block '" + p.entry_block + "' is not declared", path);

        std::set<std::string> blocks;
        for (const auto& b : p.blocks) {
            std::string bpath = path + "/block " + b.id;
            if (!blocks.insert(b.id).second)
                add("DuplicateName", "block '" + b.id + "' declared twice", bpath);
            block(p, b, bpath);
        }
    }

    void block(const AnnotatedProcedure& p, const AnnotatedBlock& b, const std::string& path)
    {
        std::set<std::string> points;
        for (const auto& pt : b.points) {
            std::string ppath = path + "/point " + pt.id;
            if (!points.insert(pt.id).second)
                add("DuplicateName", "point '" + pt.id + "' declared twice", ppath);
            const Statement& s = pt.stmt;
            if (s.kind == StmtKind::Jump && !p.find_block(s.block))
                add("DanglingReference", "jump to undeclared block '" + s.block + "'", ppath);
            if (s.kind == StmtKind::Call && !prog_.find_procedure(s.proc))
                add("DanglingReference", "call to undeclared procedure '" + s.proc + "'", ppath);
            if (s.kind == StmtKind::Return && pt.id != b.exit)
                add("ReturnNotAtExit", "return statement at non-exit point '" + pt.id + "'", ppath);
            if (s.kind == StmtKind::Assign && !s.value)
                add("SyntaxError", "assignment without a right-hand side", ppath);
        }
        if (!points.count(b.entry))
            add("UnknownPoint", "entry point '" + b.entry + "' is not a control point", path);
        if (!points.count(b.exit))
            add("UnknownPoint", "exit point '" + b.exit + "' is not a control point", path);
        for (const auto& e : b.edges) {
            std::string epath = path + "/edge " + e.from + "->" + e.to;
            if (!points.count(e.from) || !points.count(e.to))
                add("UnknownPoint", "edge endpoint is not a control point", epath);
            if (e.from == b.exit)
                add("ExitHasSuccessor", "exit point '" + b.exit + "' has an outgoing edge", epath);
        }
        const Contract& c = b.contract;
        if (c.kind == ContractKind::Empty && (c.precondition || c.postcondition || !c.assigns.empty()))
            add("EmptyContractFields", "empty contract carries requires/ensures/assigns", path);
    }

    const AnnotatedProgram& prog_;
    Diagnostics diags_;
};

}  // namespace

Diagnostics validate_program(const AnnotatedProgram& prog)
{
    return Validator(prog).run();
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

std::string domain_syntax(const Domain& d)
{
    return d.to_string();
}

}  // namespace

std::string serialize_program(const AnnotatedProgram& prog)
{
    std::ostringstream os;
    os << "program " << prog.name << '\n';
    if (prog.main != "main")
        os << "main " << prog.main << '\n';
    for (const auto& g : prog.globals)
        os << "global " << g.name << " : " << domain_syntax(g.domain) << '\n';
    if (prog.init_globals)
        os << "init " << to_string(prog.init_globals) << '\n';

    for (const auto& p : prog.procedures) {
        os << '\n' << "procedure " << p.name;
        if (p.blocks.empty() || p.blocks.front().id != p.entry_block)
            os << " entry " << p.entry_block;
        os << '\n';
        for (const auto& l : p.locals) {
            os << "  local " << l.name << " : " << domain_syntax(l.domain);
            if (auto it = p.init_locals.find(l.name); it != p.init_locals.end())
                os << " = " << it->second.to_string();
            os << '\n';
        }
        for (const auto& b : p.blocks) {
            os << "  block " << b.id;
            if (!b.contract.is_empty()) {
                const Contract& c = b.contract;
                os << " contract requires " << to_string(c.precondition ? c.precondition : bool_lit(true))
                   << " ensures " << to_string(c.postcondition ? c.postcondition : bool_lit(true));
                if (!c.assigns.empty()) {
                    os << " assigns ";
                    for (std::size_t i = 0; i < c.assigns.size(); ++i)
                        os << (i ? ", " : "") << c.assigns[i];
                }
            }
            os << '\n';
            for (const auto& pt : b.points)
                os << "    point " << pt.id << " : " << to_string(pt.stmt) << '\n';
            for (const auto& e : b.edges) {
                os << "    edge " << e.from << " -> " << e.to;
                if (e.guard)
                    os << " when " << to_string(e.guard);
                os << '\n';
            }
            os << "    entry " << b.entry << '\n';
            os << "    exit " << b.exit << '\n';
        }
    }
    return os.str();
}

}  // namespace flowmc
