#include "emit_internal.hpp"

#include <sstream>

namespace flowmc {

using detail::Backend;

namespace {

std::string quoted(const std::string& node)
{
    return "\"" + node + "\"";
}

std::string tuple(const std::vector<std::string>& items)
{
    std::string s = "<<";
    for (std::size_t i = 0; i < items.size(); ++i)
        s += (i ? ", " : "") + items[i];
    return s + ">>";
}

std::string domain_name(const std::string& var)
{
    return "Dom_" + var;
}

std::string set_of(const StsVar& v)
{
    return v.domain.kind == Domain::Kind::Range ? domain_name(v.name) : detail::print_set(v.domain, Backend::Tla);
}

}  // namespace

TlaOutput emit_tla(const Sts& sts, const EmitterOptions& opts)
{
    std::set<std::string> taken;
    detail::claim_name(opts.module_name, Backend::Tla, taken, "module name");
    std::vector<std::string> all_vars;
    for (const auto& v : sts.variables) {
        if (v.kind == StsVarKind::Scalar && !v.domain.finite())
            throw Error(ErrorCode::UnboundedDomain,
                        "variable '" + v.name + "' has an unbounded domain; TLC needs finite domains");
        detail::claim_name(v.name, Backend::Tla, taken, "variable");
        if (v.kind == StsVarKind::Scalar && v.domain.kind == Domain::Kind::Range)
            detail::claim_name(domain_name(v.name), Backend::Tla, taken, "domain constant");
        all_vars.push_back(v.name);
    }
    for (const auto& a : sts.actions)
        detail::claim_name(a.name, Backend::Tla, taken, "action");

    const std::string& n = sts.node_var;
    const std::string& st = sts.stack_var;
    std::vector<std::string> locals = sts.locals();

    std::ostringstream os;
    os << detail::header_line("\\*", opts);
    os << "---- MODULE " << opts.module_name << " ----\n";
    os << "EXTENDS Integers, Sequences\n\n";
    os << "CONSTANT StackCapacity\n";
    for (const auto& v : sts.variables)
        if (v.kind == StsVarKind::Scalar && v.domain.kind == Domain::Kind::Range)
            os << "CONSTANT " << domain_name(v.name) << "\n";
    os << "\nVARIABLES ";
    for (std::size_t i = 0; i < all_vars.size(); ++i)
        os << (i ? ", " : "") << all_vars[i];
    os << "\n\nvars == " << tuple(all_vars) << "\n\n";

    os << "push(e, s) == <<e>> \\o s\n";
    os << "top(s) == Head(s)\n";
    os << "pop(s) == Tail(s)\n";
    if (detail::uses_division(sts)) {
        os << "\nTDiv(a, b) ==\n"
              "    LET q == (IF a < 0 THEN -a ELSE a) \\div (IF b < 0 THEN -b ELSE b)\n"
              "    IN IF (a < 0) = (b < 0) THEN q ELSE -q\n";
        os << "TMod(a, b) == a - b * TDiv(a, b)\n";
    }

    os << "\nInit ==\n";
    os << "    /\\ " << n << " = " << quoted(sts.init_node) << "\n";
    os << "    /\\ " << st << " = <<>>\n";
    for (const auto& v : sts.variables) {
        if (v.kind != StsVarKind::Scalar)
            continue;
        if (auto it = sts.init_locals.find(v.name); it != sts.init_locals.end())
            os << "    /\\ " << v.name << " = " << detail::print_value(it->second, Backend::Tla) << "\n";
        else
            os << "    /\\ " << v.name << " \\in " << set_of(v) << "\n";
    }
    for (const auto& c : detail::print_conjuncts(sts.init_globals, Backend::Tla))
        os << "    /\\ " << c << "\n";

    for (const auto& a : sts.actions) {
        detail::Frame f = detail::frame_of(sts, a);
        os << "\n" << a.name << " ==\n";
        if (a.source)
            os << "    /\\ " << n << " = " << quoted(*a.source) << "\n";
        switch (a.effect) {
        case StackEffect::None:
            os << "    /\\ " << n << "' = " << quoted(a.target) << "\n";
            os << "    /\\ " << st << "' = " << st << "\n";
            break;
        case StackEffect::Push:
            os << "    /\\ " << n << "' = " << quoted(a.target) << "\n";
            os << "    /\\ Len(" << st << ") < StackCapacity\n";
            os << "    /\\ " << st << "' = push(<<" << quoted(a.return_site) << ", " << tuple(locals) << " >>, " << st
               << ")\n";
            break;
        case StackEffect::Pop:
            os << "    /\\ " << st << " # <<>>\n";
            os << "    /\\ " << n << "' = top(" << st << ")[1]\n";
            os << "    /\\ " << st << "' = pop(" << st << ")\n";
            for (std::size_t i = 0; i < locals.size(); ++i)
                os << "    /\\ " << locals[i] << "' = top(" << st << ")[2][" << i + 1 << "]\n";
            break;
        }
        if (!f.kept.empty())
            os << "    /\\ UNCHANGED " << tuple(f.kept) << "\n";
        for (const auto& [x, v] : f.fixed)
            os << "    /\\ " << x << "' = " << detail::print_value(v, Backend::Tla) << "\n";
        for (const auto& x : f.havoc)
            os << "    /\\ " << x << "' \\in " << set_of(*sts.find_var(x)) << "\n";
        for (const auto& c : detail::print_conjuncts(a.label(), Backend::Tla))
            os << "    /\\ " << c << "\n";
        for (const auto& x : f.ranged)
            os << "    /\\ " << x << "' \\in " << domain_name(x) << "\n";
    }

    os << "\nNext ==\n";
    if (sts.actions.empty())
        os << "    FALSE\n";
    for (const auto& a : sts.actions)
        os << "    \\/ " << a.name << "\n";
    os << "\nSpec == Init /\\ [][Next]_vars\n";
    os << "====\n";

    std::ostringstream cfg;
    cfg << detail::header_line("\\*", opts);
    cfg << "SPECIFICATION Spec\n";
    cfg << "CONSTANT StackCapacity = " << sts.stack_capacity << "\n";
    for (const auto& v : sts.variables) {
        if (v.kind != StsVarKind::Scalar || v.domain.kind != Domain::Kind::Range)
            continue;
        cfg << "CONSTANT " << domain_name(v.name) << " = {";
        for (auto x = v.domain.lo; x <= v.domain.hi; ++x)
            cfg << (x == v.domain.lo ? "" : ", ") << x;
        cfg << "}\n";
    }
    return {os.str(), cfg.str()};
}

}  // namespace flowmc
