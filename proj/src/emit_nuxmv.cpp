#include "emit_internal.hpp"

#include <algorithm>
#include <sstream>

namespace flowmc {

using detail::Backend;

namespace {

std::string slot(const std::string& array, std::size_t i)
{
    return array + "[" + std::to_string(i) + "]";
}

std::string next(const std::string& x)
{
    return "next(" + x + ")";
}

std::string stack_array(const std::string& local)
{
    return "stk_" + local;
}

std::string type_of(const Domain& d)
{
    switch (d.kind) {
    case Domain::Kind::Bool: return "boolean";
    case Domain::Kind::Range: return std::to_string(d.lo) + ".." + std::to_string(d.hi);
    case Domain::Kind::Unbounded: return "integer";
    }
    return "?";
}

void define(std::ostream& os, const std::string& name, const std::vector<std::string>& conjuncts)
{
    os << "    " << name << " :=";
    if (conjuncts.empty()) {
        os << " TRUE;\n";
        return;
    }
    for (std::size_t i = 0; i < conjuncts.size(); ++i)
        os << "\n        " << (i ? "& " : "") << conjuncts[i];
    os << ";\n";
}

}  // namespace

std::string emit_nuxmv(const Sts& sts, const EmitterOptions& opts)
{
    const std::size_t cap = sts.stack_capacity;
    bool has_push = false;
    std::vector<std::string> return_sites;
    for (const auto& a : sts.actions) {
        if (a.effect != StackEffect::Push)
            continue;
        has_push = true;
        if (std::find(return_sites.begin(), return_sites.end(), a.return_site) == return_sites.end())
            return_sites.push_back(a.return_site);
    }
    long depth = call_depth(sts);
    if (has_push && (cap == 0 || (depth >= 0 && static_cast<std::size_t>(depth) > cap)))
        throw Error(ErrorCode::CapacityTooSmall, "calls nest " + std::to_string(depth) + " deep but the stack holds "
                                                     + std::to_string(cap) + " entries");

    std::set<std::string> taken;
    detail::claim_name(opts.module_name, Backend::Nuxmv, taken, "module name");
    for (const auto& v : sts.variables) {
        if (v.kind == StsVarKind::Stack)
            continue;
        detail::claim_name(v.name, Backend::Nuxmv, taken, "variable");
    }
    std::vector<std::string> locals = sts.locals();
    for (const auto& l : locals)
        detail::claim_name(stack_array(l), Backend::Nuxmv, taken, "stack array");
    for (const auto& node : sts.nodes)
        detail::claim_name(node, Backend::Nuxmv, taken, "node");
    for (const auto& r : return_sites)
        detail::claim_name("push_" + r, Backend::Nuxmv, taken, "macro");
    for (const auto& a : sts.actions)
        detail::claim_name(a.name, Backend::Nuxmv, taken, "action");

    const std::string& n = sts.node_var;
    auto value = [](const Value& v) { return detail::print_value(v, Backend::Nuxmv); };

    std::ostringstream os;
    os << detail::header_line("--", opts);
    os << "MODULE main\n";
    os << "VAR\n";
    os << "    " << n << " : {";
    for (std::size_t i = 0; i < sts.nodes.size(); ++i)
        os << (i ? ", " : "") << sts.nodes[i];
    os << "};\n";
    os << "    depth : 0.." << cap << ";\n";
    if (cap > 0) {
        os << "    stk_node : array 0.." << cap - 1 << " of {nil_node";
        for (const auto& node : sts.nodes)
            os << ", " << node;
        os << "};\n";
        for (const auto& l : locals)
            os << "    " << stack_array(l) << " : array 0.." << cap - 1 << " of " << type_of(sts.find_var(l)->domain)
               << ";\n";
    }
    for (const auto& v : sts.variables)
        if (v.kind == StsVarKind::Scalar)
            os << "    " << v.name << " : " << type_of(v.domain) << ";\n";

    os << "DEFINE\n";
    std::vector<std::string> arrays{"stk_node"};
    for (const auto& l : locals)
        arrays.push_back(stack_array(l));

    std::vector<std::string> keep{next("depth") + " = depth"};
    for (std::size_t i = 0; i < cap; ++i)
        for (const auto& arr : arrays)
            keep.push_back(next(slot(arr, i)) + " = " + slot(arr, i));
    define(os, "stack_keep", keep);

    if (has_push) {
        std::vector<std::string> push{"depth < " + std::to_string(cap), next("depth") + " = depth + 1"};
        for (std::size_t i = 0; i < cap; ++i)
            for (const auto& l : locals)
                push.push_back(next(slot(stack_array(l), i)) + " = case depth = " + std::to_string(i) + " : " + l
                               + "; TRUE : " + slot(stack_array(l), i) + "; esac");
        define(os, "push_locals", push);
        for (const auto& r : return_sites) {
            std::vector<std::string> cs;
            for (std::size_t i = 0; i < cap; ++i)
                cs.push_back(next(slot("stk_node", i)) + " = case depth = " + std::to_string(i) + " : " + r
                             + "; TRUE : " + slot("stk_node", i) + "; esac");
            define(os, "push_" + r, cs);
        }
    }

    bool has_pop = std::any_of(sts.actions.begin(), sts.actions.end(),
                               [](const StsAction& a) { return a.effect == StackEffect::Pop; });
    if (has_pop) {
        std::vector<std::string> pop{"depth > 0", next("depth") + " = depth - 1"};
        auto restore = [&](const std::string& target, const std::string& array) {
            std::string s = next(target) + " = case";
            for (std::size_t i = 0; i < cap; ++i)
                s += " depth = " + std::to_string(i + 1) + " : " + slot(array, i) + ";";
            return s + " TRUE : " + target + "; esac";
        };
        pop.push_back(restore(n, "stk_node"));
        for (const auto& l : locals)
            pop.push_back(restore(l, stack_array(l)));
        for (std::size_t i = 0; i < cap; ++i) {
            std::string when = "case depth = " + std::to_string(i + 1) + " : ";
            pop.push_back(next(slot("stk_node", i)) + " = " + when + "nil_node; TRUE : " + slot("stk_node", i)
                          + "; esac");
            for (const auto& l : locals)
                pop.push_back(next(slot(stack_array(l), i)) + " = " + when + value(sts.init_locals.at(l))
                              + "; TRUE : " + slot(stack_array(l), i) + "; esac");
        }
        define(os, "pop_frame", pop);
    }

    for (const auto& a : sts.actions) {
        detail::Frame f = detail::frame_of(sts, a);
        std::vector<std::string> cs;
        if (a.source)
            cs.push_back(n + " = " + *a.source);
        switch (a.effect) {
        case StackEffect::None:
            cs.push_back(next(n) + " = " + a.target);
            cs.push_back("stack_keep");
            break;
        case StackEffect::Push:
            cs.push_back(next(n) + " = " + a.target);
            cs.push_back("push_locals");
            cs.push_back("push_" + a.return_site);
            break;
        case StackEffect::Pop:
            cs.push_back("pop_frame");
            break;
        }
        for (const auto& x : f.kept)
            cs.push_back(next(x) + " = " + x);
        for (const auto& [x, v] : f.fixed)
            cs.push_back(next(x) + " = " + value(v));
        for (const auto& x : f.havoc) {
            const Domain& d = sts.find_var(x)->domain;
            if (d.finite())
                cs.push_back(next(x) + " in " + detail::print_set(d, Backend::Nuxmv));
        }
        for (auto& c : detail::print_conjuncts(a.label(), Backend::Nuxmv))
            cs.push_back(std::move(c));
        for (const auto& x : f.ranged)
            cs.push_back(next(x) + " in " + detail::print_set(sts.find_var(x)->domain, Backend::Nuxmv));
        define(os, a.name, cs);
    }

    os << "INIT\n";
    std::vector<std::string> init{n + " = " + sts.init_node, "depth = 0"};
    for (std::size_t i = 0; i < cap; ++i) {
        init.push_back(slot("stk_node", i) + " = nil_node");
        for (const auto& l : locals)
            init.push_back(slot(stack_array(l), i) + " = " + value(sts.init_locals.at(l)));
    }
    for (const auto& [x, v] : sts.init_locals)
        init.push_back(x + " = " + value(v));
    for (auto& c : detail::print_conjuncts(sts.init_globals, Backend::Nuxmv))
        init.push_back(std::move(c));
    for (std::size_t i = 0; i < init.size(); ++i)
        os << "    " << (i ? "& " : "") << init[i] << (i + 1 == init.size() ? ";\n" : "\n");

    os << "TRANS\n";
    if (sts.actions.empty())
        os << "    FALSE;\n";
    for (std::size_t i = 0; i < sts.actions.size(); ++i)
        os << "    " << (i ? "| " : "") << sts.actions[i].name << (i + 1 == sts.actions.size() ? ";\n" : "\n");
    return os.str();
}

}  // namespace flowmc
