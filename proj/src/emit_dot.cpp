#include "emit_internal.hpp"

#include <sstream>

namespace flowmc {

namespace {

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out;
}

}  // namespace

std::string emit_dot(const FlowGraph& fg, const EmitterOptions& opts)
{
    std::ostringstream os;
    os << detail::header_line("//", opts);
    os << "digraph \"" << escape(opts.module_name) << "\" {\n";
    if (!fg.procedures.empty())
        os << "    node [shape=box, fontname=\"monospace\"];\n";
    for (const auto& p : fg.procedures) {
        os << "    subgraph \"cluster_" << escape(p.name) << "\" {\n";
        os << "        label=\"" << escape(p.name) << "\";\n";
        for (const auto& n : p.nodes) {
            os << "        \"" << escape(n.id) << "\" [label=\"" << escape(n.id) << "\\n" << escape(n.display())
               << "\"";
            if (n.id == p.entry)
                os << ", penwidth=2";
            if (n.id == p.ret)
                os << ", peripheries=2";
            os << "];\n";
        }
        for (const auto& e : p.edges) {
            os << "        \"" << escape(e.from) << "\" -> \"" << escape(e.to) << "\"";
            if (e.is_call())
                os << " [label=\"" << escape(e.label) << "\"]";
            os << ";\n";
        }
        os << "    }\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace flowmc
