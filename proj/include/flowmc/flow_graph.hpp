#pragma once

#include "flowmc/action.hpp"
#include "flowmc/program.hpp"

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace flowmc {

/// Where a node's label came from.
enum class NodeOrigin { Contract, Statement, Identity };

struct FlowNode {
    std::string id;
    Action action;
    Expr base;  // the label before the guard is conjoined
    NodeOrigin origin = NodeOrigin::Identity;
    std::string source;  // contract: annotated block or procedure; statement: its text
    Expr guard;          // conjoined path condition, null if none
    std::string point;   // originating control point, `block.point`

    /// Short human-readable label, e.g. `a_C(havocInput)` or `id ∧ 1 != 0`.
    std::string display() const;
};

/// An edge is silent (empty label) or names the called procedure.
struct FlowEdge {
    std::string from;
    std::string label;
    std::string to;

    bool is_call() const { return !label.empty(); }
    auto operator<=>(const FlowEdge&) const = default;
};

struct ProcedureFlowGraph {
    std::string name;
    std::vector<FlowNode> nodes;  // numbering order
    std::vector<FlowEdge> edges;
    std::string entry;
    std::string ret;
    std::vector<VarDecl> locals;
    Valuation init_locals;

    const FlowNode* find_node(std::string_view id) const;
    const FlowNode& node(std::string_view id) const;
    std::vector<const FlowEdge*> out_edges(std::string_view id) const;
};

struct FlowGraph {
    std::vector<ProcedureFlowGraph> procedures;
    std::string main = "main";
    std::vector<VarDecl> globals;
    Expr init_globals;

    const ProcedureFlowGraph* find(std::string_view proc) const;
    /// Throws UnknownProcedure.
    const ProcedureFlowGraph& procedure(std::string_view proc) const;
    /// Procedure owning the node, or null.
    const ProcedureFlowGraph* owner_of(std::string_view node) const;

    std::vector<std::string> frame(const ProcedureFlowGraph& p) const;
    Domains domains(const ProcedureFlowGraph& p) const;
    Domains global_domains() const;
};

/// Contract-based abstraction of a validated program. Throws
/// CyclicUnannotatedJumps, UnreachableExit, UnsupportedReturnPoint,
/// DeadEndPoint, UnknownVariable, TypeError and DanglingReference.
FlowGraph translate(const AnnotatedProgram& prog);

/// NonTotalNode diagnostics for reachable nodes without successors. The
/// return nodes of procedures other than main are exempt since they pop.
Diagnostics check_totality(const FlowGraph& fg);

/// Throws UnknownProcedure.
std::set<std::string> reachable_nodes(const FlowGraph& fg, std::string_view proc);

}  // namespace flowmc
