#pragma once

#include "flowmc/flow_graph.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace flowmc {

struct StackFrame {
    std::string node;
    Valuation local;

    auto operator<=>(const StackFrame&) const = default;
};

/// A global state plus a stack of (node, local state) frames, top first.
/// Ordered by stack, then global state; this is the BFS tie-break order.
struct Configuration {
    std::vector<StackFrame> stack;
    Valuation global;

    const StackFrame& top() const { return stack.front(); }
    auto operator<=>(const Configuration&) const = default;
};

/// `(node: x=1) (node)` followed by the global bindings.
std::string to_string(const StackFrame& f);
std::string to_string(const Configuration& c);

/// The pushdown system induced by a flow graph. Rewrite rules are not
/// materialized; `successors` derives them on demand.
struct InducedPds {
    FlowGraph flow_graph;
    Domains globals;                        // global domains
    std::map<std::string, Domains> frames;  // per procedure: globals and its locals
    std::map<std::string, std::string> owner;
    std::vector<Configuration> initial;     // sorted

    const ProcedureFlowGraph& procedure_of(const std::string& node) const;
};

/// Uses the domains and initial predicate recorded in the flow graph.
InducedPds induce(const FlowGraph& fg);

/// `domains` overrides declared domains by variable name; a null
/// `init_globals` leaves globals unconstrained. Throws InfiniteDomain,
/// UnsatisfiableInit.
InducedPds induce(const FlowGraph& fg, const Domains& domains, const Expr& init_globals);

/// Immediate successors in ascending order. Throws MalformedConfiguration.
std::vector<Configuration> successors(const InducedPds& pds, const Configuration& c);

constexpr std::size_t kDefaultMaxSteps = 100000;
constexpr std::size_t kDefaultMaxStack = 64;

struct ExploreReport {
    std::set<Configuration> visited;
    std::set<Configuration> deadlocks;
    bool truncated = false;
    std::size_t max_stack_depth = 0;
    std::size_t depth = 0;  // BFS layers fully expanded
};

/// BFS from the initial configurations. `max_steps` bounds the distance from
/// an initial configuration and `max_stack` the number of frames; anything
/// dropped by either bound sets `truncated`.
ExploreReport explore(const InducedPds& pds, std::size_t max_steps = kDefaultMaxSteps,
                      std::size_t max_stack = kDefaultMaxStack);

struct Trace {
    std::vector<Configuration> configurations;
    std::vector<Valuation> state_run;
    bool complete = false;    // reached the requested length
    bool deadlocked = false;  // stopped because no run continues

    /// One line per configuration: `<step> | <globals> | <stack>`.
    std::string to_string() const;
};

Trace make_trace(std::vector<Configuration> configurations);

struct Verdict {
    bool holds = true;
    bool truncated = false;
    std::size_t visited = 0;
    std::optional<Trace> counterexample;
};

/// Checks that phi holds in every reachable configuration. On violation the
/// counterexample is a shortest path from an initial configuration. Throws
/// NonGlobalVariable when phi reads anything but globals.
Verdict check_invariant(const InducedPds& pds, const Expr& phi, std::size_t max_steps = kDefaultMaxSteps,
                        std::size_t max_stack = kDefaultMaxStack);

/// A seeded walk of `length` configurations along a run. Successors from
/// which every continuation deadlocks are not chosen; the walk stops early
/// (deadlocked = true) only when nothing else remains. Throws
/// NoInitialConfiguration and InvalidArgument.
Trace sample_run(const InducedPds& pds, std::size_t length, std::uint64_t seed,
                 std::size_t max_stack = kDefaultMaxStack);

}  // namespace flowmc
