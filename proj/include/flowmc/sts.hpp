#pragma once

#include "flowmc/pds.hpp"

#include <optional>
#include <string>
#include <vector>

namespace flowmc {

enum class StsVarKind { Node, Stack, Scalar };

struct StsVar {
    std::string name;
    StsVarKind kind = StsVarKind::Scalar;
    Domain domain;
    std::string owner;  // procedure for locals, empty for globals
    std::string base;   // unmangled name
};

enum class StackEffect { None, Push, Pop };

/// One disjunct of the next-state relation. The fields spell out the
/// relation; any scalar not fixed by the label, `unchanged`, a reset or a
/// pop restore is unconstrained in the post-state.
struct StsAction {
    std::string name;
    StackEffect effect = StackEffect::None;
    std::string procedure;
    std::optional<std::string> source;  // the `n = source` test
    std::string target;                 // n' for None and Push
    std::string return_site;            // Push: node saved on the stack
    std::string callee;                 // Push
    Expr base;                          // node label without its guard, mangled
    Expr guard;                         // mangled path condition, null if none
    Valuation resets;                   // Push: callee locals at their initial values
    std::vector<std::string> unchanged;

    /// base ∧ guard
    Expr label() const;
};

struct StsProcedure {
    std::string name;
    std::vector<std::string> locals;  // mangled, declaration order
    std::vector<std::string> nodes;
    std::string entry;
    std::string ret;
};

/// Symbolic transition system shared by the TLA+ and nuXmv emitters.
struct Sts {
    std::string name = "model";
    std::string node_var = "n";
    std::string stack_var = "st";
    std::vector<StsVar> variables;       // node, stack, globals, locals
    std::vector<std::string> nodes;      // every node id, procedure order
    std::vector<StsProcedure> procedures;
    std::string main;
    Expr init_globals;                   // null means unconstrained
    std::string init_node;
    Valuation init_locals;               // every local, mangled
    std::vector<StsAction> actions;
    std::size_t stack_capacity = 10;

    const StsVar* find_var(std::string_view name) const;
    const StsProcedure& procedure(std::string_view name) const;
    const StsProcedure& owner_of(std::string_view node) const;
    std::vector<std::string> globals() const;
    std::vector<std::string> locals() const;
    std::vector<std::string> scalars() const;
    Domains domains() const;
};

constexpr std::size_t kDefaultStackCapacity = 10;

std::string mangle_local(const std::string& proc, const std::string& var);

/// Throws NonTotalFlowGraph and UnsupportedLabel (a call or return label that
/// writes locals outside id(...)).
Sts sts_of_flow_graph(const FlowGraph& fg, std::size_t stack_capacity = kDefaultStackCapacity);
Sts sts_of_flow_graph(const FlowGraph& fg, const Domains& domains, const Expr& init_globals,
                      std::size_t stack_capacity);

struct StsStackEntry {
    std::string node;
    Valuation locals;  // snapshot of every local, mangled

    auto operator<=>(const StsStackEntry&) const = default;
};

struct StsState {
    std::string node;
    std::vector<StsStackEntry> stack;  // top first
    Valuation vars;                    // globals and mangled locals

    auto operator<=>(const StsState&) const = default;
};

std::string to_string(const StsState& s);

using StsStack = std::vector<StsStackEntry>;

/// The entry goes on top (front). Capacity is the caller's concern.
StsStack stack_push(const StsStackEntry& entry, const StsStack& stack);
/// Top entry and the rest. Throws MalformedConfiguration on an empty stack.
std::pair<StsStackEntry, StsStack> stack_pop(const StsStack& stack);

std::vector<StsState> sts_initial_states(const Sts& sts);

/// Ascending successors. `overflow` is set when a push was blocked by the
/// stack capacity. Throws InfiniteDomain.
std::vector<StsState> sts_successors(const Sts& sts, const StsState& s, bool* overflow = nullptr);

struct StsDeadlock {
    StsState state;
    std::string cause;  // StackOverflow or NoEnabledAction
};

struct StsReport {
    std::set<StsState> reachable;
    std::vector<StsDeadlock> deadlocks;
    bool truncated = false;
};

/// BFS over STS states; `max_steps` bounds the distance from Init.
StsReport execute_sts(const Sts& sts, std::size_t max_steps = kDefaultMaxSteps);

/// The STS state standing for a PDS configuration: the top frame's locals,
/// for every other procedure the locals of its topmost frame (or its
/// initial locals), and one stack entry per lower frame holding the
/// return node and the locals snapshot of the configuration below.
StsState encode(const Sts& sts, const Configuration& c);

struct EquivalenceVerdict {
    bool equivalent = true;
    std::size_t pds_states = 0;
    std::size_t sts_states = 0;
    bool truncated = false;
    std::string witness;  // empty when equivalent
};

/// Compares reachable sets, per-state successor sets and reachable counts
/// under `encode`, restricted to stacks of at most `max_stack` frames.
/// Throws BoundMismatch when max_stack exceeds the STS stack capacity.
EquivalenceVerdict compare_with_pds(const Sts& sts, const InducedPds& pds, std::size_t max_steps = kDefaultMaxSteps,
                                    std::size_t max_stack = kDefaultStackCapacity);

enum class Mutation { NegateGuard, DropFrame, SwapPush, DropReturnTest, WrongInit };

std::string to_string(Mutation m);
/// Accepts negate-guard, drop-frame, swap-push, drop-return-test, wrong-init.
/// Throws InvalidArgument.
Mutation parse_mutation(std::string_view text);
std::vector<Mutation> all_mutations();

/// Injects a single fault. Throws InvalidArgument when the STS offers no
/// place for it.
Sts mutate(const Sts& sts, Mutation m);

}  // namespace flowmc
