#pragma once

#include "flowmc/sts.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace flowmc {

inline constexpr const char* kVersion = "0.1.0";

struct EmitterOptions {
    std::string module_name = "model";
    std::string source_digest;  // printed in the header comment; "none" when empty
};

struct TlaOutput {
    std::string module;  // <name>.tla
    std::string config;  // <name>.cfg
};

/// Throws UnboundedDomain and InvalidArgument (names that are not
/// identifiers or clash with reserved words).
TlaOutput emit_tla(const Sts& sts, const EmitterOptions& opts);

/// Throws CapacityTooSmall when the call graph is acyclic and its deepest
/// call chain needs more entries than the stack capacity.
std::string emit_nuxmv(const Sts& sts, const EmitterOptions& opts);

std::string emit_dot(const FlowGraph& fg, const EmitterOptions& opts);

std::uint64_t fnv1a64(std::string_view bytes);
/// 16 lowercase hex digits.
std::string digest_hex(std::string_view bytes);

/// Drops the provenance header line written by the emitters.
std::string normalize_header(std::string_view text);

/// Longest chain of pushes from main, or -1 when a cycle is reachable.
long call_depth(const Sts& sts);

// ---------------------------------------------------------------------------
// Reading emitted text back

struct ActionShape {
    std::string name;
    std::string source;  // empty when the action has no node test
    std::string target;  // empty for pops
    StackEffect effect = StackEffect::None;

    auto operator<=>(const ActionShape&) const = default;
};

/// Actions listed in Next, with their node tests and stack effect.
std::vector<ActionShape> scan_tla(std::string_view module);
/// Actions listed in TRANS.
std::vector<ActionShape> scan_nuxmv(std::string_view model);
/// The same shapes straight from the STS.
std::vector<ActionShape> action_shapes(const Sts& sts);

/// Balanced delimiters, declared-before-used identifiers and prime
/// discipline. Returns one message per problem found.
std::vector<std::string> lint_tla(std::string_view module);
std::vector<std::string> lint_nuxmv(std::string_view model);

}  // namespace flowmc
