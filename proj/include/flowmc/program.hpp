#pragma once

#include "flowmc/action.hpp"
#include "flowmc/error.hpp"
#include "flowmc/expr.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flowmc {

struct VarDecl {
    std::string name;
    Domain domain;

    bool operator==(const VarDecl&) const = default;
};

enum class StmtKind { Assign, Jump, Call, Return, Skip };

struct Statement {
    StmtKind kind = StmtKind::Skip;
    std::string target;  // Assign
    Expr value;          // Assign
    std::string block;   // Jump
    std::string proc;    // Call

    static Statement assign(std::string target, Expr value);
    static Statement jump(std::string block);
    static Statement call(std::string proc);
    static Statement ret();
    static Statement skip();

    bool operator==(const Statement&) const = default;
};

std::string to_string(const Statement& s);

enum class ContractKind { Empty, Spec };

/// Hoare-style block contract. `assigns` lists the variables allowed to
/// change; `postcondition` reads the pre-state through old(x).
struct Contract {
    ContractKind kind = ContractKind::Empty;
    Expr precondition;
    Expr postcondition;
    std::vector<std::string> assigns;

    static Contract empty() { return {}; }
    static Contract spec(Expr requires_clause, Expr ensures_clause, std::vector<std::string> assigns);

    bool is_empty() const { return kind == ContractKind::Empty; }
    bool operator==(const Contract&) const = default;
};

struct ControlPoint {
    std::string id;
    Statement stmt;

    bool operator==(const ControlPoint&) const = default;
};

/// Intra-block control edge; a null guard is b_ε.
struct BlockEdge {
    std::string from;
    std::string to;
    Expr guard;

    bool operator==(const BlockEdge&) const = default;
};

struct AnnotatedBlock {
    std::string id;
    std::vector<ControlPoint> points;
    std::vector<BlockEdge> edges;
    std::string entry;
    std::string exit;
    Contract contract;

    const ControlPoint* find_point(std::string_view point) const;
    std::vector<const BlockEdge*> out_edges(std::string_view point) const;

    bool operator==(const AnnotatedBlock&) const = default;
};

struct AnnotatedProcedure {
    std::string name;
    std::vector<VarDecl> locals;
    Valuation init_locals;
    std::vector<AnnotatedBlock> blocks;
    std::string entry_block;

    const AnnotatedBlock* find_block(std::string_view block) const;

    bool operator==(const AnnotatedProcedure&) const = default;
};

struct AnnotatedProgram {
    std::string name = "program";
    std::vector<AnnotatedProcedure> procedures;
    std::string main = "main";
    std::vector<VarDecl> globals;
    Expr init_globals;  // null means no constraint

    const AnnotatedProcedure* find_procedure(std::string_view proc) const;

    bool operator==(const AnnotatedProgram&) const = default;
};

/// Globals followed by the procedure's locals, in declaration order.
std::vector<std::string> frame_of(const AnnotatedProgram& prog, const AnnotatedProcedure& proc);
Domains domains_of(const AnnotatedProgram& prog, const AnnotatedProcedure& proc);
Domains global_domains(const AnnotatedProgram& prog);

struct ParseResult {
    std::optional<AnnotatedProgram> program;  // present unless a syntax error occurred
    Diagnostics diagnostics;                  // syntax and validation findings

    bool ok() const { return program && diagnostics.empty(); }
};

/// Parses the line-oriented .apg format. Never throws; all findings,
/// including validate_program's, are returned as positioned diagnostics.
ParseResult parse_program(std::string_view text);

/// Checks the structural invariants of the IR. Empty iff well-formed.
Diagnostics validate_program(const AnnotatedProgram& prog);

std::string serialize_program(const AnnotatedProgram& prog);

}  // namespace flowmc
