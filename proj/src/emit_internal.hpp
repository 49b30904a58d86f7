#pragma once

#include "flowmc/emit.hpp"

#include <set>
#include <string>
#include <vector>

namespace flowmc::detail {

enum class Backend { Tla, Nuxmv };

std::string print_expr(const Expr& e, Backend b);
/// Top-level conjuncts with id(...) first and each `x' = e` placed after
/// the definitions of the primed variables `e` reads.
std::vector<Expr> ordered_conjuncts(const Expr& e);
/// ordered_conjuncts, each printed so it can stand as an operand of a
/// conjunction. Literal `true` conjuncts are dropped.
std::vector<std::string> print_conjuncts(const Expr& e, Backend b);
std::string print_value(const Value& v, Backend b);
/// The domain as a set expression.
std::string print_set(const Domain& d, Backend b);

bool uses_division(const Sts& sts);

std::string header_line(std::string_view comment, const EmitterOptions& opts);

/// Throws InvalidArgument when `name` is not an identifier or is taken.
void claim_name(const std::string& name, Backend b, std::set<std::string>& taken, const char* what);

/// How one action treats each scalar it does not constrain in its label.
struct Frame {
    Valuation fixed;                  // resets
    std::vector<std::string> kept;    // explicit unchanged list
    std::vector<std::string> havoc;   // free in the post-state
    std::vector<std::string> ranged;  // bounded ints written by the label
};

Frame frame_of(const Sts& sts, const StsAction& a);

}  // namespace flowmc::detail
