#pragma once

#include "flowmc/emit.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace flowmc::test {

std::string read_file(const std::string& path);
std::string fixture_path(const std::string& name);
/// Parses fixtures/<name>.apg and throws std::runtime_error on any diagnostic.
AnnotatedProgram load_fixture(const std::string& name);
std::string fixture_text(const std::string& name);

/// Compares `text` with tests/golden/<file> after header normalization.
/// With FLOWMC_UPDATE_GOLDEN=1 the golden is rewritten instead. Returns
/// an empty string on a match, otherwise a short description.
std::string golden_mismatch(const std::string& file, const std::string& text);

/// Fixtures that translate and have finite domains.
const std::vector<std::string>& emittable_fixtures();

using Rng = std::mt19937_64;

struct GenOptions {
    int max_globals = 3;
    int max_locals = 1;           // per procedure
    std::int64_t max_hi = 2;      // int domains are 0..hi with hi in 1..max_hi
    bool ints = true;
    int max_procs = 2;            // besides main
    bool contracts = true;        // annotated callees and jump targets
    bool jumps = true;
    bool guards = true;
    bool recursion = false;
    bool init_globals = true;
};

AnnotatedProgram random_program(Rng& rng, const GenOptions& o = {});

/// Typed random expressions over `doms`. Division only by nonzero literals.
Expr random_bool_expr(Rng& rng, const Domains& doms, int depth, bool primes);
Expr random_int_expr(Rng& rng, const Domains& doms, int depth, bool primes);
Valuation random_valuation(Rng& rng, const Domains& doms);

/// Cartesian product in lexicographic order; written without the library.
std::vector<Valuation> all_valuations(const Domains& doms);

/// The rewrite rules of the induced PDS, materialized: for every node and
/// every (pre, post) pair satisfying the node label, one rule per outgoing
/// edge, plus a pop rule at non-main return nodes.
class BruteForcePds {
public:
    explicit BruteForcePds(const FlowGraph& fg);

    std::vector<Configuration> initial() const;
    std::vector<Configuration> successors(const Configuration& c) const;
    /// BFS closure restricted to stacks of at most max_stack frames.
    std::set<Configuration> reachable(std::size_t max_stack) const;
    std::size_t rule_count() const { return rules_; }

private:
    struct Rewrite {
        Valuation global;
        std::vector<StackFrame> frames;  // replaces the top frame, top first
    };
    using Key = std::tuple<std::string, Valuation, Valuation>;

    FlowGraph fg_;
    std::map<Key, std::vector<Rewrite>> table_;
    std::size_t rules_ = 0;
};

}  // namespace flowmc::test
