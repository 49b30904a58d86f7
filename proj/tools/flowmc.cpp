// flowmc: annotated programs to flow graphs, pushdown exploration and
// model-checker input.
//
// Exit status: 0 ok, 1 violation / divergence / translation error,
// 2 I/O, parse or usage error, 3 inconclusive (a bound was hit).

#include "flowmc/emit.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace flowmc;

namespace {

enum Exit { kOk = 0, kFailed = 1, kInputError = 2, kInconclusive = 3 };

struct Options {
    std::string input;
    std::size_t max_steps = kDefaultMaxSteps;
    std::size_t max_stack = 0;  // 0: per-command default
    std::size_t stack_capacity = kDefaultStackCapacity;
    std::uint64_t seed = 0;
    std::size_t length = 10;
    std::string invariant = "true";
    std::string backend = "tla";
    std::string out = ".";
    std::string dot;
    std::string mutate;
    bool verbose = false;
};

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Loaded {
    std::string text;
    AnnotatedProgram program;
};

Loaded load(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    Loaded l{ss.str(), {}};
    ParseResult r = parse_program(l.text);
    bool syntax = false;
    for (const auto& d : r.diagnostics) {
        std::cerr << path << ":" << d.to_string() << "\n";
        syntax = syntax || d.code == "SyntaxError";
    }
    if (syntax || !r.program)
        throw InputError(path + ": does not parse");
    if (!r.diagnostics.empty())
        throw Error(ErrorCode::InvalidArgument, path + ": invalid program");
    l.program = std::move(*r.program);
    return l;
}

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text))
        throw InputError("cannot write '" + path.string() + "'");
    std::cout << path.string() << "\n";
}

std::string plural(std::size_t n, const char* word)
{
    return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

int cmd_validate(const Options& o)
{
    std::ifstream in(o.input, std::ios::binary);
    if (!in)
        throw InputError("cannot read '" + o.input + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    ParseResult r = parse_program(ss.str());
    bool syntax = false;
    for (const auto& d : r.diagnostics) {
        std::cerr << o.input << ":" << d.to_string() << "\n";
        syntax = syntax || d.code == "SyntaxError";
    }
    if (syntax)
        return kInputError;
    if (!r.diagnostics.empty())
        return kFailed;
    std::cout << o.input << ": ok\n";
    return kOk;
}

int cmd_abstract(const Options& o)
{
    Loaded l = load(o.input);
    FlowGraph fg = translate(l.program);
    std::string summary;
    for (const auto& p : fg.procedures) {
        if (!summary.empty())
            summary += "; ";
        summary += p.name + ": " + plural(p.nodes.size(), "node") + ", " + plural(p.edges.size(), "edge");
    }
    std::cout << summary << "\n";
    if (o.verbose) {
        for (const auto& p : fg.procedures) {
            std::cout << "procedure " << p.name << "\n";
            for (const auto& n : p.nodes)
                std::cout << "  " << n.id << " : " << n.display() << "\n";
            for (const auto& e : p.edges)
                std::cout << "  " << e.from << " -" << (e.is_call() ? e.label + "-" : "") << "> " << e.to << "\n";
        }
    }
    if (!o.dot.empty())
        write_file(o.dot, emit_dot(fg, {l.program.name, digest_hex(l.text)}));
    return kOk;
}

int cmd_check(const Options& o)
{
    Loaded l = load(o.input);
    InducedPds pds = induce(translate(l.program));
    Expr phi;
    try {
        phi = parse_expr(o.invariant);
    } catch (const SyntaxError& e) {
        throw InputError("--invariant: column " + std::to_string(e.column()) + ": " + e.message());
    }
    Verdict v = check_invariant(pds, phi, o.max_steps, o.max_stack ? o.max_stack : kDefaultMaxStack);
    if (!v.holds) {
        std::cout << "Violated after " << plural(v.counterexample->configurations.size() - 1, "step") << "\n";
        std::cout << v.counterexample->to_string();
        return kFailed;
    }
    if (v.truncated) {
        std::cout << "Inconclusive: no violation among " << v.visited << " configurations, bounds reached\n";
        return kInconclusive;
    }
    std::cout << "Holds (" << plural(v.visited, "configuration") << ")\n";
    return kOk;
}

int cmd_emit(const Options& o)
{
    Loaded l = load(o.input);
    FlowGraph fg = translate(l.program);
    EmitterOptions opts{l.program.name, digest_hex(l.text)};
    fs::path dir(o.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (o.backend == "dot") {
        write_file(dir / (opts.module_name + ".dot"), emit_dot(fg, opts));
        return kOk;
    }
    Sts sts = sts_of_flow_graph(fg, o.stack_capacity);
    if (o.backend == "tla") {
        TlaOutput t = emit_tla(sts, opts);
        write_file(dir / (opts.module_name + ".tla"), t.module);
        write_file(dir / (opts.module_name + ".cfg"), t.config);
    } else {
        write_file(dir / (opts.module_name + ".smv"), emit_nuxmv(sts, opts));
    }
    return kOk;
}

int cmd_crosscheck(const Options& o)
{
    Loaded l = load(o.input);
    FlowGraph fg = translate(l.program);
    InducedPds pds = induce(fg);
    Sts sts = sts_of_flow_graph(fg, o.stack_capacity);
    if (!o.mutate.empty())
        sts = mutate(sts, parse_mutation(o.mutate));
    EquivalenceVerdict v = compare_with_pds(sts, pds, o.max_steps, o.max_stack ? o.max_stack : o.stack_capacity);
    if (!v.equivalent) {
        std::cout << "Divergent: " << v.witness << "\n";
        return kFailed;
    }
    std::cout << "Equivalent (" << v.pds_states << " PDS configurations, " << v.sts_states << " STS states)\n";
    if (v.truncated) {
        std::cout << "bounds reached; equivalence holds up to them\n";
        return kInconclusive;
    }
    return kOk;
}

int cmd_explore(const Options& o)
{
    Loaded l = load(o.input);
    InducedPds pds = induce(translate(l.program));
    ExploreReport r = explore(pds, o.max_steps, o.max_stack ? o.max_stack : kDefaultMaxStack);
    std::cout << "configurations: " << r.visited.size() << "\n";
    std::cout << "deadlocks: " << r.deadlocks.size() << "\n";
    std::cout << "max stack depth: " << r.max_stack_depth << "\n";
    std::cout << "depth: " << r.depth << "\n";
    std::cout << "truncated: " << (r.truncated ? "yes" : "no") << "\n";
    if (o.verbose)
        for (const auto& c : r.deadlocks)
            std::cout << "deadlock " << to_string(c) << "\n";
    return r.truncated ? kInconclusive : kOk;
}

int cmd_run(const Options& o)
{
    Loaded l = load(o.input);
    InducedPds pds = induce(translate(l.program));
    Trace t = sample_run(pds, o.length, o.seed, o.max_stack ? o.max_stack : kDefaultMaxStack);
    std::cout << t.to_string();
    if (t.deadlocked)
        std::cout << "deadlocked after " << plural(t.configurations.size() - 1, "step") << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"flowmc: contract-based abstraction of annotated programs and model-checker input"};
    app.require_subcommand(1);
    Options o;

    auto input = [&](CLI::App* sub) {
        sub->add_option("input", o.input, "annotated program (.apg)")->required();
        sub->add_flag("-v,--verbose", o.verbose, "print more detail");
    };
    auto bounds = [&](CLI::App* sub) {
        sub->add_option("--max-steps", o.max_steps, "BFS depth bound")->check(CLI::PositiveNumber);
        sub->add_option("--max-stack", o.max_stack, "maximum number of stack frames")->check(CLI::PositiveNumber);
    };

    auto* validate = app.add_subcommand("validate", "parse and validate a program");
    input(validate);

    auto* abstract = app.add_subcommand("abstract", "print flow-graph sizes");
    input(abstract);
    abstract->add_option("--dot", o.dot, "also write the flow graph as DOT to this file");

    auto* check = app.add_subcommand("check", "check a global invariant on the induced pushdown system");
    input(check);
    bounds(check);
    check->add_option("--invariant", o.invariant, "boolean expression over globals");

    auto* emit = app.add_subcommand("emit", "write a TLA+, nuXmv or DOT model");
    input(emit);
    emit->add_option("--backend", o.backend, "tla, nuxmv or dot")
        ->check(CLI::IsMember({"tla", "nuxmv", "dot"}));
    emit->add_option("--out", o.out, "output directory");
    emit->add_option("--stack-capacity", o.stack_capacity, "stack entries in the finite encodings");

    auto* crosscheck = app.add_subcommand("crosscheck", "compare the transition system with the pushdown system");
    input(crosscheck);
    bounds(crosscheck);
    crosscheck->add_option("--stack-capacity", o.stack_capacity, "stack entries in the transition system");
    crosscheck->add_option("--mutate", o.mutate, "inject a fault first")
        ->check(CLI::IsMember({"negate-guard", "drop-frame", "swap-push", "drop-return-test", "wrong-init"}));

    auto* exp = app.add_subcommand("explore", "enumerate reachable configurations");
    input(exp);
    bounds(exp);

    auto* run = app.add_subcommand("run", "sample a run prefix");
    input(run);
    run->add_option("--max-stack", o.max_stack, "maximum number of stack frames")->check(CLI::PositiveNumber);
    run->add_option("--seed", o.seed, "random seed");
    run->add_option("--length", o.length, "configurations to print")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*validate)
            return cmd_validate(o);
        if (*abstract)
            return cmd_abstract(o);
        if (*check)
            return cmd_check(o);
        if (*emit)
            return cmd_emit(o);
        if (*crosscheck)
            return cmd_crosscheck(o);
        if (*exp)
            return cmd_explore(o);
        if (*run)
            return cmd_run(o);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        bool usage = e.code() == ErrorCode::BoundMismatch;
        return usage ? kInputError : kFailed;
    }
    return kInputError;
}
