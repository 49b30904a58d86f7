#include "support.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <sys/wait.h>

using namespace flowmc;
using namespace flowmc::test;
namespace fs = std::filesystem;

namespace {

struct Run {
    int status = -1;
    std::string out;
};

/// Runs the CLI through the shell; stderr is merged into `out` when asked.
Run cli(const std::string& args, bool with_stderr = false)
{
    std::string cmd = std::string("'") + FLOWMC_CLI + "' " + args + (with_stderr ? " 2>&1" : " 2>/dev/null");
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0)
        r.out.append(buf, n);
    int status = pclose(p);
    r.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string fx(const std::string& name)
{
    return "'" + fixture_path(name) + "'";
}

fs::path scratch_dir(const std::string& name)
{
    fs::path dir = fs::temp_directory_path() / ("flowmc_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("validate")
{
    Run ok = cli("validate " + fx("stee"));
    CHECK(ok.status == 0);
    CHECK(ok.out.find(": ok") != std::string::npos);
    CHECK(cli("validate missing.apg").status == 2);
    Run bad = cli("validate " + fx("dangling_jump"), true);
    CHECK(bad.status == 1);
    CHECK(bad.out.find("DanglingReference") != std::string::npos);

    fs::path dir = scratch_dir("syntax");
    std::ofstream(dir / "broken.apg") << "program q\nprocedure main\n  block b\n    point r : retrun\n";
    CHECK(cli("validate '" + (dir / "broken.apg").string() + "'").status == 2);
}

TEST_CASE("abstract")
{
    Run r = cli("abstract " + fx("stee"));
    CHECK(r.status == 0);
    CHECK(r.out == "main: 4 nodes, 5 edges; steering: 4 nodes, 3 edges\n");
    CHECK(cli("abstract " + fx("minimal")).out == "main: 1 node, 1 edge\n");
    Run cyc = cli("abstract " + fx("cyclic_jumps"), true);
    CHECK(cyc.status == 1);
    CHECK(cyc.out.find("CyclicUnannotatedJumps") != std::string::npos);

    fs::path dir = scratch_dir("abstract");
    fs::path dot = dir / "stee.dot";
    CHECK(cli("abstract " + fx("stee") + " --dot '" + dot.string() + "'").status == 0);
    CHECK(normalize_header(read_file(dot.string())) == normalize_header(read_file(std::string(FLOWMC_GOLDEN_DIR) + "/stee.dot")));

    Run verbose = cli("abstract -v " + fx("minimal"));
    CHECK(verbose.out.find("n_m_1 : id") != std::string::npos);
}

TEST_CASE("check")
{
    CHECK(cli("check " + fx("stee")).status == 0);
    Run v = cli("check " + fx("mode_violation") + " --invariant 'mode != 2'");
    CHECK(v.status == 1);
    CHECK(v.out.rfind("Violated after 5 steps\n", 0) == 0);
    CHECK(v.out.find("5 | ") != std::string::npos);
    CHECK(v.out.find("(n_s_4") != std::string::npos);
    Run safe = cli("check " + fx("mode_safe") + " --invariant 'mode != 2'");
    CHECK(safe.status == 0);
    CHECK(safe.out.rfind("Holds (", 0) == 0);
    CHECK(cli("check " + fx("stee") + " --max-steps 2").status == 3);
    CHECK(cli("check " + fx("stee") + " --invariant 'x +'").status == 2);
    CHECK(cli("check " + fx("stee") + " --invariant primary_info").status == 1);
}

TEST_CASE("emit")
{
    fs::path dir = scratch_dir("emit");
    std::string out = " --out '" + dir.string() + "'";
    Run r = cli("emit --backend nuxmv " + fx("stee") + out);
    CHECK(r.status == 0);
    CHECK(r.out == (dir / "stee.smv").string() + "\n");
    CHECK(read_file((dir / "stee.smv").string()) == read_file(std::string(FLOWMC_GOLDEN_DIR) + "/stee.smv"));

    CHECK(cli("emit --backend tla " + fx("stee") + out).status == 0);
    CHECK(fs::exists(dir / "stee.tla"));
    CHECK(fs::exists(dir / "stee.cfg"));
    CHECK(read_file((dir / "stee.tla").string()) == read_file(std::string(FLOWMC_GOLDEN_DIR) + "/stee.tla"));
    CHECK(cli("emit --backend dot " + fx("stee") + out).status == 0);
    CHECK(fs::exists(dir / "stee.dot"));

    Run ub = cli("emit --backend tla " + fx("unbounded") + out, true);
    CHECK(ub.status == 1);
    CHECK(ub.out.find("UnboundedDomain") != std::string::npos);
    CHECK(cli("emit --backend nuxmv --stack-capacity 0 " + fx("stee") + out).status == 1);
    CHECK(cli("emit --backend java " + fx("stee") + out).status == 2);
}

TEST_CASE("crosscheck")
{
    Run r = cli("crosscheck " + fx("stee"));
    CHECK(r.status == 0);
    CHECK(r.out.rfind("Equivalent (", 0) == 0);
    CHECK(cli("crosscheck " + fx("minimal")).status == 0);
    Run m = cli("crosscheck " + fx("stee") + " --mutate swap-push");
    CHECK(m.status == 1);
    CHECK(m.out.rfind("Divergent: ", 0) == 0);
    CHECK(cli("crosscheck " + fx("stee") + " --stack-capacity 2 --max-stack 3").status == 2);
    CHECK(cli("crosscheck " + fx("stee") + " --max-steps 2").status == 3);
    CHECK(cli("crosscheck " + fx("minimal") + " --mutate swap-push").status == 1);
}

TEST_CASE("explore and run")
{
    Run e = cli("explore " + fx("minimal"));
    CHECK(e.status == 0);
    CHECK(e.out == "configurations: 1\ndeadlocks: 0\nmax stack depth: 1\ndepth: 0\ntruncated: no\n");
    CHECK(cli("explore " + fx("stee") + " --max-stack 1").status == 3);

    Run a = cli("run " + fx("stee") + " --seed 7 --length 6");
    CHECK(a.status == 0);
    CHECK(a.out == cli("run " + fx("stee") + " --seed 7 --length 6").out);
    CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 6);
}

TEST_CASE("usage errors and stability")
{
    CHECK(cli("").status == 2);
    CHECK(cli("frobnicate x").status == 2);
    CHECK(cli("check " + fx("stee") + " --max-steps 0").status == 2);
    CHECK(cli("--help").status == 0);

    for (const std::string args : {"abstract -v", "check", "explore", "crosscheck", "run --seed 3"}) {
        CAPTURE(args);
        std::string before = fixture_text("stee");
        Run first = cli(args + " " + fx("stee"));
        Run second = cli(args + " " + fx("stee"));
        CHECK(first.status == second.status);
        CHECK(first.out == second.out);
        CHECK(fixture_text("stee") == before);
    }
}
