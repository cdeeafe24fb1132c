#include <doctest.h>

#include <crjet/cli.hpp>
#include <crjet/io.hpp>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

using namespace crjet;

namespace
{

struct Run {
    int code = 0;
    std::string out;
    std::string err;

    bool says(const std::string &text) const { return out.find(text) != std::string::npos; }
};

Run run(std::vector<std::string> args)
{
    args.insert(args.begin(), "crjet");
    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    Run r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string example(const std::string &name)
{
    return std::string(CRJET_EXAMPLES_DIR) + "/" + name;
}

std::filesystem::path scratch(const std::string &name)
{
    auto dir = std::filesystem::temp_directory_path() / ("crjet_test_cli_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("check recognizes minimal and nonminimal hypersurfaces")
{
    auto r = run({"check", example("heisenberg.hyp")});
    CHECK(r.code == exit_ok);
    CHECK(r.says(tool_version));
    CHECK(r.says("backend: exact"));
    CHECK(r.says("normal: yes"));
    CHECK(r.says("type: minimal (Levi-nondegenerate at 0)"));

    r = run({"check", example("b1_example.hyp")});
    CHECK(r.code == exit_ok);
    CHECK(r.says("infinite type m=1"));

    r = run({"check", example("m1_model.hyp"), "--backend", "float"});
    CHECK(r.code == exit_ok);
    CHECK(r.says("backend: float"));
    CHECK(r.says("infinite type m=1"));
}

TEST_CASE("check with a map that does not preserve the hypersurface fails")
{
    auto r = run({"check", example("b1_example.hyp"), "--map", example("map_w10.map")});
    CHECK(r.code == exit_check_failed);
    CHECK(r.says("map preserves the hypersurface: no"));
    CHECK(r.says("status: failed"));
}

TEST_CASE("input errors carry the offending line")
{
    const auto dir = scratch("bad");
    const auto bad = (dir / "bad.hyp").string();
    write_file(bad, "n: 1\ntrunc: 6\nQ:\nvars: z1 chi1 tau ; trunc: 6\n0 0 : 1 0\n");
    auto r = run({"check", bad});
    CHECK(r.code == exit_input_error);
    CHECK(r.err.find("line 5") != std::string::npos);

    CHECK(run({"check", (dir / "missing.hyp").string()}).code == exit_input_error);
    CHECK(run({}).code == exit_input_error);
    CHECK(run({"frobnicate"}).code == exit_input_error);
    CHECK(run({"check", example("heisenberg.hyp"), "--backend", "decimal"}).code == exit_input_error);
    CHECK(run({"lift", example("b1_example.hyp")}).code == exit_input_error);
    CHECK(run({"--version"}).out.find(tool_version) != std::string::npos);
}

TEST_CASE("truncation problems exit with their own code")
{
    auto r = run({"check", example("heisenberg.hyp"), "--trunc", "9"});
    CHECK(r.code == exit_truncation);
    CHECK(r.says("truncation insufficient"));

    // At truncation 4 no unknown of degree 2 fits the probe window.
    r = run({"probe", example("heisenberg.hyp"), "--trunc", "4", "--jet", "1"});
    CHECK(r.code == exit_truncation);
    CHECK(r.says("uninformative"));
}

TEST_CASE("probe sweeps the jet order")
{
    auto r = run({"probe", example("heisenberg.hyp")});
    CHECK(r.code == exit_ok);
    CHECK(r.says("free parameters at degree 1"));
    CHECK(r.says("free parameters at degree 2"));
    CHECK(r.says("result: determined by 2-jets at truncation 6"));

    r = run({"probe", example("heisenberg.hyp"), "--jet", "1"});
    CHECK(r.code == exit_ok);
    CHECK(r.says("result: free directions at degree 2"));
}

TEST_CASE("normal-form output is deterministic and written to --out")
{
    const auto dir = scratch("nf");
    auto a = run({"normal-form", example("b1_example.hyp"), "--out", dir.string()});
    auto b = run({"normal-form", example("b1_example.hyp")});
    CHECK(a.code == exit_ok);
    CHECK(a.out == b.out);
    CHECK(a.says("exponents b: 1"));
    CHECK(a.says("coordinate identity: yes"));
    REQUIRE(std::filesystem::exists(dir / "normal_form.txt"));
    CHECK(read_file((dir / "report.txt").string()) == a.out);

    // The normal-form file feeds the blow-up.
    auto c = run({"blowup", (dir / "normal_form.txt").string()});
    CHECK(c.code == exit_ok);
    CHECK(c.says("input: normal-form data"));
    CHECK(c.says("alphas: 4"));
    CHECK(c.says("threshold: 9"));
}

TEST_CASE("lift of H = (z, w + w^10)")
{
    auto r = run({"lift", example("b1_example.hyp"), "--map", example("map_w10.map")});
    CHECK(r.code == exit_ok);
    CHECK(r.says("lift order l: 9"));
    CHECK(r.says("commuting square B o Hhat = H o B: yes"));
    CHECK(r.says("jet(Hhat, l) = jet(Id, l): yes"));
    CHECK(r.says("Ghat - w = O(w^20): no"));
    CHECK(r.says("monomial w^19"));
    CHECK(r.says("Ghat - w = O(w^19): yes"));

    // Below the minimal lift order the lift is not defined.
    r = run({"lift", example("b1_example.hyp"), "--map", example("map_w10.map"), "--lift-order", "8"});
    CHECK(r.code == exit_check_failed);
}

TEST_CASE("pipeline on a Levi-nondegenerate example")
{
    const auto dir = scratch("pipeline");
    auto r = run({"pipeline", example("b0_example.hyp"), "--out", dir.string()});
    CHECK(r.code == exit_ok);
    CHECK(r.says("exponents b: 0"));
    CHECK(r.says("alphas: 2"));
    CHECK(r.says("threshold: 3"));
    CHECK(r.says("Mhat good nonminimal: m=3"));
    CHECK(r.says("Mhat determined by"));
    CHECK(r.says("Hhat preserves Mhat: yes"));
    CHECK(r.says("Hhat = Id to order"));
    for (const char *name : {"report.txt", "normal_form.txt", "blowup.txt", "mhat.hyp", "probe.txt", "lift.map"}) {
        CHECK(std::filesystem::exists(dir / name));
    }
    // mhat.hyp is itself a valid input.
    auto c = run({"check", (dir / "mhat.hyp").string()});
    CHECK(c.code == exit_ok);
    CHECK(c.says("infinite type m=3"));
}
