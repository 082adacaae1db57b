#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args)
{
    args.insert(args.begin(), "curvflow");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = curvflow::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

double field(const std::string& text, const std::string& key)
{
    const auto pos = text.find(key + "=");
    REQUIRE(pos != std::string::npos);
    return std::stod(text.substr(pos + key.size() + 1));
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::filesystem::path temp_file(const std::string& name)
{
    return std::filesystem::temp_directory_path() / ("curvflow_cli_" + name);
}

}  // namespace

TEST_SUITE("cli")
{
    TEST_CASE("run converges to the negative constant solution")
    {
        const auto o = invoke({"run", "--torus", "64:6.2831853", "--psi", "-1", "--p", "3", "--tmax", "200"});
        CHECK(o.code == 0);
        CHECK(o.out.rfind("stop=Converged r_inf=", 0) == 0);
        CHECK(field(o.out, "r_inf") == doctest::Approx(-2.5066).epsilon(1e-4));
        CHECK(o.out.find(" f=") != std::string::npos);
        CHECK(o.out.find(" res=") != std::string::npos);
        CHECK(o.out.find(" steps=") != std::string::npos);
    }

    TEST_CASE("usage and dimension errors exit 1")
    {
        auto o = invoke({"run", "--psi", "cos(x2)", "--torus", "32:1"});
        CHECK(o.code == 1);
        CHECK(o.err.find("x2") != std::string::npos);
        CHECK(invoke({"run", "--psi", "1 +", "--torus", "32:1"}).code == 1);
        CHECK(invoke({"run", "--torus", "32:1", "--c", "auto"}).code == 1);
        CHECK(invoke({"run", "--torus", "2:1"}).code == 1);
        CHECK(invoke({"run", "--torus", "32-1"}).code == 1);
        CHECK(invoke({"run", "--bogus"}).code == 1);
        CHECK(invoke({}).code == 1);
        CHECK(invoke({"run", "--preset", "nope"}).code == 1);
        CHECK(invoke({"gauss", "--torus", "32:1"}).code == 1);
        CHECK(invoke({"run", "--scheme", "rk4"}).code == 1);
        CHECK(invoke({"run", "--help"}).code == 0);
    }

    TEST_CASE("c auto on a 3-torus")
    {
        const auto o = invoke({"eigen", "--torus", "6:1,6:1,6:1", "--psi", "2", "--c", "auto"});
        CHECK(o.code == 0);
        CHECK(field(o.out, "lambda1") == doctest::Approx(2.0).epsilon(1e-10));
    }

    TEST_CASE("thm3 preset reports a positive decay rate")
    {
        const auto o = invoke({"run", "--preset", "thm3"});
        CHECK(o.code == 0);
        CHECK(field(o.out, "decay_rate") > 0.0);
    }

    TEST_CASE("eigen on a constant potential")
    {
        const auto o = invoke({"eigen", "--torus", "256:6.2831853", "--psi", "1"});
        CHECK(o.code == 0);
        CHECK(std::abs(field(o.out, "lambda1") - 1.0) <= 1e-10);
    }

    TEST_CASE("oracle gap on thm2")
    {
        const auto o = invoke({"oracle", "--preset", "thm2"});
        CHECK(o.code == 0);
        CHECK(field(o.out, "gap_u") <= 1e-6);
        CHECK(field(o.out, "gap_r") <= 1e-8);
    }

    TEST_CASE("gauss on a flat torus")
    {
        const auto o = invoke({"gauss", "--torus", "16:6.283185307179586,16:6.283185307179586", "--psi",
                               "0.3*cos(x1)", "--init", "0.1*sin(x2)", "--max-steps", "500"});
        CHECK(o.code == 0);
        CHECK(std::abs(field(o.out, "area_drift")) <= 1e-12);
    }

    TEST_CASE("sweep output is deterministic")
    {
        const auto a = temp_file("sweep_a.csv");
        const auto b = temp_file("sweep_b.csv");
        const auto oa = invoke({"sweep", "--starts", "8", "--seed", "7", "--out", a.string()});
        const auto ob = invoke({"sweep", "--starts", "8", "--seed", "7", "--out", b.string()});
        CHECK(oa.code == 0);
        CHECK(ob.code == 0);
        const std::string ta = slurp(a);
        CHECK(ta == slurp(b));
        CHECK(ta.rfind("start,r_final,E_final,stop\n", 0) == 0);
        CHECK(std::count(ta.begin(), ta.end(), '\n') == 9);
        CHECK(oa.out.rfind("Y_psi_upper=", 0) == 0);
        std::filesystem::remove(a);
        std::filesystem::remove(b);
    }

    TEST_CASE("trace files are byte-identical across runs")
    {
        const auto a = temp_file("trace_a.csv");
        const auto b = temp_file("trace_b.csv");
        const std::vector<std::string> common = {"run", "--preset", "torus2", "--seed", "3", "--max-steps", "300"};
        auto args_a = common;
        args_a.insert(args_a.end(), {"--out", a.string()});
        auto args_b = common;
        args_b.insert(args_b.end(), {"--out", b.string()});
        CHECK(invoke(args_a).code == 0);
        CHECK(invoke(args_b).code == 0);
        const std::string ta = slurp(a);
        CHECK(ta == slurp(b));
        CHECK(ta.rfind("step,t,dt,r,norm_err,u_min,u_max,f,R_min,R_max,res_linf\n", 0) == 0);
        CHECK(std::count(ta.begin(), ta.end(), '\n') == 302);
        std::filesystem::remove(a);
        std::filesystem::remove(b);
    }
}
