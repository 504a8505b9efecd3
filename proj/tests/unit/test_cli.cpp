#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace vortexlab::cli;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

fs::path workdir() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "vortexlab_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

Outcome invoke(Command command, const std::string& name, const std::string& config) {
    const fs::path cfg = workdir() / (name + ".ini");
    std::ofstream(cfg) << config;
    Invocation inv;
    inv.command = command;
    inv.config_path = cfg.string();
    inv.out_dir = workdir() / name;
    std::ostringstream log, err;
    Outcome o;
    o.code = run(inv, log, err);
    o.out = log.str();
    o.err = err.str();
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

const char* kSmallSteady = "[grid]\nn = 64\n[vortex]\neps = 0.15\n";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("steady writes its outputs and reruns identically") {
    const Outcome a = invoke(Command::steady, "steady_a", kSmallSteady);
    REQUIRE(a.code == kPass);
    const Outcome b = invoke(Command::steady, "steady_b", kSmallSteady);
    REQUIRE(b.code == kPass);
    for (const char* file : {"steady.json", "zeta.txt", "psi.txt", "zeta.pgm", "psi.pgm", "zeta.pgm.json", "psi.pgm.json"}) {
        const auto fa = workdir() / "steady_a" / file;
        REQUIRE(fs::exists(fa));
        CHECK(slurp(fa) == slurp(workdir() / "steady_b" / file));
    }
    const auto j = nlohmann::json::parse(slurp(workdir() / "steady_a" / "steady.json"));
    CHECK(j["converged"].get<bool>());
    CHECK(j["provenance"]["grid_n"][0].get<int>() == 64);
    CHECK(j["provenance"]["tolerance"].get<double>() == 1e-10);
    CHECK(slurp(workdir() / "steady_a" / "zeta.txt").rfind("# vortexlab config_hash=", 0) == 0);
}

TEST_CASE("seed override changes the provenance hash") {
    const fs::path cfg = workdir() / "seeded.ini";
    std::ofstream(cfg) << kSmallSteady;
    Invocation inv;
    inv.command = Command::krmin;
    inv.config_path = cfg.string();
    std::ostringstream log, err;
    inv.out_dir = workdir() / "seed0";
    REQUIRE(run(inv, log, err) == kPass);
    inv.seed = 5;
    inv.out_dir = workdir() / "seed5";
    REQUIRE(run(inv, log, err) == kPass);
    const auto a = nlohmann::json::parse(slurp(workdir() / "seed0" / "krmin.json"));
    const auto b = nlohmann::json::parse(slurp(workdir() / "seed5" / "krmin.json"));
    CHECK(a["provenance"]["config_hash"] != b["provenance"]["config_hash"]);
    CHECK(b["provenance"]["seed"].get<int>() == 5);
    CHECK(a["value"] == b["value"]);
}

TEST_CASE("configuration errors exit with 1") {
    const Outcome small = invoke(Command::steady, "small", "[grid]\nn = 64\n[vortex]\neps = 0.1\n");
    CHECK(small.code == kUsage);
    CHECK(small.err.find("small.ini:4:7:") != std::string::npos);
    CHECK(small.err.find("eps/h >= 8") != std::string::npos);

    const Outcome empty = invoke(Command::sweep, "empty", "[vortex]\neps =\n");
    CHECK(empty.code == kUsage);

    const Outcome kappa = invoke(Command::krmin, "kappa", "[vortex]\nkappa1 = 1\nkappa2 = 1\n");
    CHECK(kappa.code == kUsage);
    CHECK(kappa.err.find("kappa1 > 0 > kappa2") != std::string::npos);

    const Outcome mode = invoke(Command::evolve, "mode", "[evolve]\nmode = rk45\n");
    CHECK(mode.code == kUsage);
    CHECK(mode.err.find("unknown mode") != std::string::npos);

    Invocation missing;
    missing.config_path = (workdir() / "does_not_exist.ini").string();
    std::ostringstream log, err;
    CHECK(run(missing, log, err) == kUsage);

    const Outcome outside = invoke(Command::evolve, "outside",
                                   "[grid]\nn = 32\n[evolve]\npoints = 0.99 0\nstrengths = 1\nt_end = 1\n");
    CHECK(outside.code == kUsage);
    CHECK(outside.err.find("margin") != std::string::npos);
}

TEST_CASE("single-eps sweep is flagged") {
    const Outcome o = invoke(Command::sweep, "sweep1", "[grid]\nn = 64\n[vortex]\neps = 0.15\n");
    CHECK(o.code == kFlagged);
    CHECK(o.out.find("insufficient points") != std::string::npos);
    const auto v = nlohmann::json::parse(slurp(workdir() / "sweep1" / "verdict.json"));
    CHECK_FALSE(v["all_pass"].get<bool>());
    const std::string csv = slurp(workdir() / "sweep1" / "sweep.csv");
    CHECK(csv.rfind("# vortexlab config_hash=", 0) == 0);
}

TEST_CASE("krmin in a rectangle respects the margin") {
    const Outcome o = invoke(Command::krmin, "rect", "[domain]\nkind = rectangle\nwidth = 1.6\nheight = 1.0\n[grid]\nn = 48\n[krmin]\nmargin = 0.15\n");
    REQUIRE(o.code == kPass);
    const auto j = nlohmann::json::parse(slurp(workdir() / "rect" / "krmin.json"));
    for (const char* key : {"x1", "x2"}) {
        const double x = j[key][0].get<double>();
        const double y = j[key][1].get<double>();
        CHECK(std::min({x, 1.6 - x, y, 1.0 - y}) >= 0.15 - 1e-12);
    }
    CHECK(j["margin"].get<double>() == 0.15);
}

TEST_CASE("point-vortex evolution conserves W") {
    const Outcome o = invoke(Command::evolve, "pv",
                             "[grid]\nn = 48\n[evolve]\nmode = pv\npoints = 0.3 0.1; -0.2 -0.35\nstrengths = 1, -1\n"
                             "dt = 0.01\nt_end = 5\nsample_every = 5\n");
    REQUIRE(o.code == kPass);
    const auto j = nlohmann::json::parse(slurp(workdir() / "pv" / "evolve.json"));
    CHECK(j["max_W_drift"].get<double>() <= 1e-4);
    const std::string csv = slurp(workdir() / "pv" / "trajectory.csv");
    CHECK(csv.find("t,x1,y1,x2,y2,W\n") != std::string::npos);
}

TEST_CASE("pde evolution writes the stability series") {
    const Outcome o = invoke(Command::evolve, "pde",
                             "[grid]\nn = 64\n[vortex]\neps = 0.15\n[evolve]\nmode = pde\nturnovers = 0.2\n"
                             "delta0 = 0.02\nsample_every = 5\ndrift_limit = 0.5\n");
    CHECK(o.code == kPass);
    const auto j = nlohmann::json::parse(slurp(workdir() / "pde" / "evolve.json"));
    CHECK(j["checks"].size() == 2);
    CHECK(j["perturbed"]["initial_distance"].get<double>() == doctest::Approx(0.02).epsilon(1e-9));
    CHECK(fs::exists(workdir() / "pde" / "stability.csv"));
    CHECK(fs::exists(workdir() / "pde" / "stability_unperturbed.csv"));
}

TEST_CASE("diagnose") {
    const Outcome o = invoke(Command::diagnose, "diag", "[grid]\nn = 64\n[diagnose]\ninstances = 20\nsamples = 20\n");
    CHECK(o.code == kPass);
    const auto j = nlohmann::json::parse(slurp(workdir() / "diag" / "diagnose.json"));
    CHECK(j["hardy_littlewood"]["violations"].get<int>() == 0);
    CHECK(j["riesz"]["instances"].get<int>() == 20);
}

TEST_CASE("command names") {
    CHECK(command_from_name("sweep") == Command::sweep);
    CHECK_FALSE(command_from_name("plot").has_value());
}

}
