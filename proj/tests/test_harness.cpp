#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "blowlab/harness.hpp"

using namespace blowlab;
using nlohmann::json;

namespace {

struct Lab {
    RadialMesh mesh;
    DiscreteOperators ops;
};

Lab make_lab(int M) {
    Lab lab;
    lab.mesh = build_mesh(ModelParams{3, 1.0, 4.0, 1.0}, M, 2.0);
    lab.ops = assemble_operators(lab.mesh);
    return lab;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("config defaults and parsing") {
    ExperimentConfig cfg = ExperimentConfig::from_json(json::object());
    CHECK(cfg.model.n == 3);
    CHECK(cfg.model.p == 4.0);
    CHECK(cfg.mesh.M == 200);
    CHECK(cfg.stepping.dt0 == 1e-4);
    CHECK(cfg.output_dir == "out");

    json j = {
        {"model", {{"n", 4}, {"s", 2.0}, {"p", 3.0}, {"R", 2.0}}},
        {"mesh", {{"M", 50}, {"grading", 1.5}, {"quad_order", 8}}},
        {"initial",
         {{"profile", "polynomial_bump"}, {"A", 2.5}, {"q", 3.0}}},
        {"stepping", {{"dt0", 1e-3}, {"blowup_factor", 1e6}}},
        {"tolerances", {{"tol_T", 0.05}}},
        {"output", {{"dir", "elsewhere"}, {"csv", false}}},
        {"sweep", {{"parameter", "s"}, {"values", {0.0, 1.0, 2.0}}}},
    };
    ExperimentConfig c2 = ExperimentConfig::from_json(j);
    CHECK(c2.model.n == 4);
    CHECK(c2.model.s == 2.0);
    CHECK(c2.initial.profile == InitialProfile::PolynomialBump);
    CHECK(c2.initial.A == 2.5);
    CHECK(c2.stepping.blowup_factor == 1e6);
    CHECK(c2.tolerances.tol_T == 0.05);
    CHECK(c2.output_dir == "elsewhere");
    CHECK_FALSE(c2.write_csv);
    CHECK(c2.sweep_parameter == "s");
    CHECK(c2.sweep_values == std::vector<double>{0.0, 1.0, 2.0});
}

TEST_CASE("config validation rejects bad input") {
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"mesh", {{"M", 2}}}}), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"model", {{"p", 1.5}}}}), ConfigError);
    CHECK_THROWS_AS(
        ExperimentConfig::from_json({{"initial", {{"profile", "mystery"}}}}),
        ConfigError);
    CHECK_THROWS_AS(
        ExperimentConfig::from_json({{"initial", {{"target_regime", "sideways"}}}}),
        ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"sweep", {{"parameter", "R"}}}}),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"model", json::array()}}), ConfigError);
}

TEST_CASE("config load from file") {
    const std::string path = temp_path("blowlab_cfg_test.json");
    {
        std::ofstream out(path);
        out << R"({"model": {"p": 5.0}})";
    }
    ExperimentConfig cfg = ExperimentConfig::load(path);
    CHECK(cfg.model.p == 5.0);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(ExperimentConfig::load("/nonexistent/cfg.json"), ConfigError);
}

TEST_CASE("synthesize_initial hits energy targets on the extremal ray") {
    Lab lab = make_lab(80);
    const double p = lab.mesh.params.p;
    const double Cstar = estimate_Cstar(lab.mesh, lab.ops, p, 1e-10).Cstar;
    const double d = mountain_pass_d(Cstar, p);

    InitialConfig neg;
    neg.target_regime = "negative_energy";
    SynthesisResult rn = synthesize_initial(lab.mesh, lab.ops, neg);
    CHECK(rn.J0 == doctest::Approx(-d).epsilon(1e-8));
    // Reported closed-form values agree with assembled functionals.
    const Norms nn = discrete_norms(lab.mesh, lab.ops, rn.u0, p);
    CHECK(eval_J(nn.grad, nn.p, p) == doctest::Approx(rn.J0).epsilon(1e-10));
    CHECK(eval_I(nn.grad, nn.p, p) == doctest::Approx(rn.I0).epsilon(1e-10));

    InitialConfig sub;
    sub.target_regime = "subcritical";
    sub.target_J_frac = 0.5;
    SynthesisResult rs = synthesize_initial(lab.mesh, lab.ops, sub);
    CHECK(rs.J0 == doctest::Approx(0.5 * d).epsilon(1e-8));
    CHECK(rs.I0 < 0.0);

    // The subcritical amplitude sits strictly inside the ray interval
    // (lambda_I, lambda_J) where I < 0 and J > 0.
    const StateVector ext = estimate_Cstar(lab.mesh, lab.ops, p, 1e-10).extremal;
    const Norms bn = discrete_norms(lab.mesh, lab.ops, ext, p);
    CHECK(rs.lambda > ray_lambda_nehari(bn.grad, bn.p, p));
    CHECK(rs.lambda < ray_lambda_negative_energy(bn.grad, bn.p, p));

    InitialConfig bad = sub;
    bad.target_J_frac = 1.5;
    CHECK_THROWS_AS(synthesize_initial(lab.mesh, lab.ops, bad), ConfigError);
}

TEST_CASE("polynomial bump profile") {
    Lab lab = make_lab(40);
    InitialConfig cfg;
    cfg.profile = InitialProfile::PolynomialBump;
    cfg.A = 3.0;
    cfg.q = 2.0;
    SynthesisResult r = synthesize_initial(lab.mesh, lab.ops, cfg);
    // Center value A (1 - r^2)^q at r = r_1.
    const double r1 = lab.mesh.nodes[0] == 0.0 ? lab.mesh.nodes[0] : lab.mesh.nodes[0];
    CHECK(r.u0.front() ==
          doctest::Approx(3.0 * std::pow(1.0 - r1 * r1, 2.0)).epsilon(1e-12));
    CHECK(r.lambda == 3.0);
    // Bump with a target regime also works.
    cfg.target_regime = "negative_energy";
    SynthesisResult r2 = synthesize_initial(lab.mesh, lab.ops, cfg);
    CHECK(r2.J0 < 0.0);
}

TEST_CASE("trajectory CSV round trip and determinism") {
    Lab lab = make_lab(40);
    InitialConfig init;
    init.target_regime = "negative_energy";
    StateVector u0 = synthesize_initial(lab.mesh, lab.ops, init).u0;
    ConstantsReport con = build_constants_report(lab.mesh, lab.ops, u0);
    TimeStepConfig cfg;
    cfg.dt0 = 1e-3;
    cfg.blowup_factor = 1e4;
    Trajectory traj = run(lab.mesh, lab.ops, u0, cfg, con);
    REQUIRE(traj.points.size() > 10);

    const std::string csv = trajectory_csv(traj);
    CHECK(csv.rfind("# blowlab trajectory csv schema=1\n"
                    "t,dt,H,J,I,G,norm_p,norm_grad,weighted_l2\n",
                    0) == 0);

    const std::string path = temp_path("blowlab_traj_test.csv");
    write_trajectory_csv(traj, path);
    CsvTrajectory back = read_trajectory_csv(path);
    std::filesystem::remove(path);

    REQUIRE(back.traj.points.size() == traj.points.size());
    for (size_t k = 0; k < traj.points.size(); ++k) {
        CHECK(back.traj.points[k].t == traj.points[k].t);
        CHECK(back.traj.points[k].f.H == traj.points[k].f.H);
        CHECK(back.traj.points[k].f.J == traj.points[k].f.J);
        CHECK(back.traj.points[k].f.norm_p == traj.points[k].f.norm_p);
    }

    // Bitwise identical rerun.
    Trajectory traj2 = run(lab.mesh, lab.ops, u0, cfg, con);
    CHECK(trajectory_csv(traj2) == csv);
}

TEST_CASE("read_trajectory_csv rejects malformed rows") {
    const std::string path = temp_path("blowlab_traj_bad.csv");
    {
        std::ofstream out(path);
        out << "t,dt,H,J,I,G,norm_p,norm_grad,weighted_l2\n";
        out << "0,0,1,2\n";
    }
    CHECK_THROWS(read_trajectory_csv(path));
    std::filesystem::remove(path);
    CHECK_THROWS(read_trajectory_csv("/nonexistent/t.csv"));
}

TEST_CASE("resolve_output_dir honors the environment override") {
    ExperimentConfig cfg;
    cfg.output_dir = "from_config";
    CHECK(resolve_output_dir(cfg) == "from_config");
    setenv("BLOWLAB_OUTPUT_DIR", "/tmp/blowlab_override", 1);
    CHECK(resolve_output_dir(cfg) == "/tmp/blowlab_override");
    unsetenv("BLOWLAB_OUTPUT_DIR");
}
