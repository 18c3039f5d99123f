#include "blowlab/harness.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "blowlab/errors.hpp"

namespace blowlab {

namespace fs = std::filesystem;

void ExperimentConfig::validate() const {
    model.validate();
    if (mesh.M < 4) throw ConfigError("mesh.M must be >= 4");
    if (!(mesh.grading > 0.0)) throw ConfigError("mesh.grading must be positive");
    if (mesh.quad_order < 4) throw ConfigError("mesh.quad_order must be >= 4");
    stepping.validate();
    if (initial.profile == InitialProfile::PolynomialBump) {
        if (!(initial.A >= 0.0)) throw ConfigError("initial.A must be nonnegative");
        if (!(initial.q > 0.0)) throw ConfigError("initial.q must be positive");
    }
    if (!initial.target_regime.empty() && initial.target_regime != "negative_energy" &&
        initial.target_regime != "subcritical")
        throw ConfigError("initial.target_regime must be empty, negative_energy, or subcritical");
    if (!sweep_parameter.empty() && sweep_parameter != "s" && sweep_parameter != "p" &&
        sweep_parameter != "lambda")
        throw ConfigError("sweep.parameter must be s, p, or lambda");
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    try {
        if (j.contains("model")) {
            const auto& m = j["model"];
            cfg.model.n = m.value("n", cfg.model.n);
            cfg.model.s = m.value("s", cfg.model.s);
            cfg.model.p = m.value("p", cfg.model.p);
            cfg.model.R = m.value("R", cfg.model.R);
        }
        if (j.contains("mesh")) {
            const auto& m = j["mesh"];
            cfg.mesh.M = m.value("M", cfg.mesh.M);
            cfg.mesh.grading = m.value("grading", cfg.mesh.grading);
            cfg.mesh.quad_order = m.value("quad_order", cfg.mesh.quad_order);
        }
        if (j.contains("initial")) {
            const auto& m = j["initial"];
            const std::string prof = m.value("profile", std::string("ground_state_ray"));
            if (prof == "polynomial_bump")
                cfg.initial.profile = InitialProfile::PolynomialBump;
            else if (prof == "ground_state_ray")
                cfg.initial.profile = InitialProfile::GroundStateRay;
            else
                throw ConfigError("initial.profile must be polynomial_bump or ground_state_ray");
            cfg.initial.A = m.value("A", cfg.initial.A);
            cfg.initial.q = m.value("q", cfg.initial.q);
            cfg.initial.lambda = m.value("lambda", cfg.initial.lambda);
            cfg.initial.target_regime = m.value("target_regime", cfg.initial.target_regime);
            if (m.contains("target_J_frac"))
                cfg.initial.target_J_frac = m["target_J_frac"].get<double>();
        }
        if (j.contains("stepping")) {
            const auto& m = j["stepping"];
            cfg.stepping.dt0 = m.value("dt0", cfg.stepping.dt0);
            cfg.stepping.dt_min = m.value("dt_min", cfg.stepping.dt_min);
            cfg.stepping.blowup_factor = m.value("blowup_factor", cfg.stepping.blowup_factor);
            cfg.stepping.adapt_exponent = m.value("adapt_exponent", cfg.stepping.adapt_exponent);
            cfg.stepping.max_steps = m.value("max_steps", cfg.stepping.max_steps);
            cfg.stepping.theta_scheme = m.value("theta_scheme", cfg.stepping.theta_scheme);
            cfg.stepping.t_max = m.value("t_max", cfg.stepping.t_max);
        }
        if (j.contains("estimators")) {
            const auto& m = j["estimators"];
            cfg.estimators.tol_Cstar = m.value("tol_Cstar", cfg.estimators.tol_Cstar);
            cfg.estimators.tol_Cstarstar =
                m.value("tol_Cstarstar", cfg.estimators.tol_Cstarstar);
            cfg.estimators.i_margin = m.value("i_margin", cfg.estimators.i_margin);
        }
        if (j.contains("tolerances")) {
            const auto& m = j["tolerances"];
            cfg.tolerances.identity_per_dt =
                m.value("identity_per_dt", cfg.tolerances.identity_per_dt);
            cfg.tolerances.identity_window_factor =
                m.value("identity_window_factor", cfg.tolerances.identity_window_factor);
            cfg.tolerances.tol_T = m.value("tol_T", cfg.tolerances.tol_T);
            cfg.tolerances.rate_factor = m.value("rate_factor", cfg.tolerances.rate_factor);
            cfg.tolerances.slope_tol = m.value("slope_tol", cfg.tolerances.slope_tol);
            cfg.tolerances.floor_tol = m.value("floor_tol", cfg.tolerances.floor_tol);
            cfg.tolerances.growth_tol = m.value("growth_tol", cfg.tolerances.growth_tol);
        }
        if (j.contains("output")) {
            const auto& m = j["output"];
            cfg.output_dir = m.value("dir", cfg.output_dir);
            cfg.write_csv = m.value("csv", cfg.write_csv);
            cfg.write_json = m.value("json", cfg.write_json);
        }
        if (j.contains("sweep")) {
            const auto& m = j["sweep"];
            cfg.sweep_parameter = m.value("parameter", std::string());
            if (m.contains("values"))
                cfg.sweep_values = m["values"].get<std::vector<double>>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return from_json(j);
}

std::string resolve_output_dir(const ExperimentConfig& cfg) {
    if (const char* env = std::getenv("BLOWLAB_OUTPUT_DIR"); env && *env)
        return env;
    return cfg.output_dir;
}

SynthesisResult synthesize_initial(const RadialMesh& mesh,
                                   const DiscreteOperators& ops,
                                   const InitialConfig& cfg) {
    const double p = mesh.params.p;
    const double R = mesh.params.R;

    StateVector base;
    double base_amp = 1.0;
    if (cfg.profile == InitialProfile::PolynomialBump) {
        const double q = cfg.q;
        base = interpolate(mesh, [&](double r) {
            const double w = 1.0 - (r / R) * (r / R);
            return std::pow(std::max(w, 0.0), q);
        });
        base_amp = cfg.A;
    } else {
        base = estimate_Cstar(mesh, ops, p, 1e-10).extremal;
        base_amp = cfg.lambda;
    }

    const Norms bn = discrete_norms(mesh, ops, base, p);
    const double a = bn.grad, b = bn.p;

    double lambda = base_amp;
    if (!cfg.target_regime.empty()) {
        if (!(b > 0.0)) throw RegimeUnreachableError("synthesize_initial: zero base profile");
        const double lam_I = ray_lambda_nehari(a, b, p);
        const double lam_J = ray_lambda_negative_energy(a, b, p);
        // d from the discrete embedding ratio of this mesh.
        const double Cstar = estimate_Cstar(mesh, ops, p, 1e-10).Cstar;
        const double d = mountain_pass_d(Cstar, p);
        double frac = cfg.target_J_frac;
        auto J_at = [&](double lam) { return ray_scaling(lam, a, b, p).J; };
        if (cfg.target_regime == "negative_energy") {
            if (std::isnan(frac)) frac = -1.0;
            if (!(frac < 0.0))
                throw ConfigError("target_J_frac must be negative for negative_energy");
            const double target = frac * d;
            double lo = lam_J, hi = 2.0 * lam_J;
            while (J_at(hi) > target) hi *= 2.0;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                (J_at(mid) > target ? lo : hi) = mid;
            }
            lambda = 0.5 * (lo + hi);
        } else {
            if (std::isnan(frac)) frac = 0.5;
            if (!(frac > 0.0 && frac < 1.0))
                throw ConfigError("target_J_frac must lie in (0,1) for subcritical");
            const double target = frac * d;
            // J decreases from the ray peak (>= d) to 0 on [lam_I, lam_J].
            if (!(J_at(lam_I) > target))
                throw RegimeUnreachableError(
                    "synthesize_initial: profile cannot reach the subcritical target");
            double lo = lam_I, hi = lam_J;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                (J_at(mid) > target ? lo : hi) = mid;
            }
            lambda = 0.5 * (lo + hi);
        }
    }

    SynthesisResult out;
    out.u0 = base;
    for (double& v : out.u0) v *= lambda;
    out.lambda = lambda;
    const RayValues rv = ray_scaling(lambda, a, b, p);
    out.J0 = rv.J;
    out.I0 = rv.I;
    return out;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << body;
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_json_file(const std::string& path, const nlohmann::ordered_json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj) {
    std::ostringstream os;
    os << "# blowlab trajectory csv schema=1\n";
    os << "t,dt,H,J,I,G,norm_p,norm_grad,weighted_l2\n";
    for (const TrajectoryPoint& pt : traj.points) {
        os << fmt(pt.t) << ',' << fmt(pt.dt) << ',' << fmt(pt.f.H) << ','
           << fmt(pt.f.J) << ',' << fmt(pt.f.I) << ',' << fmt(pt.f.G) << ','
           << fmt(pt.f.norm_p) << ',' << fmt(pt.f.norm_grad) << ','
           << fmt(pt.f.weighted_l2) << '\n';
    }
    return os.str();
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    write_text_file(path, trajectory_csv(traj));
}

CsvTrajectory read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trajectory csv: " + path);
    CsvTrajectory out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 't') continue;
        TrajectoryPoint pt;
        double fields[9];
        std::istringstream ls(line);
        std::string cell;
        int i = 0;
        while (std::getline(ls, cell, ',') && i < 9) fields[i++] = std::stod(cell);
        if (i != 9) throw std::runtime_error("malformed trajectory row: " + line);
        pt.t = fields[0];
        pt.dt = fields[1];
        pt.f.t = fields[0];
        pt.f.H = fields[2];
        pt.f.J = fields[3];
        pt.f.I = fields[4];
        pt.f.G = fields[5];
        pt.f.norm_p = fields[6];
        pt.f.norm_grad = fields[7];
        pt.f.weighted_l2 = fields[8];
        out.traj.points.push_back(pt);
    }
    if (out.traj.points.empty())
        throw std::runtime_error("trajectory csv has no rows: " + path);
    return out;
}

namespace {

struct Workspace {
    RadialMesh mesh;
    DiscreteOperators ops;
    SynthesisResult init;
    ConstantsReport constants;
};

Workspace prepare(const ExperimentConfig& cfg) {
    Workspace ws;
    ws.mesh = build_mesh(cfg.model, cfg.mesh.M, cfg.mesh.grading, cfg.mesh.quad_order);
    ws.ops = assemble_operators(ws.mesh);
    ws.init = synthesize_initial(ws.mesh, ws.ops, cfg.initial);
    ws.constants = build_constants_report(ws.mesh, ws.ops, ws.init.u0, cfg.estimators);
    return ws;
}

}  // namespace

int cmd_constants(const ExperimentConfig& cfg) {
    const std::string dir = resolve_output_dir(cfg);
    try {
        Workspace ws = prepare(cfg);
        fs::create_directories(dir);
        write_json_file(dir + "/constants.json", ws.constants.to_json());
        std::cout << "wrote " << dir << "/constants.json (regime "
                  << regime_name(ws.constants.regime) << ")\n";
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NoConvergenceError& e) {
        std::cerr << "estimator error: " << e.what() << "\n";
        return kExitEstimator;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
}

int cmd_simulate(const ExperimentConfig& cfg) {
    const std::string dir = resolve_output_dir(cfg);
    try {
        Workspace ws = prepare(cfg);
        Trajectory traj = run(ws.mesh, ws.ops, ws.init.u0, cfg.stepping, ws.constants);
        VerificationReport ver = verify_trajectory(traj, ws.constants, cfg.model.p,
                                                   cfg.stepping.dt0, cfg.tolerances);
        fs::create_directories(dir);
        if (cfg.write_csv) write_trajectory_csv(traj, dir + "/trajectory.csv");
        if (cfg.write_json) {
            write_json_file(dir + "/constants.json", ws.constants.to_json());
            write_json_file(dir + "/verification.json", ver.to_json());
            nlohmann::ordered_json meta{
                {"status", run_status_name(traj.status)},
                {"lambda", ws.init.lambda},
                {"T_threshold", traj.T_threshold},
            };
            if (traj.status == RunStatus::BlowupDetected) {
                meta["T_num"] = traj.T_num;
                meta["fit"] = {{"exponent_used", traj.fit.exponent_used},
                               {"fallback", traj.fit.fallback},
                               {"correlation", traj.fit.correlation}};
                meta["bounds"] = make_bounds_report(ws.constants, cfg.model.p).to_json();
            }
            write_json_file(dir + "/run.json", meta);
        }
        write_text_file(dir + "/verification.txt", ver.text_summary());
        std::cout << ver.text_summary();
        return ver.all_passed() ? kExitOk : kExitVerification;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NoConvergenceError& e) {
        std::cerr << "estimator error: " << e.what() << "\n";
        return kExitEstimator;
    } catch (const RegimeUnreachableError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
}

namespace {

struct SweepRow {
    double value = 0.0;
    bool failed = false;
    std::string error;
    double J0 = 0.0, I0 = 0.0;
    std::string regime;
    double T_lower = std::numeric_limits<double>::quiet_NaN();
    double T_num = std::numeric_limits<double>::quiet_NaN();
    double T_upper = std::numeric_limits<double>::quiet_NaN();
    double slope = std::numeric_limits<double>::quiet_NaN();
    int checks_passed = 0, checks_total = 0;
    std::string status;
};

SweepRow sweep_one(ExperimentConfig cfg, const std::string& param, double value) {
    SweepRow row;
    row.value = value;
    try {
        if (param == "s")
            cfg.model.s = value;
        else if (param == "p")
            cfg.model.p = value;
        else {
            cfg.initial.lambda = value;
            cfg.initial.target_regime.clear();
        }
        cfg.validate();
        Workspace ws = prepare(cfg);
        Trajectory traj = run(ws.mesh, ws.ops, ws.init.u0, cfg.stepping, ws.constants);
        VerificationReport ver = verify_trajectory(traj, ws.constants, cfg.model.p,
                                                   cfg.stepping.dt0, cfg.tolerances);
        row.J0 = ws.constants.J0;
        row.I0 = ws.constants.I0;
        row.regime = regime_name(ws.constants.regime);
        row.status = run_status_name(traj.status);
        if (ws.constants.regime != Regime::NotBlowupCertified) {
            row.T_lower = lower_time_bound(ws.constants.H0, ws.constants.Cstar, cfg.model.p);
            row.T_upper = upper_time_bound(ws.constants.H0, ws.constants.G0, ws.constants.C1);
        }
        if (traj.status == RunStatus::BlowupDetected) {
            row.T_num = traj.T_num;
            row.slope = terminal_loglog_slope(traj, traj.T_num);
        }
        for (const CheckRecord& c : ver.checks) {
            if (c.skipped) continue;
            ++row.checks_total;
            if (c.pass) ++row.checks_passed;
        }
    } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
    }
    return row;
}

}  // namespace

int cmd_sweep(const ExperimentConfig& cfg) {
    const std::string dir = resolve_output_dir(cfg);
    try {
        if (cfg.sweep_parameter.empty())
            throw ConfigError("sweep requires sweep.parameter and sweep.values");
        std::vector<std::future<SweepRow>> futures;
        for (double v : cfg.sweep_values)
            futures.push_back(std::async(std::launch::async, sweep_one, cfg,
                                         cfg.sweep_parameter, v));
        std::ostringstream os;
        os << "# blowlab sweep csv schema=1\n";
        os << cfg.sweep_parameter
           << ",J0,I0,regime,T_lower,T_num,T_upper,slope,checks_passed,checks_total,status\n";
        bool any_failed = false;
        for (auto& f : futures) {
            SweepRow row = f.get();
            if (row.failed) {
                any_failed = true;
                os << fmt(row.value) << ",,,error,,,,,,," << row.error << "\n";
                continue;
            }
            os << fmt(row.value) << ',' << fmt(row.J0) << ',' << fmt(row.I0) << ','
               << row.regime << ',' << fmt(row.T_lower) << ',' << fmt(row.T_num) << ','
               << fmt(row.T_upper) << ',' << fmt(row.slope) << ','
               << row.checks_passed << ',' << row.checks_total << ',' << row.status
               << "\n";
        }
        fs::create_directories(dir);
        write_text_file(dir + "/sweep.csv", os.str());
        std::cout << "wrote " << dir << "/sweep.csv (" << cfg.sweep_values.size()
                  << " rows)\n";
        return any_failed ? kExitVerification : kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
}

int cmd_verify(const std::string& trajectory_csv_path,
               const std::string& constants_json_path, double p, double dt0,
               const VerifyTolerances& tol, const std::string& output_dir) {
    try {
        std::ifstream cin_(constants_json_path);
        if (!cin_) throw std::runtime_error("cannot open constants json: " + constants_json_path);
        nlohmann::json cj;
        cin_ >> cj;
        ConstantsReport constants = ConstantsReport::from_json(cj);

        CsvTrajectory csv = read_trajectory_csv(trajectory_csv_path);
        Trajectory& traj = csv.traj;
        const double H0 = traj.points.front().f.H;
        const double Hmax = traj.points.back().f.H;
        if (Hmax >= 1e6 * H0) {
            traj.status = RunStatus::BlowupDetected;
            traj.T_threshold = traj.points.back().t;
            const double C1 = std::isnan(constants.C1) ? p : constants.C1;
            try {
                traj.fit = extrapolate_T(traj, C1, p);
                traj.has_fit = true;
                traj.T_num = std::max(traj.fit.T, traj.T_threshold);
            } catch (const InsufficientWindowError&) {
                traj.T_num = traj.T_threshold;
            }
        } else {
            traj.status = RunStatus::GlobalWindowReached;
        }

        VerificationReport ver =
            verify_trajectory(traj, constants, p, dt0, tol, /*have_dissipation=*/false);
        if (!output_dir.empty()) {
            fs::create_directories(output_dir);
            write_json_file(output_dir + "/verification.json", ver.to_json());
            write_text_file(output_dir + "/verification.txt", ver.text_summary());
        }
        std::cout << ver.text_summary();
        return ver.all_passed() ? kExitOk : kExitVerification;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
}

}  // namespace blowlab
