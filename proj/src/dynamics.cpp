#include "blowlab/dynamics.hpp"

#include <cmath>

#include "blowlab/errors.hpp"
#include "blowlab/linsolve.hpp"
#include "blowlab/model.hpp"

namespace blowlab {

void TimeStepConfig::validate() const {
    if (!(dt0 > 0.0)) throw ConfigError("TimeStepConfig: dt0 must be positive");
    if (!(dt_min > 0.0)) throw ConfigError("TimeStepConfig: dt_min must be positive");
    if (!(dt_min <= dt0)) throw ConfigError("TimeStepConfig: dt_min must not exceed dt0");
    if (!(blowup_factor > 1.0))
        throw ConfigError("TimeStepConfig: blowup_factor must exceed 1");
    if (!(theta_scheme >= 0.5 && theta_scheme <= 1.0))
        throw ConfigError("TimeStepConfig: theta_scheme must lie in [1/2, 1]");
    if (max_steps <= 0) throw ConfigError("TimeStepConfig: max_steps must be positive");
}

std::string run_status_name(RunStatus s) {
    switch (s) {
        case RunStatus::BlowupDetected: return "BlowupDetected";
        case RunStatus::GlobalWindowReached: return "GlobalWindowReached";
        case RunStatus::StepUnderflow: return "StepUnderflow";
    }
    return "GlobalWindowReached";
}

namespace {

TriDiag system_matrix(const DiscreteOperators& ops, double dt, double theta) {
    TriDiag S = ops.Ms;
    S.add_scaled(ops.K, 1.0 + theta * dt);
    return S;
}

StateVector step_rhs(const DiscreteOperators& ops, const StateVector& u,
                     const StateVector& F, double dt, double theta) {
    // (Ms + K) u - dt (1-theta) K u + dt F(u)
    StateVector rhs = ops.Ms.matvec(u);
    const StateVector Ku = ops.K.matvec(u);
    for (size_t i = 0; i < rhs.size(); ++i)
        rhs[i] += (1.0 - dt * (1.0 - theta)) * Ku[i] + dt * F[i];
    return rhs;
}

}  // namespace

StateVector step(const RadialMesh& mesh, const DiscreteOperators& ops,
                 const StateVector& u, double dt, double theta, double p,
                 bool with_nonlinearity) {
    if (!(dt > 0.0)) throw ConfigError("step: dt must be positive");
    SpdSolver solver(system_matrix(ops, dt, theta));
    StateVector F(u.size(), 0.0);
    if (with_nonlinearity) F = assemble_nonlinear_load(mesh, u, p);
    return solver.solve(step_rhs(ops, u, F, dt, theta));
}

double adapt_dt(const StateVector& u, const TimeStepConfig& cfg, double p) {
    const double e = cfg.resolved_adapt_exponent(p);
    const double dt = cfg.dt0 / (1.0 + std::pow(max_abs(u), e));
    return std::min(cfg.dt0, std::max(cfg.dt_min, dt));
}

Trajectory run(const RadialMesh& mesh, const DiscreteOperators& ops,
               const StateVector& u0, const TimeStepConfig& cfg,
               const ConstantsReport& constants) {
    cfg.validate();
    const double p = mesh.params.p;
    const double theta = cfg.theta_scheme;
    const bool certified = constants.regime != Regime::NotBlowupCertified;

    // Time horizon: 3x the certified upper time bound when one exists, else t_max.
    double t_limit = cfg.t_max;
    if (certified && constants.G0 > 0.0 && constants.C1 > 2.0) {
        const double T_upper =
            2.0 * constants.H0 / (constants.C1 * (constants.C1 - 2.0) * constants.G0);
        t_limit = 3.0 * T_upper;
    }

    Trajectory traj;
    TriDiag A = ops.Ms;  // Ms + K, for the dissipation quadratic form
    A.add_scaled(ops.K, 1.0);

    auto snapshot = [&](const StateVector& u, double t, double dt,
                        double diss) -> TrajectoryPoint {
        const Norms norms = discrete_norms(mesh, ops, u, p);
        TrajectoryPoint pt;
        pt.t = t;
        pt.dt = dt;
        pt.diss_cum = diss;
        pt.f.t = t;
        pt.f.norm_p = norms.p;
        pt.f.norm_grad = norms.grad;
        pt.f.weighted_l2 = norms.weighted_l2;
        pt.f.J = eval_J(norms.grad, norms.p, p);
        pt.f.I = eval_I(norms.grad, norms.p, p);
        pt.f.H = 0.5 * (norms.weighted_l2 + norms.grad * norms.grad);
        pt.f.G = constants.J0 < 0.0 ? -pt.f.J : constants.d - pt.f.J;
        return pt;
    };

    StateVector u = u0;
    double t = 0.0, diss = 0.0;
    traj.points.push_back(snapshot(u, 0.0, 0.0, 0.0));
    const double H0 = traj.points.front().f.H;
    const double H_stop = cfg.blowup_factor * H0;

    // Checkpoint thinning keeps roughly 100 stored states regardless of length.
    std::int64_t ckpt_stride = 1;
    traj.checkpoints.emplace_back(0.0, u);

    SpdSolver solver(system_matrix(ops, cfg.dt0, theta));
    double cached_dt = cfg.dt0;

    bool threshold_hit = false;
    double dt = cfg.dt0;
    std::int64_t k = 0;
    for (; k < cfg.max_steps; ++k) {
        dt = adapt_dt(u, cfg, p);
        if (dt != cached_dt) {
            solver = SpdSolver(system_matrix(ops, dt, theta));
            cached_dt = dt;
        }
        const StateVector F = assemble_nonlinear_load(mesh, u, p);
        StateVector u_next = solver.solve(step_rhs(ops, u, F, dt, theta));

        StateVector du(u.size());
        for (size_t i = 0; i < u.size(); ++i) du[i] = (u_next[i] - u[i]) / dt;
        diss += dt * A.quadform(du);

        u = std::move(u_next);
        t += dt;
        traj.points.push_back(snapshot(u, t, dt, diss));

        if (k % ckpt_stride == 0) {
            traj.checkpoints.emplace_back(t, u);
            if (traj.checkpoints.size() > 200) {
                std::vector<std::pair<double, StateVector>> thin;
                for (size_t i = 0; i < traj.checkpoints.size(); i += 2)
                    thin.push_back(std::move(traj.checkpoints[i]));
                traj.checkpoints = std::move(thin);
                ckpt_stride *= 2;
            }
        }

        const double H = traj.points.back().f.H;
        if (H >= H_stop) {
            threshold_hit = true;
            break;
        }
        if (t > t_limit) break;
    }

    if (threshold_hit) {
        traj.status = RunStatus::BlowupDetected;
        traj.T_threshold = t;
        const double C1 = std::isnan(constants.C1) ? p : constants.C1;
        try {
            traj.fit = extrapolate_T(traj, C1, p);
            traj.has_fit = true;
            traj.T_num = std::max(traj.fit.T, traj.T_threshold);
        } catch (const InsufficientWindowError&) {
            // Threshold too low for a terminal fit window; fall back to the
            // crossing time.
            traj.T_num = traj.T_threshold;
        }
    } else if (t > t_limit) {
        traj.status = RunStatus::GlobalWindowReached;
    } else {
        traj.status = dt <= cfg.dt_min ? RunStatus::StepUnderflow
                                       : RunStatus::GlobalWindowReached;
    }
    return traj;
}

ExtrapolationResult extrapolate_blowup_time(const std::vector<double>& t,
                                            const std::vector<double>& H,
                                            double H0, double C1, double p,
                                            double window_factor,
                                            double min_correlation) {
    if (t.size() != H.size())
        throw ConfigError("extrapolate_blowup_time: length mismatch");
    // Fit over the top three decades of H (but never below window_factor*H0):
    // closest to the singularity the power law is purest, and the t-intercept
    // must be accurate on the scale of the last remaining time.
    double Hmax = 0.0;
    for (double h : H) Hmax = std::max(Hmax, h);
    const double lo = std::max(window_factor * H0, Hmax * 1e-3);
    std::vector<size_t> window;
    for (size_t i = 0; i < H.size(); ++i)
        if (H[i] >= lo) window.push_back(i);
    if (window.size() < 10)
        throw InsufficientWindowError(
            "extrapolate_blowup_time: fewer than 10 snapshots in the terminal window");

    auto fit_with = [&](double C) -> ExtrapolationResult {
        const double e = -(C - 2.0) / 2.0;
        double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0, syy = 0.0;
        const double m = static_cast<double>(window.size());
        for (size_t i : window) {
            const double y = std::pow(H[i], e);
            st += t[i];
            sy += y;
            stt += t[i] * t[i];
            sty += t[i] * y;
            syy += y * y;
        }
        ExtrapolationResult res;
        const double vt = stt - st * st / m;
        const double vy = syy - sy * sy / m;
        const double cov = sty - st * sy / m;
        res.slope = cov / vt;
        res.intercept = (sy - res.slope * st) / m;
        res.correlation = (vt > 0.0 && vy > 0.0) ? std::abs(cov) / std::sqrt(vt * vy) : 0.0;
        res.exponent_used = C;
        res.T = -res.intercept / res.slope;
        return res;
    };

    ExtrapolationResult res = fit_with(C1);
    if (res.correlation < min_correlation || !(res.slope < 0.0)) {
        res = fit_with(p);
        res.fallback = true;
    }
    return res;
}

ExtrapolationResult extrapolate_T(const Trajectory& traj, double C1, double p) {
    std::vector<double> t, H;
    t.reserve(traj.points.size());
    H.reserve(traj.points.size());
    for (const TrajectoryPoint& pt : traj.points) {
        t.push_back(pt.t);
        H.push_back(pt.f.H);
    }
    return extrapolate_blowup_time(t, H, traj.points.front().f.H, C1, p);
}

}  // namespace blowlab
