#pragma once

// Semi-implicit time integration of (Ms + K) u' + K u = F(u) with adaptive
// steps through finite-time blowup, plus the power-law blowup-time
// extrapolator.

#include <cstdint>
#include <utility>
#include <vector>

#include "blowlab/constants.hpp"

namespace blowlab {

struct TimeStepConfig {
    double dt0 = 1e-4;
    double dt_min = 1e-18;
    double blowup_factor = 1e8;      // stop when H >= blowup_factor * H(0)
    double adapt_exponent = -1.0;    // < 0 means "use p - 2"
    std::int64_t max_steps = 50'000'000;
    double theta_scheme = 1.0;       // implicitness of the linear part
    double t_max = 10.0;             // horizon when no upper time bound exists

    void validate() const;
    double resolved_adapt_exponent(double p) const {
        return adapt_exponent < 0.0 ? p - 2.0 : adapt_exponent;
    }
};

enum class RunStatus { BlowupDetected, GlobalWindowReached, StepUnderflow };

std::string run_status_name(RunStatus s);

struct TrajectoryPoint {
    double t = 0.0;
    double dt = 0.0;        // step that produced this point (0 for the initial one)
    FunctionalSnapshot f;
    double diss_cum = 0.0;  // sum of dt * (du/dt)^T (Ms+K) (du/dt)
};

struct ExtrapolationResult {
    double T = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
    double correlation = 0.0;
    double exponent_used = 0.0;  // the C in y = H^{-(C-2)/2}
    bool fallback = false;       // true when the C1 fit failed and p was used
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    std::vector<std::pair<double, StateVector>> checkpoints;
    RunStatus status = RunStatus::GlobalWindowReached;
    double T_num = 0.0;        // valid iff status == BlowupDetected
    double T_threshold = 0.0;  // time at which the blowup threshold was crossed
    ExtrapolationResult fit;
    bool has_fit = false;
};

// One step of the theta scheme: solve
//   (Ms + K)(u+ - u)/dt + K (theta u+ + (1-theta) u) = F(u).
// with_nonlinearity = false drops F and steps the pure linear flow.
StateVector step(const RadialMesh& mesh, const DiscreteOperators& ops,
                 const StateVector& u, double dt, double theta, double p,
                 bool with_nonlinearity = true);

// dt0 / (1 + |u|_inf^exponent), clamped to [dt_min, dt0].
double adapt_dt(const StateVector& u, const TimeStepConfig& cfg, double p);

Trajectory run(const RadialMesh& mesh, const DiscreteOperators& ops,
               const StateVector& u0, const TimeStepConfig& cfg,
               const ConstantsReport& constants);

// Least-squares fit of H^{-(C1-2)/2} against t over the terminal window
// (H >= window_factor * H0); T is the t-intercept. Falls back to exponent p
// when the fit correlation is below min_correlation.
ExtrapolationResult extrapolate_blowup_time(const std::vector<double>& t,
                                            const std::vector<double>& H,
                                            double H0, double C1, double p,
                                            double window_factor = 1e3,
                                            double min_correlation = 0.99);

ExtrapolationResult extrapolate_T(const Trajectory& traj, double C1, double p);

}  // namespace blowlab
