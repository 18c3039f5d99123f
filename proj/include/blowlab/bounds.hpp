#pragma once

// Closed-form blowup bounds (blowup-time bounds, rate envelopes, exponential growth
// floor, the comparison predicate) and the trajectory verification report.

#include <string>
#include <vector>

#include "blowlab/dynamics.hpp"

namespace blowlab {

// T <= 2 H(0) / (C1 (C1-2) G(0))
double upper_time_bound(double H0, double G0, double C1);

// T >= (2 H(0))^{(2-p)/2} / (C*^p (p-2))
double lower_time_bound(double H0, double Cstar, double p);

// Envelope for 2H(t): 2 [C1 (C1-2) G(0) / (2 H(0)^{C1/2})]^{2/(2-C1)} (T-t)^{-2/(C1-2)}.
double upper_rate_envelope(double t, double T, double H0, double G0, double C1);

// Floor for 2H(t): C*^{-2p/(p-2)} (p-2)^{-2/(p-2)} (T-t)^{-2/(p-2)}.
double lower_rate_envelope(double t, double T, double Cstar, double p);

// Floor 2 H(0) e^{C2 t}.
double growth_floor(double t, double H0, double C2);

// [((1-eps)p + 2 eps)/2]^{-p/(p-2)} < (p-1)/(p-2) - sqrt(1/(p-2)^2 + p/(4(p-1)))
bool remark_comparison_holds(double p, double eps);

struct BoundsReport {
    double T_upper = 0.0;
    double T_lower = 0.0;
    double rate_upper_coeff = 0.0;
    double rate_upper_exp = 0.0;  // -2/(C1-2)
    double rate_lower_coeff = 0.0;
    double rate_lower_exp = 0.0;  // -2/(p-2)
    double growth_coeff = 0.0;    // 2 H(0)
    double growth_rate = 0.0;     // C2
    bool consistent = true;       // T_lower <= T_upper

    nlohmann::ordered_json to_json() const;
};

BoundsReport make_bounds_report(const ConstantsReport& constants, double p);

struct CheckRecord {
    std::string name;
    std::string statement;
    bool pass = true;
    bool skipped = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string note;
};

struct VerificationReport {
    std::vector<CheckRecord> checks;

    bool all_passed() const;
    const CheckRecord* find(const std::string& name) const;
    nlohmann::ordered_json to_json() const;
    std::string text_summary() const;
};

struct VerifyTolerances {
    double identity_per_dt = 50.0;        // identity tol = identity_per_dt * dt0
    double identity_window_factor = 10.0;  // identity checked while H <= this * H0
    double tol_T = 0.10;                  // blowup-time containment
    double rate_factor = 2.0;             // rate sandwich slack
    double slope_tol = 0.15;              // log-log slope agreement
    double floor_tol = 1e-2;              // theta2 norm floor
    double growth_tol = 1e-6;             // exponential floor slack
    double gap_tol = 1e-9;                // G monotonicity slack (relative)
};

// have_dissipation = false (trajectories re-read from CSV) skips the
// first-identity check, which needs the integrated dissipation.
VerificationReport verify_trajectory(const Trajectory& traj,
                                     const ConstantsReport& constants, double p,
                                     double dt0,
                                     const VerifyTolerances& tol = {},
                                     bool have_dissipation = true);

// Log-log slope of 2H against (T - t) over the terminal window
// (H >= 1e3 * H(0)); NaN when the window is too short.
double terminal_loglog_slope(const Trajectory& traj, double T);

}  // namespace blowlab
