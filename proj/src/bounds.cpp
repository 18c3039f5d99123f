#include "blowlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "blowlab/errors.hpp"

namespace blowlab {

double upper_time_bound(double H0, double G0, double C1) {
    if (!(C1 > 2.0) || !(G0 > 0.0))
        throw OutOfRegimeError("upper_time_bound: requires C1 > 2 and G(0) > 0");
    return 2.0 * H0 / (C1 * (C1 - 2.0) * G0);
}

double lower_time_bound(double H0, double Cstar, double p) {
    if (!(p > 2.0) || !(Cstar > 0.0) || !(H0 > 0.0))
        throw OutOfRegimeError("lower_time_bound: requires p > 2, Cstar > 0, H0 > 0");
    return std::pow(2.0 * H0, 0.5 * (2.0 - p)) / (std::pow(Cstar, p) * (p - 2.0));
}

double upper_rate_envelope(double t, double T, double H0, double G0, double C1) {
    if (!(t >= 0.0 && t < T)) throw OutOfRegimeError("upper_rate_envelope: t must lie in [0, T)");
    if (!(C1 > 2.0)) throw OutOfRegimeError("upper_rate_envelope: requires C1 > 2");
    const double coeff =
        2.0 * std::pow(C1 * (C1 - 2.0) * G0 / (2.0 * std::pow(H0, 0.5 * C1)),
                       2.0 / (2.0 - C1));
    return coeff * std::pow(T - t, -2.0 / (C1 - 2.0));
}

double lower_rate_envelope(double t, double T, double Cstar, double p) {
    if (!(t >= 0.0 && t < T)) throw OutOfRegimeError("lower_rate_envelope: t must lie in [0, T)");
    const double coeff = std::pow(Cstar, -2.0 * p / (p - 2.0)) *
                         std::pow(p - 2.0, -2.0 / (p - 2.0));
    return coeff * std::pow(T - t, -2.0 / (p - 2.0));
}

double growth_floor(double t, double H0, double C2) {
    return 2.0 * H0 * std::exp(C2 * t);
}

bool remark_comparison_holds(double p, double eps) {
    const double left = std::pow(0.5 * ((1.0 - eps) * p + 2.0 * eps), -p / (p - 2.0));
    const double right = (p - 1.0) / (p - 2.0) -
                         std::sqrt(1.0 / ((p - 2.0) * (p - 2.0)) + p / (4.0 * (p - 1.0)));
    return left < right;
}

BoundsReport make_bounds_report(const ConstantsReport& c, double p) {
    BoundsReport rep;
    rep.T_upper = upper_time_bound(c.H0, c.G0, c.C1);
    rep.T_lower = lower_time_bound(c.H0, c.Cstar, p);
    rep.rate_upper_exp = -2.0 / (c.C1 - 2.0);
    rep.rate_lower_exp = -2.0 / (p - 2.0);
    rep.rate_upper_coeff =
        2.0 * std::pow(c.C1 * (c.C1 - 2.0) * c.G0 / (2.0 * std::pow(c.H0, 0.5 * c.C1)),
                       2.0 / (2.0 - c.C1));
    rep.rate_lower_coeff = std::pow(c.Cstar, -2.0 * p / (p - 2.0)) *
                           std::pow(p - 2.0, -2.0 / (p - 2.0));
    rep.growth_coeff = 2.0 * c.H0;
    rep.growth_rate = c.C2;
    rep.consistent = rep.T_lower <= rep.T_upper;
    return rep;
}

nlohmann::ordered_json BoundsReport::to_json() const {
    return {{"T_upper", T_upper},
            {"T_lower", T_lower},
            {"rate_upper_coeff", rate_upper_coeff},
            {"rate_upper_exp", rate_upper_exp},
            {"rate_lower_coeff", rate_lower_coeff},
            {"rate_lower_exp", rate_lower_exp},
            {"growth_coeff", growth_coeff},
            {"growth_rate", growth_rate},
            {"consistent", consistent}};
}

bool VerificationReport::all_passed() const {
    for (const CheckRecord& c : checks)
        if (!c.skipped && !c.pass) return false;
    return true;
}

const CheckRecord* VerificationReport::find(const std::string& name) const {
    for (const CheckRecord& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

nlohmann::ordered_json VerificationReport::to_json() const {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const CheckRecord& c : checks) {
        nlohmann::ordered_json j{{"check", c.name},
                                 {"statement", c.statement},
                                 {"pass", c.pass},
                                 {"measured", std::isnan(c.measured)
                                                  ? nlohmann::ordered_json(nullptr)
                                                  : nlohmann::ordered_json(c.measured)},
                                 {"tolerance", c.tolerance}};
        if (c.skipped) j["skipped"] = true;
        if (!c.note.empty()) j["note"] = c.note;
        arr.push_back(j);
    }
    return {{"checks", arr}, {"all_passed", all_passed()}};
}

std::string VerificationReport::text_summary() const {
    std::ostringstream os;
    for (const CheckRecord& c : checks) {
        const char* tag = c.skipped ? "SKIP" : (c.pass ? "PASS" : "FAIL");
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.6g", c.measured);
        os << "[" << tag << "] " << c.name << " (" << c.statement
           << "): measured " << buf << ", tolerance " << c.tolerance;
        if (!c.note.empty()) os << " -- " << c.note;
        os << "\n";
    }
    os << (all_passed() ? "all checks passed" : "some checks FAILED") << "\n";
    return os.str();
}

namespace {

// Terminal fit window: H >= 1e3 H0, excluding the top two decades of H where
// log(T - t) is dominated by the uncertainty in T itself. The cap is dropped
// when the run is too shallow for it.
double terminal_window_cap(const Trajectory& traj) {
    const double H0 = traj.points.front().f.H;
    double Hmax = 0.0;
    for (const TrajectoryPoint& pt : traj.points) Hmax = std::max(Hmax, pt.f.H);
    const double cap = Hmax * 1e-2;
    size_t m = 0;
    for (const TrajectoryPoint& pt : traj.points)
        if (pt.f.H >= 1e3 * H0 && pt.f.H <= cap) ++m;
    return m >= 3 ? cap : std::numeric_limits<double>::infinity();
}

}  // namespace

double terminal_loglog_slope(const Trajectory& traj, double T) {
    const double H0 = traj.points.front().f.H;
    const double cap = terminal_window_cap(traj);
    double sx = 0.0, sy = 0.0;
    size_t m = 0;
    for (const TrajectoryPoint& pt : traj.points) {
        if (pt.f.H < 1e3 * H0 || pt.f.H > cap || pt.t >= T * (1.0 - 1e-12)) continue;
        sx += std::log(T - pt.t);
        sy += std::log(2.0 * pt.f.H);
        ++m;
    }
    if (m < 3) return std::numeric_limits<double>::quiet_NaN();
    const double mx = sx / m, my = sy / m;
    double num = 0.0, den = 0.0;
    for (const TrajectoryPoint& pt : traj.points) {
        if (pt.f.H < 1e3 * H0 || pt.f.H > cap || pt.t >= T * (1.0 - 1e-12)) continue;
        const double dx = std::log(T - pt.t) - mx;
        num += dx * (std::log(2.0 * pt.f.H) - my);
        den += dx * dx;
    }
    return num / den;
}

VerificationReport verify_trajectory(const Trajectory& traj,
                                     const ConstantsReport& con, double p,
                                     double dt0, const VerifyTolerances& tol,
                                     bool have_dissipation) {
    VerificationReport rep;
    const auto& pts = traj.points;
    const double H0 = pts.front().f.H;
    const bool certified = con.regime != Regime::NotBlowupCertified;
    const bool blowup = traj.status == RunStatus::BlowupDetected;

    auto skip = [&](std::string name, std::string loc, std::string why) {
        CheckRecord c;
        c.name = std::move(name);
        c.statement = std::move(loc);
        c.skipped = true;
        c.measured = std::numeric_limits<double>::quiet_NaN();
        c.note = std::move(why);
        rep.checks.push_back(std::move(c));
    };

    // Energy identity, first form: J(u(t)) + dissipation = J(u0), checked on
    // the window where the functionals keep the initial magnitude.
    if (!have_dissipation) {
        skip("energy_identity", "energy dissipation identity",
             "integrated dissipation not available from a CSV trajectory");
    } else {
        CheckRecord c;
        c.name = "energy_identity";
        c.statement = "energy dissipation identity";
        c.tolerance = tol.identity_per_dt * dt0;
        const double denom = std::max(std::abs(con.J0), 1e-300);
        double worst = 0.0;
        for (const TrajectoryPoint& pt : pts) {
            if (pt.f.H > tol.identity_window_factor * H0) break;
            worst = std::max(worst, std::abs(pt.f.J + pt.diss_cum - con.J0) / denom);
        }
        c.measured = worst;
        c.pass = worst <= c.tolerance;
        rep.checks.push_back(std::move(c));
    }

    // Second identity, per-step: (H(t+) - H(t))/dt = -I(u), first order in dt.
    {
        CheckRecord c;
        c.name = "h_prime_identity";
        c.statement = "weighted-energy derivative identity";
        c.tolerance = tol.identity_per_dt * dt0;
        double worst = 0.0;
        for (size_t k = 1; k < pts.size(); ++k) {
            if (pts[k].f.H > tol.identity_window_factor * H0) break;
            const double rate = (pts[k].f.H - pts[k - 1].f.H) / pts[k].dt;
            const double scale = std::max({std::abs(pts[k - 1].f.I), H0, 1e-300});
            worst = std::max(worst, std::abs(rate + pts[k - 1].f.I) / scale);
        }
        c.measured = worst;
        c.pass = worst <= c.tolerance;
        rep.checks.push_back(std::move(c));
    }

    // H strictly increasing in certified regimes.
    if (certified) {
        CheckRecord c;
        c.name = "H_monotone";
        c.statement = "weighted energy strictly increasing under the blowup hypotheses";
        c.tolerance = 0.0;
        double min_inc = std::numeric_limits<double>::infinity();
        for (size_t k = 1; k < pts.size(); ++k)
            min_inc = std::min(min_inc, pts[k].f.H - pts[k - 1].f.H);
        c.measured = min_inc;
        c.pass = min_inc > 0.0;
        rep.checks.push_back(std::move(c));
    } else {
        skip("H_monotone", "weighted energy strictly increasing under the blowup hypotheses",
             "regime not certified");
    }

    // Gap functional nondecreasing.
    {
        CheckRecord c;
        c.name = "gap_monotone";
        c.statement = "gap functional has nonnegative derivative";
        c.tolerance = tol.gap_tol;
        double worst = 0.0;
        for (size_t k = 1; k < pts.size(); ++k) {
            const double scale = std::max(std::abs(pts[k].f.G), 1e-300);
            worst = std::max(worst, (pts[k - 1].f.G - pts[k].f.G) / scale);
        }
        c.measured = worst;
        c.pass = worst <= tol.gap_tol;
        rep.checks.push_back(std::move(c));
    }

    // Lp-norm floor theta2 in the subcritical regime.
    if (con.regime == Regime::Subcritical && !std::isnan(con.theta2)) {
        CheckRecord c;
        c.name = "norm_floor";
        c.statement = "persistence of the Lp norm above the level-set threshold";
        c.tolerance = tol.floor_tol;
        double min_ratio = std::numeric_limits<double>::infinity();
        for (const TrajectoryPoint& pt : pts)
            min_ratio = std::min(min_ratio, pt.f.norm_p / con.theta2);
        c.measured = min_ratio;
        c.pass = min_ratio >= 1.0 - tol.floor_tol;
        rep.checks.push_back(std::move(c));
    } else {
        skip("norm_floor", "persistence of the Lp norm above the level-set threshold",
             "requires the subcritical regime");
    }

    const std::string direction_note =
        "discrete constants under-approximate the continuum ones: the computed "
        "lower time bound is slightly larger and the lower rate envelope slightly "
        "higher than the exact statements";

    if (certified && blowup) {
        const double T_upper = upper_time_bound(con.H0, con.G0, con.C1);
        const double T_lower = lower_time_bound(con.H0, con.Cstar, p);
        {
            CheckRecord c;
            c.name = "time_lower_bound";
            c.statement = "lower bound on the blowup time";
            c.tolerance = tol.tol_T;
            c.measured = T_lower / traj.T_num;
            c.pass = T_lower <= traj.T_num * (1.0 + tol.tol_T);
            c.note = direction_note;
            rep.checks.push_back(std::move(c));
        }
        {
            CheckRecord c;
            c.name = "time_upper_bound";
            c.statement = "upper bound on the blowup time";
            c.tolerance = tol.tol_T;
            c.measured = traj.T_num / T_upper;
            c.pass = traj.T_num <= T_upper * (1.0 + tol.tol_T);
            rep.checks.push_back(std::move(c));
        }

        // Growth floor at every snapshot.
        {
            CheckRecord c;
            c.name = "growth_floor";
            c.statement = "exponential growth estimate for blowup solutions";
            c.tolerance = tol.growth_tol;
            double min_ratio = std::numeric_limits<double>::infinity();
            for (const TrajectoryPoint& pt : pts)
                min_ratio = std::min(min_ratio,
                                     2.0 * pt.f.H / growth_floor(pt.t, con.H0, con.C2));
            c.measured = min_ratio;
            c.pass = min_ratio >= 1.0 - tol.growth_tol;
            rep.checks.push_back(std::move(c));
        }

        // Rate sandwich on the terminal window, T instantiated with T_num.
        const double T = traj.T_num;
        const double cap = terminal_window_cap(traj);
        double up_worst = 0.0, lo_worst = std::numeric_limits<double>::infinity();
        size_t m = 0;
        for (const TrajectoryPoint& pt : pts) {
            if (pt.f.H < 1e3 * H0 || pt.f.H > cap || pt.t >= T * (1.0 - 1e-12)) continue;
            const double twoH = 2.0 * pt.f.H;
            up_worst = std::max(twoH / upper_rate_envelope(pt.t, T, con.H0, con.G0, con.C1),
                                up_worst);
            lo_worst = std::min(twoH / lower_rate_envelope(pt.t, T, con.Cstar, p),
                                lo_worst);
            ++m;
        }
        const double slope = terminal_loglog_slope(traj, T);

        // Envelope sensitivity to the T_num error, by finite difference.
        auto sens_note = [&](bool upper) {
            const double dT = 1e-3 * T;
            const double t_ref = pts.front().t;
            double e1, e2;
            if (upper) {
                e1 = upper_rate_envelope(t_ref, T, con.H0, con.G0, con.C1);
                e2 = upper_rate_envelope(t_ref, T + dT, con.H0, con.G0, con.C1);
            } else {
                e1 = lower_rate_envelope(t_ref, T, con.Cstar, p);
                e2 = lower_rate_envelope(t_ref, T + dT, con.Cstar, p);
            }
            char buf[96];
            std::snprintf(buf, sizeof(buf),
                          "relative envelope sensitivity d(log env)/d(log T) = %.3g",
                          (e2 - e1) / e1 / (dT / T));
            return std::string(buf);
        };

        {
            CheckRecord c;
            c.name = "rate_upper_envelope";
            c.statement = "upper bound on the blowup rate";
            c.tolerance = tol.rate_factor;
            c.measured = up_worst;
            c.pass = m > 0 && up_worst <= tol.rate_factor;
            c.note = sens_note(true);
            rep.checks.push_back(std::move(c));
        }
        {
            CheckRecord c;
            c.name = "rate_lower_envelope";
            c.statement = "lower bound on the blowup rate";
            c.tolerance = tol.rate_factor;
            c.measured = lo_worst;
            c.pass = m > 0 && lo_worst >= 1.0 / tol.rate_factor;
            c.note = direction_note + "; " + sens_note(false);
            rep.checks.push_back(std::move(c));
        }
        if (con.regime == Regime::NegativeEnergy) {
            // Both rate exponents coincide at -2/(p-2) here, so the measured
            // slope has a unique predicted value.
            CheckRecord c;
            c.name = "rate_slope";
            c.statement = "power-law exponent of the blowup rate";
            c.tolerance = tol.slope_tol;
            const double expected = -2.0 / (con.C1 - 2.0);
            c.measured = std::isnan(slope) ? slope : slope / expected;
            c.pass = !std::isnan(slope) &&
                     std::abs(slope - expected) <= tol.slope_tol * std::abs(expected);
            rep.checks.push_back(std::move(c));
        } else {
            skip("rate_slope", "power-law exponent of the blowup rate",
                 "the two rate exponents differ outside the negative-energy regime");
        }
    } else {
        const std::string why = certified ? "no blowup detected" : "regime not certified";
        skip("time_lower_bound", "lower bound on the blowup time", why);
        skip("time_upper_bound", "upper bound on the blowup time", why);
        skip("growth_floor", "exponential growth estimate for blowup solutions", why);
        skip("rate_upper_envelope", "upper bound on the blowup rate", why);
        skip("rate_lower_envelope", "lower bound on the blowup rate", why);
        skip("rate_slope", "power-law exponent of the blowup rate", why);
    }

    return rep;
}

}  // namespace blowlab
