#pragma once

// Experiment configuration, initial-data synthesis, file I/O, and the
// subcommand implementations behind the CLI.

#include <limits>
#include <string>
#include <vector>

#include "blowlab/bounds.hpp"

namespace blowlab {

// Exit codes shared by all subcommands.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitConfig = 2,
    kExitEstimator = 3,
    kExitVerification = 4,
    kExitIo = 5,
};

struct MeshConfig {
    int M = 200;
    double grading = 2.0;
    int quad_order = 6;
};

enum class InitialProfile { PolynomialBump, GroundStateRay };

struct InitialConfig {
    InitialProfile profile = InitialProfile::GroundStateRay;
    double A = 1.0;        // bump amplitude
    double q = 2.0;        // bump exponent
    double lambda = 0.0;   // ray amplitude; 0 with a target_regime means "solve for it"
    // "negative_energy", "subcritical", or "" (use A/lambda as given)
    std::string target_regime;
    // Requested J(u0) as a fraction of d when a target regime is set.
    double target_J_frac = std::numeric_limits<double>::quiet_NaN();
};

struct ExperimentConfig {
    ModelParams model;
    MeshConfig mesh;
    InitialConfig initial;
    TimeStepConfig stepping;
    ConstantsOptions estimators;
    VerifyTolerances tolerances;
    std::string output_dir = "out";
    bool write_csv = true;
    bool write_json = true;
    std::string sweep_parameter;       // "s", "p", or "lambda"
    std::vector<double> sweep_values;

    void validate() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load(const std::string& path);
};

struct SynthesisResult {
    StateVector u0;
    double lambda = 0.0;  // amplitude actually used
    double J0 = 0.0;
    double I0 = 0.0;
};

// Builds the configured initial profile; for a target regime, solves for the
// ray amplitude by bisection on the closed-form ray energies.
SynthesisResult synthesize_initial(const RadialMesh& mesh,
                                   const DiscreteOperators& ops,
                                   const InitialConfig& cfg);

// Trajectory CSV, schema v1: t,dt,H,J,I,G,norm_p,norm_grad,weighted_l2.
std::string trajectory_csv(const Trajectory& traj);
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

struct CsvTrajectory {
    Trajectory traj;  // diss_cum not present in the file; left at 0
};
CsvTrajectory read_trajectory_csv(const std::string& path);

// Subcommands. Each returns an ExitCode value.
int cmd_constants(const ExperimentConfig& cfg);
int cmd_simulate(const ExperimentConfig& cfg);
int cmd_sweep(const ExperimentConfig& cfg);
int cmd_verify(const std::string& trajectory_csv_path,
               const std::string& constants_json_path, double p, double dt0,
               const VerifyTolerances& tol, const std::string& output_dir);

// Output directory after applying the BLOWLAB_OUTPUT_DIR override.
std::string resolve_output_dir(const ExperimentConfig& cfg);

}  // namespace blowlab
