#pragma once

#include <optional>
#include <string>

#include "sue/conjugate.hpp"

namespace sue::cli {

// Exit-code vocabulary, fixed so harnesses can assert failure modes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitUnsupported = 4;
inline constexpr int kExitLowAcceptance = 5;
inline constexpr int kExitCheckFailed = 6;

/// One parameter block of a model spec (prior or noise), already standardized
/// to correlation form.
struct ParamBlock {
    VectorXd xi;
    SymMatrix Omega;
    MatrixXd Delta;
    VectorXd tau;
    SymMatrix Gamma_bar;
};

/// Parsed model specification. Either `joint` is present (full generality), or
/// the joint is assembled from prior/noise blocks with an optional beta-noise
/// cross covariance. Shorthand noise blocks ({"kind": ...}) are expanded once
/// the data dimension n is known.
struct ModelSpec {
    ObservationModel model = ObservationModel::Linear;
    DensityGenerator generator = DensityGenerator::gaussian();
    std::string generator_family;  // "gaussian" | "student_t"
    double nu = 0.0;

    std::optional<ParamBlock> prior;
    std::optional<ParamBlock> noise;  // absent if a shorthand was given
    std::optional<MatrixXd> cross_cov;
    std::optional<ParamBlock> joint;

    // Shorthand noise: {"kind":"skew_normal","sigma2":..,"alpha":..} or
    // {"kind":"student","sigma2":..[,"delta":..]}
    std::string noise_kind;
    double sigma2 = 0.0;
    double alpha = 0.0;
    double delta = 0.0;
};

struct DataTable {
    MatrixXd X;  // n x p
    VectorXd y;  // n
};

ModelSpec load_model_spec(const std::string& path);
DataTable load_data(const std::string& path, int p_expected);
MatrixXd load_points(const std::string& path, int p_expected);

/// Instantiates the regression joint for a given design matrix (expands
/// shorthands; n is taken from X).
RegressionJoint build_regression(const ModelSpec& spec, const MatrixXd& X);

/// The expanded spec (all blocks explicit, Gammas standardized) as a JSON
/// document; load -> serialize -> load is a fixed point.
std::string spec_to_json(const ModelSpec& spec, const RegressionJoint& rj);

int cmd_posterior(const std::string& spec_path, const std::string& data_path,
                  const std::string& out_path, std::uint64_t seed);
int cmd_sample(const std::string& spec_path, const std::string& data_path, long long n,
               std::uint64_t seed, const std::string& out_path);
int cmd_density(const std::string& spec_path, const std::string& data_path,
                const std::string& points_path, const std::string& out_path, std::uint64_t seed,
                double tol);
int cmd_check(const std::string& spec_path, const std::string& data_path, std::uint64_t seed);

}  // namespace sue::cli
