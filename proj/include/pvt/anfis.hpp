#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "pvt/dataset.hpp"
#include "pvt/linalg.hpp"
#include "pvt/optimize.hpp"

namespace pvt {

struct GaussianMf {
    double center = 0.0;
    double sigma = 1.0;

    /// exp(-(x - c)² / (2σ²)), in (0, 1] barring underflow.
    double operator()(double x) const;
    friend bool operator==(const GaussianMf&, const GaussianMf&) = default;
};

/// First-order Takagi-Sugeno rule: IF x_1 is A_1 AND ... THEN f = m·x + r.
struct AnfisRule {
    std::vector<GaussianMf> memberships;
    Vector slopes;
    double intercept = 0.0;
    friend bool operator==(const AnfisRule&, const AnfisRule&) = default;
};

struct AnfisModel {
    std::vector<AnfisRule> rules;
    std::size_t input_dim = 0;

    /// Throws ValidationError on an empty rule base or inconsistent rule sizes.
    void validate() const;
    double predict(const Eigen::Ref<const Vector>& x) const;
    Vector predict_all(const Matrix& x) const;
    friend bool operator==(const AnfisModel&, const AnfisModel&) = default;
};

/// Rule firing strengths w_i = Π_j μ_ij(x_j).
Vector firing_strengths(const AnfisModel& m, const Eigen::Ref<const Vector>& x);

/// w_i / Σ w. Throws NumericalError when every strength is zero and
/// ValidationError on negative or non-finite strengths.
Vector normalize_strengths(const Vector& w);

/// Σ_i w̄_i (m_i·x + r_i).
double anfis_forward(const AnfisModel& m, const Eigen::Ref<const Vector>& x);

/// Tunable parameter count N_T = N_c · N_v · N_MF.
std::size_t count_parameters(std::size_t n_clusters, std::size_t n_variables,
                             std::size_t n_mf_params);

struct AnfisTrainOptions {
    std::size_t clusters = 7;
    OptimizerKind optimizer = OptimizerKind::Pso;
    PsoConfig pso;  // bounds are derived from the data
    GaConfig ga;    // bounds are derived from the data
    double sigma_min = 1e-3;
    double sigma_max = 4.0;
    double center_margin = 0.0;  // centers searched in [min - margin, max + margin] per input
    double ridge = 1e-8;
};

struct AnfisTrainResult {
    AnfisModel model;
    AnfisModel initial_model;
    /// Best training RMSE per optimizer iteration.
    std::vector<double> history;
    double train_rmse = 0.0;
    /// Consequent fits that fell back to ridge regression (all evaluations).
    std::size_t ridge_fallbacks = 0;
    bool final_fit_ridge = false;
    /// Checking RMSE of the returned premises, when checking data was given.
    std::optional<double> checking_rmse;
};

/// Hybrid training: the optimizer moves membership centers and widths to
/// minimize training RMSE; for every candidate the consequent coefficients are
/// refitted by linear least squares on the w̄-weighted regressors.
AnfisTrainResult anfis_train(const Samples& train, const AnfisTrainOptions& opts);

/// As above, but among the optimizer's successive best candidates the one
/// with the lowest RMSE on `checking` is returned. Consequents stay fitted on
/// `train`.
AnfisTrainResult anfis_train(const Samples& train, const Samples& checking, const AnfisTrainOptions& opts);

/// Farthest-point seeded initial rule base (consequents zero). The first
/// center is drawn with `seed`.
AnfisModel anfis_initial_model(const Matrix& x, std::size_t clusters, std::uint64_t seed,
                               double sigma_min = 1e-3);

/// Refits every rule's consequent on `train` for fixed memberships.
/// Returns true when the ridge fallback was needed.
bool anfis_fit_consequents(AnfisModel& m, const Samples& train, double ridge = 1e-8);

} // namespace pvt
