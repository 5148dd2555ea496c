#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "pvt/dataset.hpp"
#include "pvt/linalg.hpp"
#include "pvt/optimize.hpp"

namespace pvt {

/// Gaussian basis exp(-r² / (2σ²)).
double rbf_activation(double r, double sigma);

/// f(x) = Σ_p w_p φ(||x - c_p||) with one global width σ.
struct RbfModel {
    Matrix centers;  // m × k
    double sigma = 1.0;
    Vector weights;  // m

    void validate() const;
    double predict(const Eigen::Ref<const Vector>& x) const;
    Vector predict_all(const Matrix& x) const;
    friend bool operator==(const RbfModel&, const RbfModel&) = default;
};

double rbf_predict(const RbfModel& m, const Eigen::Ref<const Vector>& x);

/// Φ_ij = φ(||a_i - c_j||) for rows a_i of `x`.
Matrix rbf_design(const Matrix& x, const Matrix& centers, double sigma);

/// Mean distance from each row to its nearest other row. A single row falls
/// back to 1.
double mean_nearest_neighbor_distance(const Matrix& x);

/// One center per training point; solves Φw = t exactly. Throws
/// SingularMatrixError for duplicate inputs or an ill-conditioned Φ.
RbfModel rbf_train_interpolation(const Samples& train, double sigma);

struct RbfCentersOptions {
    std::size_t centers = 50;
    /// Defaults to the mean nearest-neighbour distance between centers.
    std::optional<double> sigma;
    std::uint64_t seed = 0;
    /// Optional LM pass on log σ, refitting the weights for each trial width.
    bool refine_sigma = false;
    std::size_t refine_iterations = 50;
    double ridge = 1e-8;
};

struct RbfTrainResult {
    RbfModel model;
    bool ridge_used = false;
    bool sigma_refined = false;
    LmStatus refine_status = LmStatus::Converged;
};

/// Centers chosen by farthest-point traversal from a seeded start, weights by
/// least squares on the N×m activation matrix (ridge fallback when rank
/// deficient).
RbfTrainResult rbf_train_centers(const Samples& train, const RbfCentersOptions& opts);

} // namespace pvt
