#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "pvt/dataset.hpp"
#include "pvt/linalg.hpp"
#include "pvt/optimize.hpp"

namespace pvt {

double sigmoid(double z);

/// One hidden sigmoid layer and a linear output:
/// Z = Σ_i w3_i · sigmoid(W_i·x + b1_i) + b3.
struct MlpModel {
    Matrix hidden_weights;   // hidden × inputs
    Vector hidden_biases;    // hidden
    Vector output_weights;   // hidden
    double output_bias = 0.0;

    std::size_t input_dim() const { return static_cast<std::size_t>(hidden_weights.cols()); }
    std::size_t hidden_count() const { return static_cast<std::size_t>(hidden_weights.rows()); }
    std::size_t parameter_count() const { return hidden_count() * (input_dim() + 2) + 1; }

    /// Throws ValidationError on inconsistent shapes or non-finite weights.
    void validate() const;
    double predict(const Eigen::Ref<const Vector>& x) const;
    Vector predict_all(const Matrix& x) const;

    /// Flat parameter vector: hidden weights (row-major), hidden biases,
    /// output weights, output bias.
    Vector flatten() const;
    static MlpModel unflatten(const Vector& params, std::size_t inputs, std::size_t hidden);
    static MlpModel zeros(std::size_t inputs, std::size_t hidden);
    /// Weights drawn uniformly from (-0.5, 0.5).
    static MlpModel random(std::size_t inputs, std::size_t hidden, std::uint64_t seed);

    friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

double mlp_forward(const MlpModel& m, const Eigen::Ref<const Vector>& x);

/// Gradient of the sum of squared errors Σ_p (t_p - Z_p)² in flatten() order.
Vector mlp_gradient(const MlpModel& m, const Samples& batch);

/// ∂Z_p/∂θ for every sample (rows) in flatten() order.
Matrix mlp_jacobian(const MlpModel& m, const Matrix& x);

enum class TrainStatus { Completed, Converged, MaxIterations, Stalled, Diverged, EarlyStopped };
std::string_view to_string(TrainStatus s);

struct MlpTrainResult {
    MlpModel model;
    /// Training MSE per epoch (backpropagation) or per accepted step (LM).
    std::vector<double> history;
    TrainStatus status = TrainStatus::Completed;
    std::size_t iterations = 0;
    /// Lowest validation MSE seen, when early stopping was used.
    std::optional<double> validation_mse;
};

/// Full-batch gradient descent θ ← θ - λ·∂E/∂θ on E = ½Σ(t - Z)², from a seeded
/// random start.
/// Stops with TrainStatus::Diverged when the cost exceeds 1e12.
MlpTrainResult mlp_train_bp(const Samples& train, double learning_rate, std::size_t epochs,
                            std::uint64_t seed, std::size_t hidden = 7);
MlpTrainResult mlp_train_bp(const Samples& train, const MlpModel& init, double learning_rate,
                            std::size_t epochs);

/// Levenberg-Marquardt on the per-sample residuals with the analytic Jacobian.
MlpTrainResult mlp_train_lm(const Samples& train, const LmConfig& cfg, std::uint64_t seed,
                            std::size_t hidden = 7);
/// As above from a given start. With `freeze_hidden` only the output layer is
/// fitted, which makes the problem linear.
MlpTrainResult mlp_train_lm(const Samples& train, const MlpModel& init, const LmConfig& cfg,
                            bool freeze_hidden = false);

struct EarlyStopping {
    Samples validation;
    /// Consecutive accepted steps without a new validation minimum.
    std::size_t max_fail = 6;
};

/// LM that tracks validation MSE after each accepted step and returns the
/// parameters with the lowest one, stopping after `max_fail` steps without
/// improvement.
MlpTrainResult mlp_train_lm(const Samples& train, const MlpModel& init, const LmConfig& cfg,
                            const EarlyStopping& stop);

} // namespace pvt
