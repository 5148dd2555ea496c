#pragma once

#include <vector>

#include "pvt/dataset.hpp"
#include "pvt/linalg.hpp"
#include "pvt/optimize.hpp"

namespace pvt {

/// Regularization γ and kernel width σ². Defaults are the tuned values
/// reported for the reference PV/T data set.
struct LssvmHyper {
    double gamma = 6942.0845;
    double sigma2 = 8.01234;

    /// Throws ValidationError unless both are finite and strictly positive.
    void validate() const;
    friend bool operator==(const LssvmHyper&, const LssvmHyper&) = default;
};

/// exp(-||x_k - x||² / σ²).
double rbf_kernel(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& xk, double sigma2);

/// Gram matrix K_ij = rbf_kernel(x_i, x_j, σ²) over the rows of `x`.
Matrix kernel_matrix(const Matrix& x, double sigma2);

struct LssvmModel {
    Vector support_values;  // a_k, one per training row
    double bias = 0.0;
    LssvmHyper hyper;
    Matrix train_inputs;    // N×k, normalized

    /// f(x) = Σ a_k k(x, x_k) + b. Throws ValidationError on dimension mismatch.
    double predict(const Eigen::Ref<const Vector>& x) const;
    Vector predict_all(const Matrix& x) const;
    /// Training errors e_k = a_k / γ.
    Vector residuals() const { return support_values / hyper.gamma; }

    friend bool operator==(const LssvmModel&, const LssvmModel&) = default;
};

/// Solves [[0, 1ᵀ], [1, K + I/γ]]·[b; a] = [0; y].
/// Throws SingularMatrixError when the system cannot be solved.
LssvmModel lssvm_train(const Samples& train, const LssvmHyper& hyper);

struct LssvmTuneBounds {
    double gamma_low = 1e-2;
    double gamma_high = 1e7;
    double sigma2_low = 1e-3;
    double sigma2_high = 1e3;
    void validate() const;
};

struct LssvmTuneOptions {
    OptimizerKind optimizer = OptimizerKind::Ga;
    GaConfig ga;    // bounds are set from `bounds`
    PsoConfig pso;  // bounds are set from `bounds`
    LssvmTuneBounds bounds;
};

struct LssvmTuneResult {
    LssvmHyper hyper;
    LssvmModel model;  // retrained on `train` with `hyper`
    std::vector<double> history;
    std::size_t discarded = 0;
};

/// Minimizes validation MSE over (log γ, log σ²). Candidates whose training
/// system is singular are discarded.
LssvmTuneResult lssvm_tune(const Samples& train, const Samples& validation,
                           const LssvmTuneOptions& opts);

/// Minimizes the pooled k-fold cross-validation MSE on `train`. Fold
/// membership follows a permutation drawn with `fold_seed`; the history holds
/// the CV MSE.
LssvmTuneResult lssvm_tune_cv(const Samples& train, std::size_t folds, std::uint64_t fold_seed,
                              const LssvmTuneOptions& opts);

/// Fold index of every sample: position in the seeded permutation modulo k.
std::vector<std::size_t> fold_assignment(std::size_t n, std::size_t folds, std::uint64_t seed);

} // namespace pvt
