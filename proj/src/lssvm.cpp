#include "pvt/lssvm.hpp"

#include <cmath>
#include <limits>

#include "pvt/error.hpp"

namespace pvt {

void LssvmHyper::validate() const {
    if (!(std::isfinite(gamma) && gamma > 0.0)) throw ValidationError("LSSVM gamma must be finite and > 0");
    if (!(std::isfinite(sigma2) && sigma2 > 0.0)) throw ValidationError("LSSVM sigma2 must be finite and > 0");
}

void LssvmTuneBounds::validate() const {
    if (!(gamma_low > 0.0 && gamma_high > gamma_low && sigma2_low > 0.0 && sigma2_high > sigma2_low))
        throw ValidationError("LSSVM tuning bounds must be positive with low < high");
}

double rbf_kernel(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& xk, double sigma2) {
    if (x.size() != xk.size()) throw ValidationError("rbf_kernel: dimension mismatch");
    if (!(sigma2 > 0.0)) throw ValidationError("rbf_kernel: sigma2 must be positive");
    if (!x.allFinite() || !xk.allFinite() || !std::isfinite(sigma2))
        throw ValidationError("rbf_kernel: non-finite input");
    return std::exp(-(xk - x).squaredNorm() / sigma2);
}

Matrix kernel_matrix(const Matrix& x, double sigma2) {
    const Eigen::Index n = x.rows();
    Matrix k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = std::exp(-(x.row(i) - x.row(j)).squaredNorm() / sigma2);
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

double LssvmModel::predict(const Eigen::Ref<const Vector>& x) const {
    if (x.size() != train_inputs.cols()) throw ValidationError("LSSVM predict: dimension mismatch");
    double f = bias;
    for (Eigen::Index k = 0; k < train_inputs.rows(); ++k)
        f += support_values[k] * std::exp(-(train_inputs.row(k).transpose() - x).squaredNorm() / hyper.sigma2);
    return f;
}

Vector LssvmModel::predict_all(const Matrix& x) const {
    Vector out(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) out[i] = predict(Vector(x.row(i).transpose()));
    return out;
}

LssvmModel lssvm_train(const Samples& train, const LssvmHyper& hyper) {
    hyper.validate();
    const Eigen::Index n = train.x.rows();
    if (n < 1) throw ValidationError("LSSVM training needs at least one sample");
    if (train.y.size() != n) throw ValidationError("LSSVM training needs one target per sample");

    Matrix kkt(n + 1, n + 1);
    kkt(0, 0) = 0.0;
    kkt.block(0, 1, 1, n).setOnes();
    kkt.block(1, 0, n, 1).setOnes();
    kkt.block(1, 1, n, n) = kernel_matrix(train.x, hyper.sigma2);
    kkt.block(1, 1, n, n).diagonal().array() += 1.0 / hyper.gamma;

    Vector rhs(n + 1);
    rhs[0] = 0.0;
    rhs.tail(n) = train.y;

    Vector sol;
    try {
        sol = solve_linear(kkt, rhs);
    } catch (const SingularMatrixError& e) {
        throw SingularMatrixError(std::string("LSSVM training failed: ") + e.what(), e.rcond());
    }

    LssvmModel m;
    m.bias = sol[0];
    m.support_values = sol.tail(n);
    m.hyper = hyper;
    m.train_inputs = train.x;
    return m;
}

namespace {

LssvmTuneResult tune_with(const Objective& cost, const Samples& train, const LssvmTuneOptions& opts) {
    const Box box(Vector{{std::log(opts.bounds.gamma_low), std::log(opts.bounds.sigma2_low)}},
                  Vector{{std::log(opts.bounds.gamma_high), std::log(opts.bounds.sigma2_high)}});
    const Objective guarded = [&](const Vector& p) {
        try {
            return cost(p);
        } catch (const NumericalError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    OptimResult best;
    if (opts.optimizer == OptimizerKind::Ga) {
        GaConfig cfg = opts.ga;
        cfg.bounds = box;
        best = ga_minimize(guarded, cfg);
    } else {
        PsoConfig cfg = opts.pso;
        cfg.bounds = box;
        best = pso_minimize(guarded, cfg);
    }

    LssvmTuneResult out;
    out.hyper = {std::exp(best.best_point[0]), std::exp(best.best_point[1])};
    out.model = lssvm_train(train, out.hyper);
    out.history = std::move(best.history);
    out.discarded = best.discarded;
    return out;
}

} // namespace

LssvmTuneResult lssvm_tune(const Samples& train, const Samples& validation,
                           const LssvmTuneOptions& opts) {
    opts.bounds.validate();
    if (validation.size() == 0 || validation.y.size() != validation.x.rows())
        throw ValidationError("LSSVM tuning needs a labelled, non-empty validation set");
    const Objective cost = [&](const Vector& p) {
        const LssvmModel m = lssvm_train(train, LssvmHyper{std::exp(p[0]), std::exp(p[1])});
        return (m.predict_all(validation.x) - validation.y).squaredNorm() / static_cast<double>(validation.size());
    };
    return tune_with(cost, train, opts);
}

std::vector<std::size_t> fold_assignment(std::size_t n, std::size_t folds, std::uint64_t seed) {
    if (folds < 2 || folds > n) throw ValidationError("k-fold needs 2 <= k <= number of samples");
    const auto perm = permutation(n, seed);
    std::vector<std::size_t> fold(n);
    for (std::size_t i = 0; i < n; ++i) fold[perm[i]] = i % folds;
    return fold;
}

LssvmTuneResult lssvm_tune_cv(const Samples& train, std::size_t folds, std::uint64_t fold_seed,
                              const LssvmTuneOptions& opts) {
    opts.bounds.validate();
    if (train.y.size() != train.x.rows()) throw ValidationError("LSSVM tuning needs labelled data");
    const auto fold = fold_assignment(train.size(), folds, fold_seed);
    std::vector<std::vector<std::size_t>> fit_idx(folds), held_idx(folds);
    for (std::size_t i = 0; i < fold.size(); ++i)
        for (std::size_t k = 0; k < folds; ++k) (fold[i] == k ? held_idx : fit_idx)[k].push_back(i);
    std::vector<Samples> fit, held;
    for (std::size_t k = 0; k < folds; ++k) {
        fit.push_back(train.subset(fit_idx[k]));
        held.push_back(train.subset(held_idx[k]));
    }
    const Objective cost = [&](const Vector& p) {
        const LssvmHyper h{std::exp(p[0]), std::exp(p[1])};
        double sse = 0.0;
        for (std::size_t k = 0; k < folds; ++k)
            sse += (lssvm_train(fit[k], h).predict_all(held[k].x) - held[k].y).squaredNorm();
        return sse / static_cast<double>(train.size());
    };
    return tune_with(cost, train, opts);
}

} // namespace pvt
