#include "pvt/rbf.hpp"

#include <cmath>
#include <limits>

#include "pvt/error.hpp"
#include "pvt/random.hpp"

namespace pvt {

double rbf_activation(double r, double sigma) {
    if (!(r >= 0.0)) throw ValidationError("rbf_activation: distance must be non-negative");
    if (!(sigma > 0.0)) throw ValidationError("rbf_activation: sigma must be positive");
    return std::exp(-r * r / (2.0 * sigma * sigma));
}

void RbfModel::validate() const {
    if (centers.rows() < 1 || centers.cols() < 1) throw ValidationError("RBF model needs at least one center");
    if (weights.size() != centers.rows()) throw ValidationError("RBF model needs one weight per center");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ValidationError("RBF sigma must be positive");
}

double rbf_predict(const RbfModel& m, const Eigen::Ref<const Vector>& x) {
    if (x.size() != m.centers.cols()) throw ValidationError("RBF: input dimension mismatch");
    const double denom = 2.0 * m.sigma * m.sigma;
    double f = 0.0;
    for (Eigen::Index p = 0; p < m.centers.rows(); ++p)
        f += m.weights[p] * std::exp(-(m.centers.row(p).transpose() - x).squaredNorm() / denom);
    return f;
}

double RbfModel::predict(const Eigen::Ref<const Vector>& x) const {
    return rbf_predict(*this, x);
}

Vector RbfModel::predict_all(const Matrix& x) const {
    Vector out(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) out[i] = rbf_predict(*this, Vector(x.row(i).transpose()));
    return out;
}

Matrix rbf_design(const Matrix& x, const Matrix& centers, double sigma) {
    if (x.cols() != centers.cols()) throw ValidationError("RBF: input dimension mismatch");
    if (!(sigma > 0.0)) throw ValidationError("RBF: sigma must be positive");
    const double denom = 2.0 * sigma * sigma;
    Matrix phi(x.rows(), centers.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < centers.rows(); ++j)
            phi(i, j) = std::exp(-(x.row(i) - centers.row(j)).squaredNorm() / denom);
    return phi;
}

double mean_nearest_neighbor_distance(const Matrix& x) {
    if (x.rows() < 2) return 1.0;
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < x.rows(); ++j)
            if (j != i) best = std::min(best, (x.row(i) - x.row(j)).norm());
        total += best;
    }
    const double mean = total / static_cast<double>(x.rows());
    return mean > 0.0 ? mean : 1.0;
}

RbfModel rbf_train_interpolation(const Samples& train, double sigma) {
    if (train.size() == 0) throw ValidationError("RBF training set is empty");
    if (train.y.size() != train.x.rows()) throw ValidationError("RBF training needs one target per sample");
    if (!(sigma > 0.0)) throw ValidationError("RBF sigma must be positive");

    RbfModel m;
    m.centers = train.x;
    m.sigma = sigma;
    try {
        m.weights = solve_linear(rbf_design(train.x, train.x, sigma), train.y);
    } catch (const SingularMatrixError& e) {
        throw SingularMatrixError(std::string("RBF interpolation matrix is singular (") + e.what() +
                                      "); remove duplicate inputs or use a smaller sigma",
                                  e.rcond());
    }
    return m;
}

RbfTrainResult rbf_train_centers(const Samples& train, const RbfCentersOptions& opts) {
    if (train.size() == 0) throw ValidationError("RBF training set is empty");
    if (train.y.size() != train.x.rows()) throw ValidationError("RBF training needs one target per sample");
    if (opts.centers < 1 || opts.centers > train.size())
        throw ValidationError("RBF center count must lie in [1, number of training samples]");
    if (opts.sigma && !(*opts.sigma > 0.0)) throw ValidationError("RBF sigma must be positive");

    RandomStream rng(opts.seed, 0x524246ULL);
    const auto first = static_cast<std::size_t>(rng.index(train.size()));
    const auto idx = farthest_point_indices(train.x, opts.centers, first);

    RbfTrainResult out;
    RbfModel& m = out.model;
    m.centers.resize(static_cast<Eigen::Index>(idx.size()), train.x.cols());
    for (std::size_t i = 0; i < idx.size(); ++i)
        m.centers.row(static_cast<Eigen::Index>(i)) = train.x.row(static_cast<Eigen::Index>(idx[i]));

    if (opts.sigma) {
        m.sigma = *opts.sigma;
    } else if (m.centers.rows() > 1) {
        m.sigma = mean_nearest_neighbor_distance(m.centers);
    } else {
        // Single center: mean distance from the data to it.
        double total = 0.0;
        for (Eigen::Index i = 0; i < train.x.rows(); ++i) total += (train.x.row(i) - m.centers.row(0)).norm();
        m.sigma = total > 0.0 ? total / static_cast<double>(train.size()) : 1.0;
    }

    auto fit_weights = [&](double sigma) {
        return least_squares_or_ridge(rbf_design(train.x, m.centers, sigma), train.y, opts.ridge);
    };

    if (opts.refine_sigma) {
        const ResidualFn residual = [&](const Vector& p) -> Vector {
            const double sigma = std::exp(p[0]);
            const auto fit = fit_weights(sigma);
            return rbf_design(train.x, m.centers, sigma) * fit.x - train.y;
        };
        const JacobianFn jacobian = [&](const Vector& p) -> Matrix {
            constexpr double h = 1e-6;
            Vector up = p, down = p;
            up[0] += h;
            down[0] -= h;
            return (residual(up) - residual(down)) / (2.0 * h);
        };
        LmConfig cfg;
        cfg.max_iterations = opts.refine_iterations;
        const LmResult lm = lm_fit(residual, jacobian, Vector::Constant(1, std::log(m.sigma)), cfg);
        m.sigma = std::exp(lm.params[0]);
        out.sigma_refined = true;
        out.refine_status = lm.status;
    }

    const auto fit = fit_weights(m.sigma);
    m.weights = fit.x;
    out.ridge_used = fit.ridge_used;
    return out;
}

} // namespace pvt
