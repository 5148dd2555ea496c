#include "pvt/mlp.hpp"

#include <cmath>
#include <limits>

#include "pvt/error.hpp"
#include "pvt/random.hpp"

namespace pvt {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

std::string_view to_string(TrainStatus s) {
    switch (s) {
    case TrainStatus::Completed: return "completed";
    case TrainStatus::Converged: return "converged";
    case TrainStatus::MaxIterations: return "max_iterations";
    case TrainStatus::Stalled: return "stalled";
    case TrainStatus::Diverged: return "diverged";
    case TrainStatus::EarlyStopped: return "early_stopped";
    }
    return "unknown";
}

void MlpModel::validate() const {
    const auto h = hidden_weights.rows();
    if (h == 0 || hidden_weights.cols() == 0) throw ValidationError("MLP needs at least one input and hidden neuron");
    if (hidden_biases.size() != h || output_weights.size() != h)
        throw ValidationError("MLP layer sizes are inconsistent");
    if (!hidden_weights.allFinite() || !hidden_biases.allFinite() || !output_weights.allFinite() ||
        !std::isfinite(output_bias))
        throw ValidationError("MLP weights must be finite");
}

double mlp_forward(const MlpModel& m, const Eigen::Ref<const Vector>& x) {
    if (x.size() != m.hidden_weights.cols()) throw ValidationError("MLP: input dimension mismatch");
    const Vector a = m.hidden_weights * x + m.hidden_biases;
    double z = m.output_bias;
    for (Eigen::Index i = 0; i < a.size(); ++i) z += m.output_weights[i] * sigmoid(a[i]);
    return z;
}

double MlpModel::predict(const Eigen::Ref<const Vector>& x) const {
    return mlp_forward(*this, x);
}

Vector MlpModel::predict_all(const Matrix& x) const {
    Vector out(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) out[i] = mlp_forward(*this, Vector(x.row(i).transpose()));
    return out;
}

Vector MlpModel::flatten() const {
    const auto h = hidden_weights.rows();
    const auto k = hidden_weights.cols();
    Vector p(static_cast<Eigen::Index>(parameter_count()));
    Eigen::Index at = 0;
    for (Eigen::Index i = 0; i < h; ++i)
        for (Eigen::Index j = 0; j < k; ++j) p[at++] = hidden_weights(i, j);
    p.segment(at, h) = hidden_biases;
    at += h;
    p.segment(at, h) = output_weights;
    at += h;
    p[at] = output_bias;
    return p;
}

MlpModel MlpModel::unflatten(const Vector& params, std::size_t inputs, std::size_t hidden) {
    const auto h = static_cast<Eigen::Index>(hidden);
    const auto k = static_cast<Eigen::Index>(inputs);
    if (params.size() != h * (k + 2) + 1) throw ValidationError("MLP parameter vector has the wrong length");
    MlpModel m;
    m.hidden_weights.resize(h, k);
    Eigen::Index at = 0;
    for (Eigen::Index i = 0; i < h; ++i)
        for (Eigen::Index j = 0; j < k; ++j) m.hidden_weights(i, j) = params[at++];
    m.hidden_biases = params.segment(at, h);
    at += h;
    m.output_weights = params.segment(at, h);
    at += h;
    m.output_bias = params[at];
    return m;
}

MlpModel MlpModel::zeros(std::size_t inputs, std::size_t hidden) {
    return unflatten(Vector::Zero(static_cast<Eigen::Index>(hidden * (inputs + 2) + 1)), inputs, hidden);
}

MlpModel MlpModel::random(std::size_t inputs, std::size_t hidden, std::uint64_t seed) {
    if (inputs == 0 || hidden == 0) throw ValidationError("MLP needs at least one input and hidden neuron");
    RandomStream rng(seed, 0x4D4C50ULL);
    Vector p(static_cast<Eigen::Index>(hidden * (inputs + 2) + 1));
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = rng.uniform(-0.5, 0.5);
    return unflatten(p, inputs, hidden);
}

Matrix mlp_jacobian(const MlpModel& m, const Matrix& x) {
    const auto h = m.hidden_weights.rows();
    const auto k = m.hidden_weights.cols();
    if (x.cols() != k) throw ValidationError("MLP: input dimension mismatch");
    Matrix jac(x.rows(), static_cast<Eigen::Index>(m.parameter_count()));
    for (Eigen::Index p = 0; p < x.rows(); ++p) {
        const Vector xp = x.row(p).transpose();
        const Vector a = m.hidden_weights * xp + m.hidden_biases;
        Eigen::Index at = 0;
        for (Eigen::Index i = 0; i < h; ++i) {
            const double s = sigmoid(a[i]);
            const double ds = m.output_weights[i] * s * (1.0 - s);
            for (Eigen::Index j = 0; j < k; ++j) jac(p, i * k + j) = ds * xp[j];
            jac(p, h * k + i) = ds;
            jac(p, h * k + h + i) = s;
        }
        at = h * (k + 2);
        jac(p, at) = 1.0;
    }
    return jac;
}

Vector mlp_gradient(const MlpModel& m, const Samples& batch) {
    if (batch.size() == 0) throw ValidationError("mlp_gradient: empty batch");
    if (batch.y.size() != batch.x.rows()) throw ValidationError("mlp_gradient: one target per sample required");
    const Vector residual = m.predict_all(batch.x) - batch.y;
    return 2.0 * mlp_jacobian(m, batch.x).transpose() * residual;
}

namespace {

double mse(const MlpModel& m, const Samples& s) {
    return (m.predict_all(s.x) - s.y).squaredNorm() / static_cast<double>(s.size());
}

void check_train_set(const Samples& train) {
    if (train.size() == 0) throw ValidationError("MLP training set is empty");
    if (train.y.size() != train.x.rows()) throw ValidationError("MLP training needs one target per sample");
}

} // namespace

MlpTrainResult mlp_train_bp(const Samples& train, const MlpModel& init, double learning_rate,
                            std::size_t epochs) {
    check_train_set(train);
    init.validate();
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
        throw ValidationError("learning rate must be a finite non-negative number");
    constexpr double kDivergence = 1e12;

    MlpTrainResult out;
    out.model = init;
    Vector params = init.flatten();
    const auto inputs = init.input_dim();
    const auto hidden = init.hidden_count();
    out.history.reserve(epochs);
    for (std::size_t e = 0; e < epochs; ++e) {
        if (learning_rate > 0.0) {
            params -= 0.5 * learning_rate * mlp_gradient(out.model, train);
            out.model = MlpModel::unflatten(params, inputs, hidden);
        }
        ++out.iterations;
        const double cost = mse(out.model, train);
        out.history.push_back(cost);
        if (!std::isfinite(cost) || cost * static_cast<double>(train.size()) > kDivergence) {
            out.status = TrainStatus::Diverged;
            return out;
        }
    }
    out.status = TrainStatus::Completed;
    return out;
}

MlpTrainResult mlp_train_bp(const Samples& train, double learning_rate, std::size_t epochs,
                            std::uint64_t seed, std::size_t hidden) {
    check_train_set(train);
    return mlp_train_bp(train, MlpModel::random(train.dim(), hidden, seed), learning_rate, epochs);
}

namespace {

MlpTrainResult train_lm(const Samples& train, const MlpModel& init, const LmConfig& cfg, bool freeze_hidden,
                        const EarlyStopping* stop) {
    check_train_set(train);
    init.validate();
    const auto inputs = init.input_dim();
    const auto hidden = init.hidden_count();
    const Vector full = init.flatten();
    const auto h = static_cast<Eigen::Index>(hidden);

    auto expand = [&](const Vector& p) {
        if (!freeze_hidden) return MlpModel::unflatten(p, inputs, hidden);
        Vector q = full;
        q.tail(h + 1) = p;
        return MlpModel::unflatten(q, inputs, hidden);
    };
    const ResidualFn residual = [&](const Vector& p) -> Vector {
        return expand(p).predict_all(train.x) - train.y;
    };
    const JacobianFn jacobian = [&](const Vector& p) -> Matrix {
        const Matrix j = mlp_jacobian(expand(p), train.x);
        return freeze_hidden ? Matrix(j.rightCols(h + 1)) : j;
    };
    const Vector start = freeze_hidden ? Vector(full.tail(h + 1)) : full;

    Vector best_params = start;
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t fails = 0;
    LmMonitor monitor;
    if (stop) {
        if (stop->validation.size() == 0 || stop->validation.y.size() != stop->validation.x.rows())
            throw ValidationError("early stopping needs a labelled, non-empty validation set");
        if (stop->validation.dim() != train.dim())
            throw ValidationError("validation inputs differ in dimension from the training inputs");
        auto val_mse = [&](const Vector& p) {
            return (expand(p).predict_all(stop->validation.x) - stop->validation.y).squaredNorm() /
                   static_cast<double>(stop->validation.size());
        };
        best_val = val_mse(start);
        monitor = [&](const Vector& p) {
            const double v = val_mse(p);
            if (v < best_val) {
                best_val = v;
                best_params = p;
                fails = 0;
                return false;
            }
            return ++fails >= stop->max_fail;
        };
    }

    const LmResult lm = lm_fit(residual, jacobian, start, cfg, monitor);

    MlpTrainResult out;
    out.model = expand(stop ? best_params : lm.params);
    out.iterations = lm.iterations;
    const double n = static_cast<double>(train.size());
    for (double c : lm.cost_history) out.history.push_back(c / n);
    switch (lm.status) {
    case LmStatus::Converged: out.status = TrainStatus::Converged; break;
    case LmStatus::MaxIterations: out.status = TrainStatus::MaxIterations; break;
    case LmStatus::Stalled: out.status = TrainStatus::Stalled; break;
    case LmStatus::Stopped: out.status = TrainStatus::EarlyStopped; break;
    }
    if (stop) out.validation_mse = best_val;
    return out;
}

} // namespace

MlpTrainResult mlp_train_lm(const Samples& train, const MlpModel& init, const LmConfig& cfg,
                            bool freeze_hidden) {
    return train_lm(train, init, cfg, freeze_hidden, nullptr);
}

MlpTrainResult mlp_train_lm(const Samples& train, const MlpModel& init, const LmConfig& cfg,
                            const EarlyStopping& stop) {
    return train_lm(train, init, cfg, false, &stop);
}

MlpTrainResult mlp_train_lm(const Samples& train, const LmConfig& cfg, std::uint64_t seed,
                            std::size_t hidden) {
    check_train_set(train);
    return mlp_train_lm(train, MlpModel::random(train.dim(), hidden, seed), cfg, false);
}

} // namespace pvt
