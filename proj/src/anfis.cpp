#include "pvt/anfis.hpp"

#include <cmath>
#include <limits>

#include "pvt/error.hpp"
#include "pvt/random.hpp"

namespace pvt {

double GaussianMf::operator()(double x) const {
    const double d = x - center;
    return std::exp(-d * d / (2.0 * sigma * sigma));
}

void AnfisModel::validate() const {
    if (rules.empty()) throw ValidationError("ANFIS model needs at least one rule");
    if (input_dim == 0) throw ValidationError("ANFIS model needs a positive input dimension");
    for (const auto& r : rules) {
        if (r.memberships.size() != input_dim || static_cast<std::size_t>(r.slopes.size()) != input_dim)
            throw ValidationError("ANFIS rule size does not match input_dim");
        for (const auto& mf : r.memberships)
            if (!(mf.sigma > 0.0)) throw ValidationError("ANFIS membership width must be positive");
    }
}

Vector firing_strengths(const AnfisModel& m, const Eigen::Ref<const Vector>& x) {
    if (static_cast<std::size_t>(x.size()) != m.input_dim)
        throw ValidationError("ANFIS: input dimension mismatch");
    Vector w(static_cast<Eigen::Index>(m.rules.size()));
    for (std::size_t i = 0; i < m.rules.size(); ++i) {
        double prod = 1.0;
        for (std::size_t j = 0; j < m.input_dim; ++j)
            prod *= m.rules[i].memberships[j](x[static_cast<Eigen::Index>(j)]);
        w[static_cast<Eigen::Index>(i)] = prod;
    }
    return w;
}

Vector normalize_strengths(const Vector& w) {
    if (w.size() == 0) throw ValidationError("normalize_strengths: empty strength vector");
    if (!w.allFinite() || (w.array() < 0.0).any())
        throw ValidationError("normalize_strengths: strengths must be finite and non-negative");
    const double total = w.sum();
    if (!(total > 0.0))
        throw NumericalError("normalize_strengths: all firing strengths are zero (input far from every rule)");
    return w / total;
}

double anfis_forward(const AnfisModel& m, const Eigen::Ref<const Vector>& x) {
    const Vector wbar = normalize_strengths(firing_strengths(m, x));
    double f = 0.0;
    for (std::size_t i = 0; i < m.rules.size(); ++i)
        f += wbar[static_cast<Eigen::Index>(i)] * (m.rules[i].slopes.dot(x) + m.rules[i].intercept);
    return f;
}

double AnfisModel::predict(const Eigen::Ref<const Vector>& x) const {
    return anfis_forward(*this, x);
}

Vector AnfisModel::predict_all(const Matrix& x) const {
    Vector out(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) out[i] = anfis_forward(*this, Vector(x.row(i).transpose()));
    return out;
}

std::size_t count_parameters(std::size_t n_clusters, std::size_t n_variables, std::size_t n_mf_params) {
    if (n_clusters < 1 || n_variables < 1 || n_mf_params < 1)
        throw ValidationError("count_parameters: all counts must be >= 1");
    return n_clusters * n_variables * n_mf_params;
}

AnfisModel anfis_initial_model(const Matrix& x, std::size_t clusters, std::uint64_t seed, double sigma_min) {
    if (clusters < 1) throw ValidationError("ANFIS needs at least one cluster");
    if (static_cast<std::size_t>(x.rows()) < clusters)
        throw ValidationError("ANFIS needs at least as many training samples as clusters");
    const auto dim = static_cast<std::size_t>(x.cols());

    RandomStream rng(seed, 0xA4F15ULL);
    const auto first = static_cast<std::size_t>(rng.index(static_cast<std::uint64_t>(x.rows())));
    const auto idx = farthest_point_indices(x, clusters, first);

    // Width per input: half the mean pairwise center distance along that input;
    // a single cluster uses half the data range.
    Vector widths(static_cast<Eigen::Index>(dim));
    for (std::size_t j = 0; j < dim; ++j) {
        const auto col = static_cast<Eigen::Index>(j);
        double w = 0.0;
        if (clusters > 1) {
            double total = 0.0;
            std::size_t pairs = 0;
            for (std::size_t a = 0; a < clusters; ++a)
                for (std::size_t b = a + 1; b < clusters; ++b, ++pairs)
                    total += std::abs(x(static_cast<Eigen::Index>(idx[a]), col) -
                                      x(static_cast<Eigen::Index>(idx[b]), col));
            w = 0.5 * total / static_cast<double>(pairs);
        } else {
            w = 0.5 * (x.col(col).maxCoeff() - x.col(col).minCoeff());
        }
        widths[col] = std::max(w, sigma_min);
    }

    AnfisModel m;
    m.input_dim = dim;
    for (std::size_t i = 0; i < clusters; ++i) {
        AnfisRule r;
        for (std::size_t j = 0; j < dim; ++j)
            r.memberships.push_back({x(static_cast<Eigen::Index>(idx[i]), static_cast<Eigen::Index>(j)),
                                     widths[static_cast<Eigen::Index>(j)]});
        r.slopes = Vector::Zero(static_cast<Eigen::Index>(dim));
        m.rules.push_back(std::move(r));
    }
    return m;
}

bool anfis_fit_consequents(AnfisModel& m, const Samples& train, double ridge) {
    const auto n = train.x.rows();
    const auto dim = static_cast<Eigen::Index>(m.input_dim);
    const auto rules = static_cast<Eigen::Index>(m.rules.size());
    Matrix a(n, rules * (dim + 1));
    for (Eigen::Index p = 0; p < n; ++p) {
        const Vector xp = train.x.row(p).transpose();
        const Vector wbar = normalize_strengths(firing_strengths(m, xp));
        for (Eigen::Index i = 0; i < rules; ++i) {
            a.block(p, i * (dim + 1), 1, dim) = wbar[i] * xp.transpose();
            a(p, i * (dim + 1) + dim) = wbar[i];
        }
    }
    const auto fit = least_squares_or_ridge(a, train.y, ridge);
    for (Eigen::Index i = 0; i < rules; ++i) {
        auto& r = m.rules[static_cast<std::size_t>(i)];
        r.slopes = fit.x.segment(i * (dim + 1), dim);
        r.intercept = fit.x[i * (dim + 1) + dim];
    }
    return fit.ridge_used;
}

namespace {

// Parameter layout: all centers (rule-major), then all widths.
Vector pack_premises(const AnfisModel& m) {
    const auto per = static_cast<Eigen::Index>(m.rules.size() * m.input_dim);
    Vector p(2 * per);
    Eigen::Index k = 0;
    for (const auto& r : m.rules)
        for (const auto& mf : r.memberships) {
            p[k] = mf.center;
            p[per + k] = mf.sigma;
            ++k;
        }
    return p;
}

void unpack_premises(AnfisModel& m, const Vector& p) {
    const auto per = static_cast<Eigen::Index>(m.rules.size() * m.input_dim);
    Eigen::Index k = 0;
    for (auto& r : m.rules)
        for (auto& mf : r.memberships) {
            mf.center = p[k];
            mf.sigma = p[per + k];
            ++k;
        }
}

} // namespace

namespace {

AnfisTrainResult train_impl(const Samples& train, const AnfisTrainOptions& opts, const Samples* checking) {
    if (train.size() == 0) throw ValidationError("ANFIS training set is empty");
    if (train.y.size() != train.x.rows()) throw ValidationError("ANFIS training needs one target per sample");
    if (!(opts.sigma_min > 0.0 && opts.sigma_max > opts.sigma_min))
        throw ValidationError("ANFIS width bounds need 0 < sigma_min < sigma_max");

    const std::uint64_t seed = opts.optimizer == OptimizerKind::Pso ? opts.pso.seed : opts.ga.seed;
    AnfisModel base = anfis_initial_model(train.x, opts.clusters, seed, opts.sigma_min);

    const auto dim = train.x.cols();
    const auto rules = static_cast<Eigen::Index>(opts.clusters);
    const Eigen::Index per = rules * dim;
    Vector lo(2 * per), hi(2 * per);
    for (Eigen::Index i = 0; i < rules; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) {
            lo[i * dim + j] = train.x.col(j).minCoeff() - opts.center_margin;
            hi[i * dim + j] = train.x.col(j).maxCoeff() + opts.center_margin;
            if (!(hi[i * dim + j] > lo[i * dim + j])) hi[i * dim + j] = lo[i * dim + j] + 1.0;
            lo[per + i * dim + j] = opts.sigma_min;
            hi[per + i * dim + j] = opts.sigma_max;
        }
    const Box box(lo, hi);
    const Vector start = box.clamp(pack_premises(base));

    if (checking) {
        if (checking->size() == 0 || checking->y.size() != checking->x.rows())
            throw ValidationError("ANFIS checking data must be labelled and non-empty");
        if (checking->dim() != train.dim())
            throw ValidationError("ANFIS checking inputs differ in dimension from the training inputs");
    }

    std::size_t fallbacks = 0;
    const double n = static_cast<double>(train.size());
    // With checking data, every new best training cost is scored on the
    // checking set and the premises with the lowest checking RMSE are kept.
    double running_min = std::numeric_limits<double>::infinity();
    double best_check = std::numeric_limits<double>::infinity();
    Vector best_check_point = start;
    const Objective cost = [&](const Vector& p) {
        AnfisModel m = base;
        unpack_premises(m, p);
        try {
            if (anfis_fit_consequents(m, train, opts.ridge)) ++fallbacks;
            const double c = std::sqrt((m.predict_all(train.x) - train.y).squaredNorm() / n);
            if (checking && std::isfinite(c) && c < running_min) {
                running_min = c;
                const double e = std::sqrt((m.predict_all(checking->x) - checking->y).squaredNorm() /
                                           static_cast<double>(checking->size()));
                if (e < best_check) {
                    best_check = e;
                    best_check_point = p;
                }
            }
            return c;
        } catch (const NumericalError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    OptimResult best;
    if (opts.optimizer == OptimizerKind::Pso) {
        PsoConfig cfg = opts.pso;
        cfg.bounds = box;
        cfg.initial_positions = {start};
        best = pso_minimize(cost, cfg);
    } else {
        GaConfig cfg = opts.ga;
        cfg.bounds = box;
        best = ga_minimize(cost, cfg);
    }

    AnfisTrainResult out;
    out.initial_model = base;
    out.model = base;
    unpack_premises(out.model, checking ? best_check_point : best.best_point);
    if (checking) out.checking_rmse = best_check;
    out.final_fit_ridge = anfis_fit_consequents(out.model, train, opts.ridge);
    out.train_rmse = std::sqrt((out.model.predict_all(train.x) - train.y).squaredNorm() / n);
    out.history = std::move(best.history);
    out.ridge_fallbacks = fallbacks;
    return out;
}

} // namespace

AnfisTrainResult anfis_train(const Samples& train, const AnfisTrainOptions& opts) {
    return train_impl(train, opts, nullptr);
}

AnfisTrainResult anfis_train(const Samples& train, const Samples& checking, const AnfisTrainOptions& opts) {
    return train_impl(train, opts, &checking);
}

} // namespace pvt
