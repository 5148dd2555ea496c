#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pvt/error.hpp"
#include "pvt/mlp.hpp"
#include "pvt/rbf.hpp"
#include "support.hpp"

using namespace pvt;

namespace {

double sse(const MlpModel& m, const Samples& s) { return (m.predict_all(s.x) - s.y).squaredNorm(); }

Vector numeric_gradient(const MlpModel& m, const Samples& s) {
    const Vector p = m.flatten();
    Vector g(p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const double h = 1e-6 * std::max(1.0, std::abs(p[i]));
        Vector a = p, b = p;
        a[i] += h;
        b[i] -= h;
        g[i] = (sse(MlpModel::unflatten(a, m.input_dim(), m.hidden_count()), s) -
                sse(MlpModel::unflatten(b, m.input_dim(), m.hidden_count()), s)) / (2 * h);
    }
    return g;
}

Samples line_samples(std::size_t n, const std::function<double(double)>& f) {
    Samples s{Matrix(static_cast<Eigen::Index>(n), 1), Vector(static_cast<Eigen::Index>(n))};
    for (std::size_t i = 0; i < n; ++i) {
        const double x = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
        s.x(static_cast<Eigen::Index>(i), 0) = x;
        s.y[static_cast<Eigen::Index>(i)] = f(x);
    }
    return s;
}

double mse(const Vector& a, const Vector& b) { return (a - b).squaredNorm() / static_cast<double>(a.size()); }

} // namespace

TEST_SUITE("sigmoid") {
    TEST_CASE("examples") {
        CHECK(sigmoid(0.0) == 0.5);
        CHECK(sigmoid(std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-15));
        CHECK(sigmoid(800.0) == 1.0);
        CHECK(sigmoid(-800.0) >= 0.0);
        testing::for_all(200, 61, [](testing::Gen& g, std::size_t) {
            const double z = g.real(-30, 30);
            CHECK(sigmoid(z) + sigmoid(-z) == doctest::Approx(1.0).epsilon(1e-15));
        });
    }
}

TEST_SUITE("mlp forward") {
    TEST_CASE("zero weights give the output bias") {
        MlpModel m = MlpModel::zeros(5, 7);
        m.output_bias = 0.3;
        CHECK(mlp_forward(m, Vector::Ones(5)) == 0.3);
        CHECK(m.parameter_count() == 50);
        CHECK(m.flatten().size() == 50);
    }

    TEST_CASE("one hidden unit by hand") {
        MlpModel m = MlpModel::zeros(2, 1);
        m.hidden_weights << 1.0, -1.0;
        m.hidden_biases << std::log(3.0);
        m.output_weights << 2.0;
        m.output_bias = -1.0;
        // Hidden input is ln 3 at x = (0.4, 0.4), giving 2·0.75 - 1.
        Vector x(2);
        x << 0.4, 0.4;
        CHECK(mlp_forward(m, x) == doctest::Approx(0.5).epsilon(1e-15));
    }

    TEST_CASE("flatten round trip") {
        testing::for_all(20, 62, [](testing::Gen& g, std::size_t i) {
            const MlpModel m = MlpModel::random(g.size(1, 6), g.size(1, 9), i);
            CHECK(MlpModel::unflatten(m.flatten(), m.input_dim(), m.hidden_count()) == m);
        });
    }

    TEST_CASE("output bounded by the output layer") {
        testing::for_all(200, 63, [](testing::Gen& g, std::size_t i) {
            MlpModel m = MlpModel::random(5, 7, i);
            m.output_weights *= g.real(0.1, 50);
            const double bound = std::abs(m.output_bias) + m.output_weights.cwiseAbs().sum();
            CHECK(std::abs(m.predict(g.vector(5, -100, 100))) <= bound + 1e-12);
        });
    }

    TEST_CASE("random weights are in range and seed dependent") {
        const MlpModel a = MlpModel::random(5, 7, 1);
        CHECK(a.flatten().cwiseAbs().maxCoeff() < 0.5);
        CHECK(a == MlpModel::random(5, 7, 1));
        CHECK_FALSE(a == MlpModel::random(5, 7, 2));
    }

    TEST_CASE("invalid input") {
        const MlpModel m = MlpModel::random(3, 2, 0);
        CHECK_THROWS_AS(m.predict(Vector::Zero(4)), ValidationError);
        MlpModel bad = m;
        bad.output_bias = NAN;
        CHECK_THROWS_AS(bad.validate(), ValidationError);
    }
}

TEST_SUITE("mlp gradient") {
    TEST_CASE("agrees with central differences") {
        testing::for_all(50, 64, [](testing::Gen& g, std::size_t i) {
            const std::size_t dim = g.size(1, 5), hidden = g.size(1, 8);
            MlpModel m = MlpModel::random(dim, hidden, i);
            m.output_weights *= 3.0;
            const Samples s = g.samples(g.size(1, 20), dim);
            const Vector a = mlp_gradient(m, s), n = numeric_gradient(m, s);
            CHECK((a - n).norm() <= 1e-5 * std::max(1.0, n.norm()));
        });
    }

    TEST_CASE("vanishes at a perfect fit") {
        testing::Gen g(65);
        const MlpModel m = MlpModel::random(3, 4, 5);
        Samples s{g.matrix(10, 3), Vector()};
        s.y = m.predict_all(s.x);
        CHECK(mlp_gradient(m, s).cwiseAbs().maxCoeff() < 1e-14);
    }

    TEST_CASE("additive over batches") {
        testing::Gen g(66);
        const MlpModel m = MlpModel::random(4, 5, 6);
        const Samples s = g.samples(30, 4);
        const Samples a{s.x.topRows(12), s.y.head(12)}, b{s.x.bottomRows(18), s.y.tail(18)};
        CHECK((mlp_gradient(m, s) - mlp_gradient(m, a) - mlp_gradient(m, b)).cwiseAbs().maxCoeff() < 1e-12);
    }

    TEST_CASE("jacobian rows match single-sample gradients") {
        testing::Gen g(67);
        const MlpModel m = MlpModel::random(3, 4, 7);
        const Matrix x = g.matrix(6, 3);
        const Matrix j = mlp_jacobian(m, x);
        for (Eigen::Index i = 0; i < 6; ++i) {
            // For one sample with target t, ∂(t - Z)²/∂θ = -2(t - Z)·∂Z/∂θ.
            const double z = m.predict(x.row(i).transpose());
            Samples one{x.row(i), Vector::Constant(1, z + 1.0)};
            CHECK((mlp_gradient(m, one) + 2.0 * j.row(i).transpose()).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_SUITE("backpropagation") {
    TEST_CASE("zero learning rate leaves the weights alone") {
        testing::Gen g(71);
        const Samples s = g.samples(15, 2);
        const MlpModel init = MlpModel::random(2, 3, 4);
        const auto r = mlp_train_bp(s, init, 0.0, 25);
        CHECK(r.model == init);
        CHECK(r.history.size() == 25);
    }

    TEST_CASE("learns the identity on 20 points") {
        const Samples s = line_samples(20, [](double x) { return x; });
        const auto r = mlp_train_bp(s, 0.05, 5000, 3, 7);
        CHECK(mse(r.model.predict_all(s.x), s.y) < 1e-3);
        CHECK(r.history.back() < r.history.front());
    }

    TEST_CASE("deterministic for a seed") {
        testing::Gen g(72);
        const Samples s = g.samples(25, 5);
        const auto a = mlp_train_bp(s, 0.01, 200, 11);
        const auto b = mlp_train_bp(s, 0.01, 200, 11);
        CHECK(a.model == b.model);
        CHECK(a.history == b.history);
    }

    TEST_CASE("a huge step diverges") {
        testing::Gen g(73);
        const Samples s = g.samples(25, 5);
        CHECK(mlp_train_bp(s, 1e6, 200, 1).status == TrainStatus::Diverged);
    }
}

TEST_SUITE("levenberg-marquardt") {
    TEST_CASE("frozen hidden layer reaches the least-squares output weights") {
        testing::for_all(10, 81, [](testing::Gen& g, std::size_t i) {
            const Samples s = g.samples(40, 3);
            const MlpModel init = MlpModel::random(3, 5, i);
            LmConfig cfg;
            cfg.max_iterations = 200;
            const auto r = mlp_train_lm(s, init, cfg, true);
            CHECK(r.model.hidden_weights == init.hidden_weights);
            CHECK(r.model.hidden_biases == init.hidden_biases);
            testing::Rows design;
            for (Eigen::Index p = 0; p < 40; ++p) {
                std::vector<double> row;
                for (Eigen::Index h = 0; h < 5; ++h)
                    row.push_back(sigmoid(init.hidden_weights.row(h).dot(s.x.row(p)) + init.hidden_biases[h]));
                row.push_back(1.0);
                design.push_back(row);
            }
            const auto w = testing::ref_least_squares(design, testing::vec_of(s.y));
            for (Eigen::Index h = 0; h < 5; ++h)
                CHECK(r.model.output_weights[h] == doctest::Approx(w[static_cast<std::size_t>(h)]).epsilon(1e-6).scale(1.0));
            CHECK(r.model.output_bias == doctest::Approx(w[5]).epsilon(1e-6).scale(1.0));
        });
    }

    TEST_CASE("a perfect start is returned unchanged") {
        testing::Gen g(82);
        const MlpModel m = MlpModel::random(3, 4, 9);
        Samples s{g.matrix(20, 3), Vector()};
        s.y = m.predict_all(s.x);
        const auto r = mlp_train_lm(s, m, LmConfig{});
        CHECK(r.model == m);
    }

    TEST_CASE("fits a sine on 30 points") {
        const Samples s = line_samples(30, [](double x) { return std::sin(std::numbers::pi * x); });
        LmConfig cfg;
        cfg.max_iterations = 500;
        const auto r = mlp_train_lm(s, cfg, 5, 7);
        CHECK(mse(r.model.predict_all(s.x), s.y) < 1e-3);
        for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1]);
    }

    TEST_CASE("early stopping returns the best validation parameters") {
        testing::Gen g(83);
        Samples all = g.samples(60, 2);
        for (Eigen::Index i = 0; i < 60; ++i) all.y[i] = all.x(i, 0) * all.x(i, 1) + 0.3 * g.normal();
        const Samples train{all.x.topRows(20), all.y.head(20)};
        const EarlyStopping stop{Samples{all.x.bottomRows(40), all.y.tail(40)}, 6};
        LmConfig cfg;
        cfg.max_iterations = 400;
        const MlpModel init = MlpModel::random(2, 12, 3);
        const auto r = mlp_train_lm(train, init, cfg, stop);
        REQUIRE(r.validation_mse.has_value());
        CHECK(*r.validation_mse == doctest::Approx(mse(r.model.predict_all(stop.validation.x), stop.validation.y)).epsilon(1e-12));
        CHECK(*r.validation_mse <= mse(init.predict_all(stop.validation.x), stop.validation.y));
        const auto plain = mlp_train_lm(train, init, cfg);
        CHECK_FALSE(plain.validation_mse.has_value());
        CHECK(mse(plain.model.predict_all(train.x), train.y) <= mse(r.model.predict_all(train.x), train.y) + 1e-12);
    }
}

TEST_SUITE("rbf") {
    TEST_CASE("activation examples") {
        CHECK(rbf_activation(0.0, 0.3) == 1.0);
        CHECK(rbf_activation(2.0, 2.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
        CHECK(rbf_activation(1.0, 1.0 / std::sqrt(2.0)) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
        CHECK_THROWS_AS(rbf_activation(1.0, 0.0), ValidationError);
    }

    TEST_CASE("two centers by hand") {
        RbfModel m;
        m.centers = Matrix(2, 1);
        m.centers << 0.0, 1.0;
        m.sigma = 1.0;
        m.weights = Vector(2);
        m.weights << 2.0, -1.0;
        CHECK(rbf_predict(m, Vector::Constant(1, 0.0)) == doctest::Approx(2.0 - std::exp(-0.5)).epsilon(1e-15));
        CHECK(m.predict(Vector::Constant(1, 0.5)) == doctest::Approx(std::exp(-0.125)).epsilon(1e-15));
    }

    TEST_CASE("interpolation reproduces the training targets") {
        testing::for_all(20, 91, [](testing::Gen& g, std::size_t) {
            const std::size_t n = g.size(1, 30);
            Samples s = g.samples(n, 3);
            for (std::size_t i = 0; i < n; ++i) s.x(static_cast<Eigen::Index>(i), 0) = static_cast<double>(i) / static_cast<double>(n);
            const double sigma = 0.5 * mean_nearest_neighbor_distance(s.x);
            const RbfModel m = rbf_train_interpolation(s, sigma);
            CHECK((m.predict_all(s.x) - s.y).cwiseAbs().maxCoeff() < 1e-8);
        });
    }

    TEST_CASE("single point interpolation") {
        const Samples s{Matrix::Constant(1, 2, 0.5), Vector::Constant(1, 3.0)};
        const RbfModel m = rbf_train_interpolation(s, 1.0);
        CHECK(m.weights[0] == 3.0);
        CHECK(mean_nearest_neighbor_distance(s.x) == 1.0);
    }

    TEST_CASE("duplicate inputs are singular") {
        Samples s{Matrix::Zero(3, 2), Vector::Zero(3)};
        s.x(2, 0) = 1.0;
        CHECK_THROWS_AS(rbf_train_interpolation(s, 1.0), SingularMatrixError);
    }

    TEST_CASE("as many centers as points reproduces interpolation") {
        testing::Gen g(92);
        const Samples s = g.samples(15, 2);
        RbfCentersOptions o;
        o.centers = 15;
        o.sigma = 0.4;
        const auto c = rbf_train_centers(s, o);
        const RbfModel i = rbf_train_interpolation(s, 0.4);
        CHECK((c.model.predict_all(s.x) - i.predict_all(s.x)).cwiseAbs().maxCoeff() < 1e-6);
    }

    TEST_CASE("a single center gets the least-squares weight") {
        testing::Gen g(93);
        const Samples s = g.samples(25, 3);
        RbfCentersOptions o;
        o.centers = 1;
        o.sigma = 0.7;
        const auto r = rbf_train_centers(s, o);
        const Vector phi = rbf_design(s.x, r.model.centers, 0.7).col(0);
        CHECK(r.model.weights[0] == doctest::Approx(phi.dot(s.y) / phi.squaredNorm()).epsilon(1e-10));
        // No other weight does better on the training data.
        const double best = (phi * r.model.weights[0] - s.y).squaredNorm();
        for (double w = -3.0; w <= 3.0; w += 0.01) CHECK(best <= (phi * w - s.y).squaredNorm() + 1e-12);
    }

    TEST_CASE("width refinement does not raise the training error") {
        testing::Gen g(94);
        Samples s = g.samples(60, 2);
        for (Eigen::Index i = 0; i < 60; ++i) s.y[i] = std::sin(2 * s.x(i, 0)) * s.x(i, 1);
        RbfCentersOptions o;
        o.centers = 8;
        o.seed = 5;
        const auto plain = rbf_train_centers(s, o);
        o.refine_sigma = true;
        const auto refined = rbf_train_centers(s, o);
        CHECK(refined.sigma_refined);
        CHECK(mse(refined.model.predict_all(s.x), s.y) <= mse(plain.model.predict_all(s.x), s.y) + 1e-12);
        CHECK(refined.model == rbf_train_centers(s, o).model);
    }

    TEST_CASE("center count is validated") {
        testing::Gen g(95);
        RbfCentersOptions o;
        o.centers = 0;
        CHECK_THROWS_AS(rbf_train_centers(g.samples(5, 2), o), ValidationError);
    }
}
