#include <doctest.h>

#include <cmath>

#include "pvt/anfis.hpp"
#include "pvt/error.hpp"
#include "support.hpp"

using namespace pvt;

namespace {

AnfisModel random_model(testing::Gen& g, std::size_t rules, std::size_t dim) {
    AnfisModel m;
    m.input_dim = dim;
    for (std::size_t r = 0; r < rules; ++r) {
        AnfisRule rule;
        for (std::size_t j = 0; j < dim; ++j) rule.memberships.push_back({g.real(), g.real(0.2, 2.0)});
        rule.slopes = g.vector(dim, -2, 2);
        rule.intercept = g.real(-2, 2);
        m.rules.push_back(rule);
    }
    return m;
}

/// Forward pass written out directly from the rule definition.
double ref_forward(const AnfisModel& m, const std::vector<double>& x) {
    double num = 0.0, den = 0.0;
    for (const auto& rule : m.rules) {
        double w = 1.0, f = rule.intercept;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double d = x[j] - rule.memberships[j].center;
            w *= std::exp(-d * d / (2.0 * rule.memberships[j].sigma * rule.memberships[j].sigma));
            f += rule.slopes[static_cast<Eigen::Index>(j)] * x[j];
        }
        num += w * f;
        den += w;
    }
    return num / den;
}

AnfisTrainOptions small_options(std::size_t clusters, std::uint64_t seed) {
    AnfisTrainOptions o;
    o.clusters = clusters;
    o.pso.population = 10;
    o.pso.iterations = 15;
    o.pso.seed = seed;
    o.ga.population = 10;
    o.ga.iterations = 15;
    o.ga.seed = seed;
    return o;
}

} // namespace

TEST_SUITE("memberships") {
    TEST_CASE("gaussian values") {
        const GaussianMf mf{0.3, 0.7};
        CHECK(mf(0.3) == 1.0);
        CHECK(mf(1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
        CHECK(mf(-0.4) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
        testing::for_all(100, 41, [](testing::Gen& g, std::size_t) {
            const GaussianMf m{g.real(), g.real(0.01, 3)};
            const double d = g.real(0, 3);
            CHECK(m(m.center + d) == doctest::Approx(m(m.center - d)).epsilon(1e-14));
            CHECK(m(m.center + d) <= 1.0);
        });
    }

    TEST_CASE("firing strength is the product of memberships") {
        testing::Gen g(42);
        const AnfisModel m = random_model(g, 4, 3);
        const Vector x = g.vector(3);
        const Vector w = firing_strengths(m, x);
        REQUIRE(w.size() == 4);
        for (std::size_t r = 0; r < 4; ++r) {
            double p = 1.0;
            for (std::size_t j = 0; j < 3; ++j) p *= m.rules[r].memberships[j](x[static_cast<Eigen::Index>(j)]);
            CHECK(w[static_cast<Eigen::Index>(r)] == doctest::Approx(p).epsilon(1e-14));
        }
    }
}

TEST_SUITE("normalization") {
    TEST_CASE("examples") {
        Vector w(3);
        w << 1.0, 1.0, 2.0;
        const Vector n = normalize_strengths(w);
        CHECK(n[0] == 0.25);
        CHECK(n[1] == 0.25);
        CHECK(n[2] == 0.5);
        CHECK(normalize_strengths(Vector::Constant(1, 1e-300))[0] == 1.0);
    }

    TEST_CASE("errors") {
        CHECK_THROWS_AS(normalize_strengths(Vector::Zero(4)), NumericalError);
        Vector w(2);
        w << 1.0, -0.5;
        CHECK_THROWS_AS(normalize_strengths(w), ValidationError);
        w << 1.0, NAN;
        CHECK_THROWS_AS(normalize_strengths(w), ValidationError);
    }

    TEST_CASE("sums to one and ignores a common scale") {
        testing::for_all(200, 43, [](testing::Gen& g, std::size_t) {
            Vector v = g.vector(g.size(1, 20), 0.0, 1.0);
            v[0] += 1e-6;
            const Vector n = normalize_strengths(v);
            CHECK(n.sum() == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(n.minCoeff() >= 0.0);
            const double c = std::pow(10.0, g.real(-5, 5));
            CHECK((normalize_strengths(c * v) - n).cwiseAbs().maxCoeff() < 1e-14);
        });
    }
}

TEST_SUITE("forward") {
    TEST_CASE("one input, two rules by hand") {
        AnfisModel m;
        m.input_dim = 1;
        m.rules = {AnfisRule{{GaussianMf{0.0, 1.0}}, Vector::Constant(1, 2.0), 1.0},
                   AnfisRule{{GaussianMf{1.0, 1.0}}, Vector::Constant(1, -1.0), 0.0}};
        // Equal strengths at the midpoint: 0.5·(2·0.5 + 1) + 0.5·(-0.5).
        CHECK(anfis_forward(m, Vector::Constant(1, 0.5)) == doctest::Approx(0.75).epsilon(1e-15));
        // At x = 0 the strengths are 1 and e^-0.5.
        const double w2 = std::exp(-0.5);
        CHECK(anfis_forward(m, Vector::Zero(1)) == doctest::Approx(1.0 / (1.0 + w2)).epsilon(1e-15));
    }

    TEST_CASE("matches a direct evaluation") {
        testing::for_all(50, 44, [](testing::Gen& g, std::size_t) {
            const std::size_t dim = g.size(1, 5);
            const AnfisModel m = random_model(g, g.size(1, 8), dim);
            const Vector x = g.vector(dim);
            CHECK(anfis_forward(m, x) == doctest::Approx(ref_forward(m, testing::vec_of(x))).epsilon(1e-12));
            CHECK(m.predict(x) == anfis_forward(m, x));
        });
    }

    TEST_CASE("a single rule reproduces its affine consequent") {
        testing::Gen g(45);
        const AnfisModel m = random_model(g, 1, 5);
        for (int i = 0; i < 1000; ++i) {
            const Vector x = g.vector(5, -3, 3);
            const double f = m.rules[0].slopes.dot(x) + m.rules[0].intercept;
            CHECK(anfis_forward(m, x) == doctest::Approx(f).epsilon(1e-12));
        }
    }

    TEST_CASE("output lies within the range of the rule consequents") {
        testing::for_all(100, 46, [](testing::Gen& g, std::size_t) {
            const AnfisModel m = random_model(g, g.size(1, 6), 2);
            const Vector x = g.vector(2);
            double lo = INFINITY, hi = -INFINITY;
            for (const auto& r : m.rules) {
                const double f = r.slopes.dot(x) + r.intercept;
                lo = std::min(lo, f);
                hi = std::max(hi, f);
            }
            const double y = anfis_forward(m, x);
            CHECK(y >= lo - 1e-12);
            CHECK(y <= hi + 1e-12);
        });
    }

    TEST_CASE("invalid models are rejected") {
        AnfisModel m;
        m.input_dim = 2;
        CHECK_THROWS_AS(m.validate(), ValidationError);
        testing::Gen g(47);
        m = random_model(g, 2, 2);
        m.rules[1].slopes = Vector::Zero(3);
        CHECK_THROWS_AS(m.validate(), ValidationError);
        m = random_model(g, 2, 2);
        CHECK_THROWS_AS(m.predict(Vector::Zero(3)), ValidationError);
    }
}

TEST_SUITE("parameter count") {
    TEST_CASE("examples") {
        CHECK(count_parameters(7, 6, 2) == 84);
        CHECK(count_parameters(1, 1, 1) == 1);
        CHECK(count_parameters(7, 5, 2) == 70);
        CHECK_THROWS_AS(count_parameters(0, 6, 2), ValidationError);
    }
}

TEST_SUITE("training") {
    TEST_CASE("one cluster fits a linear target exactly") {
        testing::Gen g(51);
        Samples s{g.matrix(40, 5), Vector(40)};
        Vector coef(5);
        coef << 0.5, -1.0, 0.25, 2.0, -0.3;
        s.y = s.x * coef + Vector::Constant(40, 0.7);
        const AnfisTrainResult r = anfis_train(s, small_options(1, 3));
        CHECK(r.train_rmse < 1e-8);
        CHECK(r.model.rules.size() == 1);
    }

    TEST_CASE("history is non-increasing and reproducible") {
        testing::Gen g(52);
        Samples s = g.samples(60, 3);
        for (Eigen::Index i = 0; i < 60; ++i) s.y[i] = std::sin(3 * s.x(i, 0)) + s.x(i, 1) * s.x(i, 2);
        for (OptimizerKind kind : {OptimizerKind::Pso, OptimizerKind::Ga}) {
            auto o = small_options(3, 8);
            o.optimizer = kind;
            const auto a = anfis_train(s, o);
            const auto b = anfis_train(s, o);
            CHECK(a.model == b.model);
            CHECK(a.history == b.history);
            REQUIRE(a.history.size() == 15);
            for (std::size_t i = 1; i < a.history.size(); ++i) CHECK(a.history[i] <= a.history[i - 1]);
            CHECK(a.train_rmse == doctest::Approx(a.history.back()).epsilon(1e-9));
            const double rmse = std::sqrt((a.model.predict_all(s.x) - s.y).squaredNorm() / 60.0);
            CHECK(rmse == doctest::Approx(a.train_rmse).epsilon(1e-9));
            for (const auto& rule : a.model.rules)
                for (const auto& mf : rule.memberships) {
                    CHECK(mf.sigma >= o.sigma_min);
                    CHECK(mf.sigma <= o.sigma_max);
                }
        }
    }

    TEST_CASE("checking data selects premises and reports their error") {
        testing::Gen g(53);
        Samples s = g.samples(80, 2);
        for (Eigen::Index i = 0; i < 80; ++i) s.y[i] = s.x(i, 0) * s.x(i, 0) - s.x(i, 1) + 0.05 * g.normal();
        const Samples fit{s.x.topRows(60), s.y.head(60)}, check{s.x.bottomRows(20), s.y.tail(20)};
        const auto r = anfis_train(fit, check, small_options(3, 9));
        REQUIRE(r.checking_rmse.has_value());
        const double rmse = std::sqrt((r.model.predict_all(check.x) - check.y).squaredNorm() / 20.0);
        CHECK(*r.checking_rmse == doctest::Approx(rmse).epsilon(1e-9));
        CHECK_FALSE(anfis_train(fit, small_options(3, 9)).checking_rmse.has_value());
    }

    TEST_CASE("initial model seeds one rule per cluster") {
        testing::Gen g(54);
        const Matrix x = g.matrix(30, 4);
        const AnfisModel m = anfis_initial_model(x, 5, 2);
        CHECK(m.rules.size() == 5);
        CHECK(m.input_dim == 4);
        CHECK(m == anfis_initial_model(x, 5, 2));
        CHECK_THROWS_AS(anfis_initial_model(x, 0, 2), ValidationError);
    }
}
