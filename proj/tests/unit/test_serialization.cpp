#include <doctest.h>

#include <cmath>
#include <fstream>

#include "pvt/error.hpp"
#include "pvt/pipeline.hpp"
#include "pvt/serialization.hpp"
#include "support.hpp"

using namespace pvt;

namespace {

/// Through text and back, as a file would.
Json reparse(const Json& j) { return Json::parse(j.dump(2)); }

AnfisModel some_anfis(testing::Gen& g) {
    AnfisModel m;
    m.input_dim = 3;
    for (int r = 0; r < 4; ++r) {
        AnfisRule rule;
        for (int j = 0; j < 3; ++j) rule.memberships.push_back({g.real(), g.real(0.1, 2)});
        rule.slopes = g.vector(3);
        rule.intercept = g.real() / 3.0;
        m.rules.push_back(rule);
    }
    return m;
}

} // namespace

TEST_SUITE("round trips") {
    TEST_CASE("scaler") {
        const Scaler s = Scaler::fit(generate_synthetic(30, 1, 0.1));
        CHECK(scaler_from_json(reparse(to_json(s))) == s);
        const Scaler inputs_only = Scaler::fit(Dataset(std::vector<RawRecord>{[] {
            RawRecord r = testing::record(20, 1, 100, 500, 700, 0);
            r.electrical_efficiency.reset();
            return r;
        }(), [] {
            RawRecord r = testing::record(25, 2, 150, 600, 840, 0);
            r.electrical_efficiency.reset();
            return r;
        }()}));
        const Scaler back = scaler_from_json(reparse(to_json(inputs_only)));
        CHECK(back == inputs_only);
        CHECK_FALSE(back.has(Column::ElectricalEfficiency));
    }

    TEST_CASE("every model type is restored bit for bit") {
        testing::for_all(10, 161, [](testing::Gen& g, std::size_t i) {
            const Samples s = g.samples(12, 3);
            const LssvmModel l = lssvm_train(s, LssvmHyper{g.real(1, 1e4) / 7.0, g.real(0.1, 5) / 3.0});
            CHECK(lssvm_from_json(reparse(to_json(l))) == l);

            const AnfisModel a = some_anfis(g);
            CHECK(anfis_from_json(reparse(to_json(a))) == a);

            const MlpModel m = MlpModel::random(3, 5, i);
            CHECK(mlp_from_json(reparse(to_json(m))) == m);

            const RbfModel r = rbf_train_interpolation(s, 0.3 + g.real(0, 1) / 7.0);
            CHECK(rbf_from_json(reparse(to_json(r))) == r);
        });
    }

    TEST_CASE("bundle predictions survive a save and load") {
        const Dataset d = generate_synthetic(40, 5, 0.1);
        RunConfig cfg;
        cfg.model = ModelKind::RbfCenters;
        cfg.rbf.centers = 10;
        cfg.rbf.refine_iterations = 5;
        const TrainingOutcome t = run_training(cfg, d);
        const auto dir = testing::temp_dir("bundle");
        save_json(dir + "/model.json", to_json(t.bundle));
        const ModelBundle back = load_bundle(dir + "/model.json");
        CHECK(back.kind == ModelKind::RbfCenters);
        CHECK(back.scaler == t.bundle.scaler);
        CHECK(back.predict(d) == t.bundle.predict(d));
    }

    TEST_CASE("a bare MLP weight object loads") {
        const MlpModel m = MlpModel::random(5, 7, 3);
        const ModelBundle b = bundle_from_json(reparse(to_json(m)));
        CHECK(std::get<MlpModel>(b.model) == m);
        const Dataset d = generate_synthetic(5, 2, 0.1);
        CHECK(b.predict(d) == m.predict_all(d.inputs()));
    }
}

TEST_SUITE("schema errors") {
    TEST_CASE("missing and mistyped fields") {
        Json l = to_json(lssvm_train(Samples{Matrix::Ones(2, 2), Vector::Ones(2)}, LssvmHyper{}));
        l.erase("bias");
        CHECK_THROWS_AS(lssvm_from_json(l), SchemaError);
        Json m = to_json(MlpModel::random(2, 2, 1));
        m["output_bias"] = "x";
        CHECK_THROWS_AS(mlp_from_json(m), SchemaError);
        CHECK_THROWS_AS(rbf_from_json(Json::array()), SchemaError);
        CHECK_THROWS_AS(anfis_from_json(Json{{"rules", Json::array()}}), SchemaError);
    }

    TEST_CASE("bundle type") {
        Json b = to_json(ModelBundle{ModelKind::MlpLm, MlpModel::random(5, 2, 1), Scaler::fit(generate_synthetic(10, 1, 0.1))});
        b["type"] = "forest";
        CHECK_THROWS_AS(bundle_from_json(b), SchemaError);
        b.erase("type");
        b.erase("hidden_weights");
        CHECK_THROWS_AS(bundle_from_json(b), SchemaError);
        CHECK_THROWS_AS(bundle_from_json(Json(3)), SchemaError);
    }

    TEST_CASE("files") {
        const auto dir = testing::temp_dir("schema");
        CHECK_THROWS_AS(load_json(dir + "/absent.json"), IoError);
        std::ofstream(dir + "/bad.json") << "{not json";
        CHECK_THROWS_AS(load_json(dir + "/bad.json"), SchemaError);
        CHECK_THROWS_AS(save_json(dir + "/no/such/dir/x.json", Json::object()), IoError);
    }
}

TEST_SUITE("run config") {
    TEST_CASE("defaults") {
        const RunConfig c = run_config_from_json(Json::object());
        CHECK(c.model == ModelKind::Lssvm);
        CHECK(c.seed == 1);
        CHECK(c.split == 0.75);
        CHECK(c.lssvm.optimizer == OptimizerKind::Ga);
        CHECK(c.anfis.optimizer == OptimizerKind::Pso);
        CHECK(c.anfis.clusters == 7);
        CHECK(c.mlp.hidden == 7);
        CHECK(c.lm.max_iterations == 1500);
        CHECK(c.ga.population == 100);
        CHECK(c.ga.iterations == 1000);
        CHECK(c.pso.population == 50);
        CHECK(c.pso.iterations == 1000);
        CHECK(c.rbf.centers == 50);
        CHECK(c.lssvm.validation == TuneValidation::KFold);
        CHECK(c.lssvm.folds == 5);
    }

    TEST_CASE("holdout tuning can be selected") {
        const RunConfig c = run_config_from_json(Json{{"lssvm", {{"validation", "holdout"}, {"validation_fraction", 0.3}}}});
        CHECK(c.lssvm.validation == TuneValidation::Holdout);
        CHECK(c.lssvm.validation_fraction == 0.3);
        CHECK(to_json(c).at("lssvm").at("validation") == "holdout");
        CHECK_THROWS_AS(run_config_from_json(Json{{"lssvm", {{"validation", "loo"}}}}), ValidationError);
        CHECK_THROWS_AS(run_config_from_json(Json{{"lssvm", {{"folds", 1}}}}), ValidationError);
    }

    TEST_CASE("values are read and echoed") {
        const Json j = {{"model", "anfis"}, {"seed", 9}, {"anfis", {{"clusters", 3}}}, {"pso", {{"iterations", 20}}}};
        const RunConfig c = run_config_from_json(j);
        CHECK(c.model == ModelKind::Anfis);
        CHECK(c.seed == 9);
        CHECK(c.anfis.clusters == 3);
        CHECK(c.pso.iterations == 20);
        const Json echo = to_json(c);
        CHECK(echo.at("model") == "anfis");
        CHECK(run_config_from_json(echo).anfis.clusters == 3);
        CHECK(to_json(run_config_from_json(echo)) == echo);
    }

    TEST_CASE("rejections") {
        CHECK_THROWS_AS(run_config_from_json(Json{{"model", "svm"}}), ValidationError);
        CHECK_THROWS_AS(run_config_from_json(Json{{"modle", "lssvm"}}), ValidationError);
        CHECK_THROWS_AS(run_config_from_json(Json{{"ga", {{"popsize", 3}}}}), ValidationError);
        CHECK_THROWS_AS(run_config_from_json(Json{{"seed", "one"}}), ValidationError);
        CHECK_THROWS_AS(run_config_from_json(Json{{"split", 1.5}}), ValidationError);
    }
}
