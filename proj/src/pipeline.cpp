#include "pvt/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <set>

#include "pvt/error.hpp"
#include "pvt/random.hpp"

namespace pvt {

namespace {

// Child-seed purposes.
constexpr std::uint64_t kSeedOptimizer = 1;
constexpr std::uint64_t kSeedInit = 2;
constexpr std::uint64_t kSeedInnerSplit = 3;

constexpr std::array<std::pair<ModelKind, std::string_view>, 6> kModelNames = {{
    {ModelKind::Lssvm, "lssvm"},
    {ModelKind::Anfis, "anfis"},
    {ModelKind::MlpBp, "mlp-bp"},
    {ModelKind::MlpLm, "mlp-lm"},
    {ModelKind::RbfInterp, "rbf-interp"},
    {ModelKind::RbfCenters, "rbf-centers"},
}};

bool is_count(const Json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

/// Reads one JSON object, remembering which keys were consumed so leftovers
/// can be reported as typos.
class Section {
public:
    Section(const Json& j, std::string name) : j_(j), name_(std::move(name)) {
        if (!j_.is_object()) throw ValidationError("config: '" + name_ + "' must be an object");
    }

    const Json* take(const char* key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    void read(const char* key, double& out) {
        if (const Json* v = take(key)) {
            if (!v->is_number()) fail(key, "a number");
            out = v->get<double>();
        }
    }
    void read(const char* key, std::size_t& out) {
        if (const Json* v = take(key)) {
            if (!is_count(*v)) fail(key, "a non-negative integer");
            out = v->get<std::size_t>();
        }
    }
    void read_u64(const char* key, std::uint64_t& out) {
        if (const Json* v = take(key)) {
            if (!is_count(*v)) fail(key, "a non-negative integer");
            out = v->get<std::uint64_t>();
        }
    }
    void read(const char* key, bool& out) {
        if (const Json* v = take(key)) {
            if (!v->is_boolean()) fail(key, "true or false");
            out = v->get<bool>();
        }
    }
    void read(const char* key, std::string& out) {
        if (const Json* v = take(key)) {
            if (!v->is_string()) fail(key, "a string");
            out = v->get<std::string>();
        }
    }
    void read(const char* key, OptimizerKind& out) {
        std::string s;
        if (take(key)) {
            read(key, s);
            out = optimizer_kind_from_string(s);
        }
    }
    void read(const char* key, TuneValidation& out) {
        std::string s;
        if (take(key)) {
            read(key, s);
            out = tune_validation_from_string(s);
        }
    }
    void read(const char* key, std::optional<double>& out) {
        if (const Json* v = take(key)) {
            if (v->is_null()) {
                out.reset();
                return;
            }
            if (!v->is_number()) fail(key, "a number or null");
            out = v->get<double>();
        }
    }
    void read_pair(const char* key, double& lo, double& hi) {
        if (const Json* v = take(key)) {
            if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
                fail(key, "a [low, high] pair");
            lo = (*v)[0].get<double>();
            hi = (*v)[1].get<double>();
        }
    }

    void finish() const {
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key)) throw ValidationError("config: unknown key '" + key + "' in " + name_);
    }

private:
    [[noreturn]] void fail(const char* key, const char* expected) const {
        throw ValidationError("config: " + name_ + "." + key + " must be " + expected);
    }

    const Json& j_;
    std::string name_;
    std::set<std::string> seen_;
};

template <class F>
void with_section(Section& top, const char* key, F&& f) {
    if (const Json* v = top.take(key)) {
        Section s(*v, key);
        f(s);
        s.finish();
    }
}

Json metrics_for(const ModelBundle& b, const Dataset& d, std::string partition) {
    return to_json(metrics(d.targets(), b.predict(d), std::move(partition)));
}

struct Holdout {
    std::vector<std::size_t> fit;
    std::vector<std::size_t> held;
};

/// Seeded split of the training partition; the held-out share is rounded
/// like the outer split.
Holdout inner_split(std::size_t n, double held_fraction, std::uint64_t seed, const char* what) {
    const auto perm = permutation(n, seed);
    const auto n_fit =
        static_cast<std::size_t>(std::floor(static_cast<double>(n) * (1.0 - held_fraction) + 0.5));
    if (n_fit == 0 || n_fit >= n) throw ValidationError(std::string(what) + " split leaves an empty partition");
    return {{perm.begin(), perm.begin() + static_cast<long>(n_fit)}, {perm.begin() + static_cast<long>(n_fit), perm.end()}};
}

Samples samples_of(const ModelBundle& b, const Dataset& d) {
    if (!b.scaler.has(Column::InletTemp)) return {d.inputs(), d.has_target() ? d.targets() : Vector()};
    return b.scaler.transform(d);
}

} // namespace

// Names -----------------------------------------------------------------------

std::string_view to_string(ModelKind k) {
    for (const auto& [kind, name] : kModelNames)
        if (kind == k) return name;
    return "unknown";
}

ModelKind model_kind_from_string(std::string_view name) {
    for (const auto& [kind, n] : kModelNames)
        if (n == name) return kind;
    throw ValidationError("unknown model '" + std::string(name) +
                          "' (expected lssvm, anfis, mlp-bp, mlp-lm, rbf-interp or rbf-centers)");
}

std::string_view to_string(OptimizerKind k) { return k == OptimizerKind::Ga ? "ga" : "pso"; }

OptimizerKind optimizer_kind_from_string(std::string_view name) {
    if (name == "ga") return OptimizerKind::Ga;
    if (name == "pso") return OptimizerKind::Pso;
    throw ValidationError("unknown optimizer '" + std::string(name) + "' (expected ga or pso)");
}

std::string_view to_string(TuneValidation v) { return v == TuneValidation::KFold ? "kfold" : "holdout"; }

TuneValidation tune_validation_from_string(std::string_view name) {
    if (name == "kfold") return TuneValidation::KFold;
    if (name == "holdout") return TuneValidation::Holdout;
    throw ValidationError("unknown LSSVM validation '" + std::string(name) + "' (expected kfold or holdout)");
}

// Config ----------------------------------------------------------------------

void RunConfig::validate() const {
    if (!(split > 0.0 && split < 1.0)) throw ValidationError("config: split must lie in (0, 1)");
    if (!(lssvm.validation_fraction > 0.0 && lssvm.validation_fraction < 1.0))
        throw ValidationError("config: lssvm.validation_fraction must lie in (0, 1)");
    if (lssvm.folds < 2) throw ValidationError("config: lssvm.folds must be at least 2");
    lssvm.hyper.validate();
    lssvm.bounds.validate();
    if (anfis.clusters == 0) throw ValidationError("config: anfis.clusters must be at least 1");
    if (!(anfis.sigma_min > 0.0 && anfis.sigma_min < anfis.sigma_max))
        throw ValidationError("config: anfis needs 0 < sigma_min < sigma_max");
    for (double f : {anfis.checking_fraction, mlp.validation_fraction})
        if (!(f >= 0.0 && f < 1.0)) throw ValidationError("config: holdout fractions must lie in [0, 1)");
    if (mlp.max_fail == 0) throw ValidationError("config: mlp.max_fail must be at least 1");
    if (mlp.hidden == 0) throw ValidationError("config: mlp.hidden must be at least 1");
    if (!(mlp.learning_rate >= 0.0) || !std::isfinite(mlp.learning_rate))
        throw ValidationError("config: mlp.learning_rate must be non-negative");
    if (rbf.centers == 0) throw ValidationError("config: rbf.centers must be at least 1");
    if (rbf.sigma && !(*rbf.sigma > 0.0)) throw ValidationError("config: rbf.sigma must be positive");
    if (ga.population < 2 || pso.population < 2)
        throw ValidationError("config: optimizer populations must be at least 2");
    if (ga.iterations == 0 || pso.iterations == 0)
        throw ValidationError("config: optimizer iterations must be at least 1");
    lm.validate();
}

RunConfig run_config_from_json(const Json& j) {
    RunConfig c;
    Section top(j, "config");
    std::string model(to_string(c.model));
    top.read("model", model);
    c.model = model_kind_from_string(model);
    top.read_u64("seed", c.seed);
    top.read("split", c.split);
    top.read("data", c.data);
    top.read("out", c.out);
    top.read("record_time", c.record_time);
    with_section(top, "lssvm", [&](Section& s) {
        s.read("gamma", c.lssvm.hyper.gamma);
        s.read("sigma2", c.lssvm.hyper.sigma2);
        s.read("tune", c.lssvm.tune);
        s.read("optimizer", c.lssvm.optimizer);
        s.read("validation", c.lssvm.validation);
        s.read("folds", c.lssvm.folds);
        s.read("validation_fraction", c.lssvm.validation_fraction);
        s.read_pair("gamma_bounds", c.lssvm.bounds.gamma_low, c.lssvm.bounds.gamma_high);
        s.read_pair("sigma2_bounds", c.lssvm.bounds.sigma2_low, c.lssvm.bounds.sigma2_high);
    });
    with_section(top, "anfis", [&](Section& s) {
        s.read("clusters", c.anfis.clusters);
        s.read("optimizer", c.anfis.optimizer);
        s.read("sigma_min", c.anfis.sigma_min);
        s.read("sigma_max", c.anfis.sigma_max);
        s.read("checking_fraction", c.anfis.checking_fraction);
    });
    with_section(top, "mlp", [&](Section& s) {
        s.read("hidden", c.mlp.hidden);
        s.read("learning_rate", c.mlp.learning_rate);
        s.read("epochs", c.mlp.epochs);
        s.read("validation_fraction", c.mlp.validation_fraction);
        s.read("max_fail", c.mlp.max_fail);
    });
    with_section(top, "rbf", [&](Section& s) {
        s.read("centers", c.rbf.centers);
        s.read("sigma", c.rbf.sigma);
        s.read("refine_sigma", c.rbf.refine_sigma);
        s.read("refine_iterations", c.rbf.refine_iterations);
    });
    with_section(top, "ga", [&](Section& s) {
        s.read("population", c.ga.population);
        s.read("iterations", c.ga.iterations);
        s.read("crossover_rate", c.ga.crossover_rate);
        s.read("mutation_rate", c.ga.mutation_rate);
        s.read("mutation_sd", c.ga.mutation_sd);
        s.read("tournament_size", c.ga.tournament_size);
        s.read("blend_alpha", c.ga.blend_alpha);
        s.read("elites", c.ga.elites);
    });
    with_section(top, "pso", [&](Section& s) {
        s.read("population", c.pso.population);
        s.read("iterations", c.pso.iterations);
        s.read("c1", c.pso.c1);
        s.read("c2", c.pso.c2);
        s.read("inertia", c.pso.inertia);
    });
    with_section(top, "lm", [&](Section& s) {
        s.read("max_iterations", c.lm.max_iterations);
        s.read("lambda_init", c.lm.lambda_init);
        s.read("lambda_up", c.lm.lambda_up);
        s.read("lambda_down", c.lm.lambda_down);
        s.read("tolerance", c.lm.tolerance);
    });
    top.finish();
    c.validate();
    return c;
}

Json to_json(const RunConfig& c) {
    return {
        {"model", to_string(c.model)},
        {"seed", c.seed},
        {"split", c.split},
        {"data", c.data},
        {"out", c.out},
        {"record_time", c.record_time},
        {"lssvm",
         {{"gamma", c.lssvm.hyper.gamma},
          {"sigma2", c.lssvm.hyper.sigma2},
          {"tune", c.lssvm.tune},
          {"optimizer", to_string(c.lssvm.optimizer)},
          {"validation", to_string(c.lssvm.validation)},
          {"folds", c.lssvm.folds},
          {"validation_fraction", c.lssvm.validation_fraction},
          {"gamma_bounds", {c.lssvm.bounds.gamma_low, c.lssvm.bounds.gamma_high}},
          {"sigma2_bounds", {c.lssvm.bounds.sigma2_low, c.lssvm.bounds.sigma2_high}}}},
        {"anfis",
         {{"clusters", c.anfis.clusters},
          {"optimizer", to_string(c.anfis.optimizer)},
          {"sigma_min", c.anfis.sigma_min},
          {"sigma_max", c.anfis.sigma_max},
          {"checking_fraction", c.anfis.checking_fraction}}},
        {"mlp",
         {{"hidden", c.mlp.hidden},
          {"learning_rate", c.mlp.learning_rate},
          {"epochs", c.mlp.epochs},
          {"validation_fraction", c.mlp.validation_fraction},
          {"max_fail", c.mlp.max_fail}}},
        {"rbf",
         {{"centers", c.rbf.centers},
          {"sigma", c.rbf.sigma ? Json(*c.rbf.sigma) : Json(nullptr)},
          {"refine_sigma", c.rbf.refine_sigma},
          {"refine_iterations", c.rbf.refine_iterations}}},
        {"ga", to_json(c.ga)},
        {"pso", to_json(c.pso)},
        {"lm", to_json(c.lm)},
    };
}

// Bundles ---------------------------------------------------------------------

Vector ModelBundle::predict_normalized(const Matrix& x) const {
    return std::visit([&](const auto& m) { return m.predict_all(x); }, model);
}

Vector ModelBundle::predict(const Dataset& d) const {
    const Vector z = predict_normalized(samples_of(*this, d).x);
    return scaler.has(Column::ElectricalEfficiency) ? scaler.denormalize_targets(z) : z;
}

Json to_json(const ModelBundle& b) {
    Json j = {{"type", to_string(b.kind)}};
    const Json body = std::visit([](const auto& m) { return to_json(m); }, b.model);
    for (const auto& [key, value] : body.items()) j[key] = value;
    j["scaler"] = to_json(b.scaler);
    return j;
}

ModelBundle bundle_from_json(const Json& j) {
    if (!j.is_object()) throw SchemaError("model file must hold a JSON object");
    ModelBundle b;
    if (!j.contains("type")) {
        if (!j.contains("hidden_weights")) throw SchemaError("model file has no 'type' field");
        b.kind = ModelKind::MlpLm;
        b.model = mlp_from_json(j);
        if (j.contains("scaler")) b.scaler = scaler_from_json(j.at("scaler"));
        return b;
    }
    if (!j.at("type").is_string()) throw SchemaError("model 'type' must be a string");
    try {
        b.kind = model_kind_from_string(j.at("type").get<std::string>());
    } catch (const ValidationError& e) {
        throw SchemaError(e.what());
    }
    switch (b.kind) {
    case ModelKind::Lssvm: b.model = lssvm_from_json(j); break;
    case ModelKind::Anfis: b.model = anfis_from_json(j); break;
    case ModelKind::MlpBp:
    case ModelKind::MlpLm: b.model = mlp_from_json(j); break;
    case ModelKind::RbfInterp:
    case ModelKind::RbfCenters: b.model = rbf_from_json(j); break;
    }
    if (!j.contains("scaler")) throw SchemaError("model file has no 'scaler' field");
    b.scaler = scaler_from_json(j.at("scaler"));
    return b;
}

ModelBundle load_bundle(const std::filesystem::path& path) { return bundle_from_json(load_json(path)); }

// Training --------------------------------------------------------------------

TrainingOutcome run_training(const RunConfig& cfg, const Dataset& data) {
    cfg.validate();
    if (!data.has_target()) throw ValidationError("training data must include electrical_efficiency");
    const auto start = std::chrono::steady_clock::now();

    const SplitResult parts = split(data, cfg.split, cfg.seed);
    const Scaler scaler = Scaler::fit(parts.train);
    const Samples train = scaler.transform(parts.train);
    const std::uint64_t opt_seed = derive_seed(cfg.seed, kSeedOptimizer);
    const std::uint64_t init_seed = derive_seed(cfg.seed, kSeedInit);
    const std::uint64_t inner_seed = derive_seed(cfg.seed, kSeedInnerSplit);

    TrainingOutcome out;
    out.bundle.kind = cfg.model;
    out.bundle.scaler = scaler;
    Json training = Json::object();

    switch (cfg.model) {
    case ModelKind::Lssvm: {
        if (cfg.lssvm.tune) {
            LssvmTuneOptions opts;
            opts.optimizer = cfg.lssvm.optimizer;
            opts.ga = cfg.ga;
            opts.ga.seed = opt_seed;
            opts.pso = cfg.pso;
            opts.pso.seed = opt_seed;
            opts.bounds = cfg.lssvm.bounds;
            training["tuned"] = true;
            training["optimizer"] = to_string(cfg.lssvm.optimizer);
            training["validation"] = to_string(cfg.lssvm.validation);
            LssvmTuneResult tuned;
            if (cfg.lssvm.validation == TuneValidation::KFold) {
                tuned = lssvm_tune_cv(train, cfg.lssvm.folds, inner_seed, opts);
                training["folds"] = cfg.lssvm.folds;
            } else {
                const Holdout inner = inner_split(train.size(), cfg.lssvm.validation_fraction, inner_seed, "LSSVM tuning");
                tuned = lssvm_tune(train.subset(inner.fit), train.subset(inner.held), opts);
                training["tuning_fit_size"] = inner.fit.size();
                training["tuning_validation_size"] = inner.held.size();
            }
            out.bundle.model = lssvm_train(train, tuned.hyper);
            out.history = tuned.history;
            training["best_validation_mse"] = tuned.history.empty() ? Json(nullptr) : Json(tuned.history.back());
            training["discarded_candidates"] = tuned.discarded;
        } else {
            out.bundle.model = lssvm_train(train, cfg.lssvm.hyper);
            training["tuned"] = false;
        }
        const auto& m = std::get<LssvmModel>(out.bundle.model);
        training["gamma"] = m.hyper.gamma;
        training["sigma2"] = m.hyper.sigma2;
        break;
    }
    case ModelKind::Anfis: {
        AnfisTrainOptions opts;
        opts.clusters = cfg.anfis.clusters;
        opts.optimizer = cfg.anfis.optimizer;
        opts.pso = cfg.pso;
        opts.pso.seed = opt_seed;
        opts.ga = cfg.ga;
        opts.ga.seed = opt_seed;
        opts.sigma_min = cfg.anfis.sigma_min;
        opts.sigma_max = cfg.anfis.sigma_max;
        AnfisTrainResult r;
        if (cfg.anfis.checking_fraction > 0.0) {
            const Holdout inner = inner_split(train.size(), cfg.anfis.checking_fraction, inner_seed, "ANFIS checking");
            r = anfis_train(train.subset(inner.fit), train.subset(inner.held), opts);
            // Premises chosen on the checking data; consequents refitted on the whole partition.
            r.final_fit_ridge = anfis_fit_consequents(r.model, train, opts.ridge);
            r.train_rmse = std::sqrt((r.model.predict_all(train.x) - train.y).squaredNorm() /
                                     static_cast<double>(train.size()));
            training["checking_size"] = inner.held.size();
            training["checking_rmse_normalized"] = *r.checking_rmse;
        } else {
            r = anfis_train(train, opts);
        }
        out.bundle.model = r.model;
        out.history = r.history;
        training["clusters"] = cfg.anfis.clusters;
        training["optimizer"] = to_string(cfg.anfis.optimizer);
        training["tunable_parameters"] = count_parameters(cfg.anfis.clusters, kInputCount, 2);
        training["tunable_parameters_reference_count"] = count_parameters(cfg.anfis.clusters, 6, 2);
        training["train_rmse_normalized"] = r.train_rmse;
        training["ridge_fallbacks"] = r.ridge_fallbacks;
        training["final_fit_ridge"] = r.final_fit_ridge;
        break;
    }
    case ModelKind::MlpBp:
    case ModelKind::MlpLm: {
        const MlpModel init = MlpModel::random(kInputCount, cfg.mlp.hidden, init_seed);
        MlpTrainResult r;
        if (cfg.model == ModelKind::MlpBp) {
            r = mlp_train_bp(train, init, cfg.mlp.learning_rate, cfg.mlp.epochs);
        } else if (cfg.mlp.validation_fraction > 0.0) {
            const Holdout inner = inner_split(train.size(), cfg.mlp.validation_fraction, inner_seed, "MLP validation");
            r = mlp_train_lm(train.subset(inner.fit), init, cfg.lm,
                             EarlyStopping{train.subset(inner.held), cfg.mlp.max_fail});
            training["validation_size"] = inner.held.size();
            training["validation_mse_normalized"] = *r.validation_mse;
        } else {
            r = mlp_train_lm(train, init, cfg.lm);
        }
        if (r.status == TrainStatus::Diverged)
            throw NumericalError("MLP training diverged (cost above 1e12); lower mlp.learning_rate");
        out.bundle.model = r.model;
        out.history = r.history;
        training["hidden"] = cfg.mlp.hidden;
        training["status"] = to_string(r.status);
        training["iterations"] = r.iterations;
        break;
    }
    case ModelKind::RbfInterp: {
        const double sigma = cfg.rbf.sigma ? *cfg.rbf.sigma : mean_nearest_neighbor_distance(train.x);
        out.bundle.model = rbf_train_interpolation(train, sigma);
        training["sigma"] = sigma;
        break;
    }
    case ModelKind::RbfCenters: {
        RbfCentersOptions opts;
        opts.centers = cfg.rbf.centers;
        opts.sigma = cfg.rbf.sigma;
        opts.seed = init_seed;
        opts.refine_sigma = cfg.rbf.refine_sigma;
        opts.refine_iterations = cfg.rbf.refine_iterations;
        const RbfTrainResult r = rbf_train_centers(train, opts);
        out.bundle.model = r.model;
        training["centers"] = r.model.centers.rows();
        training["sigma"] = r.model.sigma;
        training["ridge_used"] = r.ridge_used;
        training["sigma_refined"] = r.sigma_refined;
        if (r.sigma_refined) training["refine_status"] = to_string(r.refine_status);
        break;
    }
    }

    // Total metrics run over the union of both partitions in their original order.
    Json echo = to_json(cfg);
    echo.erase("out");
    Json partitions = {{"train", parts.train.size()}, {"test", parts.test.size()}, {"total", data.size()}};
    Json report = {
        {"library_version", kLibraryVersion},
        {"rng_algorithm", RandomStream::kAlgorithmId},
        {"model", to_string(cfg.model)},
        {"config", echo},
        {"partitions", partitions},
        {"metrics",
         {metrics_for(out.bundle, parts.test, "test"), metrics_for(out.bundle, parts.train, "train"),
          metrics_for(out.bundle, data, "total")}},
        {"training", training},
        {"history_length", out.history.size()},
    };
    if (cfg.record_time)
        report["wall_time_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.report = std::move(report);
    return out;
}

MetricsReport evaluate_model(const ModelBundle& b, const Dataset& d) {
    return metrics(d.targets(), b.predict(d), "total");
}

LeverageReport diagnose_model(const ModelBundle& b, const Dataset& d, const LeverageOptions& opts) {
    std::vector<std::string> names;
    for (std::size_t c = 0; c < kInputCount; ++c) names.emplace_back(kColumnNames[c]);
    return leverage_analysis(samples_of(b, d).x, names, d.targets(), b.predict(d), opts);
}

} // namespace pvt
