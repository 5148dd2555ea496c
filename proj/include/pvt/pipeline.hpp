#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pvt/anfis.hpp"
#include "pvt/dataset.hpp"
#include "pvt/evaluation.hpp"
#include "pvt/lssvm.hpp"
#include "pvt/mlp.hpp"
#include "pvt/optimize.hpp"
#include "pvt/rbf.hpp"
#include "pvt/serialization.hpp"

namespace pvt {

inline constexpr std::string_view kLibraryVersion = "0.1.0";

enum class ModelKind { Lssvm, Anfis, MlpBp, MlpLm, RbfInterp, RbfCenters };

std::string_view to_string(ModelKind k);
/// Throws ValidationError for an unknown name.
ModelKind model_kind_from_string(std::string_view name);
std::string_view to_string(OptimizerKind k);
OptimizerKind optimizer_kind_from_string(std::string_view name);

/// What the LSSVM tuner scores a candidate on: pooled k-fold CV error over
/// the training partition, or one held-out share of it.
enum class TuneValidation { KFold, Holdout };
std::string_view to_string(TuneValidation v);
TuneValidation tune_validation_from_string(std::string_view name);

struct LssvmSection {
    LssvmHyper hyper;  // used as-is when tune is false
    bool tune = true;
    OptimizerKind optimizer = OptimizerKind::Ga;
    TuneValidation validation = TuneValidation::KFold;
    std::size_t folds = 5;
    double validation_fraction = 0.2;  // holdout only
    LssvmTuneBounds bounds;
};

struct AnfisSection {
    std::size_t clusters = 7;
    OptimizerKind optimizer = OptimizerKind::Pso;
    double sigma_min = 1e-3;
    double sigma_max = 4.0;
    /// Share of the training partition held out as checking data; 0 trains on
    /// all of it and keeps the optimizer's final candidate.
    double checking_fraction = 0.2;
};

struct MlpSection {
    std::size_t hidden = 7;
    double learning_rate = 0.004;
    std::size_t epochs = 5000;
    /// Levenberg-Marquardt only: share of the training partition used for
    /// early stopping (0 disables) and the allowed run of non-improving steps.
    double validation_fraction = 0.2;
    std::size_t max_fail = 6;
};

struct RbfSection {
    std::size_t centers = 50;
    std::optional<double> sigma;  // mean nearest-neighbour distance when empty
    bool refine_sigma = true;
    std::size_t refine_iterations = 50;
};

/// Everything a training run depends on. Defaults reproduce the reference
/// model settings.
struct RunConfig {
    ModelKind model = ModelKind::Lssvm;
    std::uint64_t seed = 1;
    double split = 0.75;
    std::string data;
    std::string out;
    bool record_time = false;

    LssvmSection lssvm;
    AnfisSection anfis;
    MlpSection mlp;
    RbfSection rbf;
    GaConfig ga;
    PsoConfig pso;
    LmConfig lm{.max_iterations = 1500};

    /// Throws ValidationError for out-of-range settings.
    void validate() const;
};

/// Missing keys keep their defaults; unknown keys and wrongly typed values are
/// rejected with ValidationError.
RunConfig run_config_from_json(const Json& j);
/// The fully resolved configuration.
Json to_json(const RunConfig& c);

using AnyModel = std::variant<LssvmModel, AnfisModel, MlpModel, RbfModel>;

/// A trained model together with the scaler that maps raw data onto its
/// normalized inputs.
struct ModelBundle {
    ModelKind kind = ModelKind::Lssvm;
    AnyModel model;
    Scaler scaler;

    /// Predictions on normalized inputs, normalized output.
    Vector predict_normalized(const Matrix& x) const;
    /// Electrical efficiency (%) for every record of `d`.
    Vector predict(const Dataset& d) const;
};

Json to_json(const ModelBundle& b);
/// Accepts the bundle format written by to_json and, for MLPs, a bare weight
/// object without type or scaler (predictions are then in normalized units).
ModelBundle bundle_from_json(const Json& j);
ModelBundle load_bundle(const std::filesystem::path& path);

struct TrainingOutcome {
    ModelBundle bundle;
    Json report;
    std::vector<double> history;
};

/// Split, normalize on the training partition, train, and evaluate on
/// test/train/total in raw units.
TrainingOutcome run_training(const RunConfig& cfg, const Dataset& data);

/// Metrics of a model on labelled data.
MetricsReport evaluate_model(const ModelBundle& b, const Dataset& d);

/// Leverage diagnostics of a model on labelled data.
LeverageReport diagnose_model(const ModelBundle& b, const Dataset& d, const LeverageOptions& opts = {});

} // namespace pvt
