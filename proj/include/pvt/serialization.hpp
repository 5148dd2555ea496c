#pragma once

#include <filesystem>

#include <json.hpp>

#include "pvt/anfis.hpp"
#include "pvt/dataset.hpp"
#include "pvt/evaluation.hpp"
#include "pvt/lssvm.hpp"
#include "pvt/mlp.hpp"
#include "pvt/optimize.hpp"
#include "pvt/rbf.hpp"

namespace pvt {

/// Insertion-ordered JSON; doubles are written with round-trip precision, so
/// every model survives save/load bit for bit.
using Json = nlohmann::ordered_json;

Json to_json(const Scaler& s);
Scaler scaler_from_json(const Json& j);

Json to_json(const LssvmModel& m);
LssvmModel lssvm_from_json(const Json& j);

Json to_json(const AnfisModel& m);
AnfisModel anfis_from_json(const Json& j);

/// {hidden_weights[][], hidden_biases[], output_weights[], output_bias}.
Json to_json(const MlpModel& m);
MlpModel mlp_from_json(const Json& j);

Json to_json(const RbfModel& m);
RbfModel rbf_from_json(const Json& j);

Json to_json(const MetricsReport& r);
Json to_json(const LeverageReport& r);
Json to_json(const RelevancyReport& r);

Json to_json(const GaConfig& c);
Json to_json(const PsoConfig& c);
Json to_json(const LmConfig& c);

/// Throws IoError when the file cannot be read, SchemaError when it is not
/// valid JSON.
Json load_json(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline. Throws IoError on failure.
void save_json(const std::filesystem::path& path, const Json& j);

} // namespace pvt
