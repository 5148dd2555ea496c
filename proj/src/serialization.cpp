#include "pvt/serialization.hpp"

#include <fstream>

#include "pvt/error.hpp"

namespace pvt {

namespace {

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw SchemaError(std::string("missing field '") + key + "'");
    return j.at(key);
}

double number(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_number()) throw SchemaError(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

Json vector_json(const Vector& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Json matrix_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_json(m.row(i).transpose()));
    return rows;
}

Vector vector_from(const Json& j, const char* what) {
    if (!j.is_array()) throw SchemaError(std::string(what) + " must be an array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw SchemaError(std::string(what) + " must contain numbers");
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

Matrix matrix_from(const Json& j, const char* what) {
    if (!j.is_array()) throw SchemaError(std::string(what) + " must be an array of rows");
    if (j.empty()) return Matrix(0, 0);
    const auto cols = field(Json::object({{"r", j[0]}}), "r").size();
    Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < j.size(); ++i) {
        const Vector row = vector_from(j[i], what);
        if (static_cast<std::size_t>(row.size()) != cols) throw SchemaError(std::string(what) + " rows differ in length");
        m.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    return m;
}

Json optional_json(const std::optional<double>& v) {
    return v ? Json(*v) : Json(nullptr);
}

} // namespace

// Scaler ----------------------------------------------------------------------

Json to_json(const Scaler& s) {
    Json j = Json::object();
    for (std::size_t c = 0; c < kColumnCount; ++c) {
        const auto col = static_cast<Column>(c);
        if (!s.has(col)) continue;
        j[std::string(kColumnNames[c])] = {{"min", s.range(col).min}, {"max", s.range(col).max}};
    }
    return j;
}

Scaler scaler_from_json(const Json& j) {
    if (!j.is_object()) throw SchemaError("scaler must be an object");
    std::array<std::optional<ColumnRange>, kColumnCount> ranges{};
    for (const auto& [key, value] : j.items()) {
        Column c;
        try {
            c = column_from_name(key);
        } catch (const ValidationError&) {
            throw SchemaError("scaler has unknown column '" + key + "'");
        }
        ranges[static_cast<std::size_t>(c)] = ColumnRange{number(value, "min"), number(value, "max")};
    }
    try {
        return Scaler(ranges);
    } catch (const ValidationError& e) {
        throw SchemaError(e.what());
    }
}

// Models ----------------------------------------------------------------------

Json to_json(const LssvmModel& m) {
    return {{"gamma", m.hyper.gamma},
            {"sigma2", m.hyper.sigma2},
            {"bias", m.bias},
            {"support_values", vector_json(m.support_values)},
            {"train_inputs", matrix_json(m.train_inputs)}};
}

LssvmModel lssvm_from_json(const Json& j) {
    LssvmModel m;
    m.hyper = {number(j, "gamma"), number(j, "sigma2")};
    m.bias = number(j, "bias");
    m.support_values = vector_from(field(j, "support_values"), "support_values");
    m.train_inputs = matrix_from(field(j, "train_inputs"), "train_inputs");
    if (m.train_inputs.rows() != m.support_values.size() || m.support_values.size() == 0)
        throw SchemaError("LSSVM model needs one support value per training input");
    try {
        m.hyper.validate();
    } catch (const ValidationError& e) {
        throw SchemaError(e.what());
    }
    return m;
}

Json to_json(const AnfisModel& m) {
    Json rules = Json::array();
    for (const auto& r : m.rules) {
        Json centers = Json::array(), sigmas = Json::array();
        for (const auto& mf : r.memberships) {
            centers.push_back(mf.center);
            sigmas.push_back(mf.sigma);
        }
        rules.push_back({{"centers", centers},
                         {"sigmas", sigmas},
                         {"slopes", vector_json(r.slopes)},
                         {"intercept", r.intercept}});
    }
    return {{"rules", rules}, {"input_dim", m.input_dim}};
}

AnfisModel anfis_from_json(const Json& j) {
    AnfisModel m;
    const Json& dim = field(j, "input_dim");
    if (!dim.is_number_unsigned()) throw SchemaError("input_dim must be a non-negative integer");
    m.input_dim = dim.get<std::size_t>();
    const Json& rules = field(j, "rules");
    if (!rules.is_array()) throw SchemaError("rules must be an array");
    for (const auto& rj : rules) {
        AnfisRule r;
        const Vector centers = vector_from(field(rj, "centers"), "centers");
        const Vector sigmas = vector_from(field(rj, "sigmas"), "sigmas");
        if (centers.size() != sigmas.size()) throw SchemaError("ANFIS rule centers and sigmas differ in length");
        for (Eigen::Index i = 0; i < centers.size(); ++i) r.memberships.push_back({centers[i], sigmas[i]});
        r.slopes = vector_from(field(rj, "slopes"), "slopes");
        r.intercept = number(rj, "intercept");
        m.rules.push_back(std::move(r));
    }
    try {
        m.validate();
    } catch (const ValidationError& e) {
        throw SchemaError(e.what());
    }
    return m;
}

Json to_json(const MlpModel& m) {
    return {{"hidden_weights", matrix_json(m.hidden_weights)},
            {"hidden_biases", vector_json(m.hidden_biases)},
            {"output_weights", vector_json(m.output_weights)},
            {"output_bias", m.output_bias}};
}

MlpModel mlp_from_json(const Json& j) {
    MlpModel m;
    m.hidden_weights = matrix_from(field(j, "hidden_weights"), "hidden_weights");
    m.hidden_biases = vector_from(field(j, "hidden_biases"), "hidden_biases");
    m.output_weights = vector_from(field(j, "output_weights"), "output_weights");
    m.output_bias = number(j, "output_bias");
    try {
        m.validate();
    } catch (const ValidationError& e) {
        throw SchemaError(e.what());
    }
    return m;
}

Json to_json(const RbfModel& m) {
    return {{"centers", matrix_json(m.centers)}, {"sigma", m.sigma}, {"weights", vector_json(m.weights)}};
}

RbfModel rbf_from_json(const Json& j) {
    RbfModel m;
    m.centers = matrix_from(field(j, "centers"), "centers");
    m.sigma = number(j, "sigma");
    m.weights = vector_from(field(j, "weights"), "weights");
    try {
        m.validate();
    } catch (const ValidationError& e) {
        throw SchemaError(e.what());
    }
    return m;
}

// Reports ---------------------------------------------------------------------

Json to_json(const MetricsReport& r) {
    return {{"partition", r.partition}, {"n", r.n},        {"mse", r.mse},
            {"rmse", r.rmse},           {"mre", optional_json(r.mre)},
            {"ard_percent", optional_json(r.ard_percent)},
            {"mae", r.mae},             {"r2", optional_json(r.r2)}, {"std", optional_json(r.std)}};
}

Json to_json(const LeverageReport& r) {
    Json points = Json::array();
    std::size_t residual_outliers = 0, leverage_outliers = 0;
    for (std::size_t i = 0; i < r.n; ++i) {
        points.push_back({{"record_id", i},
                          {"h", r.hat_diagonal[static_cast<Eigen::Index>(i)]},
                          {"R", optional_json(r.standardized_residuals[i])},
                          {"flag", to_string(r.flags[i])}});
        residual_outliers += is_residual_outlier(r.flags[i]) ? 1 : 0;
        leverage_outliers += is_leverage_outlier(r.flags[i]) ? 1 : 0;
    }
    Json dropped = Json::array();
    for (const auto& d : r.dropped_columns) dropped.push_back(d);
    return {{"n", r.n},
            {"input_count", r.input_count},
            {"design_columns", r.design_columns},
            {"intercept", r.intercept},
            {"dropped_columns", dropped},
            {"warning_leverage", r.warning_leverage},
            {"quoted_warning_leverage", r.quoted_warning_leverage},
            {"residual_cutoff", r.cutoff},
            {"residual_outliers", residual_outliers},
            {"leverage_outliers", leverage_outliers},
            {"points", points}};
}

Json to_json(const RelevancyReport& r) {
    Json factors = Json::object();
    for (std::size_t i = 0; i < r.inputs.size(); ++i) factors[r.inputs[i]] = r.factors[i];
    return {{"output", r.output}, {"relevancy_factors", factors}};
}

Json to_json(const GaConfig& c) {
    return {{"population", c.population},       {"iterations", c.iterations},
            {"crossover_rate", c.crossover_rate}, {"mutation_rate", c.mutation_rate},
            {"mutation_sd", c.mutation_sd},     {"tournament_size", c.tournament_size},
            {"blend_alpha", c.blend_alpha},     {"elites", c.elites}};
}

Json to_json(const PsoConfig& c) {
    return {{"population", c.population}, {"iterations", c.iterations}, {"c1", c.c1},
            {"c2", c.c2},                 {"inertia", c.inertia}};
}

Json to_json(const LmConfig& c) {
    return {{"max_iterations", c.max_iterations}, {"lambda_init", c.lambda_init},
            {"lambda_up", c.lambda_up},           {"lambda_down", c.lambda_down},
            {"tolerance", c.tolerance}};
}

// Files -----------------------------------------------------------------------

Json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void save_json(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

} // namespace pvt
