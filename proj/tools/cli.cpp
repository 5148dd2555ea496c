#include "cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pvt/error.hpp"
#include "pvt/pipeline.hpp"

namespace pvt::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string config;
    std::string data;
    std::string model;
    std::string out;
    std::string predictions;
    std::int64_t n = 98;
    std::uint64_t seed = 1;
    bool seed_given = false;
    double noise = 0.1;
    bool intercept = false;
    bool record_time = false;
    std::size_t samples = 201;
};

fs::path output_dir(const std::string& out) {
    if (out.empty()) throw ValidationError("--out is required");
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out)) throw IoError("cannot create output directory '" + out + "'");
    return out;
}

template <class Write>
void write_file(const fs::path& path, Write&& write) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write '" + path.string() + "'");
    write(f);
    if (!f) throw IoError("failed writing '" + path.string() + "'");
}

std::string require(const std::string& value, const char* flag) {
    if (value.empty()) throw ValidationError(std::string(flag) + " is required");
    return value;
}

/// The electrical_efficiency column of any CSV that has one.
Vector load_target_column(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("'" + path.string() + "' is empty");
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) header.push_back(cell);
    }
    const auto it = std::find(header.begin(), header.end(), std::string(column_name(Column::ElectricalEfficiency)));
    if (it == header.end()) throw SchemaError("'" + path.string() + "' has no electrical_efficiency column");
    const auto col = static_cast<std::size_t>(it - header.begin());

    std::vector<double> values;
    for (std::size_t row = 1; std::getline(in, line); ++row) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        for (std::size_t c = 0; c <= col; ++c)
            if (!std::getline(ss, cell, ',')) throw ParseError("missing electrical_efficiency value", row, col + 1);
        double v = 0.0;
        const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc() || end != cell.data() + cell.size())
            throw ParseError("non-numeric electrical_efficiency '" + cell + "'", row, col + 1);
        values.push_back(v);
    }
    return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void print_metrics(std::ostream& out, const MetricsReport& m) {
    auto opt = [](const std::optional<double>& v) {
        std::ostringstream s;
        if (v) s << std::setprecision(6) << *v; else s << "n/a";
        return s.str();
    };
    out << std::left << std::setw(6) << m.partition << std::right << " n=" << std::setw(4) << m.n
        << std::setprecision(6) << "  R2=" << opt(m.r2) << "  MSE=" << m.mse << "  RMSE=" << m.rmse
        << "  ARD%=" << opt(m.ard_percent) << "  MAE=" << m.mae << "  STD=" << opt(m.std) << '\n';
}

MetricsReport metrics_from_json(const Json& j) {
    MetricsReport m;
    m.partition = j.at("partition").get<std::string>();
    m.n = j.at("n").get<std::size_t>();
    m.mse = j.at("mse").get<double>();
    m.rmse = j.at("rmse").get<double>();
    m.mae = j.at("mae").get<double>();
    auto opt = [&](const char* k) { return j.at(k).is_null() ? std::nullopt : std::optional<double>(j.at(k).get<double>()); };
    m.ard_percent = opt("ard_percent");
    m.r2 = opt("r2");
    m.std = opt("std");
    return m;
}

// Commands --------------------------------------------------------------------

int cmd_generate(const Options& o, std::ostream& out) {
    if (o.n < 0) throw ValidationError("--n must be non-negative");
    if (!(o.noise >= 0.0)) throw ValidationError("--noise must be non-negative");
    const fs::path target = require(o.out, "--out");
    fs::path file = target;
    if (target.extension() != ".csv")
        file = output_dir(o.out) / "data.csv";
    else if (target.has_parent_path())
        output_dir(target.parent_path().string());
    const Dataset d = generate_synthetic(static_cast<std::size_t>(o.n), o.seed, o.noise);
    save_csv(file, d);
    out << "wrote " << d.size() << " records to " << file.string() << '\n';
    return 0;
}

int cmd_train(const Options& o, std::ostream& out) {
    RunConfig cfg = o.config.empty() ? RunConfig{} : run_config_from_json(load_json(o.config));
    if (!o.data.empty()) cfg.data = o.data;
    if (!o.out.empty()) cfg.out = o.out;
    if (o.seed_given) cfg.seed = o.seed;
    if (o.record_time) cfg.record_time = true;
    const Dataset data = load_csv(require(cfg.data, "data path (--data or config \"data\")"));
    const fs::path dir = output_dir(require(cfg.out, "output directory (--out or config \"out\")"));

    const TrainingOutcome result = run_training(cfg, data);
    save_json(dir / "model.json", to_json(result.bundle));
    save_json(dir / "report.json", result.report);
    write_file(dir / "history.csv", [&](std::ostream& f) { write_history_csv(f, result.history); });

    out << to_string(cfg.model) << " trained on " << result.report["partitions"]["train"].get<std::size_t>()
        << " records, tested on " << result.report["partitions"]["test"].get<std::size_t>() << '\n';
    for (const auto& m : result.report["metrics"]) print_metrics(out, metrics_from_json(m));
    out << "wrote " << (dir / "model.json").string() << " and " << (dir / "report.json").string() << '\n';
    return 0;
}

int cmd_predict(const Options& o, std::ostream& out) {
    const ModelBundle b = load_bundle(require(o.model, "--model"));
    const Dataset d = load_csv_inputs(require(o.data, "--data"));
    const fs::path dir = output_dir(o.out);
    const Vector y = b.predict(d);
    write_file(dir / "predictions.csv", [&](std::ostream& f) {
        f << "record_id," << column_name(Column::ElectricalEfficiency) << '\n' << std::setprecision(17);
        for (Eigen::Index i = 0; i < y.size(); ++i) f << i << ',' << y[i] << '\n';
    });
    out << "wrote " << y.size() << " predictions to " << (dir / "predictions.csv").string() << '\n';
    return 0;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
    const fs::path dir = output_dir(o.out);
    const Dataset d = load_csv(require(o.data, "--data"));
    MetricsReport m;
    if (!o.predictions.empty()) {
        if (!o.model.empty()) throw ValidationError("give either --model or --predictions, not both");
        const Vector y_cal = load_target_column(o.predictions);
        if (static_cast<std::size_t>(y_cal.size()) != d.size())
            throw SchemaError("predictions file has " + std::to_string(y_cal.size()) + " rows, data has " +
                              std::to_string(d.size()));
        m = metrics(d.targets(), y_cal, "total");
    } else {
        m = evaluate_model(load_bundle(require(o.model, "--model or --predictions")), d);
    }
    save_json(dir / "report.json", to_json(m));
    print_metrics(out, m);
    return 0;
}

int cmd_diagnose(const Options& o, std::ostream& out) {
    const ModelBundle b = load_bundle(require(o.model, "--model"));
    const Dataset d = load_csv(require(o.data, "--data"));
    const fs::path dir = output_dir(o.out);
    const LeverageReport r = diagnose_model(b, d, LeverageOptions{.intercept = o.intercept});
    save_json(dir / "report.json", to_json(r));
    write_file(dir / "williams.csv", [&](std::ostream& f) { write_williams_csv(f, r); });

    std::size_t residual = 0, leverage = 0;
    for (auto f : r.flags) {
        residual += is_residual_outlier(f) ? 1 : 0;
        leverage += is_leverage_outlier(f) ? 1 : 0;
    }
    out << "n=" << r.n << "  H*=" << std::setprecision(6) << r.warning_leverage << " (quoted "
        << r.quoted_warning_leverage << ")  residual outliers=" << residual << "  leverage outliers=" << leverage
        << '\n';
    for (std::size_t i = 0; i < r.n; ++i)
        if (r.flags[i] != PointFlag::Valid) out << "  record " << i << ": " << to_string(r.flags[i]) << '\n';
    return 0;
}

int cmd_sensitivity(const Options& o, std::ostream& out) {
    const Dataset d = load_csv(require(o.data, "--data"));
    const fs::path dir = output_dir(o.out);
    const Vector y = o.model.empty() ? d.targets() : load_bundle(o.model).predict(d);
    RelevancyReport r = relevancy_report(d, y);
    if (!o.model.empty()) r.output = "predicted_electrical_efficiency";
    save_json(dir / "report.json", to_json(r));
    for (std::size_t i = 0; i < r.inputs.size(); ++i)
        out << std::left << std::setw(16) << r.inputs[i] << std::right << std::setprecision(6) << r.factors[i]
            << '\n';
    return 0;
}

int cmd_plotdata(const Options& o, std::ostream& out) {
    const Dataset d = load_csv(require(o.data, "--data"));
    const fs::path dir = output_dir(o.out);
    const Matrix table = normalized_table(d);
    const auto columns = table_columns(d);
    const auto andrews = andrews_data(table, o.samples);
    const auto scatter = scatter_data(d);
    const auto parallel = parallel_data(table, columns);
    write_file(dir / "andrews.csv", [&](std::ostream& f) { write_andrews_csv(f, andrews); });
    write_file(dir / "scatter.csv", [&](std::ostream& f) { write_scatter_csv(f, scatter); });
    write_file(dir / "parallel.csv", [&](std::ostream& f) { write_parallel_csv(f, parallel); });
    out << "wrote andrews.csv (" << andrews.size() << " rows), scatter.csv (" << scatter.size()
        << " rows), parallel.csv (" << parallel.size() << " rows) to " << dir.string() << '\n';
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"PV/T electrical efficiency models: generate, train, predict, evaluate, diagnose, "
                 "sensitivity, plotdata"};
    app.name(args.empty() ? "pvt" : args.front());
    app.require_subcommand(1);
    Options o;

    auto add_seed = [&](CLI::App* c) {
        c->add_option_function<std::uint64_t>(
             "--seed", [&](std::uint64_t v) { o.seed = v; o.seed_given = true; }, "Master seed")
            ->type_name("U64");
    };

    auto* gen = app.add_subcommand("generate", "Write a synthetic labelled dataset");
    gen->add_option("--n", o.n, "Record count")->capture_default_str();
    gen->add_option("--noise", o.noise, "Gaussian noise sd on the efficiency (%)")->capture_default_str();
    gen->add_option("--out", o.out, "Output .csv file or directory (receives data.csv)")->required();
    add_seed(gen);

    auto* train = app.add_subcommand("train", "Train a model and write model.json, report.json, history.csv");
    train->add_option("--config", o.config, "JSON run configuration");
    train->add_option("--data", o.data, "Labelled CSV (overrides the config)");
    train->add_option("--out", o.out, "Output directory (overrides the config)");
    train->add_flag("--record-time", o.record_time, "Add wall time to report.json");
    add_seed(train);

    auto* predict = app.add_subcommand("predict", "Write predictions.csv for a data file");
    predict->add_option("--model", o.model, "Model JSON")->required();
    predict->add_option("--data", o.data, "CSV with the five input columns")->required();
    predict->add_option("--out", o.out, "Output directory")->required();

    auto* evaluate = app.add_subcommand("evaluate", "Error metrics against the data's targets");
    evaluate->add_option("--data", o.data, "Labelled CSV")->required();
    evaluate->add_option("--model", o.model, "Model JSON");
    evaluate->add_option("--predictions", o.predictions, "CSV with an electrical_efficiency column");
    evaluate->add_option("--out", o.out, "Output directory")->required();

    auto* diagnose = app.add_subcommand("diagnose", "Leverage and standardized residuals (williams.csv)");
    diagnose->add_option("--model", o.model, "Model JSON")->required();
    diagnose->add_option("--data", o.data, "Labelled CSV")->required();
    diagnose->add_option("--out", o.out, "Output directory")->required();
    diagnose->add_flag("--intercept", o.intercept, "Add a column of ones to the design matrix");

    auto* sensitivity = app.add_subcommand("sensitivity", "Relevancy factor of every input");
    sensitivity->add_option("--data", o.data, "Labelled CSV")->required();
    sensitivity->add_option("--model", o.model, "Use model predictions as the output");
    sensitivity->add_option("--out", o.out, "Output directory")->required();

    auto* plot = app.add_subcommand("plotdata", "Andrews, scatter-matrix and parallel-coordinate tables");
    plot->add_option("--data", o.data, "Labelled CSV")->required();
    plot->add_option("--out", o.out, "Output directory")->required();
    plot->add_option("--samples", o.samples, "Points per Andrews curve")->capture_default_str();

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        if (!rev.empty()) rev.pop_back();
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : static_cast<int>(ErrorKind::Validation);
    }

    try {
        if (*gen) return cmd_generate(o, out);
        if (*train) return cmd_train(o, out);
        if (*predict) return cmd_predict(o, out);
        if (*evaluate) return cmd_evaluate(o, out);
        if (*diagnose) return cmd_diagnose(o, out);
        if (*sensitivity) return cmd_sensitivity(o, out);
        if (*plot) return cmd_plotdata(o, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(e.kind());
    } catch (const nlohmann::json::exception& e) {
        err << "error: malformed JSON content: " << e.what() << '\n';
        return static_cast<int>(ErrorKind::Io);
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ErrorKind::Io);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ErrorKind::Numerical);
    }
    return static_cast<int>(ErrorKind::Validation);
}

int run(int argc, const char* const* argv) {
    return run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

} // namespace pvt::cli
