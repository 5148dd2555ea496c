#include "pvt/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "pvt/error.hpp"

namespace pvt {

// Metrics ---------------------------------------------------------------------

MetricsReport metrics(const Vector& y_exp, const Vector& y_cal, std::string partition) {
    if (y_exp.size() == 0 || y_exp.size() != y_cal.size())
        throw ValidationError("metrics: experimental and calculated vectors need equal, non-zero length");
    if (!y_exp.allFinite() || !y_cal.allFinite()) throw ValidationError("metrics: non-finite values");

    const double n = static_cast<double>(y_exp.size());
    const Vector e = y_exp - y_cal;
    const double sse = e.squaredNorm();

    MetricsReport r;
    r.partition = std::move(partition);
    r.n = static_cast<std::size_t>(y_exp.size());
    r.mse = sse / n;
    r.rmse = std::sqrt(r.mse);
    r.mae = e.cwiseAbs().sum() / n;

    if ((y_exp.array() != 0.0).all()) {
        r.ard_percent = 100.0 / n * (e.array().abs() / y_exp.array()).sum();
        r.mre = *r.ard_percent / 100.0;
    }
    if (y_exp.size() >= 2) r.std = std::sqrt(sse / (n - 1.0));
    const double sst = (y_exp.array() - y_exp.mean()).square().sum();
    if (sst > 0.0) r.r2 = 1.0 - sse / sst;
    return r;
}

// Leverage --------------------------------------------------------------------

Vector hat_diagonal(const Matrix& x) {
    if (x.cols() == 0) throw ValidationError("hat_diagonal: design matrix has no columns");
    if (x.rows() < x.cols()) throw ValidationError("hat_diagonal: need at least as many rows as columns");
    if (!x.allFinite()) throw ValidationError("hat_diagonal: non-finite design matrix");

    Eigen::ColPivHouseholderQR<Matrix> qr(x);
    qr.setThreshold(kRankTolerance);
    if (qr.rank() < x.cols())
        throw RankDeficientError("hat_diagonal: design matrix is rank deficient (rank " +
                                     std::to_string(qr.rank()) + " < " + std::to_string(x.cols()) + ")",
                                 qr.rank(), x.cols());
    // H = QQᵀ for the thin Q, so h_ii is the squared norm of row i of Q.
    const Matrix q = qr.householderQ() * Matrix::Identity(x.rows(), x.cols());
    return q.rowwise().squaredNorm();
}

double warning_leverage(std::size_t k, std::size_t n) {
    if (n == 0) throw ValidationError("warning_leverage: n must be positive");
    return 3.0 * static_cast<double>(k + 1) / static_cast<double>(n);
}

std::vector<std::optional<double>> standardized_residuals(const Vector& y_exp, const Vector& y_cal,
                                                          const Vector& h, std::size_t k) {
    const auto n = y_exp.size();
    if (y_cal.size() != n || h.size() != n) throw ValidationError("standardized_residuals: length mismatch");
    if (static_cast<Eigen::Index>(k) + 1 >= n)
        throw ValidationError("standardized_residuals: need n > k + 1 for the residual variance");

    const Vector e = y_exp - y_cal;
    const double s = std::sqrt(e.squaredNorm() / static_cast<double>(n - static_cast<Eigen::Index>(k) - 1));
    std::vector<std::optional<double>> out(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double room = 1.0 - h[i];
        if (room <= 1e-12) continue;  // exact-leverage point
        out[static_cast<std::size_t>(i)] = s > 0.0 ? e[i] / (s * std::sqrt(room)) : 0.0;
    }
    return out;
}

std::string_view to_string(PointFlag f) {
    switch (f) {
    case PointFlag::Valid: return "valid";
    case PointFlag::LeverageOutlier: return "leverage_outlier";
    case PointFlag::ResidualOutlier: return "residual_outlier";
    case PointFlag::Both: return "both";
    }
    return "unknown";
}

bool is_residual_outlier(PointFlag f) {
    return f == PointFlag::ResidualOutlier || f == PointFlag::Both;
}

bool is_leverage_outlier(PointFlag f) {
    return f == PointFlag::LeverageOutlier || f == PointFlag::Both;
}

std::vector<PointFlag> williams_classify(const Vector& h, const std::vector<std::optional<double>>& r,
                                         double h_star, double cutoff) {
    if (static_cast<std::size_t>(h.size()) != r.size()) throw ValidationError("williams_classify: length mismatch");
    std::vector<PointFlag> flags(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        const bool lev = h[static_cast<Eigen::Index>(i)] > h_star;
        const bool res = r[i] && std::abs(*r[i]) > cutoff;
        flags[i] = lev && res ? PointFlag::Both
                 : lev        ? PointFlag::LeverageOutlier
                 : res        ? PointFlag::ResidualOutlier
                              : PointFlag::Valid;
    }
    return flags;
}

LeverageReport leverage_analysis(const Matrix& inputs, const std::vector<std::string>& names,
                                 const Vector& y_exp, const Vector& y_cal, const LeverageOptions& opts) {
    if (static_cast<std::size_t>(inputs.cols()) != names.size())
        throw ValidationError("leverage_analysis: one name per input column required");
    if (inputs.rows() != y_exp.size() || y_exp.size() != y_cal.size())
        throw ValidationError("leverage_analysis: row counts differ");

    LeverageReport rep;
    rep.n = static_cast<std::size_t>(inputs.rows());
    rep.input_count = names.size();
    rep.intercept = opts.intercept;
    rep.cutoff = opts.cutoff;

    // Keep a column only if it raises the rank of the columns kept so far.
    Matrix design(inputs.rows(), 0);
    auto try_add = [&](const Vector& col) {
        Matrix trial(design.rows(), design.cols() + 1);
        trial << design, col;
        Eigen::ColPivHouseholderQR<Matrix> qr(trial);
        qr.setThreshold(kRankTolerance);
        if (qr.rank() < trial.cols()) return false;
        design = std::move(trial);
        return true;
    };
    if (opts.intercept) try_add(Vector::Ones(inputs.rows()));
    std::size_t kept_inputs = 0;
    for (Eigen::Index j = 0; j < inputs.cols(); ++j) {
        if (try_add(inputs.col(j)))
            ++kept_inputs;
        else
            rep.dropped_columns.push_back(names[static_cast<std::size_t>(j)]);
    }
    if (design.cols() == 0) throw ValidationError("leverage_analysis: no usable design columns");
    rep.design_columns = static_cast<std::size_t>(design.cols());

    rep.hat_diagonal = hat_diagonal(design);
    rep.standardized_residuals = standardized_residuals(y_exp, y_cal, rep.hat_diagonal, kept_inputs);
    rep.warning_leverage = warning_leverage(rep.input_count, rep.n);
    rep.flags = williams_classify(rep.hat_diagonal, rep.standardized_residuals, rep.warning_leverage, opts.cutoff);
    return rep;
}

// Sensitivity -----------------------------------------------------------------

double relevancy_factor(const Vector& x, const Vector& y) {
    if (x.size() != y.size()) throw ValidationError("relevancy_factor: length mismatch");
    if (x.size() < 2) throw ValidationError("relevancy_factor: need at least two values");
    const Eigen::ArrayXd dx = x.array() - x.mean();
    const Eigen::ArrayXd dy = y.array() - y.mean();
    const double sxx = dx.square().sum();
    const double syy = dy.square().sum();
    if (!(sxx > 0.0) || !(syy > 0.0)) throw ValidationError("relevancy_factor: constant column (zero denominator)");
    // Rounding can push |r| a few ulps past 1 for exactly collinear columns.
    return std::clamp((dx * dy).sum() / std::sqrt(sxx * syy), -1.0, 1.0);
}

RelevancyReport relevancy_report(const Dataset& d, const Vector& y) {
    if (static_cast<std::size_t>(y.size()) != d.size()) throw ValidationError("relevancy_report: length mismatch");
    RelevancyReport rep;
    for (std::size_t c = 0; c < kInputCount; ++c) {
        rep.inputs.emplace_back(kColumnNames[c]);
        rep.factors.push_back(relevancy_factor(d.column(static_cast<Column>(c)), y));
    }
    return rep;
}

// Plot data -------------------------------------------------------------------

double andrews_curve(std::span<const double> x, double t) {
    if (x.empty()) throw ValidationError("andrews_curve: record needs at least one value");
    double f = x[0] / std::numbers::sqrt2;
    for (std::size_t j = 1; j < x.size(); ++j) {
        const double harmonic = static_cast<double>((j + 1) / 2);
        f += x[j] * (j % 2 == 1 ? std::sin(harmonic * t) : std::cos(harmonic * t));
    }
    return f;
}

Matrix normalized_table(const Dataset& d) {
    if (d.empty()) throw ValidationError("plot data: dataset is empty");
    const Scaler s = Scaler::fit(d);
    const std::size_t cols = d.has_target() ? kColumnCount : kInputCount;
    Matrix m(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                s.normalize(static_cast<Column>(c), d[i].get(static_cast<Column>(c)));
    return m;
}

std::vector<std::string> table_columns(const Dataset& d) {
    const std::size_t cols = d.has_target() ? kColumnCount : kInputCount;
    return {kColumnNames.begin(), kColumnNames.begin() + static_cast<std::ptrdiff_t>(cols)};
}

std::vector<AndrewsPoint> andrews_data(const Matrix& normalized, std::size_t samples) {
    if (normalized.rows() == 0) throw ValidationError("plot data: dataset is empty");
    if (samples < 2) throw ValidationError("andrews: need at least two samples of t");
    std::vector<AndrewsPoint> out;
    out.reserve(static_cast<std::size_t>(normalized.rows()) * samples);
    std::vector<double> rec(static_cast<std::size_t>(normalized.cols()));
    for (Eigen::Index i = 0; i < normalized.rows(); ++i) {
        for (Eigen::Index c = 0; c < normalized.cols(); ++c) rec[static_cast<std::size_t>(c)] = normalized(i, c);
        for (std::size_t s = 0; s < samples; ++s) {
            const double t = -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(s) /
                                                     static_cast<double>(samples - 1);
            out.push_back({static_cast<std::size_t>(i), t, andrews_curve(rec, t)});
        }
    }
    return out;
}

std::vector<ScatterPoint> scatter_data(const Dataset& d) {
    if (d.empty()) throw ValidationError("plot data: dataset is empty");
    const auto cols = table_columns(d);
    std::vector<ScatterPoint> out;
    for (std::size_t a = 0; a < cols.size(); ++a)
        for (std::size_t b = a + 1; b < cols.size(); ++b)
            for (const auto& r : d.records())
                out.push_back({cols[a], cols[b], r.get(static_cast<Column>(a)), r.get(static_cast<Column>(b))});
    return out;
}

std::vector<ScatterPair> scatter_pairs(const Dataset& d) {
    if (d.empty()) throw ValidationError("plot data: dataset is empty");
    const auto cols = table_columns(d);
    std::vector<ScatterPair> out;
    for (std::size_t a = 0; a < cols.size(); ++a)
        for (std::size_t b = a + 1; b < cols.size(); ++b) {
            ScatterPair p{cols[a], cols[b], std::nullopt};
            try {
                p.r = relevancy_factor(d.column(static_cast<Column>(a)), d.column(static_cast<Column>(b)));
            } catch (const ValidationError&) {
            }
            out.push_back(std::move(p));
        }
    return out;
}

std::vector<ParallelPoint> parallel_data(const Matrix& normalized, const std::vector<std::string>& columns) {
    if (normalized.rows() == 0) throw ValidationError("plot data: dataset is empty");
    if (static_cast<std::size_t>(normalized.cols()) != columns.size())
        throw ValidationError("parallel coordinates: one label per column required");
    std::vector<ParallelPoint> out;
    for (Eigen::Index i = 0; i < normalized.rows(); ++i)
        for (Eigen::Index c = 0; c < normalized.cols(); ++c)
            out.push_back({static_cast<std::size_t>(i), columns[static_cast<std::size_t>(c)], normalized(i, c)});
    return out;
}

void write_andrews_csv(std::ostream& out, const std::vector<AndrewsPoint>& rows) {
    const auto old = out.precision(17);
    out << "record_id,t,f\n";
    for (const auto& r : rows) out << r.record_id << ',' << r.t << ',' << r.f << '\n';
    out.precision(old);
}

void write_scatter_csv(std::ostream& out, const std::vector<ScatterPoint>& rows) {
    const auto old = out.precision(17);
    out << "col_a,col_b,x,y\n";
    for (const auto& r : rows) out << r.col_a << ',' << r.col_b << ',' << r.x << ',' << r.y << '\n';
    out.precision(old);
}

void write_parallel_csv(std::ostream& out, const std::vector<ParallelPoint>& rows) {
    const auto old = out.precision(17);
    out << "record_id,column,value\n";
    for (const auto& r : rows) out << r.record_id << ',' << r.column << ',' << r.value << '\n';
    out.precision(old);
}

void write_williams_csv(std::ostream& out, const LeverageReport& r) {
    const auto old = out.precision(17);
    out << "record_id,h,R,flag\n";
    for (std::size_t i = 0; i < r.n; ++i) {
        out << i << ',' << r.hat_diagonal[static_cast<Eigen::Index>(i)] << ',';
        if (r.standardized_residuals[i]) out << *r.standardized_residuals[i];
        out << ',' << to_string(r.flags[i]) << '\n';
    }
    out.precision(old);
}

} // namespace pvt
