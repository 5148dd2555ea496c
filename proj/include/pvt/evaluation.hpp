#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pvt/dataset.hpp"
#include "pvt/linalg.hpp"

namespace pvt {

// Metrics ---------------------------------------------------------------------

/// Error statistics of calculated against experimental values. ARD is
/// undefined when an experimental value is zero, STD when n = 1 and R² when
/// the experimental values are constant; those fields are then empty.
struct MetricsReport {
    std::string partition = "total";
    std::size_t n = 0;
    double mse = 0.0;
    double rmse = 0.0;
    double mae = 0.0;
    std::optional<double> ard_percent;
    std::optional<double> mre;  // ARD / 100
    std::optional<double> r2;
    std::optional<double> std;  // (Σe² / (n - 1))^0.5
};

MetricsReport metrics(const Vector& y_exp, const Vector& y_cal, std::string partition = "total");

// Leverage --------------------------------------------------------------------

/// Diagonal of H = X(XᵀX)⁻¹Xᵀ. Throws RankDeficientError when X lacks full
/// column rank, ValidationError when n < k.
Vector hat_diagonal(const Matrix& x);

/// H* = 3(k + 1) / n.
double warning_leverage(std::size_t k, std::size_t n);

/// The warning leverage quoted for the reference study (inconsistent with
/// 3(k+1)/n for k = 5, n = 98); reported next to the computed value.
inline constexpr double kQuotedWarningLeverage = 0.09;
inline constexpr double kResidualCutoff = 3.0;

/// R_i = e_i / (s·√(1 - h_ii)), e = y_exp - y_cal, s² = Σe² / (n - k - 1).
/// Points with h_ii = 1 have no defined value.
std::vector<std::optional<double>> standardized_residuals(const Vector& y_exp, const Vector& y_cal,
                                                          const Vector& h, std::size_t k);

enum class PointFlag { Valid, LeverageOutlier, ResidualOutlier, Both };
std::string_view to_string(PointFlag f);
bool is_residual_outlier(PointFlag f);
bool is_leverage_outlier(PointFlag f);

/// Valid iff |R| <= cutoff and h <= h*. An undefined R only tests leverage.
std::vector<PointFlag> williams_classify(const Vector& h, const std::vector<std::optional<double>>& r,
                                         double h_star, double cutoff = kResidualCutoff);

struct LeverageOptions {
    /// Prepend a column of ones to the design matrix.
    bool intercept = false;
    double cutoff = kResidualCutoff;
};

struct LeverageReport {
    Vector hat_diagonal;
    std::vector<std::optional<double>> standardized_residuals;
    std::vector<PointFlag> flags;
    double warning_leverage = 0.0;
    double quoted_warning_leverage = kQuotedWarningLeverage;
    double cutoff = kResidualCutoff;
    std::size_t n = 0;
    std::size_t input_count = 0;     // k in the warning leverage
    std::size_t design_columns = 0;  // columns of X actually used
    bool intercept = false;
    /// Inputs left out because they are linear combinations of earlier ones.
    std::vector<std::string> dropped_columns;
};

/// William's-plot analysis of predictions against the input design matrix.
/// Linearly dependent input columns are dropped (in schema order) before the
/// hat matrix is formed.
LeverageReport leverage_analysis(const Matrix& inputs, const std::vector<std::string>& names,
                                 const Vector& y_exp, const Vector& y_cal, const LeverageOptions& opts = {});

// Sensitivity -----------------------------------------------------------------

/// Pearson-form relevancy factor between an input column and the output.
/// Throws ValidationError for mismatched lengths, n < 2 or a constant column.
double relevancy_factor(const Vector& x, const Vector& y);

struct RelevancyReport {
    std::vector<std::string> inputs;
    std::vector<double> factors;
    std::string output = "electrical_efficiency";
};

RelevancyReport relevancy_report(const Dataset& d, const Vector& y);

// Plot data -------------------------------------------------------------------

/// x₁/√2 + x₂ sin t + x₃ cos t + x₄ sin 2t + x₅ cos 2t + x₆ sin 3t + ...
double andrews_curve(std::span<const double> x, double t);

enum class PlotKind { Andrews, ScatterMatrix, ParallelCoords };

struct AndrewsPoint {
    std::size_t record_id;
    double t;
    double f;
};

struct ScatterPoint {
    std::string col_a;
    std::string col_b;
    double x;
    double y;
};

struct ScatterPair {
    std::string col_a;
    std::string col_b;
    std::optional<double> r;  // empty when either column is constant
};

struct ParallelPoint {
    std::size_t record_id;
    std::string column;
    double value;
};

/// Every column of the labelled dataset mapped onto [-1, 1] with a scaler
/// fitted on the dataset itself. Columns are in schema order.
Matrix normalized_table(const Dataset& d);
std::vector<std::string> table_columns(const Dataset& d);

/// `samples` values of t evenly spaced over [-π, π] for every record.
std::vector<AndrewsPoint> andrews_data(const Matrix& normalized, std::size_t samples = 201);
/// All unordered column pairs (a before b in schema order) in raw units.
std::vector<ScatterPoint> scatter_data(const Dataset& d);
std::vector<ScatterPair> scatter_pairs(const Dataset& d);
std::vector<ParallelPoint> parallel_data(const Matrix& normalized, const std::vector<std::string>& columns);

void write_andrews_csv(std::ostream& out, const std::vector<AndrewsPoint>& rows);
void write_scatter_csv(std::ostream& out, const std::vector<ScatterPoint>& rows);
void write_parallel_csv(std::ostream& out, const std::vector<ParallelPoint>& rows);
void write_williams_csv(std::ostream& out, const LeverageReport& r);

} // namespace pvt
