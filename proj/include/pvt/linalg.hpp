#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace pvt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Pivots smaller than this (relative to the largest |a_ij|) count as zero.
inline constexpr double kPivotTolerance = 1e-12;
/// Column-pivoted QR threshold below which a least-squares problem is rank
/// deficient.
inline constexpr double kRankTolerance = 1e-10;

/// Solves a square system by LU with partial pivoting.
/// Throws SingularMatrixError (carrying a reciprocal condition estimate) when a
/// pivot falls below kPivotTolerance, ValidationError on shape mismatch or
/// non-finite entries.
Vector solve_linear(const Matrix& a, const Vector& b);

/// argmin ||Ax - b||₂ for n >= k. Throws RankDeficientError when A does not
/// have full column rank.
Vector least_squares(const Matrix& a, const Vector& b);

struct LeastSquaresFit {
    Vector x;
    bool ridge_used = false;
};

/// least_squares, falling back to (AᵀA + ridge·I)x = Aᵀb when A is rank
/// deficient.
LeastSquaresFit least_squares_or_ridge(const Matrix& a, const Vector& b, double ridge = 1e-8);

/// Central differences (f(x + h·e_i) - f(x - h·e_i)) / 2h.
Vector finite_diff_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                            double h = 1e-6);

bool all_finite(const Matrix& m);

/// `k` distinct row indices chosen by farthest-point traversal from `first`:
/// each new row maximizes its distance to the rows already chosen (ties go to
/// the lowest index).
std::vector<std::size_t> farthest_point_indices(const Matrix& x, std::size_t k, std::size_t first);

} // namespace pvt
