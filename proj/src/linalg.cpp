#include "pvt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pvt/error.hpp"

namespace pvt {

bool all_finite(const Matrix& m) {
    return m.allFinite();
}

Vector solve_linear(const Matrix& a, const Vector& b) {
    if (a.rows() == 0 || a.rows() != a.cols())
        throw ValidationError("solve_linear: matrix must be square and non-empty");
    if (b.size() != a.rows())
        throw ValidationError("solve_linear: right-hand side length does not match matrix");
    if (!a.allFinite() || !b.allFinite())
        throw ValidationError("solve_linear: non-finite entries");

    const Eigen::PartialPivLU<Matrix> lu(a);
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    const double smallest = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(smallest > kPivotTolerance * scale)) {
        const double rc = smallest == 0.0 ? 0.0 : lu.rcond();
        std::ostringstream msg;
        msg << "singular matrix: smallest pivot " << smallest << " (reciprocal condition estimate "
            << rc << ")";
        throw SingularMatrixError(msg.str(), rc);
    }
    return lu.solve(b);
}

Vector least_squares(const Matrix& a, const Vector& b) {
    if (a.cols() == 0) throw ValidationError("least_squares: matrix has no columns");
    if (a.rows() < a.cols())
        throw RankDeficientError("least_squares: fewer rows than columns", a.rows(), a.cols());
    if (b.size() != a.rows())
        throw ValidationError("least_squares: right-hand side length does not match matrix");
    if (!a.allFinite() || !b.allFinite())
        throw ValidationError("least_squares: non-finite entries");

    Eigen::ColPivHouseholderQR<Matrix> qr(a);
    qr.setThreshold(kRankTolerance);
    if (qr.rank() < a.cols()) {
        std::ostringstream msg;
        msg << "least_squares: rank " << qr.rank() << " < " << a.cols() << " columns";
        throw RankDeficientError(msg.str(), qr.rank(), a.cols());
    }
    return qr.solve(b);
}

LeastSquaresFit least_squares_or_ridge(const Matrix& a, const Vector& b, double ridge) {
    try {
        return {least_squares(a, b), false};
    } catch (const RankDeficientError&) {
        Matrix normal = a.transpose() * a;
        normal.diagonal().array() += ridge;
        return {normal.ldlt().solve(a.transpose() * b), true};
    }
}

Vector finite_diff_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                            double h) {
    if (!(h > 0.0)) throw ValidationError("finite_diff_gradient: step must be positive");
    Vector g(x.size());
    Vector probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + h;
        const double up = f(probe);
        probe[i] = x[i] - h;
        const double down = f(probe);
        probe[i] = x[i];
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

std::vector<std::size_t> farthest_point_indices(const Matrix& x, std::size_t k, std::size_t first) {
    const auto n = static_cast<std::size_t>(x.rows());
    if (k == 0 || k > n) throw ValidationError("farthest_point_indices: need 1 <= k <= rows");
    if (first >= n) throw ValidationError("farthest_point_indices: start index out of range");

    std::vector<std::size_t> chosen{first};
    Vector nearest(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        nearest[i] = (x.row(i) - x.row(static_cast<Eigen::Index>(first))).squaredNorm();
    while (chosen.size() < k) {
        Eigen::Index far = 0;
        nearest.maxCoeff(&far);
        const auto pick = static_cast<std::size_t>(far);
        if (nearest[far] == 0.0) {
            // Only duplicates left: take the lowest unused index.
            std::size_t i = 0;
            while (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) ++i;
            chosen.push_back(i);
            nearest[static_cast<Eigen::Index>(i)] = -1.0;
            continue;
        }
        chosen.push_back(pick);
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            nearest[i] = std::min(nearest[i], (x.row(i) - x.row(far)).squaredNorm());
    }
    return chosen;
}

} // namespace pvt
