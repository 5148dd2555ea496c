#pragma once

// Shared helpers for the unit tests: seeded generators for property checks and
// small reference implementations written against std::vector, independent of
// the library's Eigen code paths.

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pvt/dataset.hpp"
#include "pvt/linalg.hpp"
#include "pvt/random.hpp"

namespace testing {

using pvt::Matrix;
using pvt::Vector;
using Rows = std::vector<std::vector<double>>;

/// Seeded value source for property checks.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed, 0x7E57) {}

    double real(double lo = -1.0, double hi = 1.0) { return rng_.uniform(lo, hi); }
    double normal() { return rng_.normal(); }
    std::size_t size(std::size_t lo, std::size_t hi) { return lo + rng_.index(hi - lo + 1); }

    Vector vector(std::size_t n, double lo = -1.0, double hi = 1.0) {
        Vector v(static_cast<Eigen::Index>(n));
        for (auto& x : v) x = real(lo, hi);
        return v;
    }
    Matrix matrix(std::size_t r, std::size_t c, double lo = -1.0, double hi = 1.0) {
        Matrix m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = real(lo, hi);
        return m;
    }
    pvt::Samples samples(std::size_t n, std::size_t dim) {
        return {matrix(n, dim), vector(n)};
    }

private:
    pvt::RandomStream rng_;
};

/// Runs `body` on `cases` generators derived from `seed`.
inline void for_all(std::size_t cases, std::uint64_t seed, const std::function<void(Gen&, std::size_t)>& body) {
    for (std::size_t i = 0; i < cases; ++i) {
        Gen g(pvt::derive_seed(seed, i));
        body(g, i);
    }
}

inline Rows rows_of(const Matrix& m) {
    Rows r(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
    return r;
}

inline std::vector<double> vec_of(const Vector& v) { return {v.data(), v.data() + v.size()}; }

// Reference implementations ----------------------------------------------------

/// Gauss-Jordan with partial pivoting on a copy.
inline std::vector<double> ref_solve(Rows a, std::vector<double> b) {
    const std::size_t n = a.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
        if (std::abs(a[p][c]) < 1e-300) throw std::runtime_error("reference solve: singular");
        std::swap(a[p], a[c]);
        std::swap(b[p], b[c]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
    return b;
}

inline Rows ref_transpose_times(const Rows& x) {
    const std::size_t n = x.size(), k = x.empty() ? 0 : x[0].size();
    Rows g(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t r = 0; r < n; ++r) g[i][j] += x[r][i] * x[r][j];
    return g;
}

/// Normal-equation least squares.
inline std::vector<double> ref_least_squares(const Rows& a, const std::vector<double>& b) {
    const std::size_t k = a[0].size();
    std::vector<double> rhs(k, 0.0);
    for (std::size_t r = 0; r < a.size(); ++r)
        for (std::size_t j = 0; j < k; ++j) rhs[j] += a[r][j] * b[r];
    return ref_solve(ref_transpose_times(a), rhs);
}

/// h_ii = x_iᵀ (XᵀX)⁻¹ x_i with the inverse applied column by column.
inline std::vector<double> ref_hat_diagonal(const Rows& x) {
    const Rows g = ref_transpose_times(x);
    std::vector<double> h;
    for (const auto& row : x) {
        const auto z = ref_solve(g, row);
        double s = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) s += row[j] * z[j];
        h.push_back(s);
    }
    return h;
}

inline double ref_sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

inline double ref_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(y.size());
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

inline pvt::RawRecord record(double inlet, double flow, double heat, double g, double sun, double eff) {
    pvt::RawRecord r;
    r.inlet_temp = inlet;
    r.flow_rate = flow;
    r.heat = heat;
    r.solar_radiation = g;
    r.sun_heat = sun;
    r.electrical_efficiency = eff;
    return r;
}

inline std::string temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("pvt_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

} // namespace testing
