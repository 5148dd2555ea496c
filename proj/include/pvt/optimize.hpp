#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "pvt/linalg.hpp"

namespace pvt {

/// Cost to minimize. Must be pure: population optimizers may evaluate
/// candidates in any order.
using Objective = std::function<double(const Vector&)>;

/// Axis-aligned search box.
struct Box {
    Vector low;
    Vector high;

    Box() = default;
    Box(Vector lo, Vector hi) : low(std::move(lo)), high(std::move(hi)) {}
    static Box uniform(std::size_t dim, double lo, double hi);

    Eigen::Index dim() const { return low.size(); }
    bool contains(const Vector& x) const;
    Vector clamp(const Vector& x) const;
    /// Throws ValidationError unless low < high in every coordinate.
    void validate() const;
};

enum class OptimizerKind { Ga, Pso };

/// Real-coded genetic algorithm: tournament selection, blend (BLX-α)
/// crossover, Gaussian mutation and elitism.
struct GaConfig {
    std::size_t population = 100;
    std::size_t iterations = 1000;
    Box bounds;
    double crossover_rate = 0.9;
    double mutation_rate = 0.1;  // per gene
    double mutation_sd = 0.1;    // fraction of each gene's range
    std::size_t tournament_size = 3;
    double blend_alpha = 0.5;
    std::size_t elites = 1;
    std::uint64_t seed = 0;
};

/// Global-best particle swarm with inertia weight. Velocities start at zero.
struct PsoConfig {
    std::size_t population = 50;
    std::size_t iterations = 1000;
    double c1 = 1.0;  // cognitive
    double c2 = 2.0;  // social
    double inertia = 0.729;
    Box bounds;
    std::uint64_t seed = 0;
    /// Optional starting positions for the first particles; the rest are drawn
    /// uniformly in the box.
    std::vector<Vector> initial_positions;
};

struct OptimResult {
    Vector best_point;
    double best_cost = 0.0;
    /// Best cost after each iteration; length equals the iteration count.
    std::vector<double> history;
    /// Evaluations whose cost was non-finite and were discarded.
    std::size_t discarded = 0;
};

/// Throws NumericalError when every initial candidate has a non-finite cost.
OptimResult ga_minimize(const Objective& f, const GaConfig& cfg);
OptimResult pso_minimize(const Objective& f, const PsoConfig& cfg);

void write_history_csv(std::ostream& out, const std::vector<double>& history);

// Levenberg-Marquardt --------------------------------------------------------

struct LmConfig {
    std::size_t max_iterations = 100;
    double lambda_init = 1e-3;
    double lambda_up = 10.0;
    double lambda_down = 0.1;
    /// Stop once an accepted step lowers the cost by no more than this.
    double tolerance = 1e-10;
    void validate() const;
};

enum class LmStatus { Converged, MaxIterations, Stalled, Stopped };
std::string_view to_string(LmStatus s);

struct LmResult {
    Vector params;
    LmStatus status = LmStatus::MaxIterations;
    /// Sum of squared residuals at the initial point and after every accepted
    /// step; non-increasing.
    std::vector<double> cost_history;
    std::size_t iterations = 0;
    std::size_t accepted_steps = 0;
};

using ResidualFn = std::function<Vector(const Vector&)>;
using JacobianFn = std::function<Matrix(const Vector&)>;
/// Called after every accepted step; returning true ends the fit with
/// LmStatus::Stopped.
using LmMonitor = std::function<bool(const Vector& params)>;

/// Minimizes ||r(p)||² with damped Gauss-Newton steps (JᵀJ + λI)δ = -Jᵀr.
/// Throws NumericalError when the residual at `init` is non-finite.
LmResult lm_fit(const ResidualFn& residual, const JacobianFn& jacobian, const Vector& init,
                const LmConfig& cfg, const LmMonitor& monitor = {});

} // namespace pvt
