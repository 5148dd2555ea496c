#include "pvt/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "pvt/error.hpp"
#include "pvt/random.hpp"

namespace pvt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double checked_cost(const Objective& f, const Vector& x, std::size_t& discarded) {
    const double c = f(x);
    if (std::isfinite(c)) return c;
    ++discarded;
    return kInf;
}

RandomStream candidate_stream(std::uint64_t seed, std::size_t generation, std::size_t candidate) {
    return RandomStream(seed, derive_stream(generation, candidate));
}

} // namespace

// Box -------------------------------------------------------------------------

Box Box::uniform(std::size_t dim, double lo, double hi) {
    const auto d = static_cast<Eigen::Index>(dim);
    return Box(Vector::Constant(d, lo), Vector::Constant(d, hi));
}

bool Box::contains(const Vector& x) const {
    return x.size() == low.size() && (x.array() >= low.array()).all() &&
           (x.array() <= high.array()).all();
}

Vector Box::clamp(const Vector& x) const {
    return x.cwiseMax(low).cwiseMin(high);
}

void Box::validate() const {
    if (low.size() == 0 || low.size() != high.size())
        throw ValidationError("bounds must be non-empty with matching low/high sizes");
    if (!low.allFinite() || !high.allFinite()) throw ValidationError("bounds must be finite");
    if (!(low.array() < high.array()).all()) throw ValidationError("bounds need low < high for every gene");
}

// GA --------------------------------------------------------------------------

OptimResult ga_minimize(const Objective& f, const GaConfig& cfg) {
    cfg.bounds.validate();
    if (cfg.population < 2) throw ValidationError("GA population must be at least 2");
    if (cfg.tournament_size < 1) throw ValidationError("GA tournament size must be at least 1");
    if (cfg.elites >= cfg.population) throw ValidationError("GA elites must be fewer than the population");

    const Eigen::Index dim = cfg.bounds.dim();
    const Vector range = cfg.bounds.high - cfg.bounds.low;
    const std::size_t pop = cfg.population;

    OptimResult out;
    std::vector<Vector> genomes(pop);
    std::vector<double> costs(pop);
    for (std::size_t i = 0; i < pop; ++i) {
        auto rng = candidate_stream(cfg.seed, 0, i);
        Vector g(dim);
        for (Eigen::Index j = 0; j < dim; ++j) g[j] = rng.uniform(cfg.bounds.low[j], cfg.bounds.high[j]);
        genomes[i] = g;
        costs[i] = checked_cost(f, g, out.discarded);
    }
    if (std::none_of(costs.begin(), costs.end(), [](double c) { return std::isfinite(c); }))
        throw NumericalError("GA: every initial candidate has a non-finite cost");

    auto best_it = std::min_element(costs.begin(), costs.end());
    out.best_cost = *best_it;
    out.best_point = genomes[static_cast<std::size_t>(best_it - costs.begin())];
    out.history.reserve(cfg.iterations);

    std::vector<std::size_t> order(pop);
    for (std::size_t gen = 1; gen <= cfg.iterations; ++gen) {
        for (std::size_t i = 0; i < pop; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });

        std::vector<Vector> next(pop);
        std::vector<double> next_costs(pop);
        for (std::size_t e = 0; e < cfg.elites; ++e) {
            next[e] = genomes[order[e]];
            next_costs[e] = costs[order[e]];
        }
        for (std::size_t i = cfg.elites; i < pop; ++i) {
            auto rng = candidate_stream(cfg.seed, gen, i);
            auto tournament = [&] {
                std::size_t winner = static_cast<std::size_t>(rng.index(pop));
                for (std::size_t t = 1; t < cfg.tournament_size; ++t) {
                    const auto c = static_cast<std::size_t>(rng.index(pop));
                    if (costs[c] < costs[winner]) winner = c;
                }
                return winner;
            };
            const Vector& a = genomes[tournament()];
            const Vector& b = genomes[tournament()];

            Vector child = a;
            if (rng.uniform() < cfg.crossover_rate) {
                for (Eigen::Index j = 0; j < dim; ++j) {
                    const double lo = std::min(a[j], b[j]);
                    const double hi = std::max(a[j], b[j]);
                    const double spread = cfg.blend_alpha * (hi - lo);
                    child[j] = rng.uniform(lo - spread, hi + spread);
                }
            }
            for (Eigen::Index j = 0; j < dim; ++j)
                if (rng.uniform() < cfg.mutation_rate) child[j] += rng.normal(0.0, cfg.mutation_sd * range[j]);
            child = cfg.bounds.clamp(child);

            next_costs[i] = checked_cost(f, child, out.discarded);
            next[i] = std::move(child);
        }
        genomes = std::move(next);
        costs = std::move(next_costs);

        for (std::size_t i = 0; i < pop; ++i) {
            if (costs[i] < out.best_cost) {
                out.best_cost = costs[i];
                out.best_point = genomes[i];
            }
        }
        out.history.push_back(out.best_cost);
    }
    return out;
}

// PSO -------------------------------------------------------------------------

OptimResult pso_minimize(const Objective& f, const PsoConfig& cfg) {
    cfg.bounds.validate();
    if (cfg.population < 2) throw ValidationError("PSO population must be at least 2");
    if (cfg.c1 < 0.0 || cfg.c2 < 0.0) throw ValidationError("PSO acceleration coefficients must be >= 0");
    if (cfg.initial_positions.size() > cfg.population)
        throw ValidationError("more PSO initial positions than particles");

    const Eigen::Index dim = cfg.bounds.dim();
    const Vector range = cfg.bounds.high - cfg.bounds.low;
    const std::size_t pop = cfg.population;

    OptimResult out;
    std::vector<Vector> pos(pop), vel(pop, Vector::Zero(dim)), pbest(pop);
    std::vector<double> pbest_cost(pop);
    for (std::size_t i = 0; i < pop; ++i) {
        if (i < cfg.initial_positions.size()) {
            if (cfg.initial_positions[i].size() != dim)
                throw ValidationError("PSO initial position has the wrong dimension");
            pos[i] = cfg.bounds.clamp(cfg.initial_positions[i]);
        } else {
            auto rng = candidate_stream(cfg.seed, 0, i);
            pos[i].resize(dim);
            for (Eigen::Index j = 0; j < dim; ++j) pos[i][j] = rng.uniform(cfg.bounds.low[j], cfg.bounds.high[j]);
        }
        pbest[i] = pos[i];
        pbest_cost[i] = checked_cost(f, pos[i], out.discarded);
    }
    if (std::none_of(pbest_cost.begin(), pbest_cost.end(), [](double c) { return std::isfinite(c); }))
        throw NumericalError("PSO: every initial particle has a non-finite cost");

    auto best_it = std::min_element(pbest_cost.begin(), pbest_cost.end());
    out.best_cost = *best_it;
    out.best_point = pbest[static_cast<std::size_t>(best_it - pbest_cost.begin())];
    out.history.reserve(cfg.iterations);

    for (std::size_t it = 1; it <= cfg.iterations; ++it) {
        // Synchronous update: every particle sees the swarm best from the
        // previous iteration.
        const Vector gbest = out.best_point;
        for (std::size_t i = 0; i < pop; ++i) {
            auto rng = candidate_stream(cfg.seed, it, i);
            for (Eigen::Index j = 0; j < dim; ++j) {
                const double r1 = rng.uniform();
                const double r2 = rng.uniform();
                double v = cfg.inertia * vel[i][j] + cfg.c1 * r1 * (pbest[i][j] - pos[i][j]) +
                           cfg.c2 * r2 * (gbest[j] - pos[i][j]);
                vel[i][j] = std::clamp(v, -range[j], range[j]);
            }
            pos[i] = cfg.bounds.clamp(pos[i] + vel[i]);
            const double c = checked_cost(f, pos[i], out.discarded);
            if (c < pbest_cost[i]) {
                pbest_cost[i] = c;
                pbest[i] = pos[i];
            }
        }
        for (std::size_t i = 0; i < pop; ++i) {
            if (pbest_cost[i] < out.best_cost) {
                out.best_cost = pbest_cost[i];
                out.best_point = pbest[i];
            }
        }
        out.history.push_back(out.best_cost);
    }
    return out;
}

void write_history_csv(std::ostream& out, const std::vector<double>& history) {
    const auto old = out.precision(17);
    out << "iteration,best_cost\n";
    for (std::size_t i = 0; i < history.size(); ++i) out << i + 1 << ',' << history[i] << '\n';
    out.precision(old);
}

// LM --------------------------------------------------------------------------

void LmConfig::validate() const {
    if (!(lambda_init > 0.0)) throw ValidationError("LM lambda_init must be positive");
    if (!(lambda_up > 1.0 && lambda_down > 0.0 && lambda_down < 1.0))
        throw ValidationError("LM requires lambda_up > 1 > lambda_down > 0");
    if (!(tolerance >= 0.0)) throw ValidationError("LM tolerance must be non-negative");
}

std::string_view to_string(LmStatus s) {
    switch (s) {
    case LmStatus::Converged: return "converged";
    case LmStatus::MaxIterations: return "max_iterations";
    case LmStatus::Stalled: return "stalled";
    case LmStatus::Stopped: return "stopped";
    }
    return "unknown";
}

LmResult lm_fit(const ResidualFn& residual, const JacobianFn& jacobian, const Vector& init,
                const LmConfig& cfg, const LmMonitor& monitor) {
    cfg.validate();
    constexpr double kLambdaCeiling = 1e16;

    LmResult out;
    out.params = init;
    Vector r = residual(init);
    if (!r.allFinite()) throw NumericalError("LM: non-finite residuals at the initial point");
    double cost = r.squaredNorm();
    out.cost_history.push_back(cost);

    if (cost == 0.0) {
        out.status = LmStatus::Converged;
        return out;
    }

    double lambda = cfg.lambda_init;
    Matrix j = jacobian(out.params);
    if (j.rows() != r.size() || j.cols() != init.size())
        throw ValidationError("LM: Jacobian dimensions do not match residuals and parameters");

    while (out.iterations < cfg.max_iterations) {
        const Vector grad = j.transpose() * r;
        if (!grad.allFinite()) throw NumericalError("LM: non-finite gradient");
        if (grad.cwiseAbs().maxCoeff() == 0.0) {
            // Stationary point: a zero gradient before any progress is a stall
            // unless the residual already vanished.
            out.status = out.accepted_steps == 0 ? LmStatus::Stalled : LmStatus::Converged;
            return out;
        }
        ++out.iterations;

        Matrix normal = j.transpose() * j;
        normal.diagonal().array() += lambda;
        const Vector step = normal.ldlt().solve(-grad);
        const Vector trial = out.params + step;
        const Vector r_trial = residual(trial);
        const double trial_cost = r_trial.allFinite() ? r_trial.squaredNorm()
                                                      : std::numeric_limits<double>::infinity();

        if (trial_cost <= cost) {
            const double decrease = cost - trial_cost;
            out.params = trial;
            r = r_trial;
            cost = trial_cost;
            out.cost_history.push_back(cost);
            ++out.accepted_steps;
            lambda = std::max(lambda * cfg.lambda_down, 1e-300);
            if (monitor && monitor(out.params)) {
                out.status = LmStatus::Stopped;
                return out;
            }
            if (decrease <= cfg.tolerance || cost == 0.0) {
                out.status = LmStatus::Converged;
                return out;
            }
            j = jacobian(out.params);
        } else {
            lambda *= cfg.lambda_up;
            if (lambda > kLambdaCeiling) {
                out.status = out.accepted_steps == 0 ? LmStatus::Stalled : LmStatus::Converged;
                return out;
            }
        }
    }
    out.status = LmStatus::MaxIterations;
    return out;
}

} // namespace pvt
