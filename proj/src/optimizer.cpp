#include "feedsim/optimizer.hpp"

#include "feedsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace feedsim {

bool Box::contains(const Eigen::VectorXd& x) const {
    return x.size() == lo.size() && (x.array() >= lo.array()).all() &&
           (x.array() <= hi.array()).all();
}

Box Box::from(const GainBounds& b) { return Box{b.lo, b.hi}; }

Box Box::cube(Eigen::Index dim, double lo, double hi) {
    return Box{Eigen::VectorXd::Constant(dim, lo), Eigen::VectorXd::Constant(dim, hi)};
}

void validate(const Box& box) {
    if (box.lo.size() == 0 || box.lo.size() != box.hi.size()) {
        throw std::invalid_argument("search box needs matching, non-empty lo/hi");
    }
    if (!box.lo.allFinite() || !box.hi.allFinite()) {
        throw std::invalid_argument("search box must be finite");
    }
    if ((box.lo.array() > box.hi.array()).any()) {
        throw std::invalid_argument("search box has lo > hi");
    }
}

double map_into(double x, double lo, double hi) {
    if (x >= lo && x <= hi) return x;
    const double range = hi - lo;
    if (range <= 0.0 || !std::isfinite(x)) return lo;
    // The sum can round one ulp past hi.
    return std::min(hi, lo + std::fmod(std::abs(x - lo), range));
}

Eigen::VectorXd map_into(const Eigen::VectorXd& x, const Box& box) {
    Eigen::VectorXd y(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) y(k) = map_into(x(k), box.lo(k), box.hi(k));
    return y;
}

void validate(const FwaConfig& c) {
    if (c.generations < 1) throw std::invalid_argument("fwa generations must be >= 1");
    if (c.n_fireworks < 2) throw std::invalid_argument("fwa n_fireworks must be >= 2");
    if (c.total_sparks < c.n_fireworks) {
        throw std::invalid_argument("fwa total_sparks must be >= n_fireworks");
    }
    if (c.gauss_sparks < 0) throw std::invalid_argument("fwa gauss_sparks must be >= 0");
    if (!(c.amplitude_max > 0.0)) throw std::invalid_argument("fwa amplitude_max must be > 0");
    if (!(c.spark_floor_frac > 0.0 && c.spark_floor_frac < c.spark_ceil_frac &&
          c.spark_ceil_frac <= 1.0)) {
        throw std::invalid_argument("fwa spark fractions need 0 < floor < ceil <= 1");
    }
    if (!(c.epsilon > 0.0)) throw std::invalid_argument("fwa epsilon must be > 0");
}

void validate(const GaConfig& c) {
    if (c.generations < 1) throw std::invalid_argument("ga generations must be >= 1");
    if (c.population < 2 || c.population % 2 != 0) {
        throw std::invalid_argument("ga population must be even and >= 2");
    }
    if (c.gene_length_bits < 1 || c.gene_length_bits > 52) {
        throw std::invalid_argument("ga gene_length_bits must be in [1, 52]");
    }
    if (!(c.crossover_rate >= 0.0 && c.crossover_rate <= 1.0)) {
        throw std::invalid_argument("ga crossover_rate must be in [0, 1]");
    }
    if (!(c.mutation_rate >= 0.0 && c.mutation_rate <= 1.0)) {
        throw std::invalid_argument("ga mutation_rate must be in [0, 1]");
    }
}

std::vector<double> BatchEvaluator::operator()(const Objective& f,
                                               const std::vector<Eigen::VectorXd>& xs) const {
    std::vector<double> out(xs.size());
    const std::size_t requested = jobs > 0 ? static_cast<std::size_t>(jobs) : 1;
    const std::size_t workers = std::min(requested, std::max<std::size_t>(xs.size(), 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < xs.size(); ++i) out[i] = f(xs[i]);
        return out;
    }
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < xs.size(); i += workers) out[i] = f(xs[i]);
            });
        }
    }
    return out;
}

namespace {

// Picks between 1 and d distinct coordinates.
std::vector<Eigen::Index> random_dims(Rng& rng, Eigen::Index d) {
    std::vector<Eigen::Index> dims(static_cast<std::size_t>(d));
    std::iota(dims.begin(), dims.end(), Eigen::Index{0});
    const std::size_t z = 1 + rng.index(dims.size());
    for (std::size_t i = 0; i < z; ++i) {
        const std::size_t j = i + rng.index(dims.size() - i);
        std::swap(dims[i], dims[j]);
    }
    dims.resize(z);
    return dims;
}

std::size_t argmin(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

OptResult fwa_minimize(const Objective& f, const Box& box, const FwaConfig& cfg,
                       const BatchEvaluator& eval) {
    validate(box);
    validate(cfg);

    Rng rng(cfg.seed);
    const Eigen::Index d = box.dim();
    const Eigen::VectorXd range = box.hi - box.lo;
    const double range_max = range.maxCoeff();
    const Eigen::VectorXd amp_scale =
        range_max > 0.0 ? Eigen::VectorXd(range / range_max) : Eigen::VectorXd::Zero(d);
    const auto n = static_cast<std::size_t>(cfg.n_fireworks);

    std::vector<Eigen::VectorXd> fireworks(n);
    for (auto& x : fireworks) {
        x.resize(d);
        for (Eigen::Index k = 0; k < d; ++k) x(k) = rng.uniform(box.lo(k), box.hi(k));
    }
    std::vector<double> fitness = eval(f, fireworks);

    OptResult res;
    res.seed = cfg.seed;
    res.evaluations = n;
    {
        const auto b = argmin(fitness);
        res.best = fireworks[b];
        res.best_W = fitness[b];
    }

    const auto min_sparks = static_cast<double>(std::llround(cfg.spark_floor_frac * cfg.total_sparks));
    const auto max_sparks = static_cast<double>(std::llround(cfg.spark_ceil_frac * cfg.total_sparks));

    for (int gen = 0; gen < cfg.generations; ++gen) {
        const double worst = *std::max_element(fitness.begin(), fitness.end());
        const double best = *std::min_element(fitness.begin(), fitness.end());
        double count_norm = 0.0;
        double amp_norm = 0.0;
        for (double fi : fitness) {
            count_norm += worst - fi + cfg.epsilon;
            amp_norm += fi - best + cfg.epsilon;
        }

        std::vector<Eigen::VectorXd> sparks;
        for (std::size_t i = 0; i < n; ++i) {
            double s = cfg.total_sparks * (worst - fitness[i] + cfg.epsilon) / count_norm;
            s = std::clamp(s, min_sparks, max_sparks);
            const auto count = std::llround(s);
            const double amplitude = cfg.amplitude_max * (fitness[i] - best + cfg.epsilon) / amp_norm;
            for (long long j = 0; j < count; ++j) {
                Eigen::VectorXd x = fireworks[i];
                const auto dims = random_dims(rng, d);
                const double h = amplitude * rng.uniform(-1.0, 1.0);
                for (auto k : dims) x(k) += h * amp_scale(k);
                sparks.push_back(map_into(x, box));
            }
        }
        for (int j = 0; j < cfg.gauss_sparks; ++j) {
            const std::size_t i = rng.index(n);
            const double g = rng.normal(1.0, 1.0);
            Eigen::VectorXd x = fireworks[i];
            for (auto k : random_dims(rng, d)) x(k) *= g;
            sparks.push_back(map_into(x, box));
        }

        const std::vector<double> spark_fitness = eval(f, sparks);
        res.evaluations += sparks.size();

        std::vector<Eigen::VectorXd> pool = std::move(fireworks);
        std::vector<double> pool_fitness = std::move(fitness);
        pool.insert(pool.end(), sparks.begin(), sparks.end());
        pool_fitness.insert(pool_fitness.end(), spark_fitness.begin(), spark_fitness.end());

        const std::size_t elite = argmin(pool_fitness);
        if (pool_fitness[elite] < res.best_W) {
            res.best_W = pool_fitness[elite];
            res.best = pool[elite];
        }

        std::vector<std::size_t> chosen{elite};
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (i != elite) rest.push_back(i);
        }
        if (cfg.selection == FwaSelection::kEliteRandom) {
            for (std::size_t s = 0; s + 1 < n; ++s) {
                const std::size_t j = s + rng.index(rest.size() - s);
                std::swap(rest[s], rest[j]);
                chosen.push_back(rest[s]);
            }
        } else {
            // Roulette on the summed distance to every other candidate.
            std::vector<double> weight(rest.size(), 0.0);
            for (std::size_t a = 0; a < rest.size(); ++a) {
                for (std::size_t b = 0; b < pool.size(); ++b) {
                    weight[a] += ((pool[rest[a]] - pool[b]).array() / range.array().max(1e-300))
                                     .matrix()
                                     .norm();
                }
            }
            const double total = std::accumulate(weight.begin(), weight.end(), 0.0);
            for (std::size_t s = 0; s + 1 < n; ++s) {
                std::size_t pick = rest.size() - 1;
                if (total > 0.0) {
                    double r = rng.uniform() * total;
                    for (std::size_t a = 0; a < rest.size(); ++a) {
                        r -= weight[a];
                        if (r < 0.0) {
                            pick = a;
                            break;
                        }
                    }
                } else {
                    pick = rng.index(rest.size());
                }
                chosen.push_back(rest[pick]);
            }
        }

        fireworks.clear();
        fitness.clear();
        for (auto i : chosen) {
            fireworks.push_back(pool[i]);
            fitness.push_back(pool_fitness[i]);
        }
        res.history.push_back(res.best_W);
    }
    return res;
}

Eigen::VectorXd decode(const std::vector<std::uint8_t>& chromosome, const Box& box, int bits) {
    const Eigen::Index d = box.dim();
    if (chromosome.size() != static_cast<std::size_t>(d * bits)) {
        throw std::invalid_argument("chromosome length does not match box dimension");
    }
    const double levels = std::ldexp(1.0, bits) - 1.0;
    Eigen::VectorXd x(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        double v = 0.0;
        for (int b = 0; b < bits; ++b) v = 2.0 * v + chromosome[static_cast<std::size_t>(k * bits + b)];
        x(k) = std::min(box.hi(k), box.lo(k) + (box.hi(k) - box.lo(k)) * v / levels);
    }
    return x;
}

OptResult ga_minimize(const Objective& f, const Box& box, const GaConfig& cfg,
                      const BatchEvaluator& eval) {
    validate(box);
    validate(cfg);

    Rng rng(cfg.seed);
    const auto pop = static_cast<std::size_t>(cfg.population);
    const std::size_t length = static_cast<std::size_t>(box.dim()) * cfg.gene_length_bits;

    using Chromosome = std::vector<std::uint8_t>;
    std::vector<Chromosome> population(pop, Chromosome(length));
    for (auto& c : population) {
        for (auto& bit : c) bit = rng.uniform() < 0.5 ? 1 : 0;
    }
    const auto decode_all = [&](const std::vector<Chromosome>& cs, std::size_t from) {
        std::vector<Eigen::VectorXd> xs;
        for (std::size_t i = from; i < cs.size(); ++i) xs.push_back(decode(cs[i], box, cfg.gene_length_bits));
        return xs;
    };
    std::vector<double> fitness = eval(f, decode_all(population, 0));

    OptResult res;
    res.seed = cfg.seed;
    res.evaluations = pop;
    {
        const auto b = argmin(fitness);
        res.best = decode(population[b], box, cfg.gene_length_bits);
        res.best_W = fitness[b];
    }

    for (int gen = 0; gen < cfg.generations; ++gen) {
        // Rank weights: best gets pop, worst gets 1. Stable sort keeps ties in index order.
        std::vector<std::size_t> order(pop);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fitness[a] < fitness[b]; });
        std::vector<double> weight(pop);
        for (std::size_t r = 0; r < pop; ++r) weight[order[r]] = static_cast<double>(pop - r);
        const double total = static_cast<double>(pop * (pop + 1) / 2);
        const auto spin = [&] {
            double r = rng.uniform() * total;
            for (std::size_t i = 0; i < pop; ++i) {
                r -= weight[i];
                if (r < 0.0) return i;
            }
            return pop - 1;
        };

        std::vector<Chromosome> next{population[order.front()]};
        while (next.size() < pop) {
            Chromosome a = population[spin()];
            Chromosome b = population[spin()];
            if (rng.uniform() < cfg.crossover_rate) {
                const std::size_t cut = 1 + rng.index(length - 1 > 0 ? length - 1 : 1);
                for (std::size_t k = cut; k < length; ++k) std::swap(a[k], b[k]);
            }
            for (auto* child : {&a, &b}) {
                for (auto& bit : *child) {
                    if (rng.uniform() < cfg.mutation_rate) bit ^= 1;
                }
            }
            next.push_back(std::move(a));
            if (next.size() < pop) next.push_back(std::move(b));
        }

        const std::vector<double> child_fitness = eval(f, decode_all(next, 1));
        res.evaluations += child_fitness.size();
        fitness.assign(1, fitness[order.front()]);
        fitness.insert(fitness.end(), child_fitness.begin(), child_fitness.end());
        population = std::move(next);

        const auto b = argmin(fitness);
        if (fitness[b] < res.best_W) {
            res.best_W = fitness[b];
            res.best = decode(population[b], box, cfg.gene_length_bits);
        }
        res.history.push_back(res.best_W);
    }
    return res;
}

StabilityReport summarize_spread(std::vector<double> values) {
    StabilityReport rep;
    rep.best_W = std::move(values);
    if (rep.best_W.empty()) return rep;
    const auto [lo, hi] = std::minmax_element(rep.best_W.begin(), rep.best_W.end());
    rep.spread = *hi - *lo;
    const double mean =
        std::accumulate(rep.best_W.begin(), rep.best_W.end(), 0.0) / static_cast<double>(rep.best_W.size());
    rep.relative_spread = mean != 0.0 ? rep.spread / std::abs(mean) : 0.0;
    return rep;
}

StabilityReport stability_trial(const Objective& f, const Box& box, const AlgoConfig& algo,
                                int repeats, std::uint64_t master_seed,
                                const BatchEvaluator& eval) {
    if (repeats < 2) throw std::invalid_argument("stability trial needs at least 2 repeats");
    std::vector<OptResult> runs;
    std::vector<double> values;
    for (int i = 0; i < repeats; ++i) {
        const std::uint64_t seed = master_seed + static_cast<std::uint64_t>(i);
        OptResult r = std::visit(
            [&](auto cfg) {
                cfg.seed = seed;
                if constexpr (std::is_same_v<decltype(cfg), FwaConfig>) {
                    return fwa_minimize(f, box, cfg, eval);
                } else {
                    return ga_minimize(f, box, cfg, eval);
                }
            },
            algo);
        values.push_back(r.best_W);
        runs.push_back(std::move(r));
    }
    StabilityReport rep = summarize_spread(std::move(values));
    rep.runs = std::move(runs);
    return rep;
}

}  // namespace feedsim
