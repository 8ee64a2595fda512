#pragma once

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "eael/builders.hpp"

namespace eael {

enum class SimInit { AllZeros, UniformRandom, FixedBitstring };

/// A complete, reproducible description of one Monte Carlo experiment.
struct SimConfig {
    ProblemSpec spec;
    long runs = 0;
    int t_max = 0;
    std::uint64_t seed = 0;
    SimInit init = SimInit::AllZeros;
    std::uint64_t fixed_bits = 0;  // used when init == FixedBitstring
};

/// Per-generation sample mean of the error and its standard error.
struct EmpiricalTrajectory {
    Vec mean_error;
    Vec std_error;
    long runs = 0;
};

namespace detail {

// SplitMix64: tiny, statistically solid, and trivially splittable. Each
// run gets its own stream keyed by (seed, run index) so results do not
// depend on which thread handles which run.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t s) : state(s) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    double u01() { return (next() >> 11) * 0x1.0p-53; }
};

inline SplitMix64 run_stream(std::uint64_t seed, long run_index) {
    SplitMix64 mixer(seed ^ (0xA0761D6478BD642FULL * static_cast<std::uint64_t>(run_index + 1)));
    mixer.next();
    return SplitMix64(mixer.next());
}

// Mergeable running mean/variance (Chan et al. update). Merging in a fixed
// chunk order keeps results bit-identical however many threads ran.
struct Accumulator {
    long count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void push(double x) {
        ++count;
        const double d = x - mean;
        mean += d / count;
        m2 += d * (x - mean);
    }
    void merge(const Accumulator& o) {
        if (o.count == 0) return;
        if (count == 0) { *this = o; return; }
        const double d = o.mean - mean;
        const long n = count + o.count;
        mean += d * o.count / n;
        m2 += o.m2 + d * d * (static_cast<double>(count) * o.count / n);
        count = n;
    }
    double std_error() const {
        if (count < 2) return 0.0;
        return std::sqrt(m2 / (count - 1)) / std::sqrt(static_cast<double>(count));
    }
};

struct BitInstance {
    Problem problem;
    Algo algo;
    int n;
    std::function<double(int)> mono_f;
    std::uint64_t mask;     // low n bits
    std::uint64_t optimum;  // absorbing string

    double fitness(std::uint64_t x) const {
        switch (problem) {
            case Problem::OneMax: return static_cast<double>(std::popcount(x));
            case Problem::Needle: return x == 0 ? 1.0 : 0.0;
            case Problem::LeadingOnes: {
                const int ones = std::countr_one(x);
                return static_cast<double>(std::min(ones, n));
            }
            case Problem::Mono: return mono_f(std::popcount(x));
        }
        return 0.0;
    }
    double optimal_fitness() const { return fitness(optimum); }
};

inline BitInstance make_instance(const ProblemSpec& s) {
    if (s.n < 1 || s.n > 64)
        throw std::invalid_argument("simulate: n must be in 1..64");
    if (s.problem == Problem::Mono) {
        if (!s.mono_f) throw std::invalid_argument("simulate: mono problem needs mono_f");
        for (int k = 0; k < s.n; ++k)
            if (!(s.mono_f(k) < s.mono_f(k + 1)))
                throw std::invalid_argument("simulate: mono_f not strictly increasing");
    }
    BitInstance inst;
    inst.problem = s.problem;
    inst.algo = s.algo;
    inst.n = s.n;
    inst.mono_f = s.mono_f;
    inst.mask = (s.n == 64) ? ~0ULL : ((1ULL << s.n) - 1);
    inst.optimum = (s.problem == Problem::Needle) ? 0ULL : inst.mask;
    return inst;
}

inline std::uint64_t draw_initial(const BitInstance& inst, const SimConfig& cfg, SplitMix64& rng) {
    switch (cfg.init) {
        case SimInit::AllZeros: return 0ULL;
        case SimInit::UniformRandom: return rng.next() & inst.mask;
        case SimInit::FixedBitstring: return cfg.fixed_bits & inst.mask;
    }
    return 0ULL;
}

inline std::uint64_t mutate(const BitInstance& inst, std::uint64_t x, SplitMix64& rng) {
    if (inst.algo == Algo::OBSE) {
        const int idx = static_cast<int>(rng.u01() * inst.n);
        return x ^ (1ULL << std::min(idx, inst.n - 1));
    }
    // bitwise mutation: each position flips independently with rate 1/n
    std::uint64_t flip = 0;
    const double rate = 1.0 / inst.n;
    for (int b = 0; b < inst.n; ++b)
        if (rng.u01() < rate) flip |= 1ULL << b;
    return x ^ flip;
}

inline int thread_budget(long chunks) {
    unsigned want = std::thread::hardware_concurrency();
    if (want == 0) want = 1;
    // The env var overrides in both directions so results can be checked
    // for scheduling independence even on a single-core host.
    if (const char* env = std::getenv("EA_ERROR_LAB_THREADS")) {
        char* end = nullptr;
        const long req = std::strtol(env, &end, 10);
        if (end != env && req >= 1 && req <= 1024) want = static_cast<unsigned>(req);
    }
    return static_cast<int>(std::min<long>(want, std::max<long>(chunks, 1)));
}

} // namespace detail

/// Runs the configured experiment and averages the error per generation.
/// Every run draws from its own (seed, run-index) stream and runs are
/// gathered in fixed-size chunks merged in order, so the output is
/// bit-identical no matter how the chunks were scheduled or how many
/// worker threads the environment allows (EA_ERROR_LAB_THREADS caps them).
inline EmpiricalTrajectory simulate(const SimConfig& cfg) {
    if (cfg.runs < 1) throw std::invalid_argument("simulate: runs must be >= 1");
    if (cfg.t_max < 0) throw std::invalid_argument("simulate: t_max must be >= 0");
    const detail::BitInstance inst = detail::make_instance(cfg.spec);
    const double f_opt = inst.optimal_fitness();

    constexpr long kChunk = 1024;
    const long n_chunks = (cfg.runs + kChunk - 1) / kChunk;
    std::vector<std::vector<detail::Accumulator>> chunk_acc(
        n_chunks, std::vector<detail::Accumulator>(cfg.t_max + 1));

    std::atomic<long> next_chunk{0};
    auto worker = [&]() {
        for (;;) {
            const long c = next_chunk.fetch_add(1);
            if (c >= n_chunks) return;
            auto& acc = chunk_acc[c];
            const long lo = c * kChunk;
            const long hi = std::min(cfg.runs, lo + kChunk);
            for (long run = lo; run < hi; ++run) {
                detail::SplitMix64 rng = detail::run_stream(cfg.seed, run);
                std::uint64_t x = detail::draw_initial(inst, cfg, rng);
                double fx = inst.fitness(x);
                bool done = (x == inst.optimum);
                acc[0].push(f_opt - fx);
                for (int t = 1; t <= cfg.t_max; ++t) {
                    if (!done) {
                        const std::uint64_t y = detail::mutate(inst, x, rng);
                        const double fy = inst.fitness(y);
                        const bool accept = (inst.algo == Algo::BWNE) ? (fy >= fx) : (fy > fx);
                        if (accept) { x = y; fx = fy; done = (x == inst.optimum); }
                    }
                    acc[t].push(f_opt - fx);
                }
            }
        }
    };

    const int n_threads = detail::thread_budget(n_chunks);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    EmpiricalTrajectory out;
    out.runs = cfg.runs;
    out.mean_error.resize(cfg.t_max + 1);
    out.std_error.resize(cfg.t_max + 1);
    for (int t = 0; t <= cfg.t_max; ++t) {
        detail::Accumulator total;
        for (long c = 0; c < n_chunks; ++c) total.merge(chunk_acc[c][t]);
        out.mean_error[t] = total.mean;
        out.std_error[t] = total.std_error();
    }
    return out;
}

enum class CompareMode { Exact, Bound };

struct ComparisonEntry {
    int t = 0;
    double reference = 0.0;
    double mean = 0.0;
    double std_error = 0.0;
    double z = 0.0;       // signed deviation in standard errors (inf if se == 0)
    bool flagged = false;
};

struct ComparisonReport {
    std::vector<ComparisonEntry> entries;
    double max_abs_z = 0.0;
    bool any_flag = false;
};

/// Flags sampled generations where the empirical mean is incompatible with
/// the reference: beyond four standard errors either way of an exact value,
/// or more than four standard errors above an upper bound.
inline ComparisonReport compare_trajectories(const Vec& reference, const EmpiricalTrajectory& emp,
                                             const std::vector<int>& sample_ts, CompareMode mode) {
    ComparisonReport rep;
    for (int t : sample_ts) {
        if (t < 0 || t >= static_cast<int>(reference.size()) ||
            t >= static_cast<int>(emp.mean_error.size()))
            throw std::invalid_argument("compare: sampled t=" + std::to_string(t) +
                                        " outside both trajectories");
        ComparisonEntry en;
        en.t = t;
        en.reference = reference[t];
        en.mean = emp.mean_error[t];
        en.std_error = emp.std_error[t];
        const double diff = en.mean - en.reference;
        en.z = (en.std_error > 0.0)
                   ? diff / en.std_error
                   : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
        en.flagged = (mode == CompareMode::Exact) ? std::abs(diff) > 4.0 * en.std_error
                                                  : diff > 4.0 * en.std_error;
        rep.max_abs_z = std::max(rep.max_abs_z, std::abs(en.z));
        rep.any_flag = rep.any_flag || en.flagged;
        rep.entries.push_back(en);
    }
    return rep;
}

} // namespace eael
