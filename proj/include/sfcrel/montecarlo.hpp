#pragma once

// Seeded Monte-Carlo estimation of the success/overhead probabilities for
// instances beyond the oracle's enumeration bound. Per-trial randomness is
// derived counter-style from (master_seed, trial_index, component_index)
// through the SplitMix64 finalizer, so an estimate is a pure function of
// (instance, trials, master_seed): bit-identical no matter how trials are
// distributed over workers. Success counts aggregate as integers.
//
// Derivation, documented for reproducibility across implementations:
//   trial_seed(master, t)   = mix64(master + GOLDEN * (t + 1))
//   u(trial_seed, i)        = to_unit(mix64(trial_seed + GOLDEN * (i + 1)))
//   component i is up      <=> u < up_probability(i)
// with GOLDEN = 0x9E3779B97F4A7C15 and mix64 the SplitMix64 finalizer;
// to_unit keeps the top 53 bits as a double in [0, 1).

#include <cmath>
#include <cstdint>
#include <thread>
#include <utility>
#include <vector>

#include "sfcrel/model.hpp"
#include "sfcrel/oracle.hpp"

namespace sfcrel {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

inline std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
    return mix64(master_seed + kGolden * (trial_index + 1));
}

inline double to_unit(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// Samples every component of `layout` independently up with its class
/// probability. Identical (layout, rel, seed) always yields the identical
/// state. component_offset shifts the per-component stream; multi-layout
/// callers use it to keep their layouts on disjoint streams.
inline SystemState sample_state(const StateLayout& layout, const ReliabilityParams& rel,
                                std::uint64_t trial_seed_value, int component_offset = 0) {
    validate_reliability(rel);
    SystemState st = SystemState::all_down(layout);
    for (int i = 0; i < layout.bit_count(); ++i) {
        const double u = to_unit(
            mix64(trial_seed_value + kGolden * static_cast<std::uint64_t>(component_offset + i + 1)));
        st.up[static_cast<std::size_t>(i)] = u < layout.up_probability(i, rel);
    }
    return st;
}

/// Estimate of one probability with a 95% Wilson confidence interval.
struct TrialEstimate {
    double mean = 0.0;
    std::uint64_t trials = 0;
    double ci_low = 0.0;
    double ci_high = 1.0;
    std::uint64_t seed = 0;
};

/// 95% Wilson score interval; well behaved at success counts 0 and n.
inline std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials) {
    const double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double ph = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (ph + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct McOptions {
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 1;
    int workers = 1;
};

namespace detail {

struct TrialSpace {
    StateLayout layout;
    std::function<bool(const SystemState&, const ChainSpec&)> predicate;
};

/// Shared trial loop: a trial succeeds when every space's predicate holds
/// on that space's sampled state. Trials are split into contiguous worker
/// ranges; integer counts make the result order-insensitive.
inline TrialEstimate run_trials(const std::vector<TrialSpace>& spaces, const ChainSpec& spec,
                                const ReliabilityParams& rel, const McOptions& opts) {
    if (opts.trials < 1) throw SpecError("mc: trials must be >= 1");
    if (opts.workers < 1) throw SpecError("mc: workers must be >= 1");
    validate_reliability(rel);

    std::vector<int> offsets;
    int total_bits = 0;
    for (const auto& s : spaces) {
        offsets.push_back(total_bits);
        total_bits += s.layout.bit_count();
    }
    std::vector<double> probs(static_cast<std::size_t>(total_bits));
    for (std::size_t si = 0; si < spaces.size(); ++si)
        for (int i = 0; i < spaces[si].layout.bit_count(); ++i)
            probs[static_cast<std::size_t>(offsets[si] + i)] =
                spaces[si].layout.up_probability(i, rel);

    auto count_range = [&](std::uint64_t lo, std::uint64_t hi) -> std::uint64_t {
        std::vector<SystemState> states;
        states.reserve(spaces.size());
        for (const auto& s : spaces) states.push_back(SystemState::all_down(s.layout));
        std::uint64_t hits = 0;
        for (std::uint64_t t = lo; t < hi; ++t) {
            const std::uint64_t ts = trial_seed(opts.seed, t);
            bool ok = true;
            for (std::size_t si = 0; si < spaces.size() && ok; ++si) {
                SystemState& st = states[si];
                const int base = offsets[si];
                for (int i = 0; i < st.layout->bit_count(); ++i) {
                    const double u = to_unit(
                        mix64(ts + kGolden * static_cast<std::uint64_t>(base + i + 1)));
                    st.up[static_cast<std::size_t>(i)] =
                        u < probs[static_cast<std::size_t>(base + i)];
                }
                ok = spaces[si].predicate(st, spec);
            }
            hits += ok;
        }
        return hits;
    };

    const int workers = static_cast<int>(
        std::min<std::uint64_t>(static_cast<std::uint64_t>(opts.workers), opts.trials));
    std::uint64_t successes = 0;
    if (workers <= 1) {
        successes = count_range(0, opts.trials);
    } else {
        std::vector<std::uint64_t> counts(static_cast<std::size_t>(workers), 0);
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            const std::uint64_t lo = opts.trials * static_cast<std::uint64_t>(w) /
                                     static_cast<std::uint64_t>(workers);
            const std::uint64_t hi = opts.trials * static_cast<std::uint64_t>(w + 1) /
                                     static_cast<std::uint64_t>(workers);
            pool.emplace_back(
                [&, w, lo, hi] { counts[static_cast<std::size_t>(w)] = count_range(lo, hi); });
        }
        for (auto& th : pool) th.join();
        for (std::uint64_t c : counts) successes += c;
    }

    TrialEstimate est;
    est.trials = opts.trials;
    est.seed = opts.seed;
    est.mean = static_cast<double>(successes) / static_cast<double>(opts.trials);
    std::tie(est.ci_low, est.ci_high) = wilson_interval(successes, opts.trials);
    return est;
}

}  // namespace detail

/// Monte-Carlo estimate of a scheme's service success. Predicates are the
/// oracle module's, so the simulator cannot drift from the exact evaluator.
inline TrialEstimate estimate_success(Scheme scheme, const ChainSpec& spec,
                                      const ReliabilityParams& rel, const McOptions& opts = {},
                                      const HybridLayout* layout = nullptr) {
    validate_chain_spec(spec);
    std::vector<detail::TrialSpace> spaces;
    switch (scheme) {
        case Scheme::Unprotected:
            spaces.push_back({StateLayout::main_chains(spec), unprotected_predicate});
            break;
        case Scheme::Backup:
            spaces.push_back({StateLayout::backup(spec), backup_predicate});
            break;
        case Scheme::Coding:
            spaces.push_back({StateLayout::chains(spec), coding_predicate});
            break;
        case Scheme::Hybrid: {
            if (layout == nullptr) throw SpecError("hybrid scheme requires a layout");
            const HybridLayout resolved = validate_hybrid_layout(*layout, spec);
            // one independent space per part; the trial succeeds when all
            // parts succeed, mirroring the analytic product
            for (const auto& part : resolved.parts) {
                const ChainSpec pc = part_chain(part, spec);
                if (part.kind == PartKind::Payload)
                    spaces.push_back({StateLayout::backup(pc),
                                      [pc](const SystemState& st, const ChainSpec&) {
                                          return backup_predicate(st, pc);
                                      }});
                else
                    spaces.push_back({StateLayout::chains(pc),
                                      [pc](const SystemState& st, const ChainSpec&) {
                                          return coding_predicate(st, pc);
                                      }});
            }
            break;
        }
    }
    return detail::run_trials(spaces, spec, rel, opts);
}

inline TrialEstimate estimate_overhead(Overhead kind, const ChainSpec& spec,
                                       const ReliabilityParams& rel, const McOptions& opts = {}) {
    validate_chain_spec(spec);
    std::vector<detail::TrialSpace> spaces;
    if (kind == Overhead::Redirection)
        spaces.push_back({StateLayout::active_stages(spec), redirection_predicate});
    else
        spaces.push_back({StateLayout::chains(spec), decoding_predicate});
    return detail::run_trials(spaces, spec, rel, opts);
}

}  // namespace sfcrel
