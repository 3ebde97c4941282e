#pragma once

// Exact probability evaluation by exhaustive enumeration over component
// up/down states. This is the ground truth the closed-form module and the
// Monte-Carlo estimator are checked against.
//
// Component order is canonical so that a state is addressable by integer
// index (bit i of the index = component i up):
//   backup layout:   destination segments (k); then per server-stage:
//                    active segments (k), backup segments (r), active
//                    servers (k), backup servers (r), active VNFs (k x psi_s,
//                    sub-flow major), backup VNFs (r x psi_s).
//   chains layout:   main sub-flows 0..k-1 then redundant 0..r-1; per
//                    sub-flow: segments 0..N (index N = destination hop),
//                    servers 0..N-1, VNFs 0..Psi-1 in stage order.
//   active stages:   per server-stage: active segments (k), active servers
//                    (k), active VNFs (k x psi_s). (Redirection state space;
//                    backup components never participate.)
//
// Every enumeration runs over one independent component block; an instance
// whose largest block exceeds the configured bit bound throws
// EnumerationBoundError (use the Monte-Carlo module instead). Probabilities
// factor exactly across independent blocks, so results stay exact.

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfcrel/analytic.hpp"
#include "sfcrel/model.hpp"

namespace sfcrel {

class EnumerationBoundError : public std::runtime_error {
public:
    explicit EnumerationBoundError(const std::string& what) : std::runtime_error(what) {}
};

enum class ReliabilityClass { ConnMain, ConnRed, ServerMain, ServerRed, VnfMain, VnfRed };

inline double class_probability(ReliabilityClass c, const ReliabilityParams& rel) {
    switch (c) {
        case ReliabilityClass::ConnMain: return rel.conn_main;
        case ReliabilityClass::ConnRed: return rel.conn_red;
        case ReliabilityClass::ServerMain: return rel.server_main;
        case ReliabilityClass::ServerRed: return rel.server_red;
        case ReliabilityClass::VnfMain: return rel.vnf_main;
        case ReliabilityClass::VnfRed: return rel.vnf_red;
    }
    return 0.0;
}

enum class LayoutKind { Backup, Chains, MainChains, ActiveStages };

/// Canonical component indexing for one enumeration/sampling space.
class StateLayout {
public:
    static StateLayout backup(const ChainSpec& spec) {
        StateLayout l(LayoutKind::Backup, validate_chain_spec(spec));
        l.push(spec.k, ReliabilityClass::ConnMain);  // destination segments
        for (int s = 0; s < spec.servers; ++s) {
            const int t = spec.vnfs_per_server[static_cast<std::size_t>(s)];
            l.stage_offsets_.push_back(l.bits_);
            l.push(spec.k, ReliabilityClass::ConnMain);
            l.push(spec.r, ReliabilityClass::ConnRed);
            l.push(spec.k, ReliabilityClass::ServerMain);
            l.push(spec.r, ReliabilityClass::ServerRed);
            l.push(spec.k * t, ReliabilityClass::VnfMain);
            l.push(spec.r * t, ReliabilityClass::VnfRed);
        }
        return l;
    }

    /// k main + r redundant private chains (coding / decoding space).
    static StateLayout chains(const ChainSpec& spec) { return chains_impl(spec, spec.k + spec.r); }

    /// k main chains only (unprotected space).
    static StateLayout main_chains(const ChainSpec& spec) { return chains_impl(spec, spec.k); }

    static StateLayout active_stages(const ChainSpec& spec) {
        StateLayout l(LayoutKind::ActiveStages, validate_chain_spec(spec));
        for (int s = 0; s < spec.servers; ++s) {
            const int t = spec.vnfs_per_server[static_cast<std::size_t>(s)];
            l.stage_offsets_.push_back(l.bits_);
            l.push(spec.k, ReliabilityClass::ConnMain);
            l.push(spec.k, ReliabilityClass::ServerMain);
            l.push(spec.k * t, ReliabilityClass::VnfMain);
        }
        return l;
    }

    LayoutKind kind() const { return kind_; }
    const ChainSpec& spec() const { return spec_; }
    int bit_count() const { return bits_; }
    ReliabilityClass component_class(int i) const {
        return classes_[static_cast<std::size_t>(i)];
    }
    double up_probability(int i, const ReliabilityParams& rel) const {
        return class_probability(component_class(i), rel);
    }

    // --- backup-layout indices ---
    int dest_segment(int c) const { return c; }
    int active_segment(int s, int c) const { return stage_base(s) + c; }
    int backup_segment(int s, int b) const { return stage_base(s) + spec_.k + b; }
    int active_server(int s, int c) const { return stage_base(s) + spec_.k + spec_.r + c; }
    int backup_server(int s, int b) const { return stage_base(s) + 2 * spec_.k + spec_.r + b; }
    int active_vnf(int s, int c, int t) const {
        return stage_base(s) + 2 * (spec_.k + spec_.r) + c * stage_types(s) + t;
    }
    int backup_vnf(int s, int b, int t) const {
        return stage_base(s) + 2 * (spec_.k + spec_.r) + spec_.k * stage_types(s) +
               b * stage_types(s) + t;
    }

    // --- active-stages indices ---
    int stage_segment(int s, int c) const { return stage_base(s) + c; }
    int stage_server(int s, int c) const { return stage_base(s) + spec_.k + c; }
    int stage_vnf(int s, int c, int t) const {
        return stage_base(s) + 2 * spec_.k + c * stage_types(s) + t;
    }

    // --- chains-layout indices ---
    int flows() const { return flows_; }
    int chain_bits() const { return 2 * spec_.servers + 1 + spec_.total_vnfs(); }
    int chain_segment(int flow, int seg) const { return flow * chain_bits() + seg; }
    int chain_server(int flow, int srv) const {
        return flow * chain_bits() + spec_.servers + 1 + srv;
    }
    int chain_vnf(int flow, int v) const {
        return flow * chain_bits() + 2 * spec_.servers + 1 + v;
    }

private:
    StateLayout(LayoutKind k, ChainSpec s) : kind_(k), spec_(std::move(s)) {}

    static StateLayout chains_impl(const ChainSpec& spec, int flows) {
        StateLayout l(flows > spec.k ? LayoutKind::Chains : LayoutKind::MainChains,
                      validate_chain_spec(spec));
        if (flows == spec.k && spec.r > 0) l.kind_ = LayoutKind::MainChains;
        l.flows_ = flows;
        for (int f = 0; f < flows; ++f) {
            const bool main = f < spec.k;
            l.push(spec.servers + 1,
                   main ? ReliabilityClass::ConnMain : ReliabilityClass::ConnRed);
            l.push(spec.servers, main ? ReliabilityClass::ServerMain : ReliabilityClass::ServerRed);
            l.push(spec.total_vnfs(), main ? ReliabilityClass::VnfMain : ReliabilityClass::VnfRed);
        }
        return l;
    }

    void push(int count, ReliabilityClass c) {
        for (int i = 0; i < count; ++i) classes_.push_back(c);
        bits_ += count;
    }
    int stage_base(int s) const { return stage_offsets_[static_cast<std::size_t>(s)]; }
    int stage_types(int s) const { return spec_.vnfs_per_server[static_cast<std::size_t>(s)]; }

    LayoutKind kind_;
    ChainSpec spec_;
    int bits_ = 0;
    int flows_ = 0;
    std::vector<ReliabilityClass> classes_;
    std::vector<int> stage_offsets_;
};

/// One up/down assignment for every component of a layout.
struct SystemState {
    const StateLayout* layout = nullptr;
    std::vector<std::uint8_t> up;

    bool is_up(int comp) const { return up[static_cast<std::size_t>(comp)] != 0; }

    static SystemState all_down(const StateLayout& l) {
        return SystemState{&l, std::vector<std::uint8_t>(static_cast<std::size_t>(l.bit_count()), 0)};
    }
    static SystemState from_index(const StateLayout& l, std::uint64_t index) {
        SystemState st = all_down(l);
        for (int i = 0; i < l.bit_count(); ++i)
            st.up[static_cast<std::size_t>(i)] = (index >> i) & 1u;
        return st;
    }
};

namespace detail {
inline void require_kind(const SystemState& st, LayoutKind kind, const ChainSpec& spec,
                         const char* who) {
    if (st.layout == nullptr || st.layout->kind() != kind || !(st.layout->spec() == spec))
        throw SpecError(std::string(who) + ": state dimensions do not match the chain spec");
}
}  // namespace detail

/// Backup semantics: all destination segments up, and per stage and VNF
/// type at least k usable instances (instance up, on an up server, with an
/// up segment) across the active and backup sides.
inline bool backup_predicate(const SystemState& st, const ChainSpec& spec) {
    detail::require_kind(st, LayoutKind::Backup, spec, "backup_predicate");
    const StateLayout& l = *st.layout;
    for (int c = 0; c < spec.k; ++c)
        if (!st.is_up(l.dest_segment(c))) return false;
    for (int s = 0; s < spec.servers; ++s) {
        const int types = spec.vnfs_per_server[static_cast<std::size_t>(s)];
        for (int t = 0; t < types; ++t) {
            int avail = 0;
            for (int c = 0; c < spec.k; ++c)
                avail += st.is_up(l.active_segment(s, c)) && st.is_up(l.active_server(s, c)) &&
                         st.is_up(l.active_vnf(s, c, t));
            for (int b = 0; b < spec.r; ++b)
                avail += st.is_up(l.backup_segment(s, b)) && st.is_up(l.backup_server(s, b)) &&
                         st.is_up(l.backup_vnf(s, b, t));
            if (avail < spec.k) return false;
        }
    }
    return true;
}

namespace detail {
inline bool chain_fully_up(const SystemState& st, int flow) {
    const StateLayout& l = *st.layout;
    const int base = flow * l.chain_bits();
    for (int i = 0; i < l.chain_bits(); ++i)
        if (!st.is_up(base + i)) return false;
    return true;
}
}  // namespace detail

/// Coding semantics: at least k of the k+r coded sub-flows have their whole
/// private chain up.
inline bool coding_predicate(const SystemState& st, const ChainSpec& spec) {
    detail::require_kind(st, LayoutKind::Chains, spec, "coding_predicate");
    int survivors = 0;
    for (int f = 0; f < st.layout->flows(); ++f) survivors += detail::chain_fully_up(st, f);
    return survivors >= spec.k;
}

/// All k main chains fully up (no protection involved).
inline bool unprotected_predicate(const SystemState& st, const ChainSpec& spec) {
    detail::require_kind(st, LayoutKind::MainChains, spec, "unprotected_predicate");
    for (int f = 0; f < spec.k; ++f)
        if (!detail::chain_fully_up(st, f)) return false;
    return true;
}

/// Traffic redirection is needed as soon as any active component is down.
inline bool redirection_predicate(const SystemState& st, const ChainSpec& spec) {
    detail::require_kind(st, LayoutKind::ActiveStages, spec, "redirection_predicate");
    for (int i = 0; i < st.layout->bit_count(); ++i)
        if (!st.is_up(i)) return true;
    return false;
}

/// Decoding is needed when at least one main chain is broken and the total
/// number of broken chains is still recoverable (at most r).
inline bool decoding_predicate(const SystemState& st, const ChainSpec& spec) {
    detail::require_kind(st, LayoutKind::Chains, spec, "decoding_predicate");
    int broken_main = 0, broken_total = 0;
    for (int f = 0; f < st.layout->flows(); ++f) {
        if (!detail::chain_fully_up(st, f)) {
            ++broken_total;
            if (f < spec.k) ++broken_main;
        }
    }
    return broken_main >= 1 && broken_total <= spec.r;
}

struct OracleOptions {
    int max_bits = 24;  // per enumeration block
};

namespace detail {

inline void check_bits(int bits, int max_bits, const char* what) {
    if (bits > max_bits)
        throw EnumerationBoundError(std::string(what) + " needs " + std::to_string(bits) +
                                    " components > bound " + std::to_string(max_bits) +
                                    "; use the Monte-Carlo estimator");
}

/// Sum of Pr(state) over all states in [first, last) that satisfy pred.
/// Layout-based; used for joint-space checks and small blocks.
inline double enumerate_measure(const StateLayout& layout, const ReliabilityParams& rel,
                                const std::function<bool(const SystemState&)>& pred,
                                std::uint64_t first, std::uint64_t last) {
    const int n = layout.bit_count();
    std::vector<double> p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = layout.up_probability(i, rel);
    SystemState st = SystemState::all_down(layout);
    double total = 0.0;
    for (std::uint64_t mask = first; mask < last; ++mask) {
        double prob = 1.0;
        for (int i = 0; i < n; ++i) {
            const bool u = (mask >> i) & 1u;
            st.up[static_cast<std::size_t>(i)] = u;
            prob *= u ? p[static_cast<std::size_t>(i)] : 1.0 - p[static_cast<std::size_t>(i)];
        }
        if (pred(st)) total += prob;
    }
    return total;
}

/// Exact P(stage ok) for one backup server-stage by enumeration of its
/// 2(k+r) + (k+r)*types components. Block order mirrors the canonical
/// backup layout.
inline double backup_stage_exact(int k, int r, int types, const ReliabilityParams& rel,
                                 int max_bits) {
    const int bits = 2 * (k + r) + (k + r) * types;
    check_bits(bits, max_bits, "backup stage enumeration");
    const int aseg = 0, bseg = k, asrv = k + r, bsrv = 2 * k + r;
    const int avnf = 2 * (k + r), bvnf = avnf + k * types;
    std::vector<double> p(static_cast<std::size_t>(bits));
    for (int c = 0; c < k; ++c) p[static_cast<std::size_t>(aseg + c)] = rel.conn_main;
    for (int b = 0; b < r; ++b) p[static_cast<std::size_t>(bseg + b)] = rel.conn_red;
    for (int c = 0; c < k; ++c) p[static_cast<std::size_t>(asrv + c)] = rel.server_main;
    for (int b = 0; b < r; ++b) p[static_cast<std::size_t>(bsrv + b)] = rel.server_red;
    for (int i = 0; i < k * types; ++i) p[static_cast<std::size_t>(avnf + i)] = rel.vnf_main;
    for (int i = 0; i < r * types; ++i) p[static_cast<std::size_t>(bvnf + i)] = rel.vnf_red;

    const std::uint64_t states = std::uint64_t{1} << bits;
    double total = 0.0;
    for (std::uint64_t mask = 0; mask < states; ++mask) {
        double prob = 1.0;
        for (int i = 0; i < bits; ++i)
            prob *= ((mask >> i) & 1u) ? p[static_cast<std::size_t>(i)]
                                       : 1.0 - p[static_cast<std::size_t>(i)];
        bool ok = true;
        for (int t = 0; t < types && ok; ++t) {
            int avail = 0;
            for (int c = 0; c < k; ++c)
                avail += ((mask >> (aseg + c)) & 1u) && ((mask >> (asrv + c)) & 1u) &&
                         ((mask >> (avnf + c * types + t)) & 1u);
            for (int b = 0; b < r; ++b)
                avail += ((mask >> (bseg + b)) & 1u) && ((mask >> (bsrv + b)) & 1u) &&
                         ((mask >> (bvnf + b * types + t)) & 1u);
            ok = avail >= k;
        }
        if (ok) total += prob;
    }
    return total;
}

/// Exact probability that every one of `bits` independent components with
/// probability list `p` is up, by enumeration (the all-up corner of the
/// block measure).
inline double all_up_exact(const std::vector<double>& p, int max_bits) {
    const int bits = static_cast<int>(p.size());
    check_bits(bits, max_bits, "component block enumeration");
    const std::uint64_t states = std::uint64_t{1} << bits;
    double total = 0.0;
    for (std::uint64_t mask = 0; mask < states; ++mask) {
        double prob = 1.0;
        bool allup = true;
        for (int i = 0; i < bits; ++i) {
            const bool u = (mask >> i) & 1u;
            allup &= u;
            prob *= u ? p[static_cast<std::size_t>(i)] : 1.0 - p[static_cast<std::size_t>(i)];
        }
        if (allup) total += prob;
    }
    return total;
}

/// Exact P(one private sub-flow chain fully up) by enumeration.
inline double chain_exact(const ChainSpec& spec, const ReliabilityParams& rel, bool main,
                          int max_bits) {
    const int bits = 2 * spec.servers + 1 + spec.total_vnfs();
    check_bits(bits, max_bits, "sub-flow chain enumeration");
    std::vector<double> p;
    p.insert(p.end(), static_cast<std::size_t>(spec.servers + 1),
             main ? rel.conn_main : rel.conn_red);
    p.insert(p.end(), static_cast<std::size_t>(spec.servers),
             main ? rel.server_main : rel.server_red);
    p.insert(p.end(), static_cast<std::size_t>(spec.total_vnfs()),
             main ? rel.vnf_main : rel.vnf_red);
    const std::uint64_t states = std::uint64_t{1} << bits;
    double total = 0.0;
    for (std::uint64_t mask = 0; mask < states; ++mask) {
        double prob = 1.0;
        bool allup = true;
        for (int i = 0; i < bits; ++i) {
            const bool u = (mask >> i) & 1u;
            allup &= u;
            prob *= u ? p[static_cast<std::size_t>(i)] : 1.0 - p[static_cast<std::size_t>(i)];
        }
        if (allup) total += prob;
    }
    return total;
}

/// Enumerates the k+r chain-survival indicators with per-chain success
/// probabilities and sums the measure of indicator vectors accepted by
/// pred(surviving_main, surviving_red).
inline double survivors_exact(int k, int r, double p_main, double p_red,
                              const std::function<bool(int, int)>& pred, int max_bits) {
    const int bits = k + r;
    check_bits(bits, max_bits, "chain survival enumeration");
    const std::uint64_t states = std::uint64_t{1} << bits;
    double total = 0.0;
    for (std::uint64_t mask = 0; mask < states; ++mask) {
        double prob = 1.0;
        int up_main = 0, up_red = 0;
        for (int i = 0; i < bits; ++i) {
            const bool u = (mask >> i) & 1u;
            const double p = i < k ? p_main : p_red;
            prob *= u ? p : 1.0 - p;
            if (u) (i < k ? up_main : up_red) += 1;
        }
        if (pred(up_main, up_red)) total += prob;
    }
    return total;
}

}  // namespace detail

/// Joint-space enumeration over an explicit layout; exact for any predicate.
/// States [first_state, last_state) of the canonical index are visited in
/// ascending order; partition sums add up to the full-range sum.
inline double exact_joint(const StateLayout& layout, const ReliabilityParams& rel,
                          const std::function<bool(const SystemState&)>& pred,
                          std::uint64_t first_state, std::uint64_t last_state,
                          OracleOptions opts = {}) {
    detail::check_bits(layout.bit_count(), opts.max_bits, "joint state enumeration");
    return detail::enumerate_measure(layout, rel, pred, first_state, last_state);
}

inline double exact_joint(const StateLayout& layout, const ReliabilityParams& rel,
                          const std::function<bool(const SystemState&)>& pred,
                          OracleOptions opts = {}) {
    detail::check_bits(layout.bit_count(), opts.max_bits, "joint state enumeration");
    return detail::enumerate_measure(layout, rel, pred, 0,
                                     std::uint64_t{1} << layout.bit_count());
}

namespace detail {
inline double exact_backup(const ChainSpec& spec, const ReliabilityParams& rel,
                           const OracleOptions& opts) {
    std::vector<double> dest(static_cast<std::size_t>(spec.k), rel.conn_main);
    double out = all_up_exact(dest, opts.max_bits);
    std::map<int, double> stage_cache;
    for (int types : spec.vnfs_per_server) {
        auto it = stage_cache.find(types);
        if (it == stage_cache.end())
            it = stage_cache.emplace(types, backup_stage_exact(spec.k, spec.r, types, rel,
                                                               opts.max_bits)).first;
        out *= it->second;
    }
    return out;
}
}  // namespace detail

/// Exact service success for a scheme. Factorizes over independent
/// component blocks (stages for backup, sub-flow chains plus the survival
/// layer for coding, parts for hybrid); each block is enumerated
/// exhaustively and must fit the per-block bit bound.
inline double exact_success(Scheme scheme, const ChainSpec& spec, const ReliabilityParams& rel,
                            OracleOptions opts = {}, const HybridLayout* layout = nullptr) {
    validate_chain_spec(spec);
    validate_reliability(rel);
    switch (scheme) {
        case Scheme::Unprotected: {
            const double chain = detail::chain_exact(spec, rel, true, opts.max_bits);
            return detail::ipow(chain, spec.k);
        }
        case Scheme::Backup:
            return detail::exact_backup(spec, rel, opts);
        case Scheme::Coding: {
            const double pm = detail::chain_exact(spec, rel, true, opts.max_bits);
            const double pr = detail::chain_exact(spec, rel, false, opts.max_bits);
            return detail::survivors_exact(
                spec.k, spec.r, pm, pr,
                [&](int um, int ur) { return um + ur >= spec.k; }, opts.max_bits);
        }
        case Scheme::Hybrid: {
            if (layout == nullptr) throw SpecError("hybrid scheme requires a layout");
            const HybridLayout resolved = validate_hybrid_layout(*layout, spec);
            double out = 1.0;
            for (const auto& part : resolved.parts) {
                const ChainSpec pc = part_chain(part, spec);
                out *= exact_success(part.kind == PartKind::Payload ? Scheme::Backup
                                                                    : Scheme::Coding,
                                     pc, rel, opts, nullptr);
            }
            return out;
        }
    }
    throw SpecError("unknown scheme");
}

/// Exact overhead probabilities: redirection on the active-only state
/// space, decoding on the coded-chain space.
inline double exact_overhead(Overhead kind, const ChainSpec& spec, const ReliabilityParams& rel,
                             OracleOptions opts = {}) {
    validate_chain_spec(spec);
    validate_reliability(rel);
    if (kind == Overhead::Redirection) {
        double all_up = 1.0;
        for (int types : spec.vnfs_per_server) {
            std::vector<double> p;
            p.insert(p.end(), static_cast<std::size_t>(spec.k), rel.conn_main);
            p.insert(p.end(), static_cast<std::size_t>(spec.k), rel.server_main);
            p.insert(p.end(), static_cast<std::size_t>(spec.k * types), rel.vnf_main);
            all_up *= detail::all_up_exact(p, opts.max_bits);
        }
        return 1.0 - all_up;
    }
    const double pm = detail::chain_exact(spec, rel, true, opts.max_bits);
    const double pr = detail::chain_exact(spec, rel, false, opts.max_bits);
    return detail::survivors_exact(
        spec.k, spec.r, pm, pr,
        [&](int um, int ur) {
            const int broken = (spec.k - um) + (spec.r - ur);
            return (spec.k - um) >= 1 && broken <= spec.r;
        },
        opts.max_bits);
}

}  // namespace sfcrel
