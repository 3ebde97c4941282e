#pragma once

// Closed-form service-success and overhead probabilities for a parallelized
// SFC under no protection, backup protection, systematic-coding protection,
// and hybrid protection. Binomial coefficients are computed in exact integer
// arithmetic and the summation order is fixed outermost-to-innermost, so
// results are bit-reproducible across runs.
//
// All functions are pure; call them concurrently at will.

#include <cstdint>
#include <map>

#include "sfcrel/model.hpp"

namespace sfcrel {

namespace detail {

/// Exact binomial coefficient as a double. Intermediate products run in
/// unsigned 128-bit; overflow (far beyond the desk scale this targets)
/// throws rather than silently losing exactness.
inline double binom(int n, int kk) {
    if (kk < 0 || kk > n) return 0.0;
    if (kk > n - kk) kk = n - kk;
    unsigned __int128 acc = 1;
    for (int i = 1; i <= kk; ++i) {
        unsigned __int128 next = acc * static_cast<unsigned>(n - kk + i);
        if (next / static_cast<unsigned>(n - kk + i) != acc)
            throw SpecError("binomial coefficient overflow: C(" + std::to_string(n) + "," +
                            std::to_string(kk) + ")");
        acc = next / static_cast<unsigned>(i);
    }
    if (acc > static_cast<unsigned __int128>(1) << 100)
        throw SpecError("binomial coefficient exceeds exact double range");
    return static_cast<double>(static_cast<std::uint64_t>(acc >> 64)) * 18446744073709551616.0 +
           static_cast<double>(static_cast<std::uint64_t>(acc));
}

/// x^e by plain repeated multiplication; deterministic association.
inline double ipow(double x, int e) {
    double out = 1.0;
    for (int i = 0; i < e; ++i) out *= x;
    return out;
}

}  // namespace detail

/// Success without any protection: every segment, server and VNF of all k
/// main sub-SFC chains must be up. r is ignored.
inline double success_unprotected(const ChainSpec& spec, const ReliabilityParams& rel) {
    validate_chain_spec(spec);
    validate_reliability(rel);
    using detail::ipow;
    double chain = ipow(rel.conn_main, spec.servers + 1) * ipow(rel.server_main, spec.servers);
    for (int v : spec.vnfs_per_server) chain *= ipow(rel.vnf_main, v);
    return ipow(chain, spec.k);
}

/// Backup success when only VNFs can fail (segments and servers perfect):
/// per VNF type, at most r of the k+r instances may be down.
inline double success_backup_vnf_only(const ChainSpec& spec, double vnf_rel) {
    validate_chain_spec(spec);
    check_probability(vnf_rel, "vnf_rel");
    using detail::binom;
    using detail::ipow;
    double per_type = 0.0;
    for (int i = 0; i <= spec.r; ++i)
        per_type += binom(spec.r + spec.k, i) * ipow(1.0 - vnf_rel, i) *
                    ipow(vnf_rel, spec.r + spec.k - i);
    return ipow(per_type, spec.total_vnfs());
}

/// Backup-protection success. The k destination segments must be up; per
/// server-stage, the failure budget r is spent across failed active
/// segments, backup segments, reachable active servers, reachable backup
/// servers, and per-VNF-type active/backup instances. Sums whose lower
/// bound exceeds their upper bound contribute nothing (they never start).
inline double success_backup(const ChainSpec& spec, const ReliabilityParams& rel) {
    validate_chain_spec(spec);
    validate_reliability(rel);
    using detail::binom;
    using detail::ipow;
    const int k = spec.k, r = spec.r;
    const double phi = rel.conn_main, phir = rel.conn_red;
    const double srv = rel.server_main, srvr = rel.server_red;
    const double vnf = rel.vnf_main, vnfr = rel.vnf_red;

    double out = ipow(phi, k);
    std::map<int, double> stage_cache;  // stage value depends only on its VNF count
    for (int s = 0; s < spec.servers; ++s) {
        const int types = spec.vnfs_per_server[static_cast<std::size_t>(s)];
        auto hit = stage_cache.find(types);
        if (hit != stage_cache.end()) {
            out *= hit->second;
            continue;
        }
        double stage = 0.0;
        for (int xi = 0; xi <= r; ++xi) {
            const double t_xi = binom(k, xi) * ipow(phi, k - xi) * ipow(1.0 - phi, xi);
            for (int ga = 0; ga <= r - xi; ++ga) {
                const double t_ga = binom(r, ga) * ipow(phir, r - ga) * ipow(1.0 - phir, ga);
                for (int f = 0; f <= r - xi - ga; ++f) {
                    const double t_f =
                        binom(k - xi, f) * ipow(srv, k - f - xi) * ipow(1.0 - srv, f);
                    for (int l = 0; l <= r - xi - ga - f; ++l) {
                        const double t_l =
                            binom(r - ga, l) * ipow(srvr, r - ga - l) * ipow(1.0 - srvr, l);
                        const int budget = r - xi - ga - f - l;
                        double bracket = 0.0;
                        for (int i = 0; i <= budget; ++i) {
                            const double t_i = binom(k - xi - f, i) * ipow(1.0 - vnf, i) *
                                               ipow(vnf, k - xi - f - i);
                            for (int j = 0; j <= budget - i; ++j)
                                bracket += t_i * binom(r - ga - l, j) * ipow(1.0 - vnfr, j) *
                                           ipow(vnfr, r - ga - l - j);
                        }
                        stage += t_xi * t_ga * t_f * t_l * ipow(bracket, types);
                    }
                }
            }
        }
        stage_cache.emplace(types, stage);
        out *= stage;
    }
    return out;
}

enum class SubflowClass { Main, Redundant };

/// Success of one coded sub-flow's private chain: its servers + 1 segments,
/// its servers, and all its VNFs must be up, with the class selecting main
/// vs redundant component reliabilities.
inline double subflow_success(const ChainSpec& spec, const ReliabilityParams& rel,
                              SubflowClass cls) {
    validate_chain_spec(spec);
    validate_reliability(rel);
    using detail::ipow;
    const bool main = cls == SubflowClass::Main;
    const double conn = main ? rel.conn_main : rel.conn_red;
    const double srv = main ? rel.server_main : rel.server_red;
    const double vnf = main ? rel.vnf_main : rel.vnf_red;
    return ipow(srv, spec.servers) * ipow(vnf, spec.total_vnfs()) * ipow(conn, spec.servers + 1);
}

/// Coding-protection success: at least k of the k+r coded sub-flows reach
/// the decoder intact.
inline double success_coding(const ChainSpec& spec, const ReliabilityParams& rel) {
    using detail::binom;
    using detail::ipow;
    const double rh = subflow_success(spec, rel, SubflowClass::Main);
    const double rhr = subflow_success(spec, rel, SubflowClass::Redundant);
    const int k = spec.k, r = spec.r;
    double out = 0.0;
    for (int i = 0; i <= r; ++i) {
        const double t_i = binom(k, i) * ipow(rh, k - i) * ipow(1.0 - rh, i);
        for (int j = 0; j <= r - i; ++j)
            out += t_i * binom(r, j) * ipow(rhr, r - j) * ipow(1.0 - rhr, j);
    }
    return out;
}

/// Hybrid-protection success: payload parts evaluated under backup, header
/// parts under coding, each on its own part geometry; parts multiply. With
/// identical parts this is exactly R_b^{payload_parts} * R_c^{header_parts}.
inline double success_hybrid(const HybridLayout& layout, const ReliabilityParams& rel,
                             const ChainSpec& spec) {
    const HybridLayout resolved = validate_hybrid_layout(layout, spec);
    double out = 1.0;
    for (const auto& part : resolved.parts) {
        const ChainSpec pc = part_chain(part, spec);
        out *= part.kind == PartKind::Payload ? success_backup(pc, rel) : success_coding(pc, rel);
    }
    return out;
}

/// Probability that backup protection has to redirect traffic: at least one
/// active segment, active server, or active VNF is down. The destination
/// segments do not participate.
inline double prob_redirection(const ChainSpec& spec, const ReliabilityParams& rel) {
    validate_chain_spec(spec);
    validate_reliability(rel);
    using detail::ipow;
    double all_up = 1.0;
    for (int v : spec.vnfs_per_server)
        all_up *= ipow(rel.conn_main * rel.server_main * ipow(rel.vnf_main, v), spec.k);
    return 1.0 - all_up;
}

/// Probability that coding protection has to decode: at least one main
/// sub-flow is lost while total losses stay within the r-recoverable range.
inline double prob_decoding(const ChainSpec& spec, const ReliabilityParams& rel) {
    using detail::binom;
    using detail::ipow;
    const double rh = subflow_success(spec, rel, SubflowClass::Main);
    const double rhr = subflow_success(spec, rel, SubflowClass::Redundant);
    const int k = spec.k, r = spec.r;
    double out = 0.0;
    for (int f = 1; f <= r; ++f)
        for (int i = 0; i <= r - f; ++i)
            out += binom(k, f) * ipow(rh, k - f) * ipow(1.0 - rh, f) * binom(r, i) *
                   ipow(rhr, r - i) * ipow(1.0 - rhr, i);
    return out;
}

/// Scheme dispatch used by the CLI and the experiment runner.
inline SuccessReport evaluate_scheme(Scheme scheme, const ChainSpec& spec,
                                     const ReliabilityParams& rel,
                                     const HybridLayout* layout = nullptr) {
    SuccessReport report;
    report.scheme = to_string(scheme);
    switch (scheme) {
        case Scheme::Unprotected:
            report.probability = success_unprotected(spec, rel);
            break;
        case Scheme::Backup:
            report.probability = success_backup(spec, rel);
            break;
        case Scheme::Coding:
            report.probability = success_coding(spec, rel);
            report.subflow_main = subflow_success(spec, rel, SubflowClass::Main);
            report.subflow_red = subflow_success(spec, rel, SubflowClass::Redundant);
            break;
        case Scheme::Hybrid:
            if (layout == nullptr) throw SpecError("hybrid scheme requires a layout");
            report.probability = success_hybrid(*layout, rel, spec);
            break;
    }
    return report;
}

}  // namespace sfcrel
