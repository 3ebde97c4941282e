#pragma once

// Domain vocabulary for parallelized service function chains: the chain
// geometry (how many parallel sub-flows, redundant sub-SFCs, servers and
// VNFs per server), the per-component reliability parameters, and hybrid
// header/payload chain layouts. All values are immutable after validation
// and safe to share across threads.

#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sfcrel {

/// Rejection of an invalid chain spec, layout, or configuration value.
/// The message names the violated constraint.
class SpecError : public std::invalid_argument {
public:
    explicit SpecError(const std::string& what) : std::invalid_argument(what) {}
};

/// Geometry of a parallelized SFC: k main sub-flows served by k parallel
/// sub-SFCs, r redundant/backup sub-SFCs, each sub-SFC distributed over
/// `servers` servers with vnfs_per_server[s] VNF types on server-stage s.
struct ChainSpec {
    int k = 1;
    int r = 0;
    int servers = 1;
    std::vector<int> vnfs_per_server{1};

    int total_vnfs() const {
        return std::accumulate(vnfs_per_server.begin(), vnfs_per_server.end(), 0);
    }

    bool operator==(const ChainSpec&) const = default;
};

/// Per-component up-probabilities. Main and redundant components carry
/// separate values; conn_* is the probability that a path segment to a
/// server (or to the destination) is available.
struct ReliabilityParams {
    double conn_main = 1.0;
    double conn_red = 1.0;
    double server_main = 1.0;
    double server_red = 1.0;
    double vnf_main = 1.0;
    double vnf_red = 1.0;

    bool operator==(const ReliabilityParams&) const = default;
};

enum class Scheme { Unprotected, Backup, Coding, Hybrid };
enum class Overhead { Redirection, Decoding };

inline const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::Unprotected: return "unprotected";
        case Scheme::Backup: return "backup";
        case Scheme::Coding: return "coding";
        case Scheme::Hybrid: return "hybrid";
    }
    return "?";
}

inline const char* to_string(Overhead o) {
    return o == Overhead::Redirection ? "P_R" : "P_dec";
}

enum class PartKind { Header, Payload };

/// One contiguous run of a chain: either header-VNFs (can process coded
/// packets, protected by coding) or payload-VNFs (require decoded data,
/// protected by backup). `servers` == 0 means "derive from the enclosing
/// chain proportionally"; vnfs_per_server empty means "split evenly".
struct ChainPart {
    PartKind kind = PartKind::Header;
    int vnfs = 1;
    int servers = 0;
    std::vector<int> vnfs_per_server{};

    bool operator==(const ChainPart&) const = default;
};

/// Ordered chain parts of a hybrid-protected SFC. Part VNF counts must sum
/// to the enclosing chain's total.
struct HybridLayout {
    std::vector<ChainPart> parts;

    int header_parts() const {
        int n = 0;
        for (const auto& p : parts) n += p.kind == PartKind::Header;
        return n;
    }
    int payload_parts() const { return static_cast<int>(parts.size()) - header_parts(); }

    bool operator==(const HybridLayout&) const = default;
};

/// Result wrapper for one evaluated scheme; subflow_* carry the per-class
/// single-sub-flow success values when the scheme uses them.
struct SuccessReport {
    std::string scheme;
    double probability = 0.0;
    std::optional<double> subflow_main;
    std::optional<double> subflow_red;
};

/// Splits `total` into `bins` parts as evenly as possible, larger first.
inline std::vector<int> split_evenly(int total, int bins) {
    if (bins < 1) throw SpecError("split_evenly: bins must be >= 1");
    std::vector<int> out(static_cast<std::size_t>(bins), total / bins);
    for (int i = 0; i < total % bins; ++i) ++out[static_cast<std::size_t>(i)];
    return out;
}

inline ChainSpec validate_chain_spec(const ChainSpec& spec) {
    if (spec.k < 1) throw SpecError("chain spec: k must be >= 1, got " + std::to_string(spec.k));
    if (spec.r < 0) throw SpecError("chain spec: r must be >= 0, got " + std::to_string(spec.r));
    if (spec.r > spec.k)
        throw SpecError("chain spec: r exceeds k (" + std::to_string(spec.r) + " > " +
                        std::to_string(spec.k) + ")");
    if (spec.servers < 1)
        throw SpecError("chain spec: servers must be >= 1, got " + std::to_string(spec.servers));
    if (spec.vnfs_per_server.empty()) throw SpecError("chain spec: vnfs_per_server is empty");
    if (static_cast<int>(spec.vnfs_per_server.size()) != spec.servers)
        throw SpecError("chain spec: vnfs_per_server length " +
                        std::to_string(spec.vnfs_per_server.size()) + " != servers " +
                        std::to_string(spec.servers));
    for (int v : spec.vnfs_per_server)
        if (v < 1) throw SpecError("chain spec: every server must host >= 1 VNF");
    return spec;
}

inline void check_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0))
        throw SpecError(std::string(name) + " must lie in [0,1], got " + std::to_string(p));
}

inline ReliabilityParams validate_reliability(const ReliabilityParams& rel) {
    check_probability(rel.conn_main, "conn_main");
    check_probability(rel.conn_red, "conn_red");
    check_probability(rel.server_main, "server_main");
    check_probability(rel.server_red, "server_red");
    check_probability(rel.vnf_main, "vnf_main");
    check_probability(rel.vnf_red, "vnf_red");
    return rel;
}

/// Validates a hybrid layout against its enclosing chain and resolves the
/// per-part geometry: parts without an explicit server count get a
/// proportional share of the chain's servers, round-half-up, clamped to
/// [1, part VNF count]; a missing per-server split becomes an even split.
inline HybridLayout validate_hybrid_layout(const HybridLayout& layout, const ChainSpec& spec) {
    validate_chain_spec(spec);
    if (layout.parts.empty()) throw SpecError("hybrid layout: parts list is empty");

    HybridLayout resolved = layout;
    int sum = 0;
    const int chain_vnfs = spec.total_vnfs();
    for (auto& part : resolved.parts) {
        if (part.vnfs < 1) throw SpecError("hybrid layout: every part needs >= 1 VNF");
        sum += part.vnfs;
        if (part.servers == 0) {
            int prop = (2 * spec.servers * part.vnfs + chain_vnfs) / (2 * chain_vnfs);
            part.servers = std::max(1, std::min(part.vnfs, prop));
        }
        if (part.servers < 1 || part.servers > part.vnfs)
            throw SpecError("hybrid layout: part server count must lie in [1, part VNFs]");
        if (part.vnfs_per_server.empty())
            part.vnfs_per_server = split_evenly(part.vnfs, part.servers);
        if (static_cast<int>(part.vnfs_per_server.size()) != part.servers)
            throw SpecError("hybrid layout: per-server split length != part servers");
        int psum = 0;
        for (int v : part.vnfs_per_server) {
            if (v < 1) throw SpecError("hybrid layout: part split entries must be >= 1");
            psum += v;
        }
        if (psum != part.vnfs)
            throw SpecError("hybrid layout: part split sums to " + std::to_string(psum) +
                            " != part VNFs " + std::to_string(part.vnfs));
    }
    if (sum != chain_vnfs)
        throw SpecError("hybrid layout: part VNF counts sum to " + std::to_string(sum) +
                        " != chain total " + std::to_string(chain_vnfs));
    return resolved;
}

/// The chain a single part forms on its own: same k and r as the enclosing
/// chain, the part's server/VNF geometry.
inline ChainSpec part_chain(const ChainPart& part, const ChainSpec& spec) {
    ChainSpec out;
    out.k = spec.k;
    out.r = spec.r;
    out.servers = part.servers;
    out.vnfs_per_server = part.vnfs_per_server;
    return validate_chain_spec(out);
}

}  // namespace sfcrel
