#pragma once

// Packet-level systematic (k+r, k) erasure coding over GF(256) with a
// generalized coding header (GCH). A flow is round-robin split into k
// sub-flows; each generation takes one packet per sub-flow, zero-pads the
// serialized packets to a common length, and appends r redundant packets
// that are linear combinations of the k originals. Any k of the k+r packets
// recover the generation; the k systematic packets pass through unchanged.
//
// The redundancy block is a column-normalized Cauchy matrix over
// GF(256)/0x11B: coefficient(m, c) = (k + c) / ((k + m) + c) with "+" the
// field addition (XOR) and the points 0..k-1 (data) and k..k+r-1 (parity)
// taken as field elements. Every square submatrix of a Cauchy matrix is
// nonsingular and diagonal scaling preserves that, so the code is MDS for
// any k + r <= 255. Row 0 normalizes to all-ones: r = 1 is XOR parity.
//
// CodedPacket wire layout, big-endian, 28-byte header, bit-exact:
//   magic(2)=0x4743 version(1)=1 k(1) r(1) index(1) generation_id(4)
//   original_length(2) total_length(2) checksum(2)
//   src_addr(4) dst_addr(4) src_port(2) dst_port(2) body(...)
// checksum is the 16-bit ones-complement sum over header (checksum field
// zeroed) plus body. index < k marks a systematic packet, index >= k a
// redundant one. generation_id plays the sequence-number role: packets of
// one generation share it.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfcrel/gf256.hpp"
#include "sfcrel/model.hpp"

namespace sfcrel {

class CodecError : public std::runtime_error {
public:
    explicit CodecError(const std::string& what) : std::runtime_error(what) {}
};

/// Fewer than k valid packets of a generation survived; the original data
/// cannot be reconstructed (maps to service failure, not a usage error).
class UnrecoverableGeneration : public CodecError {
public:
    explicit UnrecoverableGeneration(const std::string& what) : CodecError(what) {}
};

inline constexpr std::uint16_t kGchMagic = 0x4743;
inline constexpr std::uint8_t kGchVersion = 1;
inline constexpr std::size_t kGchHeaderSize = 28;
inline constexpr std::size_t kFlowPacketHeaderSize = 18;
inline constexpr std::size_t kDefaultMaxPayload = 1500;

namespace detail {
inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}
inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}
inline std::uint16_t get_u16(std::span<const std::uint8_t> in, std::size_t at) {
    return static_cast<std::uint16_t>((in[at] << 8) | in[at + 1]);
}
inline std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
    return (static_cast<std::uint32_t>(in[at]) << 24) |
           (static_cast<std::uint32_t>(in[at + 1]) << 16) |
           (static_cast<std::uint32_t>(in[at + 2]) << 8) | in[at + 3];
}
}  // namespace detail

/// 16-bit ones-complement sum over big-endian 16-bit words, odd trailing
/// byte zero-padded; the stored value is the complement of the sum.
inline std::uint16_t ones_complement_checksum(std::span<const std::uint8_t> data) {
    std::uint32_t sum = 0;
    for (std::size_t i = 0; i + 1 < data.size(); i += 2) {
        sum += static_cast<std::uint32_t>((data[i] << 8) | data[i + 1]);
        sum = (sum & 0xFFFFu) + (sum >> 16);
    }
    if (data.size() % 2 != 0) {
        sum += static_cast<std::uint32_t>(data.back() << 8);
        sum = (sum & 0xFFFFu) + (sum >> 16);
    }
    while (sum >> 16) sum = (sum & 0xFFFFu) + (sum >> 16);
    return static_cast<std::uint16_t>(~sum);
}

/// One packet of the original flow. All packets of a flow share the
/// address/port tuple; seq_no orders them.
struct FlowPacket {
    std::uint32_t src_addr = 0;
    std::uint32_t dst_addr = 0;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    std::uint32_t seq_no = 0;
    std::vector<std::uint8_t> payload;

    bool operator==(const FlowPacket&) const = default;

    bool same_flow(const FlowPacket& o) const {
        return src_addr == o.src_addr && dst_addr == o.dst_addr && src_port == o.src_port &&
               dst_port == o.dst_port;
    }
};

/// Serialized form: src(4) dst(4) sport(2) dport(2) seq(4) payload_len(2)
/// payload. The embedded length keeps a packet self-describing after
/// zero-padding, which is how reconstructed generation members recover
/// their exact size.
inline std::vector<std::uint8_t> serialize_flow_packet(const FlowPacket& p) {
    if (p.payload.size() > 0xFFFF)
        throw CodecError("flow packet payload exceeds the 16-bit length field");
    std::vector<std::uint8_t> out;
    out.reserve(kFlowPacketHeaderSize + p.payload.size());
    detail::put_u32(out, p.src_addr);
    detail::put_u32(out, p.dst_addr);
    detail::put_u16(out, p.src_port);
    detail::put_u16(out, p.dst_port);
    detail::put_u32(out, p.seq_no);
    detail::put_u16(out, static_cast<std::uint16_t>(p.payload.size()));
    out.insert(out.end(), p.payload.begin(), p.payload.end());
    return out;
}

inline FlowPacket parse_flow_packet(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kFlowPacketHeaderSize) throw CodecError("flow packet bytes too short");
    FlowPacket p;
    p.src_addr = detail::get_u32(bytes, 0);
    p.dst_addr = detail::get_u32(bytes, 4);
    p.src_port = detail::get_u16(bytes, 8);
    p.dst_port = detail::get_u16(bytes, 10);
    p.seq_no = detail::get_u32(bytes, 12);
    const std::size_t len = detail::get_u16(bytes, 16);
    if (kFlowPacketHeaderSize + len > bytes.size())
        throw CodecError("flow packet length field exceeds available bytes");
    p.payload.assign(bytes.begin() + kFlowPacketHeaderSize,
                     bytes.begin() + static_cast<std::ptrdiff_t>(kFlowPacketHeaderSize + len));
    return p;
}

/// Exact serialized size recorded inside a (possibly padded) body.
inline std::size_t embedded_flow_packet_size(std::span<const std::uint8_t> body) {
    if (body.size() < kFlowPacketHeaderSize)
        throw CodecError("body too short to carry a flow packet");
    return kFlowPacketHeaderSize + detail::get_u16(body, 16);
}

struct GchHeader {
    std::uint16_t magic = kGchMagic;
    std::uint8_t version = kGchVersion;
    std::uint8_t k = 0;
    std::uint8_t r = 0;
    std::uint8_t index = 0;
    std::uint32_t generation_id = 0;
    std::uint16_t original_length = 0;
    std::uint16_t total_length = 0;
    std::uint16_t checksum = 0;
    std::uint32_t src_addr = 0;
    std::uint32_t dst_addr = 0;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;

    bool operator==(const GchHeader&) const = default;

    bool redundant() const { return index >= k; }

    std::vector<std::uint8_t> to_bytes(bool zero_checksum = false) const {
        std::vector<std::uint8_t> out;
        out.reserve(kGchHeaderSize);
        detail::put_u16(out, magic);
        out.push_back(version);
        out.push_back(k);
        out.push_back(r);
        out.push_back(index);
        detail::put_u32(out, generation_id);
        detail::put_u16(out, original_length);
        detail::put_u16(out, total_length);
        detail::put_u16(out, zero_checksum ? 0 : checksum);
        detail::put_u32(out, src_addr);
        detail::put_u32(out, dst_addr);
        detail::put_u16(out, src_port);
        detail::put_u16(out, dst_port);
        return out;
    }

    static GchHeader from_bytes(std::span<const std::uint8_t> bytes) {
        if (bytes.size() < kGchHeaderSize) throw CodecError("GCH bytes too short");
        GchHeader h;
        h.magic = detail::get_u16(bytes, 0);
        h.version = bytes[2];
        h.k = bytes[3];
        h.r = bytes[4];
        h.index = bytes[5];
        h.generation_id = detail::get_u32(bytes, 6);
        h.original_length = detail::get_u16(bytes, 10);
        h.total_length = detail::get_u16(bytes, 12);
        h.checksum = detail::get_u16(bytes, 14);
        h.src_addr = detail::get_u32(bytes, 16);
        h.dst_addr = detail::get_u32(bytes, 20);
        h.src_port = detail::get_u16(bytes, 24);
        h.dst_port = detail::get_u16(bytes, 26);
        if (h.magic != kGchMagic) throw CodecError("GCH magic mismatch");
        if (h.version != kGchVersion) throw CodecError("unsupported GCH version");
        return h;
    }
};

struct CodedPacket {
    GchHeader gch;
    std::vector<std::uint8_t> body;

    bool operator==(const CodedPacket&) const = default;

    std::vector<std::uint8_t> to_bytes() const {
        std::vector<std::uint8_t> out = gch.to_bytes();
        out.insert(out.end(), body.begin(), body.end());
        return out;
    }

    static CodedPacket from_bytes(std::span<const std::uint8_t> bytes) {
        CodedPacket p;
        p.gch = GchHeader::from_bytes(bytes);
        if (p.gch.total_length != bytes.size())
            throw CodecError("coded packet total_length does not match byte count");
        p.body.assign(bytes.begin() + kGchHeaderSize, bytes.end());
        return p;
    }
};

inline std::uint16_t compute_packet_checksum(const CodedPacket& p) {
    std::vector<std::uint8_t> bytes = p.gch.to_bytes(/*zero_checksum=*/true);
    bytes.insert(bytes.end(), p.body.begin(), p.body.end());
    return ones_complement_checksum(bytes);
}

inline void finalize_checksum(CodedPacket& p) { p.gch.checksum = compute_packet_checksum(p); }

inline bool verify_checksum(const CodedPacket& p) {
    return p.gch.checksum == compute_packet_checksum(p);
}

/// Distributes packets over k sub-flows round-robin: packet i goes to
/// sub-flow i mod k.
inline std::vector<std::vector<FlowPacket>> split_flow(const std::vector<FlowPacket>& packets,
                                                       int k) {
    if (k < 1) throw SpecError("split_flow: k must be >= 1");
    std::vector<std::vector<FlowPacket>> out(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < packets.size(); ++i)
        out[i % static_cast<std::size_t>(k)].push_back(packets[i]);
    return out;
}

/// Inverse of split_flow; serializes the sub-flows back into one stream.
inline std::vector<FlowPacket> round_robin_merge(
    const std::vector<std::vector<FlowPacket>>& subflows) {
    std::vector<FlowPacket> out;
    std::size_t idx = 0;
    for (bool emitted = true; emitted; ++idx) {
        emitted = false;
        for (const auto& sf : subflows) {
            if (idx < sf.size()) {
                out.push_back(sf[idx]);
                emitted = true;
            }
        }
    }
    return out;
}

/// Redundancy coefficient of parity row m (0-based) and data column c.
inline std::uint8_t coding_coefficient(int k, int m, int c) {
    const auto num = static_cast<std::uint8_t>(k ^ c);
    const auto den = static_cast<std::uint8_t>((k + m) ^ c);
    return gf::mul(num, gf::inv(den));
}

/// Full systematic generator matrix (k+r rows by k columns): identity on
/// top, the normalized-Cauchy redundancy rows below.
inline std::vector<std::vector<std::uint8_t>> generator_matrix(int k, int r) {
    std::vector<std::vector<std::uint8_t>> g;
    for (int i = 0; i < k; ++i) {
        std::vector<std::uint8_t> row(static_cast<std::size_t>(k), 0);
        row[static_cast<std::size_t>(i)] = 1;
        g.push_back(std::move(row));
    }
    for (int m = 0; m < r; ++m) {
        std::vector<std::uint8_t> row(static_cast<std::size_t>(k));
        for (int c = 0; c < k; ++c)
            row[static_cast<std::size_t>(c)] = coding_coefficient(k, m, c);
        g.push_back(std::move(row));
    }
    return g;
}

/// k packets, one per main sub-flow, encoded together.
struct Generation {
    std::uint32_t generation_id = 0;
    std::vector<FlowPacket> packets;
};

/// Builds the GCH for coded packet `index` of a generation, copying the
/// flow identity from `tmpl` and adapting the length fields to the coded
/// body. The checksum is computed for a body-less packet; encode re-derives
/// it once the body is attached.
inline GchHeader synthesize_gch(const FlowPacket& tmpl, int k, int r, int index,
                                std::uint32_t generation_id, std::size_t body_length) {
    if (k < 1 || r < 0 || k + r > 255) throw SpecError("gch: need 1 <= k and k + r <= 255");
    if (index < 0 || index >= k + r)
        throw SpecError("gch: index " + std::to_string(index) + " out of range [0, " +
                        std::to_string(k + r) + ")");
    if (body_length + kGchHeaderSize > 0xFFFF)
        throw CodecError("gch: body length exceeds the 16-bit total_length field");
    GchHeader h;
    h.k = static_cast<std::uint8_t>(k);
    h.r = static_cast<std::uint8_t>(r);
    h.index = static_cast<std::uint8_t>(index);
    h.generation_id = generation_id;
    h.original_length = static_cast<std::uint16_t>(body_length);
    h.total_length = static_cast<std::uint16_t>(kGchHeaderSize + body_length);
    h.src_addr = tmpl.src_addr;
    h.dst_addr = tmpl.dst_addr;
    h.src_port = tmpl.src_port;
    h.dst_port = tmpl.dst_port;
    h.checksum = ones_complement_checksum(h.to_bytes(/*zero_checksum=*/true));
    return h;
}

struct EncodeOptions {
    std::size_t max_payload = kDefaultMaxPayload;
};

/// Encodes one generation into k systematic + r redundant coded packets.
/// Systematic bodies are the members' serialized bytes unchanged; redundant
/// bodies combine the zero-padded bodies with the normalized-Cauchy rows.
inline std::vector<CodedPacket> encode_generation(const Generation& gen, int r,
                                                  EncodeOptions opts = {}) {
    const int k = static_cast<int>(gen.packets.size());
    if (k < 1) throw SpecError("encode: generation is empty");
    if (r < 0 || r > k) throw SpecError("encode: need 0 <= r <= k");
    if (k + r > 255) throw SpecError("encode: k + r must be <= 255");
    for (const auto& p : gen.packets) {
        if (p.payload.size() > opts.max_payload)
            throw CodecError("encode: payload exceeds the configured maximum of " +
                             std::to_string(opts.max_payload));
        if (!p.same_flow(gen.packets.front()))
            throw CodecError("encode: generation members belong to different flows");
    }

    std::vector<std::vector<std::uint8_t>> bodies;
    std::size_t padded_len = 0;
    for (const auto& p : gen.packets) {
        bodies.push_back(serialize_flow_packet(p));
        padded_len = std::max(padded_len, bodies.back().size());
    }

    std::vector<CodedPacket> out;
    out.reserve(static_cast<std::size_t>(k + r));
    for (int i = 0; i < k; ++i) {
        CodedPacket p;
        p.body = bodies[static_cast<std::size_t>(i)];
        p.gch = synthesize_gch(gen.packets[static_cast<std::size_t>(i)], k, r, i,
                               gen.generation_id, p.body.size());
        finalize_checksum(p);
        out.push_back(std::move(p));
    }
    for (int m = 0; m < r; ++m) {
        CodedPacket p;
        p.body.assign(padded_len, 0);
        for (int c = 0; c < k; ++c) {
            const std::uint8_t coef = coding_coefficient(k, m, c);
            const auto& src = bodies[static_cast<std::size_t>(c)];
            for (std::size_t i = 0; i < src.size(); ++i)
                p.body[i] ^= gf::mul(coef, src[i]);
        }
        p.gch = synthesize_gch(gen.packets.front(), k, r, k + m, gen.generation_id,
                               p.body.size());
        finalize_checksum(p);
        out.push_back(std::move(p));
    }
    return out;
}

struct DecodeResult {
    std::vector<std::vector<std::uint8_t>> bodies;  // k serialized flow packets, exact length
    bool decoding_used = false;                     // false <=> systematic passthrough
};

/// Recovers the k original bodies from any subset of a generation's coded
/// packets. Packets failing their checksum are discarded before counting;
/// inconsistent metadata is an error. With all k systematic packets present
/// this is a passthrough; otherwise the k-by-k system of the first k valid
/// packets (by index) is solved over GF(256).
inline DecodeResult decode_generation(const std::vector<CodedPacket>& received) {
    std::vector<const CodedPacket*> valid;
    for (const auto& p : received) {
        if (!verify_checksum(p)) continue;  // corrupted in transit: drop
        if (p.gch.total_length != kGchHeaderSize + p.body.size())
            throw CodecError("decode: packet total_length disagrees with body size");
        valid.push_back(&p);
    }
    if (valid.empty()) throw UnrecoverableGeneration("decode: no valid packet received");

    const GchHeader& ref = valid.front()->gch;
    const int k = ref.k, r = ref.r;
    if (k < 1) throw CodecError("decode: header carries k = 0");
    std::vector<const CodedPacket*> by_index(static_cast<std::size_t>(k + r), nullptr);
    for (const CodedPacket* p : valid) {
        const GchHeader& h = p->gch;
        if (h.generation_id != ref.generation_id || h.k != ref.k || h.r != ref.r ||
            h.src_addr != ref.src_addr || h.dst_addr != ref.dst_addr ||
            h.src_port != ref.src_port || h.dst_port != ref.dst_port)
            throw CodecError("decode: inconsistent generation metadata");
        if (h.index >= k + r) throw CodecError("decode: packet index out of range");
        auto& slot = by_index[h.index];
        if (slot == nullptr) slot = p;  // duplicates are harmless; keep the first
    }

    DecodeResult result;
    bool all_mains = true;
    for (int c = 0; c < k; ++c) all_mains &= by_index[static_cast<std::size_t>(c)] != nullptr;
    if (all_mains) {
        for (int c = 0; c < k; ++c) result.bodies.push_back(by_index[static_cast<std::size_t>(c)]->body);
        return result;
    }

    std::vector<const CodedPacket*> use;
    for (int i = 0; i < k + r && static_cast<int>(use.size()) < k; ++i)
        if (by_index[static_cast<std::size_t>(i)] != nullptr)
            use.push_back(by_index[static_cast<std::size_t>(i)]);
    if (static_cast<int>(use.size()) < k)
        throw UnrecoverableGeneration("decode: only " + std::to_string(use.size()) +
                                      " valid packets for k = " + std::to_string(k));

    std::size_t padded_len = 0;
    for (const CodedPacket* p : use) padded_len = std::max(padded_len, p->body.size());
    std::vector<std::vector<std::uint8_t>> rows, rhs;
    for (const CodedPacket* p : use) {
        std::vector<std::uint8_t> row(static_cast<std::size_t>(k), 0);
        if (p->gch.index < k)
            row[p->gch.index] = 1;
        else
            for (int c = 0; c < k; ++c)
                row[static_cast<std::size_t>(c)] = coding_coefficient(k, p->gch.index - k, c);
        rows.push_back(std::move(row));
        std::vector<std::uint8_t> padded = p->body;
        padded.resize(padded_len, 0);
        rhs.push_back(std::move(padded));
    }
    std::vector<std::vector<std::uint8_t>> solved = gf::solve(std::move(rows), std::move(rhs));

    result.decoding_used = true;
    for (int c = 0; c < k; ++c) {
        const CodedPacket* present = by_index[static_cast<std::size_t>(c)];
        std::vector<std::uint8_t>& body = solved[static_cast<std::size_t>(c)];
        const std::size_t exact =
            present != nullptr ? present->gch.original_length : embedded_flow_packet_size(body);
        if (exact > body.size()) throw CodecError("decode: recovered body shorter than its length field");
        body.resize(exact);
        result.bodies.push_back(std::move(body));
    }
    return result;
}

}  // namespace sfcrel
