#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mcc/model.hpp"

namespace mcc {

struct RateMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonIntegralSegment : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct LengthMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NegativeCompositeRate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bit streams kept unpacked, one value per bit.
using Bits = std::vector<std::uint8_t>;

inline Bits slice(const Bits& b, std::size_t from, std::size_t len) {
    if (from + len > b.size()) throw LengthMismatch("slice out of range");
    return Bits(b.begin() + from, b.begin() + from + len);
}

inline void append(Bits& to, const Bits& tail) {
    to.insert(to.end(), tail.begin(), tail.end());
}

inline Bits xor_bits(const Bits& a, const Bits& b) {
    if (a.size() != b.size()) throw LengthMismatch("xor of unequal streams");
    Bits r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] ^ b[i];
    return r;
}

// One bit stream per message index; stream I must hold exactly n*R_I bits.
struct MessageVector {
    int l = 3;
    long n = 0;
    std::map<int, Bits> streams; // message index mask -> bits

    bool operator==(const MessageVector&) const = default;
};

// n*r as an exact integer bit count.
inline long exact_bits(long n, const Rational& r) {
    Rational x = Rational(n) * r;
    if (den(x) != 1)
        throw NonIntegralSegment("n*" + to_string(r) + " is not an integer");
    if (num(x) < 0) throw RateMismatch("negative stream length");
    return num(x).convert_to<long>();
}

// ---------------------------------------------------------------------------
// Universal operations
// ---------------------------------------------------------------------------

// Every operation re-maps message streams onto wire streams carried at the
// anchor rates R*. The integer difference direction says which message
// rates move when the operation runs with step delta:
//   Overflow: msg gains delta, the overflow bits ride on the `link` stream.
//   Merge:    a and b each lose delta; the union message gains it by
//             replicating its first delta-segment on both donor streams.
//   Xor:      the three pairwise streams each donate delta to the common
//             message; the third donor carries the XOR of the two splits.
//   Pad:      the message on `link` just lowers its rate; zeros fill the gap.
enum class OpKind { Overflow, Merge, Xor, Pad };

struct CodecOp {
    std::string id;
    Channel channel = Channel::BC;
    int l = 3;
    OpKind kind = OpKind::Overflow;
    int msg = 0;  // Overflow: growing message index
    int link = 0; // Overflow: carrying stream; Pad: shrinking stream
    int a = 0;    // Merge donors
    int b = 0;

    RateVector direction() const {
        RateVector d(l);
        switch (kind) {
        case OpKind::Overflow:
            d.at(msg) = 1;
            d.at(link) = -1;
            break;
        case OpKind::Merge:
            d.at(a) = -1;
            d.at(b) = -1;
            d.at(a | b) = 1;
            break;
        case OpKind::Xor:
            d.at(M12) = -1;
            d.at(M13) = -1;
            d.at(M23) = -1;
            d.at(M123) = 2;
            break;
        case OpKind::Pad:
            d.at(link) = -1;
            break;
        }
        return d;
    }
};

namespace detail {

inline CodecOp overflow_op(Channel ch, int l, int msg, int link) {
    CodecOp op;
    op.channel = ch;
    op.l = l;
    op.kind = OpKind::Overflow;
    op.msg = msg;
    op.link = link;
    op.id = channel_name(ch) + std::to_string(l) + ":grow-" + index_label(msg) +
            "-via-" + index_label(link);
    return op;
}

inline CodecOp merge_op(Channel ch, int l, int a, int b) {
    CodecOp op;
    op.channel = ch;
    op.l = l;
    op.kind = OpKind::Merge;
    op.a = a;
    op.b = b;
    op.id = channel_name(ch) + std::to_string(l) + ":merge-" + index_label(a) + "-" +
            index_label(b);
    return op;
}

inline CodecOp xor_op() {
    CodecOp op;
    op.channel = Channel::BC;
    op.l = 3;
    op.kind = OpKind::Xor;
    op.id = "bc3:xor-pairs";
    return op;
}

inline CodecOp pad_op(Channel ch, int l, int link) {
    CodecOp op;
    op.channel = ch;
    op.l = l;
    op.kind = OpKind::Pad;
    op.link = link;
    op.id = channel_name(ch) + std::to_string(l) + ":shrink-" + index_label(link);
    return op;
}

} // namespace detail

// The complete distinct-operation sets. Broadcast: merges of disjoint
// index pairs, overflows along covering pairs msg < link, and for L=3 the
// XOR operation. Multiple access: overflows along covering pairs
// link < msg (the wider message rides a narrower stream all its senders
// share) plus lowering the common rate. Order follows the figure columns.
inline std::vector<CodecOp> list_ops(Channel ch, int l) {
    using namespace detail;
    std::vector<CodecOp> ops;
    if (ch == Channel::BC && l == 2) {
        ops = {overflow_op(ch, 2, M1, M12), overflow_op(ch, 2, M2, M12),
               merge_op(ch, 2, M1, M2)};
    } else if (ch == Channel::BC && l == 3) {
        ops = {merge_op(ch, 3, M1, M2),        merge_op(ch, 3, M1, M3),
               merge_op(ch, 3, M2, M3),        overflow_op(ch, 3, M1, M12),
               overflow_op(ch, 3, M2, M12),    merge_op(ch, 3, M3, M12),
               overflow_op(ch, 3, M1, M13),    merge_op(ch, 3, M2, M13),
               overflow_op(ch, 3, M3, M13),    merge_op(ch, 3, M1, M23),
               overflow_op(ch, 3, M2, M23),    overflow_op(ch, 3, M3, M23),
               overflow_op(ch, 3, M12, M123),  overflow_op(ch, 3, M13, M123),
               overflow_op(ch, 3, M23, M123),  xor_op()};
    } else if (ch == Channel::MAC && l == 2) {
        ops = {overflow_op(ch, 2, M12, M1), overflow_op(ch, 2, M12, M2),
               pad_op(ch, 2, M12)};
    } else if (ch == Channel::MAC && l == 3) {
        ops = {overflow_op(ch, 3, M12, M1),   overflow_op(ch, 3, M13, M1),
               overflow_op(ch, 3, M12, M2),   overflow_op(ch, 3, M23, M2),
               overflow_op(ch, 3, M13, M3),   overflow_op(ch, 3, M23, M3),
               overflow_op(ch, 3, M123, M12), overflow_op(ch, 3, M123, M13),
               overflow_op(ch, 3, M123, M23), pad_op(ch, 3, M123)};
    } else {
        throw std::invalid_argument("list_ops: l must be 2 or 3");
    }
    return ops;
}

inline std::optional<CodecOp> find_op(const std::string& id) {
    for (Channel ch : {Channel::BC, Channel::MAC})
        for (int l : {2, 3})
            for (const auto& op : list_ops(ch, l))
                if (op.id == id) return op;
    return std::nullopt;
}

// Largest step with R* + direction*delta >= 0; empty when the direction
// has no negative component.
inline std::optional<Rational> max_delta(const CodecOp& op, const RateVector& r_star) {
    if (!r_star.nonnegative()) throw NegativeRate("max_delta needs R* >= 0");
    RateVector d = op.direction();
    std::optional<Rational> best;
    for (int mask : index_order(op.l)) {
        if (d.at(mask) >= 0) continue;
        Rational cap = r_star.at(mask) / -d.at(mask);
        if (!best || cap < *best) best = cap;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Encoding
// ---------------------------------------------------------------------------

namespace detail {

struct SegmentPlan {
    long n = 0;
    long d = 0;                   // n*delta
    std::map<int, long> wire_len; // n * R*_I
    std::map<int, long> msg_len;  // n * (R* + dir*delta)_I
};

inline SegmentPlan plan_segments(const CodecOp& op, const RateVector& r_star,
                                 const Rational& delta, long n) {
    if (delta < 0) throw RateMismatch("delta must be nonnegative");
    auto cap = max_delta(op, r_star);
    if (cap && delta > *cap) throw RateMismatch("delta exceeds the feasible step");
    SegmentPlan plan;
    plan.n = n;
    plan.d = exact_bits(n, delta);
    RateVector dir = op.direction();
    for (int mask : index_order(op.l)) {
        plan.wire_len[mask] = exact_bits(n, r_star.at(mask));
        plan.msg_len[mask] = exact_bits(n, r_star.at(mask) + delta * dir.at(mask));
    }
    return plan;
}

inline void check_streams(const MessageVector& m, const std::map<int, long>& want,
                          const char* what) {
    if (m.streams.size() != want.size())
        throw RateMismatch(std::string(what) + ": wrong stream count");
    for (const auto& [mask, len] : want) {
        auto it = m.streams.find(mask);
        if (it == m.streams.end())
            throw RateMismatch(std::string(what) + ": missing stream " + index_label(mask));
        if (static_cast<long>(it->second.size()) != len)
            throw RateMismatch(std::string(what) + ": stream " + index_label(mask) +
                               " has " + std::to_string(it->second.size()) +
                               " bits, expected " + std::to_string(len));
    }
}

} // namespace detail

// Message streams at rates R* + direction*delta in, wire streams at R* out.
inline MessageVector encode(const CodecOp& op, const RateVector& r_star,
                            const Rational& delta, const MessageVector& m) {
    auto plan = detail::plan_segments(op, r_star, delta, m.n);
    detail::check_streams(m, plan.msg_len, "encode");

    MessageVector w;
    w.l = op.l;
    w.n = m.n;
    w.streams = m.streams; // pass-through default
    const long d = plan.d;

    switch (op.kind) {
    case OpKind::Overflow: {
        const Bits& grown = m.streams.at(op.msg);
        w.streams[op.msg] = slice(grown, 0, plan.wire_len[op.msg]);
        Bits carrier = m.streams.at(op.link);
        append(carrier, slice(grown, plan.wire_len[op.msg], d));
        w.streams[op.link] = std::move(carrier);
        break;
    }
    case OpKind::Merge: {
        int u = op.a | op.b;
        const Bits& grown = m.streams.at(u);
        Bits shared = slice(grown, 0, d);
        Bits wa = m.streams.at(op.a);
        append(wa, shared);
        Bits wb = m.streams.at(op.b);
        append(wb, shared);
        w.streams[op.a] = std::move(wa);
        w.streams[op.b] = std::move(wb);
        w.streams[u] = slice(grown, d, plan.wire_len[u]);
        break;
    }
    case OpKind::Xor: {
        const Bits& common = m.streams.at(M123);
        Bits first = slice(common, 0, d);
        Bits second = slice(common, d, d);
        Bits w12 = first, w13 = second, w23 = xor_bits(first, second);
        append(w12, m.streams.at(M12));
        append(w13, m.streams.at(M13));
        append(w23, m.streams.at(M23));
        w.streams[M12] = std::move(w12);
        w.streams[M13] = std::move(w13);
        w.streams[M23] = std::move(w23);
        w.streams[M123] = slice(common, 2 * d, plan.wire_len[M123]);
        break;
    }
    case OpKind::Pad: {
        Bits padded = m.streams.at(op.link);
        padded.resize(padded.size() + d, 0);
        w.streams[op.link] = std::move(padded);
        break;
    }
    }
    return w;
}

// Streams receiver i observes: every index containing i for the broadcast
// channel, all indices for the multiple access channel (single sink).
inline std::vector<int> observed_streams(const CodecOp& op, int receiver) {
    std::vector<int> out;
    for (int mask : index_order(op.l))
        if (op.channel == Channel::MAC || (mask & (1 << (receiver - 1))))
            out.push_back(mask);
    return out;
}

// Reconstruct the message estimates receiver i is responsible for from its
// observed wire streams. Round-trips encode exactly on intact delivery.
// The multiple access channel has a single sink, so any receiver value
// (conventionally 0) selects the full stream set there.
inline MessageVector decode(const CodecOp& op, int receiver, const MessageVector& w_hat,
                            const RateVector& r_star, const Rational& delta) {
    if (op.channel == Channel::BC && (receiver < 1 || receiver > op.l))
        throw std::invalid_argument("bad receiver");
    auto plan = detail::plan_segments(op, r_star, delta, w_hat.n);

    std::map<int, long> observed;
    for (int mask : observed_streams(op, receiver)) observed[mask] = plan.wire_len[mask];
    detail::check_streams(w_hat, observed, "decode");

    auto sees = [&](int mask) { return observed.count(mask) != 0; };
    const long d = plan.d;

    MessageVector m;
    m.l = op.l;
    m.n = w_hat.n;
    for (const auto& [mask, bits] : w_hat.streams) m.streams[mask] = bits;

    switch (op.kind) {
    case OpKind::Overflow:
        if (sees(op.link)) {
            const Bits& carrier = w_hat.streams.at(op.link);
            m.streams[op.link] = slice(carrier, 0, plan.msg_len[op.link]);
            if (sees(op.msg)) {
                Bits grown = w_hat.streams.at(op.msg);
                append(grown, slice(carrier, plan.msg_len[op.link], d));
                m.streams[op.msg] = std::move(grown);
            }
        }
        break;
    case OpKind::Merge: {
        int u = op.a | op.b;
        Bits shared;
        if (sees(op.a)) {
            const Bits& wa = w_hat.streams.at(op.a);
            m.streams[op.a] = slice(wa, 0, plan.msg_len[op.a]);
            shared = slice(wa, plan.msg_len[op.a], d);
        }
        if (sees(op.b)) {
            const Bits& wb = w_hat.streams.at(op.b);
            m.streams[op.b] = slice(wb, 0, plan.msg_len[op.b]);
            if (shared.empty() && d > 0) shared = slice(wb, plan.msg_len[op.b], d);
        }
        if (sees(u)) {
            Bits grown = std::move(shared);
            grown.resize(d); // receivers outside a and b never reach here
            append(grown, w_hat.streams.at(u));
            m.streams[u] = std::move(grown);
        }
        break;
    }
    case OpKind::Xor: {
        Bits first, second;
        if (sees(M12) && sees(M13)) {
            first = slice(w_hat.streams.at(M12), 0, d);
            second = slice(w_hat.streams.at(M13), 0, d);
        } else if (sees(M12)) {
            first = slice(w_hat.streams.at(M12), 0, d);
            second = xor_bits(first, slice(w_hat.streams.at(M23), 0, d));
        } else {
            second = slice(w_hat.streams.at(M13), 0, d);
            first = xor_bits(second, slice(w_hat.streams.at(M23), 0, d));
        }
        Bits common = std::move(first);
        append(common, second);
        append(common, w_hat.streams.at(M123));
        m.streams[M123] = std::move(common);
        for (int pair : {M12, M13, M23})
            if (sees(pair))
                m.streams[pair] = slice(w_hat.streams.at(pair), d, plan.msg_len[pair]);
        break;
    }
    case OpKind::Pad:
        if (sees(op.link))
            m.streams[op.link] = slice(w_hat.streams.at(op.link), 0, plan.msg_len[op.link]);
        break;
    }

    // Keep only the messages addressed to this receiver.
    MessageVector out;
    out.l = op.l;
    out.n = m.n;
    for (int mask : observed_streams(op, receiver)) out.streams[mask] = m.streams.at(mask);
    return out;
}

// ---------------------------------------------------------------------------
// Time sharing
// ---------------------------------------------------------------------------

struct ChainStage {
    CodecOp op;
    Rational delta;
};

// One scheduled part: a chain of operations applied in sequence on the
// part's sub-block. Operations acting on disjoint streams stack this way
// (the second stage treats the first stage's message side as its wire
// side), which single-level time sharing cannot express. A chain is still
// a composite, never a primitive operation.
struct SchedulePart {
    std::vector<ChainStage> stages;
    Rational weight;

    SchedulePart() = default;
    SchedulePart(CodecOp op, Rational delta, Rational weight_)
        : stages{{std::move(op), std::move(delta)}}, weight(std::move(weight_)) {}
    SchedulePart(std::vector<ChainStage> stages_, Rational weight_)
        : stages(std::move(stages_)), weight(std::move(weight_)) {}

    // Message-side rates of the chain over a given anchor; every
    // intermediate anchor must stay nonnegative for the chain to run.
    RateVector chain_rate(const RateVector& anchor) const {
        RateVector r = anchor;
        for (const auto& st : stages) {
            if (st.delta < 0)
                throw NegativeCompositeRate("chain stage has a negative step");
            r = r + st.delta * st.op.direction();
            if (!r.nonnegative())
                throw NegativeCompositeRate("chain leaves the nonnegative orthant");
        }
        return r;
    }
};

// Weighted mixture of operation chains; any unassigned weight runs plain
// R*. An empty schedule is the identity mapping.
struct Schedule {
    Channel channel = Channel::BC;
    int l = 3;
    std::vector<SchedulePart> parts;
};

inline RateVector schedule_rate(const Schedule& s, const RateVector& r_star) {
    if (r_star.l != s.l) throw DimensionMismatch("schedule_rate: L mismatch");
    RateVector total = r_star;
    Rational weight_sum = 0;
    for (const auto& p : s.parts) {
        for (const auto& st : p.stages)
            if (st.op.channel != s.channel || st.op.l != s.l)
                throw RateMismatch("schedule mixes operations of different channels");
        if (p.weight < 0)
            throw NegativeCompositeRate("schedule weights must be >= 0");
        weight_sum += p.weight;
        RateVector moved = p.chain_rate(r_star); // validates the chain
        for (int i = 0; i < total.size(); ++i)
            total.entries[i] += p.weight * (moved.entries[i] - r_star.entries[i]);
    }
    if (weight_sum > 1) throw NegativeCompositeRate("schedule weights exceed 1");
    if (!total.nonnegative())
        throw NegativeCompositeRate("composite rate has a negative component");
    return total;
}

// Composite codec: the block splits into one sub-block per part (plus a
// remainder that passes through at R*), each encoded independently.
struct CompositeCodec {
    Schedule schedule;
    RateVector r_star;

    std::vector<long> part_lengths(long n) const {
        std::vector<long> lens;
        long used = 0;
        for (const auto& p : schedule.parts) {
            long nk = exact_bits(n, p.weight);
            lens.push_back(nk);
            used += nk;
        }
        lens.push_back(n - used); // remainder block
        return lens;
    }

    MessageVector encode(const MessageVector& m) const {
        auto lens = part_lengths(m.n);
        RateVector composite = schedule_rate(schedule, r_star);

        std::map<int, long> offset;
        MessageVector wire;
        wire.l = r_star.l;
        wire.n = m.n;
        detail::check_streams(m, expected_lengths(composite, m.n), "composite encode");

        for (std::size_t k = 0; k <= schedule.parts.size(); ++k) {
            long nk = lens[k];
            const SchedulePart* part =
                k < schedule.parts.size() ? &schedule.parts[k] : nullptr;
            MessageVector sub;
            sub.l = r_star.l;
            sub.n = nk;
            RateVector rates = part ? part->chain_rate(r_star) : r_star;
            for (int mask : index_order(r_star.l)) {
                long len = exact_bits(nk, rates.at(mask));
                sub.streams[mask] = slice(m.streams.at(mask), offset[mask], len);
                offset[mask] += len;
            }
            if (part) {
                // walk the chain back down to the wire anchor
                std::vector<RateVector> anchors{r_star};
                for (std::size_t i = 0; i + 1 < part->stages.size(); ++i)
                    anchors.push_back(anchors.back() +
                                      part->stages[i].delta *
                                          part->stages[i].op.direction());
                for (std::size_t i = part->stages.size(); i-- > 0;)
                    sub = mcc::encode(part->stages[i].op, anchors[i],
                                      part->stages[i].delta, sub);
            }
            for (int mask : index_order(r_star.l))
                append(wire.streams[mask], sub.streams.at(mask));
        }
        return wire;
    }

    MessageVector decode(int receiver, const MessageVector& w_hat) const {
        auto lens = part_lengths(w_hat.n);
        bool mac = schedule.channel == Channel::MAC;
        std::vector<int> masks;
        for (int mask : index_order(r_star.l))
            if (mac || (mask & (1 << (receiver - 1)))) masks.push_back(mask);

        std::map<int, long> offset;
        MessageVector out;
        out.l = r_star.l;
        out.n = w_hat.n;
        for (int mask : masks) out.streams[mask] = {};

        for (std::size_t k = 0; k <= schedule.parts.size(); ++k) {
            long nk = lens[k];
            const SchedulePart* part =
                k < schedule.parts.size() ? &schedule.parts[k] : nullptr;
            MessageVector sub;
            sub.l = r_star.l;
            sub.n = nk;
            for (int mask : masks) {
                long len = exact_bits(nk, r_star.at(mask));
                sub.streams[mask] = slice(w_hat.streams.at(mask), offset[mask], len);
                offset[mask] += len;
            }
            if (part) {
                RateVector anchor = r_star;
                for (const auto& st : part->stages) {
                    sub = mcc::decode(st.op, receiver, sub, anchor, st.delta);
                    anchor = anchor + st.delta * st.op.direction();
                }
            }
            for (int mask : masks) append(out.streams[mask], sub.streams.at(mask));
        }
        return out;
    }

    static std::map<int, long> expected_lengths(const RateVector& rates, long n) {
        std::map<int, long> want;
        for (int mask : index_order(rates.l)) want[mask] = exact_bits(n, rates.at(mask));
        return want;
    }
};

inline std::pair<RateVector, CompositeCodec> timeshare(const Schedule& s,
                                                       const RateVector& r_star) {
    RateVector rate = schedule_rate(s, r_star); // validates the schedule
    return {rate, CompositeCodec{s, r_star}};
}

} // namespace mcc
