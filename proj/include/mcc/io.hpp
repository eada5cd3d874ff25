#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "mcc/channel.hpp"
#include "mcc/codec.hpp"
#include "mcc/geometry.hpp"
#include "mcc/model.hpp"
#include "mcc/prover.hpp"

// Serialization for every file format the tools speak: rationals as "p/q"
// strings (never floats), matrices as integer/rational CSV with one row
// per coordinate, regions, rate vectors, schedules, trial configs and
// reports, proofs.

namespace mcc {

using Json = nlohmann::json;

inline Json to_json(const Rational& q) { return to_string(q); }

inline Json to_json(const QVec& v) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(to_json(x));
    return a;
}

inline QVec qvec_from_json(const Json& a) {
    QVec v;
    for (const auto& x : a) v.push_back(parse_rational(x.get<std::string>()));
    return v;
}

// ---------------------------------------------------------------------------
// Rate vectors: {"1": "p/q", ..., "123": "p/q"}
// ---------------------------------------------------------------------------

inline Json to_json(const RateVector& r) {
    Json j = Json::object();
    for (int mask : index_order(r.l)) j[index_label(mask)] = to_string(r.at(mask));
    return j;
}

inline RateVector rate_vector_from_json(const Json& j) {
    int l = j.size() == 3 ? 2 : 3;
    if (j.size() != static_cast<std::size_t>(index_count(l)))
        throw ParseError("rate vector needs 3 or 7 entries");
    RateVector r(l);
    for (int mask : index_order(l)) {
        const std::string key = index_label(mask);
        if (!j.contains(key)) throw ParseError("rate vector missing entry " + key);
        r.at(mask) = parse_rational(j.at(key).get<std::string>());
    }
    return r;
}

// Comma-separated form in canonical index order, e.g. "1,1/2,3".
inline RateVector rate_vector_from_csv(const std::string& text) {
    QVec entries;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) entries.push_back(parse_rational(item));
    if (entries.size() == 3) return RateVector(2, entries);
    if (entries.size() == 7) return RateVector(3, entries);
    throw ParseError("rate vector needs 3 or 7 comma-separated entries");
}

// ---------------------------------------------------------------------------
// Regions
// ---------------------------------------------------------------------------

inline Json to_json(const HRep& h) {
    Json ineqs = Json::array();
    for (const auto& iq : h.ineqs)
        ineqs.push_back({{"normal", to_json(iq.normal)}, {"offset", to_json(iq.offset)}});
    return Json{{"dim", h.dim}, {"ineqs", ineqs}, {"nonneg", h.nonneg}};
}

inline Json to_json(const VRep& v) {
    Json verts = Json::array(), rays = Json::array();
    for (const auto& p : v.vertices) verts.push_back(to_json(p));
    for (const auto& r : v.rays) rays.push_back(to_json(r));
    return Json{{"dim", v.dim}, {"vertices", verts}, {"rays", rays}};
}

inline Json region_to_json(const RegionSpec& r) {
    Json j{{"dim", r.dim()},
           {"ineqs", Json::array()},
           {"vertices", Json::array()},
           {"rays", Json::array()}};
    if (std::holds_alternative<HRep>(r.rep)) {
        Json h = to_json(std::get<HRep>(r.rep));
        j["ineqs"] = h["ineqs"];
        j["nonneg"] = h["nonneg"];
    } else {
        Json v = to_json(std::get<VRep>(r.rep));
        j["vertices"] = v["vertices"];
        j["rays"] = v["rays"];
    }
    return j;
}

// ---------------------------------------------------------------------------
// Matrix CSV: one row per coordinate, one column per facet or ray.
// ---------------------------------------------------------------------------

inline std::string matrix_to_csv(const std::vector<QVec>& columns) {
    if (columns.empty()) return "";
    std::string out;
    for (std::size_t r = 0; r < columns[0].size(); ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) out += ",";
            out += to_string(columns[c][r]);
        }
        out += "\n";
    }
    return out;
}

inline std::vector<QVec> matrix_from_csv(const std::string& text) {
    std::vector<QVec> rows;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        QVec row;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(parse_rational(cell));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) return {};
    std::vector<QVec> cols(rows[0].size(), QVec(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows[0].size())
            throw ParseError("ragged matrix CSV");
        for (std::size_t c = 0; c < rows[r].size(); ++c) cols[c][r] = rows[r][c];
    }
    return cols;
}

// ---------------------------------------------------------------------------
// Operations and schedules
// ---------------------------------------------------------------------------

inline Json to_json(const CodecOp& op) {
    return Json{{"id", op.id},
                {"channel", channel_name(op.channel)},
                {"l", op.l},
                {"direction", to_json(op.direction())}};
}

inline Json op_registry_json() {
    Json a = Json::array();
    for (Channel ch : {Channel::BC, Channel::MAC})
        for (int l : {2, 3})
            for (const auto& op : list_ops(ch, l)) a.push_back(to_json(op));
    return a;
}

// Parts serialize as {"op": id, "delta": "p/q", "weight": "p/q"} when they
// hold a single stage, or {"stages": [{"op","delta"},...], "weight"} for
// operation chains.
inline Json to_json(const Schedule& s) {
    Json parts = Json::array();
    for (const auto& p : s.parts) {
        if (p.stages.size() == 1) {
            parts.push_back({{"op", p.stages[0].op.id},
                             {"delta", to_string(p.stages[0].delta)},
                             {"weight", to_string(p.weight)}});
        } else {
            Json stages = Json::array();
            for (const auto& st : p.stages)
                stages.push_back({{"op", st.op.id}, {"delta", to_string(st.delta)}});
            parts.push_back({{"stages", stages}, {"weight", to_string(p.weight)}});
        }
    }
    return parts;
}

inline Schedule schedule_from_json(const Json& parts, Channel channel, int l) {
    Schedule s;
    s.channel = channel;
    s.l = l;
    auto lookup = [](const Json& j) {
        auto op = find_op(j.get<std::string>());
        if (!op) throw ParseError("unknown operation id '" + j.get<std::string>() + "'");
        return *op;
    };
    for (const auto& pj : parts) {
        Rational weight = parse_rational(pj.at("weight").get<std::string>());
        if (pj.contains("stages")) {
            std::vector<ChainStage> stages;
            for (const auto& st : pj.at("stages"))
                stages.push_back({lookup(st.at("op")),
                                  parse_rational(st.at("delta").get<std::string>())});
            s.parts.push_back({std::move(stages), weight});
        } else {
            s.parts.push_back({lookup(pj.at("op")),
                               parse_rational(pj.at("delta").get<std::string>()),
                               weight});
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Trial configs and reports
// ---------------------------------------------------------------------------

struct TrialConfig {
    Channel channel = Channel::BC;
    RateVector r_star;
    Schedule schedule;
    long n = 1024;
    int k = 1;
    std::uint64_t seed = 0;
    long trials = 1;
};

// {"channel":"bc"|"mac", "rstar":{...}, "op":id | "schedule":[...],
//  "n":int, "k":int, "seed":int, "trials":int}
inline TrialConfig trial_config_from_json(const Json& j) {
    TrialConfig cfg;
    std::string ch = j.at("channel").get<std::string>();
    if (ch == "bc") cfg.channel = Channel::BC;
    else if (ch == "mac") cfg.channel = Channel::MAC;
    else throw ParseError("channel must be 'bc' or 'mac'");
    cfg.r_star = rate_vector_from_json(j.at("rstar"));
    if (j.contains("n")) cfg.n = j.at("n").get<long>();
    if (j.contains("k")) cfg.k = j.at("k").get<int>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("trials")) cfg.trials = j.at("trials").get<long>();

    cfg.schedule.channel = cfg.channel;
    cfg.schedule.l = cfg.r_star.l;
    if (j.contains("schedule")) {
        cfg.schedule = schedule_from_json(j.at("schedule"), cfg.channel, cfg.r_star.l);
    } else if (j.contains("op")) {
        auto op = find_op(j.at("op").get<std::string>());
        if (!op) throw ParseError("unknown operation id");
        Rational delta = j.contains("delta")
                             ? parse_rational(j.at("delta").get<std::string>())
                             : max_delta(*op, cfg.r_star).value_or(Rational(0));
        cfg.schedule.parts.push_back({*op, delta, Rational(1)});
    }
    return cfg;
}

inline Json to_json(const TrialReport& r) {
    Json errors = Json::array();
    for (const auto& [key, count] : r.bit_errors)
        errors.push_back({{"receiver", key.first == 0 ? "sink" : std::to_string(key.first)},
                          {"message", index_label(key.second)},
                          {"bit_errors", count}});
    return Json{{"channel", channel_name(r.channel)},
                {"n", r.n},
                {"uses", r.uses},
                {"seed", r.seed},
                {"bit_errors", errors},
                {"total_errors", r.total_errors()},
                {"erasures", r.erasures},
                {"achieved", to_json(r.achieved)}};
}

// ---------------------------------------------------------------------------
// Proofs and lemma reports
// ---------------------------------------------------------------------------

inline Json to_json(const ProofCertificate& cert) {
    Json elem = Json::array(), cons = Json::array();
    for (const auto& t : cert.elemental)
        elem.push_back({{"inequality", t.label}, {"multiplier", to_string(t.coeff)}});
    for (const auto& t : cert.constraint)
        cons.push_back({{"equality", t.label}, {"multiplier", to_string(t.coeff)}});
    return Json{{"elemental", elem}, {"constraints", cons}};
}

inline Json to_json(const WitnessDistribution& w) {
    Json pmf = Json::array();
    for (const auto& p : w.pmf) pmf.push_back(to_string(p));
    return Json{{"description", w.description}, {"n", w.n}, {"pmf", pmf}};
}

inline Json to_json(const ProofResult& r, const EntropyVector* target = nullptr) {
    Json j{{"proved", r.proved}};
    if (r.certificate) j["certificate"] = to_json(*r.certificate);
    if (r.witness) {
        j["witness"] = to_json(*r.witness);
        if (target) j["witness"]["value"] = r.witness->evaluate(*target);
    }
    return j;
}

inline Json to_json(const LemmaReport& r) {
    Json inst = Json::array();
    for (const auto& i : r.instances)
        inst.push_back({{"instance", i.description}, {"proved", i.proved}});
    return Json{{"lemma", r.lemma},
                {"instances", r.instance_count},
                {"proved", r.proved_count},
                {"passed", r.passed},
                {"details", inst}};
}

// ---------------------------------------------------------------------------
// Message fixtures: packed bit file plus a JSON sidecar with stream lengths.
// ---------------------------------------------------------------------------

inline void write_message_fixture(const MessageVector& m, const std::string& path) {
    Json sidecar{{"l", m.l}, {"n", m.n}, {"streams", Json::object()}};
    std::string packed;
    std::uint8_t acc = 0;
    int fill = 0;
    for (int mask : index_order(m.l)) {
        sidecar["streams"][index_label(mask)] = m.streams.at(mask).size();
        for (std::uint8_t bit : m.streams.at(mask)) {
            acc = static_cast<std::uint8_t>((acc << 1) | (bit & 1));
            if (++fill == 8) {
                packed.push_back(static_cast<char>(acc));
                acc = 0;
                fill = 0;
            }
        }
    }
    if (fill) packed.push_back(static_cast<char>(acc << (8 - fill)));
    std::ofstream bin(path, std::ios::binary);
    bin.write(packed.data(), static_cast<std::streamsize>(packed.size()));
    std::ofstream side(path + ".json");
    side << sidecar.dump(2) << "\n";
}

inline MessageVector read_message_fixture(const std::string& path) {
    std::ifstream side(path + ".json");
    if (!side) throw ParseError("missing sidecar " + path + ".json");
    Json sidecar = Json::parse(side);
    std::ifstream bin(path, std::ios::binary);
    std::string packed((std::istreambuf_iterator<char>(bin)),
                       std::istreambuf_iterator<char>());
    MessageVector m;
    m.l = sidecar.at("l").get<int>();
    m.n = sidecar.at("n").get<long>();
    std::size_t bitpos = 0;
    auto next_bit = [&]() -> std::uint8_t {
        std::uint8_t byte = static_cast<std::uint8_t>(packed.at(bitpos / 8));
        std::uint8_t bit = (byte >> (7 - bitpos % 8)) & 1;
        ++bitpos;
        return bit;
    };
    for (int mask : index_order(m.l)) {
        long len = sidecar.at("streams").at(index_label(mask)).get<long>();
        Bits bits(len);
        for (long i = 0; i < len; ++i) bits[i] = next_bit();
        m.streams[mask] = std::move(bits);
    }
    return m;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace mcc
