// Copyright 2026 The z2circ Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "z2circ/tape.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "json.hpp"

namespace z2circ {

std::uint8_t TapeRecord::encode() const {
    std::uint8_t code = 0;
    if (value < 0) {
        code |= 1;
    }
    if (random) {
        code |= 2;
    }
    if (kind == Coin) {
        code |= 4;
    }
    return code;
}

TapeRecord TapeRecord::decode(std::uint8_t code) {
    if (code > 7 || (code & 6) == 6) {
        throw TapeFormatError("invalid tape record code " + std::to_string(code));
    }
    TapeRecord r;
    r.kind = (code & 4) ? Coin : Outcome;
    r.value = (code & 1) ? -1 : +1;
    r.random = (code & 2) != 0;
    return r;
}

ReplayMismatch::ReplayMismatch(std::size_t position, const std::string &what)
    : std::runtime_error("replay mismatch at tape record " + std::to_string(position) + ": " + what),
      position_(position) {}

OutcomeChannel OutcomeChannel::sample(RandomStream rng) { return OutcomeChannel(Mode::Sample, rng); }

OutcomeChannel OutcomeChannel::replay(std::span<const TapeRecord> tape) {
    OutcomeChannel c(Mode::Replay, RandomStream(0, 0));
    c.replay_ = tape;
    return c;
}

OutcomeChannel OutcomeChannel::forced(std::vector<int> values) {
    OutcomeChannel c(Mode::Forced, RandomStream(0, 0));
    c.forced_ = std::move(values);
    return c;
}

const TapeRecord &OutcomeChannel::next_replay(TapeRecord::Kind kind) {
    if (cursor_ >= replay_.size()) {
        throw ReplayMismatch(cursor_, "tape exhausted");
    }
    const TapeRecord &r = replay_[cursor_];
    if (r.kind != kind) {
        throw ReplayMismatch(cursor_, kind == TapeRecord::Coin ? "engine wants a coin, tape has an outcome"
                                                               : "engine wants an outcome, tape has a coin");
    }
    ++cursor_;
    return r;
}

int OutcomeChannel::random_outcome() {
    int value = 0;
    switch (mode_) {
        case Mode::Sample:
            value = rng_.coin() ? -1 : +1;
            break;
        case Mode::Replay: {
            const auto &r = next_replay(TapeRecord::Outcome);
            if (!r.random) {
                throw ReplayMismatch(cursor_ - 1, "engine sampled an outcome the tape recorded as deterministic");
            }
            value = r.value;
            break;
        }
        case Mode::Forced:
            if (cursor_ >= forced_.size()) {
                throw ReplayMismatch(cursor_, "forced outcome list exhausted");
            }
            value = forced_[cursor_++] < 0 ? -1 : +1;
            break;
    }
    if (sink_ != nullptr) {
        sink_->push_back({TapeRecord::Outcome, static_cast<std::int8_t>(value), true});
    }
    return value;
}

void OutcomeChannel::deterministic_outcome(int value) {
    if (mode_ == Mode::Replay) {
        const auto &r = next_replay(TapeRecord::Outcome);
        if (r.random) {
            throw ReplayMismatch(cursor_ - 1, "engine predicts an outcome the tape recorded as random");
        }
        if (r.value != value) {
            throw ReplayMismatch(
                cursor_ - 1, "deterministic outcome " + std::to_string(value) + " but tape has " +
                                 std::to_string(static_cast<int>(r.value)));
        }
    }
    if (sink_ != nullptr) {
        sink_->push_back({TapeRecord::Outcome, static_cast<std::int8_t>(value), false});
    }
}

bool OutcomeChannel::coin() {
    bool flip = false;
    switch (mode_) {
        case Mode::Sample:
            flip = rng_.coin();
            break;
        case Mode::Replay:
            flip = next_replay(TapeRecord::Coin).value > 0;
            break;
        case Mode::Forced:
            if (cursor_ >= forced_.size()) {
                throw ReplayMismatch(cursor_, "forced outcome list exhausted");
            }
            flip = forced_[cursor_++] > 0;
            break;
    }
    if (sink_ != nullptr) {
        sink_->push_back({TapeRecord::Coin, static_cast<std::int8_t>(flip ? 1 : -1), false});
    }
    return flip;
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

namespace {

constexpr char kMagic[8] = {'Z', '2', 'C', 'T', 'A', 'P', 'E', '1'};

static_assert(std::endian::native == std::endian::little, "tape codec assumes a little-endian host");

std::size_t sites_per_sweep(const Schedule &s) {
    if ((s.dimension != 1 && s.dimension != 2) || s.linear_size < 1 || s.linear_size > (1 << 15)) {
        throw TapeFormatError("invalid tape geometry");
    }
    const auto L = static_cast<std::size_t>(s.linear_size);
    return s.dimension == 1 ? L : L * L;
}

class Writer {
  public:
    template <typename T>
    void put(T value) {
        const auto *p = reinterpret_cast<const std::uint8_t *>(&value);
        bytes.insert(bytes.end(), p, p + sizeof(T));
    }
    std::vector<std::uint8_t> bytes;
};

class Reader {
  public:
    explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}
    template <typename T>
    T get() {
        if (pos_ + sizeof(T) > bytes_.size()) {
            throw TapeFormatError("truncated tape");
        }
        T value;
        std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return value;
    }
    std::size_t position() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

  private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_tape_binary(const OutcomeTape &tape) {
    const Schedule &s = tape.schedule;
    Writer w;
    for (char c : kMagic) {
        w.put(static_cast<std::uint8_t>(c));
    }
    w.put(static_cast<std::uint8_t>(s.dimension));
    w.put(static_cast<std::uint8_t>(tape.initial));
    w.put(static_cast<std::uint8_t>(s.order));
    w.put(std::uint8_t{0});
    w.put(static_cast<std::uint32_t>(s.linear_size));
    w.put(s.p);
    w.put(s.seed);
    w.put(s.stream);
    w.put(static_cast<std::uint32_t>(s.num_sweeps()));
    w.put(static_cast<std::uint64_t>(s.events.size()));
    for (const Event &e : s.events) {
        w.put(static_cast<std::uint32_t>(e.site));
        w.put(static_cast<std::uint8_t>(e.kind));
    }
    w.put(static_cast<std::uint64_t>(tape.records.size()));
    for (const TapeRecord &r : tape.records) {
        w.put(r.encode());
    }
    w.put(fnv1a64(w.bytes));
    return std::move(w.bytes);
}

OutcomeTape decode_tape_binary(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < sizeof(kMagic) + 8 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
        throw TapeFormatError("not a z2circ binary tape (bad magic)");
    }
    const auto body = bytes.first(bytes.size() - 8);
    std::uint64_t stored;
    std::memcpy(&stored, bytes.data() + body.size(), 8);
    if (fnv1a64(body) != stored) {
        throw TapeFormatError("tape checksum mismatch");
    }
    Reader r(body);
    for (std::size_t i = 0; i < sizeof(kMagic); ++i) {
        r.get<std::uint8_t>();
    }
    OutcomeTape tape;
    Schedule &s = tape.schedule;
    s.dimension = r.get<std::uint8_t>();
    const auto initial = r.get<std::uint8_t>();
    const auto order = r.get<std::uint8_t>();
    r.get<std::uint8_t>();
    if (initial > 1 || order > 1) {
        throw TapeFormatError("invalid tape header");
    }
    tape.initial = static_cast<InitialState>(initial);
    s.order = static_cast<SiteOrder>(order);
    s.linear_size = static_cast<int>(r.get<std::uint32_t>());
    s.p = r.get<double>();
    s.seed = r.get<std::uint64_t>();
    s.stream = r.get<std::uint64_t>();
    const auto sweeps = r.get<std::uint32_t>();
    const auto n_events = r.get<std::uint64_t>();
    if (n_events > r.remaining() / 5) {
        throw TapeFormatError("event count exceeds tape size");
    }
    s.events.reserve(n_events);
    for (std::uint64_t i = 0; i < n_events; ++i) {
        const auto site = r.get<std::uint32_t>();
        const auto kind = r.get<std::uint8_t>();
        if (kind > 1) {
            throw TapeFormatError("invalid event kind");
        }
        s.events.push_back({static_cast<EventKind>(kind), site});
    }
    const auto n_records = r.get<std::uint64_t>();
    if (n_records != r.remaining()) {
        throw TapeFormatError("record count does not match tape size");
    }
    tape.records.reserve(n_records);
    for (std::uint64_t i = 0; i < n_records; ++i) {
        tape.records.push_back(TapeRecord::decode(r.get<std::uint8_t>()));
    }
    s.sites_per_sweep = sites_per_sweep(s);
    if (s.sites_per_sweep * sweeps != n_events) {
        throw TapeFormatError("event count does not match L and the sweep count");
    }
    return tape;
}

std::string encode_tape_json(const OutcomeTape &tape) {
    const Schedule &s = tape.schedule;
    nlohmann::json j;
    j["format"] = "z2circ-tape";
    j["version"] = 1;
    j["dimension"] = s.dimension;
    j["L"] = s.linear_size;
    j["p"] = s.p;
    j["seed"] = s.seed;
    j["stream"] = s.stream;
    j["sweeps"] = s.num_sweeps();
    j["site_order"] = to_string(s.order);
    j["initial"] = to_string(tape.initial);
    auto &sites = j["event_sites"] = nlohmann::json::array();
    std::string kinds;
    for (const Event &e : s.events) {
        sites.push_back(e.site);
        kinds.push_back(e.kind == EventKind::BondRound ? 'B' : 'X');
    }
    j["event_kinds"] = kinds;
    std::string codes;
    for (const TapeRecord &r : tape.records) {
        codes.push_back(static_cast<char>('0' + r.encode()));
    }
    j["records"] = codes;
    std::vector<std::uint8_t> raw(codes.begin(), codes.end());
    raw.insert(raw.end(), kinds.begin(), kinds.end());
    j["checksum"] = fnv1a64(raw);
    return j.dump();
}

OutcomeTape decode_tape_json(const std::string &text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception &e) {
        throw TapeFormatError(std::string("tape JSON does not parse: ") + e.what());
    }
    try {
        if (j.at("format") != "z2circ-tape" || j.at("version") != 1) {
            throw TapeFormatError("unsupported tape format/version");
        }
        OutcomeTape tape;
        Schedule &s = tape.schedule;
        s.dimension = j.at("dimension");
        s.linear_size = j.at("L");
        s.p = j.at("p");
        s.seed = j.at("seed");
        s.stream = j.at("stream");
        s.order = site_order_from_string(j.at("site_order"));
        tape.initial = initial_state_from_string(j.at("initial"));
        const std::string kinds = j.at("event_kinds");
        const std::string codes = j.at("records");
        std::vector<std::uint8_t> raw(codes.begin(), codes.end());
        raw.insert(raw.end(), kinds.begin(), kinds.end());
        if (j.at("checksum").get<std::uint64_t>() != fnv1a64(raw)) {
            throw TapeFormatError("tape checksum mismatch");
        }
        const auto &sites = j.at("event_sites");
        if (sites.size() != kinds.size()) {
            throw TapeFormatError("event_sites and event_kinds differ in length");
        }
        for (std::size_t i = 0; i < kinds.size(); ++i) {
            if (kinds[i] != 'B' && kinds[i] != 'X') {
                throw TapeFormatError("invalid event kind");
            }
            s.events.push_back({kinds[i] == 'B' ? EventKind::BondRound : EventKind::MeasureX, sites[i].get<Site>()});
        }
        for (char c : codes) {
            if (c < '0' || c > '7') {
                throw TapeFormatError("invalid record code");
            }
            tape.records.push_back(TapeRecord::decode(static_cast<std::uint8_t>(c - '0')));
        }
        const std::size_t sweeps = j.at("sweeps");
        s.sites_per_sweep = sites_per_sweep(s);
        if (s.sites_per_sweep * sweeps != s.events.size()) {
            throw TapeFormatError("event count does not match L and the sweep count");
        }
        return tape;
    } catch (const nlohmann::json::exception &e) {
        throw TapeFormatError(std::string("malformed tape JSON: ") + e.what());
    } catch (const std::invalid_argument &e) {
        throw TapeFormatError(std::string("malformed tape JSON: ") + e.what());
    }
}

void write_tape_file(const std::string &path, const OutcomeTape &tape) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::ios_base::failure("cannot open " + path + " for writing");
    }
    if (path.ends_with(".json")) {
        out << encode_tape_json(tape);
    } else {
        const auto bytes = encode_tape_binary(tape);
        out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    }
    if (!out) {
        throw std::ios_base::failure("failed writing " + path);
    }
}

OutcomeTape read_tape_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::ios_base::failure("cannot open " + path);
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (!bytes.empty() && bytes.front() == '{') {
        return decode_tape_json(std::string(bytes.begin(), bytes.end()));
    }
    return decode_tape_binary(bytes);
}

}  // namespace z2circ
