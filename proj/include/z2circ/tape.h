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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "z2circ/random.h"
#include "z2circ/schedule.h"

namespace z2circ {

/// One recorded stochastic choice. Records are appended in canonical event
/// order: for every measurement its outcome (random or deterministic), for
/// every tied feedback its coin.
struct TapeRecord {
    enum Kind : std::uint8_t { Outcome = 0, Coin = 1 };

    Kind kind;
    /// Outcome: +1 or -1. Coin: +1 means "flip", -1 means "no flip".
    std::int8_t value;
    /// Outcome only: whether the engine sampled it (true) or predicted it (false).
    bool random;

    std::uint8_t encode() const;
    static TapeRecord decode(std::uint8_t byte);
    bool operator==(const TapeRecord &) const = default;
};

/// A recorded trajectory: schedule, initial state, and every outcome.
struct OutcomeTape {
    Schedule schedule;
    InitialState initial = InitialState::AllZero;
    std::vector<TapeRecord> records;

    bool operator==(const OutcomeTape &) const = default;
};

class ReplayMismatch : public std::runtime_error {
  public:
    ReplayMismatch(std::size_t position, const std::string &what);
    std::size_t position() const { return position_; }

  private:
    std::size_t position_;
};

class TapeFormatError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Source of measurement outcomes and feedback coins for an engine.
///
/// Sample mode draws from a RandomStream; deterministic outcomes consume no
/// randomness. Replay mode consumes a recorded tape and throws ReplayMismatch
/// when the engine disagrees with it. Forced mode feeds a scripted list of
/// random outcomes/coins and ignores deterministic ones (unit tests).
/// Any mode may additionally record what it hands out.
class OutcomeChannel {
  public:
    static OutcomeChannel sample(RandomStream rng);
    static OutcomeChannel replay(std::span<const TapeRecord> tape);
    static OutcomeChannel forced(std::vector<int> values);

    /// Append every record handed out to `sink`.
    OutcomeChannel &record_into(std::vector<TapeRecord> *sink) {
        sink_ = sink;
        return *this;
    }

    /// Outcome of a measurement whose result is uniformly random.
    int random_outcome();
    /// Reports a measurement whose result the engine predicts with certainty.
    void deterministic_outcome(int value);
    /// Fair coin for tied feedback. true = apply the flip.
    bool coin();

    /// Replay mode: every record consumed.
    bool exhausted() const { return cursor_ == replay_.size(); }
    std::size_t position() const { return cursor_; }

  private:
    enum class Mode { Sample, Replay, Forced };
    explicit OutcomeChannel(Mode mode, RandomStream rng) : mode_(mode), rng_(rng) {}

    const TapeRecord &next_replay(TapeRecord::Kind kind);

    Mode mode_;
    RandomStream rng_;
    std::span<const TapeRecord> replay_{};
    std::vector<int> forced_;
    std::size_t cursor_ = 0;
    std::vector<TapeRecord> *sink_ = nullptr;
};

/// Binary tape layout (little-endian):
///   magic "Z2CTAPE1" (8 bytes)
///   u8 dimension, u8 initial (0 all-zero, 1 all-plus), u8 site order (0 raster, 1 random), u8 reserved = 0
///   u32 L, f64 p, u64 seed, u64 stream, u32 sweeps
///   u64 event count, then per event: u32 site, u8 kind (0 MeasureX, 1 BondRound)
///   u64 record count, then per record: u8 code (bit0 value -1, bit1 random, bit2 coin)
///   u64 FNV-1a checksum over every preceding byte
std::vector<std::uint8_t> encode_tape_binary(const OutcomeTape &tape);
OutcomeTape decode_tape_binary(std::span<const std::uint8_t> bytes);

std::string encode_tape_json(const OutcomeTape &tape);
OutcomeTape decode_tape_json(const std::string &text);

void write_tape_file(const std::string &path, const OutcomeTape &tape);
/// Chooses the format by content (JSON starts with '{').
OutcomeTape read_tape_file(const std::string &path);

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);

}  // namespace z2circ
