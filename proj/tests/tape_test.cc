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

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

#include "z2circ/cluster_state.h"
#include "z2circ/tape.h"

namespace z2circ {
namespace {

OutcomeTape sample_tape(int dim, int L, double p, std::size_t sweeps, InitialState initial, std::uint64_t seed) {
    const Lattice lat(dim, L);
    const auto schedule = generate_schedule(lat, p, sweeps, trajectory_stream(seed, 0, Lane::Schedule));
    return record_outcomes(lat, schedule, initial, trajectory_stream(seed, 0, Lane::Dynamics));
}

TEST(TapeRecord, EncodeDecodeAllCodes) {
    for (auto kind : {TapeRecord::Outcome, TapeRecord::Coin}) {
        for (std::int8_t v : {std::int8_t{1}, std::int8_t{-1}}) {
            for (bool random : {false, true}) {
                const TapeRecord r{kind, v, kind == TapeRecord::Coin ? false : random};
                EXPECT_EQ(TapeRecord::decode(r.encode()), r);
            }
        }
    }
}

TEST(Tape, BinaryRoundTrip) {
    const auto tape = sample_tape(2, 4, 0.6, 5, InitialState::AllZero, 3);
    ASSERT_FALSE(tape.records.empty());
    const auto bytes = encode_tape_binary(tape);
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 8), "Z2CTAPE1");
    EXPECT_EQ(decode_tape_binary(bytes), tape);
}

TEST(Tape, JsonRoundTrip) {
    const auto tape = sample_tape(1, 8, 0.4, 4, InitialState::AllPlus, 4);
    EXPECT_EQ(decode_tape_json(encode_tape_json(tape)), tape);
}

TEST(Tape, CorruptByteFailsChecksum) {
    const auto tape = sample_tape(1, 8, 0.4, 4, InitialState::AllZero, 5);
    auto bytes = encode_tape_binary(tape);
    bytes[bytes.size() / 2] ^= 0x01;
    EXPECT_THROW(decode_tape_binary(bytes), TapeFormatError);
    auto truncated = encode_tape_binary(tape);
    truncated.resize(20);
    EXPECT_THROW(decode_tape_binary(truncated), TapeFormatError);
}

TEST(Tape, ZeroSweepsGivesEmptyTape) {
    const auto tape = sample_tape(1, 8, 0.4, 0, InitialState::AllZero, 6);
    EXPECT_TRUE(tape.schedule.events.empty());
    EXPECT_TRUE(tape.records.empty());
    EXPECT_EQ(decode_tape_binary(encode_tape_binary(tape)), tape);
}

TEST(Tape, FullBondProbabilityRecordsOnlyPlusOnes) {
    const auto tape = sample_tape(1, 8, 1.0, 3, InitialState::AllZero, 7);
    ASSERT_EQ(tape.records.size(), 8u * 3 * 2);
    for (const auto &r : tape.records) {
        EXPECT_EQ(r.kind, TapeRecord::Outcome);
        EXPECT_EQ(r.value, +1);
        EXPECT_FALSE(r.random);
    }
}

TEST(Tape, FileRoundTripBothFormats) {
    const auto tape = sample_tape(1, 8, 0.5, 3, InitialState::AllZero, 8);
    const auto dir = std::filesystem::temp_directory_path();
    const auto bin = (dir / "z2circ_tape_test.tape").string();
    write_tape_file(bin, tape);
    EXPECT_EQ(read_tape_file(bin), tape);
    std::filesystem::remove(bin);
    const auto js = (dir / "z2circ_tape_test.json").string();
    {
        std::FILE *f = std::fopen(js.c_str(), "w");
        const auto text = encode_tape_json(tape);
        std::fwrite(text.data(), 1, text.size(), f);
        std::fclose(f);
    }
    EXPECT_EQ(read_tape_file(js), tape);
    std::filesystem::remove(js);
}

TEST(OutcomeChannel, ReplayDetectsMismatch) {
    std::vector<TapeRecord> recs{{TapeRecord::Outcome, +1, false}};
    auto ch = OutcomeChannel::replay(recs);
    EXPECT_THROW(ch.deterministic_outcome(-1), ReplayMismatch);
    auto ch2 = OutcomeChannel::replay(recs);
    EXPECT_THROW(ch2.coin(), ReplayMismatch);
    auto ch3 = OutcomeChannel::replay(recs);
    ch3.deterministic_outcome(+1);
    EXPECT_TRUE(ch3.exhausted());
    EXPECT_THROW(ch3.random_outcome(), ReplayMismatch);
}

TEST(OutcomeChannel, DeterministicOutcomesConsumeNoRandomness) {
    auto a = OutcomeChannel::sample(RandomStream(1, 1));
    auto b = OutcomeChannel::sample(RandomStream(1, 1));
    a.deterministic_outcome(+1);
    a.deterministic_outcome(-1);
    EXPECT_EQ(a.random_outcome(), b.random_outcome());
}

TEST(Fnv1a, KnownValues) {
    EXPECT_EQ(fnv1a64({}), 0xcbf29ce484222325ull);
    const std::uint8_t a[] = {'a'};
    EXPECT_EQ(fnv1a64(a), 0xaf63dc4c8601ec8cull);
}

}  // namespace
}  // namespace z2circ
