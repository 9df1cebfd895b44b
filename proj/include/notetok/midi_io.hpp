#pragma once

// Standard MIDI File (format 0/1) reader and writer.
//
// The model is lossless for everything the parser understands: events the
// tokenizer ignores (controllers, pitch bends, lyrics, sysex) are kept as
// Other*/SysEx variants so that write_midi(parse_midi(b)) re-parses to the
// same MidiFile.

#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

namespace notetok::midi {

struct NoteOn {
  uint8_t channel = 0;
  uint8_t pitch = 0;
  uint8_t velocity = 0;  // always > 0; velocity-0 note-ons are read as NoteOff
  bool operator==(const NoteOn&) const = default;
};

struct NoteOff {
  uint8_t channel = 0;
  uint8_t pitch = 0;
  uint8_t velocity = 0;
  bool operator==(const NoteOff&) const = default;
};

struct ProgramChange {
  uint8_t channel = 0;
  uint8_t program = 0;
  bool operator==(const ProgramChange&) const = default;
};

struct SetTempo {
  uint32_t microseconds_per_quarter = 500000;  // 24-bit field
  bool operator==(const SetTempo&) const = default;
};

struct TimeSignature {
  uint8_t numerator = 4;
  uint8_t denominator_power = 2;  // denominator = 2^power
  uint8_t clocks_per_click = 24;
  uint8_t thirty_seconds_per_quarter = 8;
  bool operator==(const TimeSignature&) const = default;
};

struct EndOfTrack {
  bool operator==(const EndOfTrack&) const = default;
};

struct OtherMeta {
  uint8_t type = 0;
  std::vector<uint8_t> payload;
  bool operator==(const OtherMeta&) const = default;
};

/// Any channel voice message not modelled above. `status` carries the channel
/// nibble; payload holds the 1 or 2 data bytes.
struct OtherChannel {
  uint8_t status = 0;
  std::vector<uint8_t> payload;
  bool operator==(const OtherChannel&) const = default;
};

/// F0 / F7 system exclusive packet, payload uninterpreted.
struct SysEx {
  uint8_t status = 0xF0;
  std::vector<uint8_t> payload;
  bool operator==(const SysEx&) const = default;
};

using RawEvent = std::variant<NoteOn, NoteOff, ProgramChange, SetTempo, TimeSignature, EndOfTrack,
                              OtherMeta, OtherChannel, SysEx>;

struct TimedEvent {
  uint64_t tick = 0;
  RawEvent event;
  bool operator==(const TimedEvent&) const = default;
};

struct RawTrack {
  std::vector<TimedEvent> events;  // nondecreasing ticks, file order within a tick
  bool operator==(const RawTrack&) const = default;
};

struct MidiFile {
  int format = 1;
  int ticks_per_quarter = 480;
  std::vector<RawTrack> tracks;
  bool operator==(const MidiFile&) const = default;
};

/// Throws notetok::Error with MalformedHeader, UnsupportedFormat,
/// TruncatedChunk, BadVlq or MalformedEvent.
MidiFile parse_midi(std::span<const uint8_t> bytes);

/// Always emits a format-1 file without running status. Throws
/// Error(ValueOutOfRange) when a field does not fit its wire width.
std::vector<uint8_t> write_midi(const MidiFile& midi);

MidiFile read_midi_file(const std::filesystem::path& path);
void write_midi_file(const MidiFile& midi, const std::filesystem::path& path);

// Variable-length quantities, exposed for tests.
std::vector<uint8_t> encode_vlq(uint32_t value);
uint32_t decode_vlq(std::span<const uint8_t> bytes, std::size_t& pos);

}  // namespace notetok::midi
