#include "notetok/midi_io.hpp"

#include <fstream>
#include <iterator>
#include <string>

#include "notetok/error.hpp"

namespace notetok::midi {
namespace {

constexpr uint32_t kMaxVlq = 0x0FFFFFFF;

uint32_t read_be(std::span<const uint8_t> bytes, std::size_t pos, int width) {
  uint32_t v = 0;
  for (int i = 0; i < width; ++i) v = (v << 8) | bytes[pos + i];
  return v;
}

void put_be(std::vector<uint8_t>& out, uint32_t v, int width) {
  for (int i = width - 1; i >= 0; --i) out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xFF));
}

int data_length(uint8_t status) {
  switch (status & 0xF0) {
    case 0xC0:
    case 0xD0:
      return 1;
    default:
      return 2;
  }
}

class TrackReader {
 public:
  explicit TrackReader(std::span<const uint8_t> data) : data_(data) {}

  RawTrack read() {
    RawTrack track;
    uint64_t tick = 0;
    uint8_t running = 0;
    while (pos_ < data_.size()) {
      tick += decode_vlq(data_, pos_);
      const uint8_t first = next();
      if (first == 0xFF) {
        const uint8_t type = next();
        const uint32_t len = decode_vlq(data_, pos_);
        auto payload = take(len);
        if (type == 0x2F) {
          track.events.push_back({tick, EndOfTrack{}});
          return track;
        }
        track.events.push_back({tick, meta_event(type, std::move(payload))});
        continue;
      }
      if (first == 0xF0 || first == 0xF7) {
        const uint32_t len = decode_vlq(data_, pos_);
        track.events.push_back({tick, SysEx{first, take(len)}});
        continue;
      }
      uint8_t status = first;
      std::vector<uint8_t> args;
      if (first < 0x80) {
        if (running == 0) throw Error(ErrorCode::MalformedEvent, "data byte without running status");
        status = running;
        args.push_back(first);
      } else if (first >= 0xF0) {
        throw Error(ErrorCode::MalformedEvent, "system message inside track data");
      }
      running = status;
      while (static_cast<int>(args.size()) < data_length(status)) args.push_back(next());
      for (uint8_t b : args) {
        if (b >= 0x80) throw Error(ErrorCode::MalformedEvent, "status byte where data byte expected");
      }
      track.events.push_back({tick, channel_event(status, std::move(args))});
    }
    // Chunk ended without an EndOfTrack meta event; normalize.
    track.events.push_back({tick, EndOfTrack{}});
    return track;
  }

 private:
  uint8_t next() {
    if (pos_ >= data_.size()) throw Error(ErrorCode::TruncatedChunk, "event runs past end of track");
    return data_[pos_++];
  }

  std::vector<uint8_t> take(uint32_t len) {
    if (len > data_.size() - pos_) throw Error(ErrorCode::TruncatedChunk, "payload runs past end of track");
    std::vector<uint8_t> out(data_.begin() + static_cast<std::ptrdiff_t>(pos_),
                             data_.begin() + static_cast<std::ptrdiff_t>(pos_ + len));
    pos_ += len;
    return out;
  }

  static RawEvent meta_event(uint8_t type, std::vector<uint8_t> payload) {
    if (type == 0x51 && payload.size() == 3) {
      return SetTempo{(uint32_t{payload[0]} << 16) | (uint32_t{payload[1]} << 8) | payload[2]};
    }
    if (type == 0x58 && payload.size() == 4) {
      return TimeSignature{payload[0], payload[1], payload[2], payload[3]};
    }
    return OtherMeta{type, std::move(payload)};
  }

  static RawEvent channel_event(uint8_t status, std::vector<uint8_t> args) {
    const uint8_t channel = status & 0x0F;
    switch (status & 0xF0) {
      case 0x80:
        return NoteOff{channel, args[0], args[1]};
      case 0x90:
        if (args[1] == 0) return NoteOff{channel, args[0], 0};
        return NoteOn{channel, args[0], args[1]};
      case 0xC0:
        return ProgramChange{channel, args[0]};
      default:
        return OtherChannel{status, std::move(args)};
    }
  }

  std::span<const uint8_t> data_;
  std::size_t pos_ = 0;
};

void check7(int v, const char* what) {
  if (v < 0 || v > 127) throw Error(ErrorCode::ValueOutOfRange, std::string(what) + " exceeds 7 bits");
}

void check_channel(int c) {
  if (c < 0 || c > 15) throw Error(ErrorCode::ValueOutOfRange, "channel exceeds 4 bits");
}

void put_bytes(std::vector<uint8_t>& out, const std::vector<uint8_t>& bytes) {
  if (bytes.size() > kMaxVlq) throw Error(ErrorCode::ValueOutOfRange, "payload too long");
  auto len = encode_vlq(static_cast<uint32_t>(bytes.size()));
  out.insert(out.end(), len.begin(), len.end());
  out.insert(out.end(), bytes.begin(), bytes.end());
}

struct EventWriter {
  std::vector<uint8_t>& out;

  void operator()(const NoteOn& e) {
    check_channel(e.channel);
    check7(e.pitch, "pitch");
    check7(e.velocity, "velocity");
    if (e.velocity == 0) throw Error(ErrorCode::ValueOutOfRange, "NoteOn velocity must be > 0");
    out.insert(out.end(), {static_cast<uint8_t>(0x90 | e.channel), e.pitch, e.velocity});
  }
  void operator()(const NoteOff& e) {
    check_channel(e.channel);
    check7(e.pitch, "pitch");
    check7(e.velocity, "velocity");
    out.insert(out.end(), {static_cast<uint8_t>(0x80 | e.channel), e.pitch, e.velocity});
  }
  void operator()(const ProgramChange& e) {
    check_channel(e.channel);
    check7(e.program, "program");
    out.insert(out.end(), {static_cast<uint8_t>(0xC0 | e.channel), e.program});
  }
  void operator()(const SetTempo& e) {
    if (e.microseconds_per_quarter > 0xFFFFFF) throw Error(ErrorCode::ValueOutOfRange, "tempo exceeds 24 bits");
    out.insert(out.end(), {uint8_t{0xFF}, uint8_t{0x51}, uint8_t{3}});
    put_be(out, e.microseconds_per_quarter, 3);
  }
  void operator()(const TimeSignature& e) {
    out.insert(out.end(), {uint8_t{0xFF}, uint8_t{0x58}, uint8_t{4}, e.numerator, e.denominator_power,
                           e.clocks_per_click, e.thirty_seconds_per_quarter});
  }
  void operator()(const EndOfTrack&) { out.insert(out.end(), {uint8_t{0xFF}, uint8_t{0x2F}, uint8_t{0}}); }
  void operator()(const OtherMeta& e) {
    if (e.type == 0x2F || (e.type == 0x51 && e.payload.size() == 3) || (e.type == 0x58 && e.payload.size() == 4)) {
      throw Error(ErrorCode::ValueOutOfRange, "meta event shadows a dedicated variant");
    }
    out.insert(out.end(), {uint8_t{0xFF}, e.type});
    put_bytes(out, e.payload);
  }
  void operator()(const OtherChannel& e) {
    const uint8_t kind = e.status & 0xF0;
    if (e.status < 0x80 || e.status >= 0xF0) throw Error(ErrorCode::ValueOutOfRange, "invalid channel status");
    if (static_cast<int>(e.payload.size()) != data_length(e.status)) {
      throw Error(ErrorCode::ValueOutOfRange, "channel message has wrong data length");
    }
    // Note and program messages must use their dedicated variants, otherwise
    // re-parsing would not reproduce the same model.
    if (kind == 0x80 || kind == 0x90 || kind == 0xC0) {
      throw Error(ErrorCode::ValueOutOfRange, "note/program message stored as OtherChannel");
    }
    for (uint8_t b : e.payload) check7(b, "data byte");
    out.push_back(e.status);
    out.insert(out.end(), e.payload.begin(), e.payload.end());
  }
  void operator()(const SysEx& e) {
    if (e.status != 0xF0 && e.status != 0xF7) throw Error(ErrorCode::ValueOutOfRange, "invalid sysex status");
    out.push_back(e.status);
    put_bytes(out, e.payload);
  }
};

}  // namespace

std::vector<uint8_t> encode_vlq(uint32_t value) {
  if (value > kMaxVlq) throw Error(ErrorCode::ValueOutOfRange, "value exceeds 28-bit VLQ range");
  std::vector<uint8_t> out{static_cast<uint8_t>(value & 0x7F)};
  while ((value >>= 7) != 0) out.insert(out.begin(), static_cast<uint8_t>(0x80 | (value & 0x7F)));
  return out;
}

uint32_t decode_vlq(std::span<const uint8_t> bytes, std::size_t& pos) {
  uint32_t value = 0;
  for (int i = 0; i < 4; ++i) {
    if (pos >= bytes.size()) throw Error(ErrorCode::TruncatedChunk, "variable-length quantity truncated");
    const uint8_t b = bytes[pos++];
    value = (value << 7) | (b & 0x7F);
    if ((b & 0x80) == 0) return value;
  }
  throw Error(ErrorCode::BadVlq, "variable-length quantity longer than 4 bytes");
}

MidiFile parse_midi(std::span<const uint8_t> bytes) {
  if (bytes.size() < 8 || read_be(bytes, 0, 4) != 0x4D546864) {
    throw Error(ErrorCode::MalformedHeader, "missing MThd chunk");
  }
  const uint32_t header_len = read_be(bytes, 4, 4);
  if (header_len < 6) throw Error(ErrorCode::MalformedHeader, "header chunk shorter than 6 bytes");
  if (header_len > bytes.size() - 8) throw Error(ErrorCode::TruncatedChunk, "header chunk truncated");

  MidiFile midi;
  midi.format = static_cast<int>(read_be(bytes, 8, 2));
  const uint32_t n_tracks = read_be(bytes, 10, 2);
  const uint32_t division = read_be(bytes, 12, 2);
  if (midi.format > 1) throw Error(ErrorCode::UnsupportedFormat, "format " + std::to_string(midi.format));
  if (division & 0x8000) throw Error(ErrorCode::UnsupportedFormat, "SMPTE time division");
  if (division == 0) throw Error(ErrorCode::MalformedHeader, "zero ticks per quarter");
  midi.ticks_per_quarter = static_cast<int>(division);

  std::size_t pos = 8 + header_len;
  while (midi.tracks.size() < n_tracks) {
    if (bytes.size() - pos < 8) throw Error(ErrorCode::TruncatedChunk, "missing track chunk");
    const uint32_t id = read_be(bytes, pos, 4);
    const uint32_t len = read_be(bytes, pos + 4, 4);
    pos += 8;
    if (len > bytes.size() - pos) throw Error(ErrorCode::TruncatedChunk, "track chunk runs past end of file");
    if (id == 0x4D54726B) {  // MTrk; foreign chunks are skipped
      midi.tracks.push_back(TrackReader(bytes.subspan(pos, len)).read());
    }
    pos += len;
  }
  return midi;
}

std::vector<uint8_t> write_midi(const MidiFile& midi) {
  if (midi.ticks_per_quarter <= 0 || midi.ticks_per_quarter > 0x7FFF) {
    throw Error(ErrorCode::ValueOutOfRange, "ticks per quarter outside 1..32767");
  }
  if (midi.tracks.size() > 0xFFFF) throw Error(ErrorCode::ValueOutOfRange, "too many tracks");

  std::vector<uint8_t> out{'M', 'T', 'h', 'd'};
  put_be(out, 6, 4);
  put_be(out, 1, 2);
  put_be(out, static_cast<uint32_t>(midi.tracks.size()), 2);
  put_be(out, static_cast<uint32_t>(midi.ticks_per_quarter), 2);

  for (const RawTrack& track : midi.tracks) {
    std::vector<uint8_t> body;
    EventWriter writer{body};
    uint64_t last = 0;
    bool ended = false;
    for (std::size_t i = 0; i < track.events.size(); ++i) {
      const TimedEvent& ev = track.events[i];
      if (ev.tick < last) throw Error(ErrorCode::ValueOutOfRange, "ticks decrease within a track");
      if (ev.tick - last > kMaxVlq) throw Error(ErrorCode::ValueOutOfRange, "delta time exceeds VLQ range");
      if (std::holds_alternative<EndOfTrack>(ev.event) && i + 1 != track.events.size()) {
        throw Error(ErrorCode::ValueOutOfRange, "EndOfTrack before the last event");
      }
      auto delta = encode_vlq(static_cast<uint32_t>(ev.tick - last));
      body.insert(body.end(), delta.begin(), delta.end());
      std::visit(writer, ev.event);
      last = ev.tick;
      ended = std::holds_alternative<EndOfTrack>(ev.event);
    }
    if (!ended) {
      body.push_back(0);
      writer(EndOfTrack{});
    }
    out.insert(out.end(), {'M', 'T', 'r', 'k'});
    put_be(out, static_cast<uint32_t>(body.size()), 4);
    out.insert(out.end(), body.begin(), body.end());
  }
  return out;
}

MidiFile read_midi_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_midi(bytes);
}

void write_midi_file(const MidiFile& midi, const std::filesystem::path& path) {
  const auto bytes = write_midi(midi);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace notetok::midi
