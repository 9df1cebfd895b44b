#pragma once

// Normalized musical content and the preprocessing pipeline that aligns a
// score to a tokenizer's resolution.

#include <cstdint>
#include <string>
#include <vector>

#include "notetok/config.hpp"
#include "notetok/midi_io.hpp"

namespace notetok {

struct Note {
  int pitch = 60;
  int velocity = 64;
  int64_t onset = 0;
  int64_t offset = 1;

  int64_t duration() const { return offset - onset; }
  bool operator==(const Note&) const = default;
};

/// Track order: (onset, pitch, offset).
bool note_less(const Note& a, const Note& b);

struct Track {
  int program = 0;
  bool is_drum = false;
  std::vector<Note> notes;

  /// Program as written in Program tokens: -1 for drums.
  int program_key() const { return is_drum ? -1 : program; }
  bool operator==(const Track&) const = default;
};

struct TempoChange {
  int64_t tick = 0;
  double bpm = 120.0;
  bool operator==(const TempoChange&) const = default;
};

struct TimeSigChange {
  int64_t tick = 0;
  int numerator = 4;
  int denominator = 4;

  TimeSig signature() const { return {numerator, denominator}; }
  bool operator==(const TimeSigChange&) const = default;
};

struct Score {
  int ticks_per_quarter = 480;
  std::vector<Track> tracks;
  std::vector<TempoChange> tempos;
  std::vector<TimeSigChange> time_signatures;

  std::size_t note_count() const;
  /// Largest tick carried by any note offset, tempo or time signature.
  int64_t last_tick() const;
  bool operator==(const Score&) const = default;
};

/// Events dropped while building a Score from raw MIDI.
struct ConversionReport {
  int zero_length_notes = 0;
  int unmatched_note_offs = 0;
  int closed_at_track_end = 0;
  int invalid_time_signatures = 0;
};

/// Pairs NoteOn/NoteOff per (channel, pitch) in FIFO order. One Track per
/// (raw track, channel, program); channel 10 becomes a drum track with
/// program 0. Never throws on a parsed file.
Score score_from_midi(const midi::MidiFile& midi, ConversionReport* report = nullptr);

/// Format-1 file: a conductor track with tempo and time signatures, then one
/// track per score track.
midi::MidiFile score_to_midi(const Score& score);

/// Nearest grid point (half-up) of a tick on a grid of `res` samples per
/// quarter, expressed back in ticks.
int64_t quantize_tick(int64_t tick, int tpq, int res);
int64_t tick_to_sample(int64_t tick, int tpq, int res);
int64_t sample_to_tick(int64_t sample, int tpq, int res);

/// { round(1 + k*126/(n-1)) : k = 0..n-1 }; a single bin is {127}.
std::vector<int> velocity_bins(int n_bins);
/// Nearest bin, ties to the lower bin.
int downsample_velocity(int velocity, int n_bins);
/// Nearest bin on a linear bpm scale, ties to the lower bin.
double snap_tempo(double bpm, const std::vector<double>& bins);
/// Nearest supported numerator with the same denominator (ties to the lower
/// one), else 4/4, else the first supported signature.
TimeSig snap_time_signature(TimeSig ts, const std::vector<TimeSig>& supported);

Track deduplicate_notes(Track track);
Track fix_overlapping_notes(Track track);
/// One track per (program, is_drum), ordered by program_key().
Score merge_tracks_by_program(const Score& score);

/// Throws Error(EmptyScore) when no note survives.
Score preprocess(const Score& score, const TokenizerConfig& config);

int count_bars(const Score& score);
/// Beats (one beat = 1/denominator note) from tick 0 to last_tick().
double count_beats(const Score& score);

struct ChordEvent {
  int64_t tick = 0;
  std::string quality;  // "maj", "min", ... or the note count for unknown chords
  bool operator==(const ChordEvent&) const = default;
};

/// Unknown chords report their note count, capped at this value.
inline constexpr int kMaxUnknownChordNotes = 12;
std::vector<ChordEvent> detect_chords(const Track& track, const TokenizerConfig& config);
/// Quality names in vocabulary order.
const std::vector<std::string>& chord_qualities();

/// Re-expresses every tick at another time division, rounding half-up.
Score rescale_ticks(const Score& score, int new_tpq);

}  // namespace notetok
