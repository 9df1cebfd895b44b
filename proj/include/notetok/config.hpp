#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace notetok {

enum class Strategy { MIDILike, TSD, REMI, Structured, Octuple };

std::string_view to_string(Strategy s);
/// Case-insensitive; throws Error(InvalidConfig) for unknown names.
Strategy strategy_from_string(std::string_view name);

struct TimeSig {
  int numerator = 4;
  int denominator = 4;
  auto operator<=>(const TimeSig&) const = default;
};

/// Every knob that defines a tokenizer. A config is immutable once a
/// Tokenizer has been built from it; validate() enforces strategy
/// compatibility.
struct TokenizerConfig {
  Strategy strategy = Strategy::TSD;
  int pitch_low = 21;    // inclusive
  int pitch_high = 109;  // exclusive
  int n_velocities = 16;
  int beat_res = 8;  // grid samples per quarter note
  int max_duration_beats = 8;

  bool use_chords = false;
  bool use_rests = false;
  bool use_tempos = false;
  bool use_time_signatures = false;
  bool use_programs = false;
  bool one_token_stream = false;

  std::vector<double> tempo_bins;  // bpm, ascending, two decimals
  std::vector<TimeSig> time_signature_set;
  double rest_min_beats = 1.0;
  bool chord_unknown = false;
  int max_bars = 256;  // Octuple bar vocabulary size
  std::vector<std::string> special_tokens{"PAD", "BOS", "EOS", "MASK"};

  /// Defaults: 88 piano pitches, 16 velocities, 8 samples per beat, durations
  /// up to 8 beats, 32 tempo bins in [40, 250], n/4 (n = 1..8) plus 3/8, 6/8,
  /// 9/8 and 12/8.
  static TokenizerConfig defaults(Strategy strategy = Strategy::TSD);

  /// Throws Error(InvalidConfig) on any inconsistency.
  void validate() const;

  int max_duration_samples() const { return beat_res * max_duration_beats; }
  /// Grid samples covered by the smallest Rest token.
  int rest_step() const;
  /// Bar length in grid samples.
  int bar_samples(const TimeSig& ts) const { return ts.numerator * 4 * beat_res / ts.denominator; }
  /// Largest bar (in samples) a Position token must address.
  int max_bar_samples() const;

  bool operator==(const TokenizerConfig&) const = default;
};

/// 32 bins linearly spaced over [40, 250] bpm, rounded to two decimals.
std::vector<double> default_tempo_bins();
std::vector<TimeSig> default_time_signatures();

}  // namespace notetok
