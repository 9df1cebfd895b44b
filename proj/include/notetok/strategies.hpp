#pragma once

// Event lists, time-token derivation and decoding for the five strategies.
// Everything here works on grid samples: a Score whose ticks_per_quarter
// equals the config's beat_res.

#include <optional>
#include <string>
#include <vector>

#include "notetok/config.hpp"
#include "notetok/score.hpp"
#include "notetok/vocabulary.hpp"

namespace notetok {

enum class TimeScheme { TimeShift, BarPosition };
enum class DurationScheme { DurationToken, NoteOff };

struct StrategySpec {
  TimeScheme time_scheme = TimeScheme::TimeShift;
  DurationScheme duration_scheme = DurationScheme::DurationToken;
  bool multi_voc = false;
  std::optional<std::vector<std::string>> fixed_succession;

  bool supports_chords = false;
  bool supports_rests = false;
  bool supports_tempos = false;
  bool supports_time_signatures = false;
  bool supports_programs = false;
};

StrategySpec strategy_spec(Strategy strategy);

/// Declaration order is the priority order at equal times.
enum class EventKind { TimeSig, Tempo, NoteOff, Chord, Note };

struct Event {
  EventKind kind = EventKind::Note;
  int64_t time = 0;
  int program = 0;  // program_key() of the owning track
  int pitch = 0;
  int velocity = 0;
  int64_t duration = 0;
  double bpm = 0.0;
  TimeSig time_sig{};
  std::string chord;

  bool operator==(const Event&) const = default;
};

/// Total order: (time, kind, program, pitch, velocity, duration, bpm,
/// time signature, chord).
bool event_less(const Event& a, const Event& b);

/// Sorted events of one stream. `grid` is a preprocessed score rescaled to
/// beat_res ticks per quarter; global events come from it, note events from
/// `tracks`.
std::vector<Event> collect_events(const Score& grid, const std::vector<const Track*>& tracks,
                                  const TokenizerConfig& config);

std::vector<std::string> emit_midilike(const std::vector<Event>& events, const TokenizerConfig& config);
std::vector<std::string> emit_tsd(const std::vector<Event>& events, const TokenizerConfig& config);
std::vector<std::string> emit_remi(const std::vector<Event>& events, const TokenizerConfig& config);
std::vector<std::string> emit_structured(const std::vector<Event>& events, const TokenizerConfig& config);
/// Flat tuples of octuple_arity(config) sub-tokens, one tuple per note.
/// Throws Error(BarOverflow) for a note at bar >= max_bars.
std::vector<std::string> emit_octuple(const std::vector<Event>& events, const TokenizerConfig& config);
std::vector<std::string> emit_tokens(const std::vector<Event>& events, const TokenizerConfig& config);

/// Musical content recovered from one token stream, in grid samples.
struct DecodedStream {
  struct ProgramNote {
    int program = 0;  // program key, -1 for drums
    Note note;
    bool operator==(const ProgramNote&) const = default;
  };
  std::vector<ProgramNote> notes;
  std::vector<TempoChange> tempos;
  std::vector<TimeSigChange> time_signatures;
  bool saw_program_token = false;
};

/// Permissive inverse of emit_tokens. Tokens must belong to the strategy's
/// vocabularies; tokens out of context are skipped.
DecodedStream decode_tokens(const std::vector<std::string>& tokens, const TokenizerConfig& config,
                            int default_program = 0);

/// Number of sub-tokens per time step: 1, or the Octuple tuple size.
std::size_t token_arity(const TokenizerConfig& config);
/// One vocabulary per tuple position (a single one unless multi-vocabulary).
std::vector<Vocabulary> build_vocabularies(const TokenizerConfig& config);

/// Shortest two-decimal rendering with at least one decimal: 120 -> "120.0".
std::string format_tempo(double bpm);
std::string format_time_sig(TimeSig ts);

}  // namespace notetok
