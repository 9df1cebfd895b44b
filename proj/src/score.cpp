#include "notetok/score.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <map>
#include <tuple>

#include "notetok/error.hpp"

namespace notetok {
namespace {

constexpr double kDefaultBpm = 120.0;
constexpr int kDrumChannel = 9;

// floor((2*a*b + c) / (2*c)): round-half-up of a*b/c for a >= 0.
int64_t mul_div_round(int64_t a, int64_t b, int64_t c) { return (2 * a * b + c) / (2 * c); }

template <typename T, typename Tick>
void keep_last_per_tick(std::vector<T>& v, Tick tick_of) {
  std::stable_sort(v.begin(), v.end(), [&](const T& a, const T& b) { return tick_of(a) < tick_of(b); });
  std::vector<T> out;
  for (const T& x : v) {
    if (!out.empty() && tick_of(out.back()) == tick_of(x)) {
      out.back() = x;
    } else {
      out.push_back(x);
    }
  }
  v = std::move(out);
}

void drop_repeated_tempos(std::vector<TempoChange>& tempos) {
  std::vector<TempoChange> out;
  for (const auto& t : tempos) {
    if (out.empty() || out.back().bpm != t.bpm) out.push_back(t);
  }
  tempos = std::move(out);
}

void drop_repeated_signatures(std::vector<TimeSigChange>& sigs) {
  std::vector<TimeSigChange> out;
  for (const auto& t : sigs) {
    if (out.empty() || out.back().signature() != t.signature()) out.push_back(t);
  }
  sigs = std::move(out);
}

int64_t bar_start_containing(int64_t sample, int64_t change_tick, int64_t bar_len) {
  return change_tick + (sample - change_tick) / bar_len * bar_len;
}

// Time signature changes move to the start of the bar (under the previous
// signature) in which they occur. Ticks are grid samples here.
void snap_signatures_to_bars(std::vector<TimeSigChange>& sigs, const TokenizerConfig& cfg) {
  std::vector<TimeSigChange> out;
  for (const auto& ts : sigs) {
    if (out.empty()) {
      out.push_back({0, ts.numerator, ts.denominator});
      continue;
    }
    const TimeSigChange& prev = out.back();
    const int64_t start = bar_start_containing(ts.tick, prev.tick, cfg.bar_samples(prev.signature()));
    if (start == prev.tick) {
      out.back() = {start, ts.numerator, ts.denominator};
    } else {
      out.push_back({start, ts.numerator, ts.denominator});
    }
  }
  sigs = std::move(out);
}

std::vector<int64_t> distinct_onsets(const std::vector<const Track*>& tracks) {
  std::vector<int64_t> onsets;
  for (const Track* t : tracks) {
    for (const Note& n : t->notes) onsets.push_back(n.onset);
  }
  std::sort(onsets.begin(), onsets.end());
  onsets.erase(std::unique(onsets.begin(), onsets.end()), onsets.end());
  return onsets;
}

// Structured has a single TimeShift per note, so silences longer than the
// largest shift are shortened to it.
void compress_long_gaps(std::vector<Track*> tracks, int64_t max_shift) {
  std::vector<const Track*> view(tracks.begin(), tracks.end());
  const auto onsets = distinct_onsets(view);
  std::map<int64_t, int64_t> moved;
  int64_t prev_old = 0;
  int64_t prev_new = 0;
  for (int64_t o : onsets) {
    prev_new += std::min(o - prev_old, max_shift);
    prev_old = o;
    moved[o] = prev_new;
  }
  for (Track* t : tracks) {
    for (Note& n : t->notes) {
      const int64_t dur = n.duration();
      n.onset = moved.at(n.onset);
      n.offset = n.onset + dur;
    }
  }
}

template <typename T>
const T& value_at(const std::vector<T>& changes, int64_t tick) {
  auto it = std::upper_bound(changes.begin(), changes.end(), tick,
                             [](int64_t t, const T& c) { return t < c.tick; });
  return *std::prev(it);
}

// Octuple carries tempo and time signature on note tuples only, so changes
// are re-anchored where a note can observe them.
void anchor_globals_to_notes(Score& grid, const TokenizerConfig& cfg) {
  std::vector<const Track*> view;
  for (const Track& t : grid.tracks) view.push_back(&t);
  const auto onsets = distinct_onsets(view);
  if (onsets.empty()) return;

  if (cfg.use_tempos && !grid.tempos.empty()) {
    std::vector<TempoChange> out{{0, value_at(grid.tempos, onsets.front()).bpm}};
    for (int64_t o : onsets) {
      const double bpm = value_at(grid.tempos, o).bpm;
      if (bpm != out.back().bpm) out.push_back({o, bpm});
    }
    grid.tempos = std::move(out);
  }
  if (cfg.use_time_signatures) {
    const TimeSigChange& first = value_at(grid.time_signatures, onsets.front());
    std::vector<TimeSigChange> out{{0, first.numerator, first.denominator}};
    int64_t prev_onset = onsets.front();
    for (int64_t o : onsets) {
      const TimeSigChange& cur = value_at(grid.time_signatures, o);
      if (cur.signature() != out.back().signature()) {
        // The change lands on the bar following the previous note's bar.
        const int64_t len = cfg.bar_samples(out.back().signature());
        const int64_t start = bar_start_containing(prev_onset, out.back().tick, len) + len;
        if (start <= o) out.push_back({start, cur.numerator, cur.denominator});
      }
      prev_onset = o;
    }
    grid.time_signatures = std::move(out);
  }
}

}  // namespace

bool note_less(const Note& a, const Note& b) {
  return std::tie(a.onset, a.pitch, a.offset) < std::tie(b.onset, b.pitch, b.offset);
}

std::size_t Score::note_count() const {
  std::size_t n = 0;
  for (const Track& t : tracks) n += t.notes.size();
  return n;
}

int64_t Score::last_tick() const {
  int64_t last = 0;
  for (const Track& t : tracks) {
    for (const Note& n : t.notes) last = std::max(last, n.offset);
  }
  for (const auto& t : tempos) last = std::max(last, t.tick);
  for (const auto& t : time_signatures) last = std::max(last, t.tick);
  return last;
}

Score score_from_midi(const midi::MidiFile& file, ConversionReport* report) {
  ConversionReport local;
  ConversionReport& rep = report ? *report : local;
  Score score;
  score.ticks_per_quarter = file.ticks_per_quarter;

  struct Open {
    int64_t onset;
    int velocity;
    int program;
  };

  for (const midi::RawTrack& raw : file.tracks) {
    std::map<std::pair<int, int>, Track> by_channel_program;
    std::map<std::pair<int, int>, std::deque<Open>> open;
    int programs[16] = {};
    int64_t end_tick = 0;

    auto add_note = [&](int channel, int pitch, const Open& o, int64_t offset) {
      if (offset <= o.onset) {
        ++rep.zero_length_notes;
        return;
      }
      const bool drum = channel == kDrumChannel;
      const int program = drum ? 0 : o.program;
      Track& track = by_channel_program[{channel, program}];
      track.program = program;
      track.is_drum = drum;
      track.notes.push_back({pitch, o.velocity, o.onset, offset});
    };

    for (const midi::TimedEvent& ev : raw.events) {
      const auto tick = static_cast<int64_t>(ev.tick);
      end_tick = std::max(end_tick, tick);
      if (const auto* on = std::get_if<midi::NoteOn>(&ev.event)) {
        open[{on->channel, on->pitch}].push_back({tick, on->velocity, programs[on->channel]});
      } else if (const auto* off = std::get_if<midi::NoteOff>(&ev.event)) {
        auto& queue = open[{off->channel, off->pitch}];
        if (queue.empty()) {
          ++rep.unmatched_note_offs;
          continue;
        }
        const Open o = queue.front();
        queue.pop_front();
        add_note(off->channel, off->pitch, o, tick);
      } else if (const auto* pc = std::get_if<midi::ProgramChange>(&ev.event)) {
        programs[pc->channel] = pc->program;
      } else if (const auto* tempo = std::get_if<midi::SetTempo>(&ev.event)) {
        if (tempo->microseconds_per_quarter > 0) {
          score.tempos.push_back({tick, 60e6 / tempo->microseconds_per_quarter});
        }
      } else if (const auto* ts = std::get_if<midi::TimeSignature>(&ev.event)) {
        if (ts->numerator == 0 || ts->denominator_power > 6) {
          ++rep.invalid_time_signatures;
          continue;
        }
        score.time_signatures.push_back({tick, ts->numerator, 1 << ts->denominator_power});
      }
    }
    for (auto& [key, queue] : open) {
      for (const Open& o : queue) {
        if (end_tick > o.onset) ++rep.closed_at_track_end;
        add_note(key.first, key.second, o, end_tick);
      }
    }
    for (auto& [key, track] : by_channel_program) {
      std::sort(track.notes.begin(), track.notes.end(), note_less);
      score.tracks.push_back(std::move(track));
    }
  }

  std::stable_sort(score.tempos.begin(), score.tempos.end(),
                   [](const TempoChange& a, const TempoChange& b) { return a.tick < b.tick; });
  std::stable_sort(score.time_signatures.begin(), score.time_signatures.end(),
                   [](const TimeSigChange& a, const TimeSigChange& b) { return a.tick < b.tick; });
  if (score.time_signatures.empty() || score.time_signatures.front().tick > 0) {
    score.time_signatures.insert(score.time_signatures.begin(), TimeSigChange{0, 4, 4});
  }
  return score;
}

midi::MidiFile score_to_midi(const Score& score) {
  midi::MidiFile file;
  file.format = 1;
  file.ticks_per_quarter = score.ticks_per_quarter;

  midi::RawTrack conductor;
  for (const auto& ts : score.time_signatures) {
    int power = 0;
    while ((1 << power) < ts.denominator) ++power;
    if ((1 << power) != ts.denominator || ts.numerator < 1 || ts.numerator > 255) {
      throw Error(ErrorCode::ValueOutOfRange, "time signature cannot be written");
    }
    conductor.events.push_back({static_cast<uint64_t>(ts.tick),
                                midi::TimeSignature{static_cast<uint8_t>(ts.numerator), static_cast<uint8_t>(power)}});
  }
  for (const auto& t : score.tempos) {
    const double us = std::round(60e6 / t.bpm);
    const auto clamped = static_cast<uint32_t>(std::clamp(us, 1.0, double{0xFFFFFF}));
    conductor.events.push_back({static_cast<uint64_t>(t.tick), midi::SetTempo{clamped}});
  }
  std::stable_sort(conductor.events.begin(), conductor.events.end(),
                   [](const midi::TimedEvent& a, const midi::TimedEvent& b) { return a.tick < b.tick; });
  file.tracks.push_back(std::move(conductor));

  static constexpr int kChannels[] = {0, 1, 2, 3, 4, 5, 6, 7, 8, 10, 11, 12, 13, 14, 15};
  std::size_t next_channel = 0;
  for (const Track& track : score.tracks) {
    const int channel = track.is_drum ? kDrumChannel : kChannels[next_channel++ % std::size(kChannels)];
    const auto ch = static_cast<uint8_t>(channel);
    // (tick, order, pitch): note-offs sort before the program change and
    // note-ons sharing their tick.
    std::vector<std::tuple<int64_t, int, int, midi::RawEvent>> events;
    events.emplace_back(0, 1, 0, midi::ProgramChange{ch, static_cast<uint8_t>(track.program)});
    for (const Note& n : track.notes) {
      const auto pitch = static_cast<uint8_t>(n.pitch);
      const auto vel = static_cast<uint8_t>(std::clamp(n.velocity, 1, 127));
      events.emplace_back(n.onset, 2, n.pitch, midi::NoteOn{ch, pitch, vel});
      events.emplace_back(n.offset, 0, n.pitch, midi::NoteOff{ch, pitch, 0});
    }
    std::stable_sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
      return std::tie(std::get<0>(a), std::get<1>(a), std::get<2>(a)) <
             std::tie(std::get<0>(b), std::get<1>(b), std::get<2>(b));
    });
    midi::RawTrack raw;
    for (auto& [tick, order, pitch, ev] : events) raw.events.push_back({static_cast<uint64_t>(tick), std::move(ev)});
    file.tracks.push_back(std::move(raw));
  }
  return file;
}

int64_t tick_to_sample(int64_t tick, int tpq, int res) { return mul_div_round(tick, res, tpq); }

int64_t sample_to_tick(int64_t sample, int tpq, int res) { return mul_div_round(sample, tpq, res); }

int64_t quantize_tick(int64_t tick, int tpq, int res) {
  return sample_to_tick(tick_to_sample(tick, tpq, res), tpq, res);
}

std::vector<int> velocity_bins(int n_bins) {
  if (n_bins <= 1) return {127};
  std::vector<int> bins;
  const int span = n_bins - 1;
  for (int k = 0; k < n_bins; ++k) bins.push_back(1 + (2 * k * 126 + span) / (2 * span));
  return bins;
}

int downsample_velocity(int velocity, int n_bins) {
  const auto bins = velocity_bins(n_bins);
  int best = bins.front();
  for (int b : bins) {
    if (std::abs(b - velocity) < std::abs(best - velocity)) best = b;
  }
  return best;
}

double snap_tempo(double bpm, const std::vector<double>& bins) {
  double best = bins.front();
  for (double b : bins) {
    if (std::abs(b - bpm) < std::abs(best - bpm)) best = b;
  }
  return best;
}

TimeSig snap_time_signature(TimeSig ts, const std::vector<TimeSig>& supported) {
  if (std::find(supported.begin(), supported.end(), ts) != supported.end()) return ts;
  const TimeSig* best = nullptr;
  for (const TimeSig& s : supported) {
    if (s.denominator != ts.denominator) continue;
    if (!best || std::abs(s.numerator - ts.numerator) < std::abs(best->numerator - ts.numerator) ||
        (std::abs(s.numerator - ts.numerator) == std::abs(best->numerator - ts.numerator) &&
         s.numerator < best->numerator)) {
      best = &s;
    }
  }
  if (best) return *best;
  const TimeSig four_four{4, 4};
  if (supported.empty() || std::find(supported.begin(), supported.end(), four_four) != supported.end()) {
    return four_four;
  }
  return supported.front();
}

Track deduplicate_notes(Track track) {
  auto& notes = track.notes;
  std::stable_sort(notes.begin(), notes.end(),
                   [](const Note& a, const Note& b) { return std::tie(a.onset, a.pitch) < std::tie(b.onset, b.pitch); });
  std::vector<Note> kept;
  for (const Note& n : notes) {
    if (!kept.empty() && kept.back().onset == n.onset && kept.back().pitch == n.pitch) {
      const Note& k = kept.back();
      if (n.duration() > k.duration() || (n.duration() == k.duration() && n.velocity > k.velocity)) kept.back() = n;
      continue;
    }
    kept.push_back(n);
  }
  std::sort(kept.begin(), kept.end(), note_less);
  notes = std::move(kept);
  return track;
}

Track fix_overlapping_notes(Track track) {
  std::map<int, std::vector<std::size_t>> by_pitch;
  std::sort(track.notes.begin(), track.notes.end(), note_less);
  for (std::size_t i = 0; i < track.notes.size(); ++i) by_pitch[track.notes[i].pitch].push_back(i);
  for (auto& [pitch, idx] : by_pitch) {
    for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
      Note& a = track.notes[idx[k]];
      const Note& b = track.notes[idx[k + 1]];
      if (a.onset < b.onset && b.onset < a.offset) a.offset = b.onset;
    }
  }
  std::sort(track.notes.begin(), track.notes.end(), note_less);
  return track;
}

Score merge_tracks_by_program(const Score& score) {
  Score out = score;
  out.tracks.clear();
  std::map<int, Track> merged;  // keyed by program_key()
  for (const Track& t : score.tracks) {
    Track& m = merged[t.program_key()];
    m.program = t.program;
    m.is_drum = t.is_drum;
    m.notes.insert(m.notes.end(), t.notes.begin(), t.notes.end());
  }
  for (auto& [key, t] : merged) {
    std::sort(t.notes.begin(), t.notes.end(), note_less);
    out.tracks.push_back(std::move(t));
  }
  return out;
}

Score preprocess(const Score& input, const TokenizerConfig& cfg) {
  cfg.validate();
  const int res = cfg.beat_res;
  Score src = input;
  if (src.ticks_per_quarter < res) {
    // Too coarse to hold the grid: upscale by an integer factor first.
    const int factor = (res + src.ticks_per_quarter - 1) / src.ticks_per_quarter;
    src = rescale_ticks(src, src.ticks_per_quarter * factor);
  }
  const int tpq = src.ticks_per_quarter;

  if (cfg.one_token_stream) src = merge_tracks_by_program(src);

  // Work on the grid itself: one tick per sample.
  Score grid;
  grid.ticks_per_quarter = res;
  const auto bins = velocity_bins(cfg.n_velocities);
  for (const Track& t : src.tracks) {
    Track g{t.program, t.is_drum, {}};
    if (t.is_drum) g.program = 0;
    for (const Note& n : t.notes) {
      if (n.pitch < cfg.pitch_low || n.pitch >= cfg.pitch_high) continue;
      const int64_t on = tick_to_sample(n.onset, tpq, res);
      int64_t off = tick_to_sample(n.offset, tpq, res);
      if (off <= on) off = on + 1;
      if (cfg.strategy != Strategy::MIDILike) off = std::min(off, on + cfg.max_duration_samples());
      g.notes.push_back({n.pitch, downsample_velocity(std::clamp(n.velocity, 1, 127), cfg.n_velocities), on, off});
    }
    g = fix_overlapping_notes(deduplicate_notes(std::move(g)));
    if (!g.notes.empty()) grid.tracks.push_back(std::move(g));
  }
  if (grid.tracks.empty()) throw Error(ErrorCode::EmptyScore, "no notes left after preprocessing");

  if (cfg.use_tempos) {
    for (const auto& t : src.tempos) grid.tempos.push_back({tick_to_sample(t.tick, tpq, res), snap_tempo(t.bpm, cfg.tempo_bins)});
    keep_last_per_tick(grid.tempos, [](const TempoChange& t) { return t.tick; });
    if (grid.tempos.empty() || grid.tempos.front().tick > 0) {
      grid.tempos.insert(grid.tempos.begin(), TempoChange{0, snap_tempo(kDefaultBpm, cfg.tempo_bins)});
    }
    drop_repeated_tempos(grid.tempos);
  }

  if (cfg.use_time_signatures) {
    for (const auto& ts : src.time_signatures) {
      const TimeSig snapped = snap_time_signature(ts.signature(), cfg.time_signature_set);
      grid.time_signatures.push_back({tick_to_sample(ts.tick, tpq, res), snapped.numerator, snapped.denominator});
    }
    keep_last_per_tick(grid.time_signatures, [](const TimeSigChange& t) { return t.tick; });
    if (grid.time_signatures.empty() || grid.time_signatures.front().tick > 0) {
      const TimeSig d = snap_time_signature({4, 4}, cfg.time_signature_set);
      grid.time_signatures.insert(grid.time_signatures.begin(), TimeSigChange{0, d.numerator, d.denominator});
    }
    snap_signatures_to_bars(grid.time_signatures, cfg);
    drop_repeated_signatures(grid.time_signatures);
  } else {
    grid.time_signatures = {TimeSigChange{0, 4, 4}};
  }

  if (cfg.strategy == Strategy::Structured) {
    std::vector<Track*> all;
    for (Track& t : grid.tracks) all.push_back(&t);
    if (cfg.one_token_stream) {
      compress_long_gaps(all, cfg.max_duration_samples());
    } else {
      for (Track* t : all) compress_long_gaps({t}, cfg.max_duration_samples());
    }
  }
  if (cfg.strategy == Strategy::Octuple) anchor_globals_to_notes(grid, cfg);

  // Back to the source time division.
  Score out;
  out.ticks_per_quarter = tpq;
  for (Track& t : grid.tracks) {
    for (Note& n : t.notes) {
      n.onset = sample_to_tick(n.onset, tpq, res);
      n.offset = sample_to_tick(n.offset, tpq, res);
    }
    out.tracks.push_back(std::move(t));
  }
  for (auto t : grid.tempos) {
    t.tick = sample_to_tick(t.tick, tpq, res);
    out.tempos.push_back(t);
  }
  for (auto t : grid.time_signatures) {
    t.tick = sample_to_tick(t.tick, tpq, res);
    out.time_signatures.push_back(t);
  }
  return out;
}

int count_bars(const Score& score) {
  if (score.note_count() == 0) return 0;
  const int64_t end = score.last_tick();
  auto sigs = score.time_signatures;
  if (sigs.empty() || sigs.front().tick > 0) sigs.insert(sigs.begin(), TimeSigChange{0, 4, 4});
  const int64_t tpq = score.ticks_per_quarter;
  int64_t bars = 0;
  for (std::size_t i = 0; i < sigs.size() && sigs[i].tick < end; ++i) {
    const int64_t seg_end = i + 1 < sigs.size() ? std::min(sigs[i + 1].tick, end) : end;
    const int64_t len = seg_end - sigs[i].tick;
    // ceil(len / (num * 4 * tpq / den))
    const int64_t num = len * sigs[i].denominator;
    const int64_t den = int64_t{sigs[i].numerator} * 4 * tpq;
    bars += (num + den - 1) / den;
  }
  return static_cast<int>(bars);
}

double count_beats(const Score& score) {
  const int64_t end = score.last_tick();
  auto sigs = score.time_signatures;
  if (sigs.empty() || sigs.front().tick > 0) sigs.insert(sigs.begin(), TimeSigChange{0, 4, 4});
  double beats = 0.0;
  for (std::size_t i = 0; i < sigs.size() && sigs[i].tick < end; ++i) {
    const int64_t seg_end = i + 1 < sigs.size() ? std::min(sigs[i + 1].tick, end) : end;
    beats += static_cast<double>(seg_end - sigs[i].tick) * sigs[i].denominator / (4.0 * score.ticks_per_quarter);
  }
  return beats;
}

const std::vector<std::string>& chord_qualities() {
  static const std::vector<std::string> names{"maj", "min", "dim", "aug", "sus2", "sus4",
                                              "7dom", "7maj", "7min", "7dim", "7halfdim"};
  return names;
}

std::vector<ChordEvent> detect_chords(const Track& track, const TokenizerConfig& config) {
  static const std::map<std::vector<int>, std::string> table{
      {{0, 4, 7}, "maj"},         {{0, 3, 7}, "min"},         {{0, 3, 6}, "dim"},
      {{0, 4, 8}, "aug"},         {{0, 2, 7}, "sus2"},        {{0, 5, 7}, "sus4"},
      {{0, 4, 7, 10}, "7dom"},    {{0, 4, 7, 11}, "7maj"},    {{0, 3, 7, 10}, "7min"},
      {{0, 3, 6, 9}, "7dim"},     {{0, 3, 6, 10}, "7halfdim"},
  };
  std::vector<ChordEvent> chords;
  if (track.is_drum) return chords;
  auto notes = track.notes;
  std::sort(notes.begin(), notes.end(), note_less);
  for (std::size_t i = 0; i < notes.size();) {
    std::size_t j = i;
    while (j < notes.size() && notes[j].onset == notes[i].onset) ++j;
    const auto count = static_cast<int>(j - i);
    if (count >= 3) {
      int lowest = notes[i].pitch;
      for (std::size_t k = i; k < j; ++k) lowest = std::min(lowest, notes[k].pitch);
      std::vector<int> fingerprint;
      for (std::size_t k = i; k < j; ++k) fingerprint.push_back((notes[k].pitch - lowest) % 12);
      std::sort(fingerprint.begin(), fingerprint.end());
      fingerprint.erase(std::unique(fingerprint.begin(), fingerprint.end()), fingerprint.end());
      if (auto it = table.find(fingerprint); it != table.end()) {
        chords.push_back({notes[i].onset, it->second});
      } else if (config.chord_unknown) {
        chords.push_back({notes[i].onset, std::to_string(std::min(count, kMaxUnknownChordNotes))});
      }
    }
    i = j;
  }
  return chords;
}

Score rescale_ticks(const Score& score, int new_tpq) {
  const int old = score.ticks_per_quarter;
  auto conv = [&](int64_t t) { return mul_div_round(t, new_tpq, old); };
  Score out = score;
  out.ticks_per_quarter = new_tpq;
  for (Track& t : out.tracks) {
    for (Note& n : t.notes) {
      n.onset = conv(n.onset);
      n.offset = conv(n.offset);
    }
  }
  for (auto& t : out.tempos) t.tick = conv(t.tick);
  for (auto& t : out.time_signatures) t.tick = conv(t.tick);
  return out;
}

}  // namespace notetok
