#include "notetok/strategies.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <map>
#include <tuple>

#include "notetok/error.hpp"

namespace notetok {
namespace {

constexpr int kDefaultVelocity = 64;
constexpr int kLowestProgram = -1;
constexpr int kHighestProgram = 127;

std::optional<int64_t> parse_int(std::string_view s) {
  int64_t v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

std::optional<TimeSig> parse_time_sig(std::string_view s) {
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return std::nullopt;
  const auto n = parse_int(s.substr(0, slash));
  const auto d = parse_int(s.substr(slash + 1));
  if (!n || !d || *n < 1 || *d < 1 || *n > 255 || *d > 64) return std::nullopt;
  return TimeSig{static_cast<int>(*n), static_cast<int>(*d)};
}

std::optional<double> parse_bpm(std::string_view s) {
  const std::string copy(s);
  char* end = nullptr;
  const double v = std::strtod(copy.c_str(), &end);
  if (end != copy.c_str() + copy.size() || !(v > 0.0)) return std::nullopt;
  return v;
}

// Bar boundaries implied by a time signature map whose changes sit on bar
// starts.
class BarGrid {
 public:
  struct Bar {
    int64_t index;
    int64_t start;
    int64_t length;
  };

  BarGrid(const std::vector<TimeSigChange>& sigs, const TokenizerConfig& cfg) {
    for (const auto& ts : sigs) {
      const int64_t len = cfg.bar_samples(ts.signature());
      if (segments_.empty()) {
        segments_.push_back({0, len, 0});
        continue;
      }
      const Segment& prev = segments_.back();
      const int64_t first = prev.first_bar + (ts.tick - prev.start + prev.length - 1) / prev.length;
      const int64_t start = prev.start + (first - prev.first_bar) * prev.length;
      if (start == prev.start) {
        segments_.back().length = len;
      } else {
        segments_.push_back({start, len, first});
      }
    }
    if (segments_.empty()) segments_.push_back({0, cfg.bar_samples({4, 4}), 0});
  }

  Bar locate(int64_t time) const {
    auto it = std::upper_bound(segments_.begin(), segments_.end(), time,
                               [](int64_t t, const Segment& s) { return t < s.start; });
    const Segment& seg = *std::prev(it);
    const int64_t k = (time - seg.start) / seg.length;
    return {seg.first_bar + k, seg.start + k * seg.length, seg.length};
  }

 private:
  struct Segment {
    int64_t start;
    int64_t length;
    int64_t first_bar;
  };
  std::vector<Segment> segments_;
};

std::vector<TimeSigChange> signature_map(const std::vector<Event>& events, const TokenizerConfig& cfg) {
  std::vector<TimeSigChange> sigs;
  if (cfg.use_time_signatures) {
    for (const Event& e : events) {
      if (e.kind == EventKind::TimeSig) sigs.push_back({e.time, e.time_sig.numerator, e.time_sig.denominator});
    }
  }
  if (sigs.empty() || sigs.front().tick > 0) sigs.insert(sigs.begin(), TimeSigChange{0, 4, 4});
  return sigs;
}

std::vector<TempoChange> tempo_map(const std::vector<Event>& events) {
  std::vector<TempoChange> tempos;
  for (const Event& e : events) {
    if (e.kind == EventKind::Tempo) tempos.push_back({e.time, e.bpm});
  }
  return tempos;
}

void push_time_shifts(std::vector<std::string>& out, int64_t gap, int64_t max_shift) {
  while (gap > 0) {
    const int64_t d = std::min(gap, max_shift);
    out.push_back(make_token("TimeShift", d));
    gap -= d;
  }
}

// A silence long enough for Rest tokens: move `lead` samples normally (up to
// the last note offset), then rest, then move `remainder` samples normally.
struct RestPlan {
  int64_t lead = 0;
  std::vector<int64_t> rests;
  int64_t remainder = 0;
};

std::optional<RestPlan> plan_rest(int64_t from, int64_t to, int64_t last_offset, const TokenizerConfig& cfg) {
  if (!cfg.use_rests) return std::nullopt;
  const int64_t silent_from = std::max(from, last_offset);
  const int64_t step = cfg.rest_step();
  if (to - silent_from < step) return std::nullopt;
  const int64_t max_rest = cfg.max_duration_samples() / step * step;
  RestPlan plan;
  plan.lead = silent_from - from;
  int64_t left = to - silent_from;
  while (left >= step) {
    const int64_t d = std::min(left / step * step, max_rest);
    plan.rests.push_back(d);
    left -= d;
  }
  plan.remainder = left;
  return plan;
}

void push_global_or_chord(std::vector<std::string>& out, const Event& e) {
  switch (e.kind) {
    case EventKind::TimeSig: out.push_back(make_token("TimeSig", format_time_sig(e.time_sig))); break;
    case EventKind::Tempo: out.push_back(make_token("Tempo", format_tempo(e.bpm))); break;
    case EventKind::Chord: out.push_back(make_token("Chord", e.chord)); break;
    default: break;
  }
}

void push_note_tsd(std::vector<std::string>& out, const Event& e, const TokenizerConfig& cfg) {
  if (cfg.use_programs) out.push_back(make_token("Program", e.program));
  out.push_back(make_token("Pitch", e.pitch));
  out.push_back(make_token("Velocity", e.velocity));
  out.push_back(make_token("Duration", e.duration));
}

// MIDILike and TSD: time moves through TimeShift and Rest tokens only.
template <typename PushEvent>
std::vector<std::string> emit_linear(const std::vector<Event>& events, const TokenizerConfig& cfg, PushEvent push) {
  std::vector<std::string> out;
  const int64_t max_shift = cfg.max_duration_samples();
  int64_t t = 0;
  int64_t last_offset = 0;
  for (const Event& e : events) {
    if (e.time > t) {
      if (auto plan = plan_rest(t, e.time, last_offset, cfg)) {
        push_time_shifts(out, plan->lead, max_shift);
        for (int64_t r : plan->rests) out.push_back(make_token("Rest", r));
        push_time_shifts(out, plan->remainder, max_shift);
      } else {
        push_time_shifts(out, e.time - t, max_shift);
      }
      t = e.time;
    }
    push(out, e);
    if (e.kind == EventKind::Note) last_offset = std::max(last_offset, e.time + e.duration);
  }
  return out;
}

template <typename T, typename Key>
void keep_last_at_tick(std::vector<T>& v, Key key_equal) {
  std::vector<T> out;
  for (const T& x : v) {
    if (!out.empty() && out.back().tick == x.tick) {
      out.back() = x;
    } else if (out.empty() || !key_equal(out.back(), x)) {
      out.push_back(x);
    }
  }
  v = std::move(out);
}

struct OctupleLayout {
  std::size_t pitch = 0, velocity = 1, duration = 2, program = 3, position = 4, bar = 5;
  static constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);
  std::size_t tempo = kAbsent, time_sig = kAbsent;
  std::size_t arity = 6;

  explicit OctupleLayout(const TokenizerConfig& cfg) {
    if (cfg.use_tempos) tempo = arity++;
    if (cfg.use_time_signatures) time_sig = arity++;
  }
  bool has_tempo() const { return tempo != kAbsent; }
  bool has_time_sig() const { return time_sig != kAbsent; }
};

DecodedStream decode_octuple(const std::vector<std::string>& tokens, const TokenizerConfig& cfg) {
  const OctupleLayout layout(cfg);
  DecodedStream out;
  int64_t bar_index = 0;
  int64_t bar_start = 0;
  int64_t bar_len = cfg.bar_samples({4, 4});
  int64_t t = 0;
  bool first = true;
  TimeSig current_ts{4, 4};

  for (std::size_t base = 0; base + layout.arity <= tokens.size(); base += layout.arity) {
    auto field = [&](std::size_t pos, std::string_view type) -> std::optional<std::string_view> {
      const auto parts = split_token(tokens[base + pos]);
      if (parts.type != type) return std::nullopt;
      return parts.value;
    };
    auto int_field = [&](std::size_t pos, std::string_view type) -> std::optional<int64_t> {
      auto v = field(pos, type);
      return v ? parse_int(*v) : std::nullopt;
    };
    const auto pitch = int_field(layout.pitch, "Pitch");
    const auto velocity = int_field(layout.velocity, "Velocity");
    const auto duration = int_field(layout.duration, "Duration");
    const auto program = int_field(layout.program, "Program");
    const auto position = int_field(layout.position, "Position");
    const auto bar = int_field(layout.bar, "Bar");
    if (!pitch || !velocity || !duration || !program || !position || !bar || *duration < 1 || *position < 0) continue;
    std::optional<double> bpm;
    std::optional<TimeSig> ts;
    if (layout.has_tempo()) {
      auto v = field(layout.tempo, "Tempo");
      bpm = v ? parse_bpm(*v) : std::nullopt;
      if (!bpm) continue;
    }
    if (layout.has_time_sig()) {
      auto v = field(layout.time_sig, "TimeSig");
      ts = v ? parse_time_sig(*v) : std::nullopt;
      if (!ts || cfg.bar_samples(*ts) < 1) continue;
    }

    if (first && ts) {
      current_ts = *ts;
      bar_len = cfg.bar_samples(*ts);
      out.time_signatures.push_back({0, ts->numerator, ts->denominator});
    }
    if (ts && *ts != current_ts && bar_index < *bar) {
      bar_start += bar_len;
      ++bar_index;
    }
    if (ts && *ts != current_ts) {
      if (out.time_signatures.back().tick == bar_start) {
        out.time_signatures.back() = {bar_start, ts->numerator, ts->denominator};
      } else {
        out.time_signatures.push_back({bar_start, ts->numerator, ts->denominator});
      }
      current_ts = *ts;
      bar_len = cfg.bar_samples(*ts);
    }
    while (bar_index < *bar) {
      bar_start += bar_len;
      ++bar_index;
    }
    t = std::max(t, bar_start + *position);
    if (bpm) {
      if (first) {
        out.tempos.push_back({0, *bpm});
      } else if (out.tempos.back().bpm != *bpm) {
        out.tempos.push_back({t, *bpm});
      }
    }
    out.saw_program_token = true;
    out.notes.push_back({static_cast<int>(*program),
                         Note{static_cast<int>(*pitch), static_cast<int>(*velocity), t, t + *duration}});
    first = false;
  }
  keep_last_at_tick(out.tempos, [](const TempoChange& a, const TempoChange& b) { return a.bpm == b.bpm; });
  return out;
}

DecodedStream decode_sequential(const std::vector<std::string>& tokens, const TokenizerConfig& cfg,
                                int default_program) {
  const bool remi = cfg.strategy == Strategy::REMI;
  const bool midilike = cfg.strategy == Strategy::MIDILike;
  DecodedStream out;
  int64_t t = 0;
  int program = default_program;
  int last_velocity = kDefaultVelocity;
  int64_t bar_start = 0;
  int64_t bar_len = cfg.bar_samples({4, 4});
  bool seen_bar = false;
  std::map<std::pair<int, int>, std::deque<std::pair<int64_t, int>>> open;

  auto add_note = [&](int prog, int pitch, int velocity, int64_t onset, int64_t offset) {
    if (offset > onset) out.notes.push_back({prog, Note{pitch, velocity, onset, offset}});
  };
  auto value_at = [&](std::size_t i) { return parse_int(split_token(tokens[i]).value); };
  auto type_at = [&](std::size_t i) { return split_token(tokens[i]).type; };

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto [type, value] = split_token(tokens[i]);
    if (type == "TimeShift" && !remi) {
      if (auto d = parse_int(value); d && *d >= 0) t += *d;
    } else if (type == "Rest") {
      if (auto d = parse_int(value); d && *d > 0) {
        t += *d;
        if (remi) {
          while (t >= bar_start + bar_len) bar_start += bar_len;
          seen_bar = true;
        }
      }
    } else if (type == "Bar" && remi) {
      if (seen_bar) bar_start += bar_len;
      seen_bar = true;
      t = std::max(t, bar_start);
    } else if (type == "Position" && remi) {
      if (auto k = parse_int(value); k && *k >= 0) t = std::max(t, bar_start + *k);
    } else if (type == "Program") {
      if (auto p = parse_int(value); p && *p >= kLowestProgram && *p <= kHighestProgram) {
        program = static_cast<int>(*p);
        out.saw_program_token = true;
      }
    } else if (type == "Tempo") {
      if (auto bpm = parse_bpm(value)) out.tempos.push_back({t, *bpm});
    } else if (type == "TimeSig") {
      if (auto ts = parse_time_sig(value); ts && cfg.bar_samples(*ts) >= 1) {
        out.time_signatures.push_back({t, ts->numerator, ts->denominator});
        if (remi) bar_len = cfg.bar_samples(*ts);
      }
    } else if (type == "Pitch" && !midilike) {
      const auto pitch = parse_int(value);
      if (pitch && i + 2 < tokens.size() && type_at(i + 1) == "Velocity" && type_at(i + 2) == "Duration") {
        const auto vel = value_at(i + 1);
        const auto dur = value_at(i + 2);
        if (vel && dur) add_note(program, static_cast<int>(*pitch), static_cast<int>(*vel), t, t + *dur);
        i += 2;
      }
    } else if (type == "NoteOn" && midilike) {
      const auto pitch = parse_int(value);
      if (!pitch) continue;
      int velocity = last_velocity;
      if (i + 1 < tokens.size() && type_at(i + 1) == "Velocity") {
        if (auto v = value_at(i + 1)) velocity = static_cast<int>(*v);
        ++i;
      }
      last_velocity = velocity;
      open[{program, static_cast<int>(*pitch)}].emplace_back(t, velocity);
    } else if (type == "NoteOff" && midilike) {
      const auto pitch = parse_int(value);
      if (!pitch) continue;
      auto it = open.find({program, static_cast<int>(*pitch)});
      if (it == open.end() || it->second.empty()) continue;
      const auto [onset, velocity] = it->second.front();
      it->second.pop_front();
      add_note(program, static_cast<int>(*pitch), velocity, onset, t);
    }
    // Anything else (specials, chords, stray values) carries no content.
  }
  for (const auto& [key, queue] : open) {
    for (const auto& [onset, velocity] : queue) add_note(key.first, key.second, velocity, onset, t);
  }
  keep_last_at_tick(out.tempos, [](const TempoChange& a, const TempoChange& b) { return a.bpm == b.bpm; });
  keep_last_at_tick(out.time_signatures,
                    [](const TimeSigChange& a, const TimeSigChange& b) { return a.signature() == b.signature(); });
  return out;
}

void add_specials(Vocabulary& v, const TokenizerConfig& cfg) {
  for (const auto& s : cfg.special_tokens) v.add(make_token(s, "None"));
}

void add_pitches(Vocabulary& v, const TokenizerConfig& cfg, std::string_view type = "Pitch") {
  for (int p = cfg.pitch_low; p < cfg.pitch_high; ++p) v.add(make_token(type, p));
}

void add_velocities(Vocabulary& v, const TokenizerConfig& cfg) {
  for (int b : velocity_bins(cfg.n_velocities)) v.add(make_token("Velocity", b));
}

void add_range(Vocabulary& v, std::string_view type, int64_t from, int64_t to) {
  for (int64_t d = from; d <= to; ++d) v.add(make_token(type, d));
}

void add_programs(Vocabulary& v) { add_range(v, "Program", kLowestProgram, kHighestProgram); }

void add_tempos(Vocabulary& v, const TokenizerConfig& cfg) {
  for (double b : cfg.tempo_bins) v.add(make_token("Tempo", format_tempo(b)));
}

void add_time_sigs(Vocabulary& v, const TokenizerConfig& cfg) {
  for (const TimeSig& ts : cfg.time_signature_set) v.add(make_token("TimeSig", format_time_sig(ts)));
}

void add_extras(Vocabulary& v, const TokenizerConfig& cfg) {
  if (cfg.use_chords) {
    for (const auto& q : chord_qualities()) v.add(make_token("Chord", q));
    if (cfg.chord_unknown) add_range(v, "Chord", 3, kMaxUnknownChordNotes);
  }
  if (cfg.use_rests) {
    const int step = cfg.rest_step();
    for (int d = step; d <= cfg.max_duration_samples(); d += step) v.add(make_token("Rest", d));
  }
  if (cfg.use_tempos) add_tempos(v, cfg);
  if (cfg.use_time_signatures) add_time_sigs(v, cfg);
  if (cfg.use_programs) add_programs(v);
}

}  // namespace

StrategySpec strategy_spec(Strategy strategy) {
  StrategySpec s;
  switch (strategy) {
    case Strategy::MIDILike:
      s.duration_scheme = DurationScheme::NoteOff;
      s.supports_chords = s.supports_rests = s.supports_tempos = s.supports_time_signatures = true;
      s.supports_programs = true;
      break;
    case Strategy::TSD:
      s.supports_chords = s.supports_rests = s.supports_tempos = s.supports_time_signatures = true;
      s.supports_programs = true;
      break;
    case Strategy::REMI:
      s.time_scheme = TimeScheme::BarPosition;
      s.supports_chords = s.supports_rests = s.supports_tempos = s.supports_time_signatures = true;
      s.supports_programs = true;
      break;
    case Strategy::Structured:
      s.fixed_succession = std::vector<std::string>{"Pitch", "Velocity", "Duration", "TimeShift"};
      s.supports_programs = true;
      break;
    case Strategy::Octuple:
      s.time_scheme = TimeScheme::BarPosition;
      s.multi_voc = true;
      s.supports_tempos = s.supports_time_signatures = true;
      s.supports_programs = true;
      break;
  }
  return s;
}

bool event_less(const Event& a, const Event& b) {
  return std::tie(a.time, a.kind, a.program, a.pitch, a.velocity, a.duration, a.bpm, a.time_sig, a.chord) <
         std::tie(b.time, b.kind, b.program, b.pitch, b.velocity, b.duration, b.bpm, b.time_sig, b.chord);
}

std::vector<Event> collect_events(const Score& grid, const std::vector<const Track*>& tracks,
                                  const TokenizerConfig& cfg) {
  std::vector<Event> events;
  if (cfg.use_time_signatures) {
    for (const auto& ts : grid.time_signatures) {
      Event e;
      e.kind = EventKind::TimeSig;
      e.time = ts.tick;
      e.time_sig = ts.signature();
      events.push_back(e);
    }
  }
  if (cfg.use_tempos) {
    for (const auto& t : grid.tempos) {
      Event e;
      e.kind = EventKind::Tempo;
      e.time = t.tick;
      e.bpm = t.bpm;
      events.push_back(e);
    }
  }
  for (const Track* track : tracks) {
    const int program = track->program_key();
    for (const Note& n : track->notes) {
      Event on;
      on.kind = EventKind::Note;
      on.time = n.onset;
      on.program = program;
      on.pitch = n.pitch;
      on.velocity = n.velocity;
      on.duration = n.duration();
      events.push_back(on);
      if (cfg.strategy == Strategy::MIDILike) {
        Event off;
        off.kind = EventKind::NoteOff;
        off.time = n.offset;
        off.program = program;
        off.pitch = n.pitch;
        events.push_back(off);
      }
    }
    if (cfg.use_chords) {
      for (const ChordEvent& c : detect_chords(*track, cfg)) {
        Event e;
        e.kind = EventKind::Chord;
        e.time = c.tick;
        e.program = program;
        e.chord = c.quality;
        events.push_back(e);
      }
    }
  }
  std::sort(events.begin(), events.end(), event_less);
  return events;
}

std::vector<std::string> emit_midilike(const std::vector<Event>& events, const TokenizerConfig& cfg) {
  return emit_linear(events, cfg, [&](std::vector<std::string>& out, const Event& e) {
    if (e.kind == EventKind::Note) {
      if (cfg.use_programs) out.push_back(make_token("Program", e.program));
      out.push_back(make_token("NoteOn", e.pitch));
      out.push_back(make_token("Velocity", e.velocity));
    } else if (e.kind == EventKind::NoteOff) {
      if (cfg.use_programs) out.push_back(make_token("Program", e.program));
      out.push_back(make_token("NoteOff", e.pitch));
    } else {
      push_global_or_chord(out, e);
    }
  });
}

std::vector<std::string> emit_tsd(const std::vector<Event>& events, const TokenizerConfig& cfg) {
  return emit_linear(events, cfg, [&](std::vector<std::string>& out, const Event& e) {
    if (e.kind == EventKind::Note) {
      push_note_tsd(out, e, cfg);
    } else {
      push_global_or_chord(out, e);
    }
  });
}

std::vector<std::string> emit_remi(const std::vector<Event>& events, const TokenizerConfig& cfg) {
  const BarGrid grid(signature_map(events, cfg), cfg);
  std::vector<std::string> out;
  int64_t current_bar = -1;
  int64_t t = 0;
  int64_t last_offset = 0;
  std::optional<int64_t> group_time;

  auto move_to = [&](int64_t target) {
    const BarGrid::Bar bar = grid.locate(target);
    for (; current_bar < bar.index; ++current_bar) out.emplace_back("Bar_None");
    out.push_back(make_token("Position", target - bar.start));
    t = target;
  };

  for (const Event& e : events) {
    if (!group_time || *group_time != e.time) {
      if (e.time > t) {
        if (auto plan = plan_rest(t, e.time, last_offset, cfg)) {
          if (plan->lead > 0) move_to(t + plan->lead);
          for (int64_t r : plan->rests) {
            out.push_back(make_token("Rest", r));
            t += r;
          }
          current_bar = std::max(current_bar, grid.locate(t).index);
        }
      }
      move_to(e.time);
      group_time = e.time;
    }
    if (e.kind == EventKind::Note) {
      push_note_tsd(out, e, cfg);
      last_offset = std::max(last_offset, e.time + e.duration);
    } else {
      push_global_or_chord(out, e);
    }
  }
  return out;
}

std::vector<std::string> emit_structured(const std::vector<Event>& events, const TokenizerConfig& cfg) {
  std::vector<std::string> out;
  int64_t t = 0;
  for (const Event& e : events) {
    if (e.kind != EventKind::Note) continue;
    const int64_t shift = e.time - t;
    if (shift > cfg.max_duration_samples()) {
      throw Error(ErrorCode::ValueOutOfRange, "onset gap exceeds the largest TimeShift; preprocess the score first");
    }
    out.push_back(make_token("TimeShift", shift));
    push_note_tsd(out, e, cfg);
    t = e.time;
  }
  return out;
}

std::vector<std::string> emit_octuple(const std::vector<Event>& events, const TokenizerConfig& cfg) {
  const OctupleLayout layout(cfg);
  const auto sigs = signature_map(events, cfg);
  const auto tempos = tempo_map(events);
  const BarGrid grid(sigs, cfg);
  std::vector<std::string> out;
  std::size_t sig_idx = 0;
  std::size_t tempo_idx = 0;
  for (const Event& e : events) {
    if (e.kind != EventKind::Note) continue;
    while (sig_idx + 1 < sigs.size() && sigs[sig_idx + 1].tick <= e.time) ++sig_idx;
    while (tempo_idx + 1 < tempos.size() && tempos[tempo_idx + 1].tick <= e.time) ++tempo_idx;
    const BarGrid::Bar bar = grid.locate(e.time);
    if (bar.index >= cfg.max_bars) {
      throw Error(ErrorCode::BarOverflow, "note at bar " + std::to_string(bar.index) + " exceeds max_bars " +
                                              std::to_string(cfg.max_bars));
    }
    std::vector<std::string> tuple(layout.arity);
    tuple[layout.pitch] = make_token("Pitch", e.pitch);
    tuple[layout.velocity] = make_token("Velocity", e.velocity);
    tuple[layout.duration] = make_token("Duration", e.duration);
    tuple[layout.program] = make_token("Program", e.program);
    tuple[layout.position] = make_token("Position", e.time - bar.start);
    tuple[layout.bar] = make_token("Bar", bar.index);
    if (layout.has_tempo()) {
      if (tempos.empty()) throw Error(ErrorCode::InvalidArgument, "tempo sub-token requested without tempo events");
      tuple[layout.tempo] = make_token("Tempo", format_tempo(tempos[tempo_idx].bpm));
    }
    if (layout.has_time_sig()) tuple[layout.time_sig] = make_token("TimeSig", format_time_sig(sigs[sig_idx].signature()));
    for (auto& tok : tuple) out.push_back(std::move(tok));
  }
  return out;
}

std::vector<std::string> emit_tokens(const std::vector<Event>& events, const TokenizerConfig& cfg) {
  switch (cfg.strategy) {
    case Strategy::MIDILike: return emit_midilike(events, cfg);
    case Strategy::TSD: return emit_tsd(events, cfg);
    case Strategy::REMI: return emit_remi(events, cfg);
    case Strategy::Structured: return emit_structured(events, cfg);
    case Strategy::Octuple: return emit_octuple(events, cfg);
  }
  return {};
}

DecodedStream decode_tokens(const std::vector<std::string>& tokens, const TokenizerConfig& cfg, int default_program) {
  if (cfg.strategy == Strategy::Octuple) return decode_octuple(tokens, cfg);
  return decode_sequential(tokens, cfg, default_program);
}

std::size_t token_arity(const TokenizerConfig& cfg) {
  return cfg.strategy == Strategy::Octuple ? OctupleLayout(cfg).arity : 1;
}

std::vector<Vocabulary> build_vocabularies(const TokenizerConfig& cfg) {
  cfg.validate();
  const int max_dur = cfg.max_duration_samples();
  Vocabulary v;
  switch (cfg.strategy) {
    case Strategy::MIDILike:
      add_specials(v, cfg);
      add_pitches(v, cfg, "NoteOn");
      add_pitches(v, cfg, "NoteOff");
      add_velocities(v, cfg);
      add_range(v, "TimeShift", 1, max_dur);
      add_extras(v, cfg);
      return {v};
    case Strategy::TSD:
      add_specials(v, cfg);
      add_pitches(v, cfg);
      add_velocities(v, cfg);
      add_range(v, "Duration", 1, max_dur);
      add_range(v, "TimeShift", 1, max_dur);
      add_extras(v, cfg);
      return {v};
    case Strategy::REMI:
      add_specials(v, cfg);
      v.add("Bar_None");
      add_range(v, "Position", 0, cfg.max_bar_samples() - 1);
      add_pitches(v, cfg);
      add_velocities(v, cfg);
      add_range(v, "Duration", 1, max_dur);
      add_extras(v, cfg);
      return {v};
    case Strategy::Structured:
      add_specials(v, cfg);
      add_pitches(v, cfg);
      add_velocities(v, cfg);
      add_range(v, "Duration", 1, max_dur);
      add_range(v, "TimeShift", 0, max_dur);
      if (cfg.use_programs) add_programs(v);
      return {v};
    case Strategy::Octuple: {
      const OctupleLayout layout(cfg);
      std::vector<Vocabulary> vocabs(layout.arity);
      for (auto& voc : vocabs) add_specials(voc, cfg);
      add_pitches(vocabs[layout.pitch], cfg);
      add_velocities(vocabs[layout.velocity], cfg);
      add_range(vocabs[layout.duration], "Duration", 1, max_dur);
      add_programs(vocabs[layout.program]);
      add_range(vocabs[layout.position], "Position", 0, cfg.max_bar_samples() - 1);
      add_range(vocabs[layout.bar], "Bar", 0, cfg.max_bars - 1);
      if (layout.has_tempo()) add_tempos(vocabs[layout.tempo], cfg);
      if (layout.has_time_sig()) add_time_sigs(vocabs[layout.time_sig], cfg);
      return vocabs;
    }
  }
  return {v};
}

std::string format_tempo(double bpm) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", bpm);
  std::string s(buf);
  while (s.size() >= 2 && s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
  return s;
}

std::string format_time_sig(TimeSig ts) {
  return std::to_string(ts.numerator) + "/" + std::to_string(ts.denominator);
}

}  // namespace notetok
