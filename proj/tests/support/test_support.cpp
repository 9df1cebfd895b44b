#include "test_support.hpp"

#include <algorithm>
#include <sstream>

namespace notetok {

std::ostream& operator<<(std::ostream& out, const Note& note) {
  return out << "Note{p" << note.pitch << " v" << note.velocity << " " << note.onset << "-" << note.offset << "}";
}

}  // namespace notetok

namespace notetok::testing {
namespace {

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

}  // namespace

Score random_score(std::mt19937_64& rng, const RandomScoreOptions& o) {
  static const int kDivisions[] = {3, 24, 96, 120, 384, 480, 500, 960};
  Score s;
  s.ticks_per_quarter = kDivisions[uniform(rng, 0, static_cast<int>(std::size(kDivisions)) - 1)];
  const int64_t tpq = s.ticks_per_quarter;
  const int64_t span = o.span_quarters * tpq;

  const int n_tracks = uniform(rng, 1, o.max_tracks);
  for (int t = 0; t < n_tracks; ++t) {
    Track track;
    track.is_drum = o.drums && chance(rng, 0.2);
    track.program = track.is_drum ? 0 : uniform(rng, 0, 127);
    const int n_notes = uniform(rng, 1, o.max_notes_per_track);
    int64_t cursor = 0;
    for (int i = 0; i < n_notes; ++i) {
      if (chance(rng, 0.05)) cursor += uniform(rng, 4, 24) * tpq;  // a long silence
      cursor += uniform(rng, 0, static_cast<int>(tpq));
      if (cursor > span) break;
      const int chord_size = chance(rng, 0.15) ? uniform(rng, 3, 5) : 1;
      const int root = uniform(rng, 15, 112);
      for (int c = 0; c < chord_size; ++c) {
        Note n;
        n.pitch = std::clamp(root + (c == 0 ? 0 : uniform(rng, 1, 14)), 0, 127);
        n.velocity = uniform(rng, 1, 127);
        n.onset = cursor + (chance(rng, 0.3) ? uniform(rng, 0, 2) : 0);
        n.offset = n.onset + uniform(rng, 1, static_cast<int>(tpq * (chance(rng, 0.1) ? 12 : 2)));
        track.notes.push_back(n);
        if (chance(rng, 0.05)) track.notes.push_back(n);  // exact duplicate
      }
    }
    std::sort(track.notes.begin(), track.notes.end(), note_less);
    if (!track.notes.empty()) s.tracks.push_back(std::move(track));
  }
  if (s.tracks.empty()) s.tracks.push_back(Track{});
  Track& anchor = s.tracks.front();
  anchor.is_drum = false;
  anchor.notes.push_back(Note{60, 80, 0, tpq});
  std::sort(anchor.notes.begin(), anchor.notes.end(), note_less);

  if (o.tempos) {
    const int n = uniform(rng, 0, 4);
    for (int i = 0; i < n; ++i) {
      s.tempos.push_back({uniform(rng, 0, static_cast<int>(span)), std::uniform_real_distribution<double>(30, 300)(rng)});
    }
    std::sort(s.tempos.begin(), s.tempos.end(), [](const auto& a, const auto& b) { return a.tick < b.tick; });
  }
  s.time_signatures.push_back({0, 4, 4});
  if (o.time_signatures) {
    static const int kDenominators[] = {2, 4, 8, 16};
    const int n = uniform(rng, 0, 3);
    if (chance(rng, 0.5)) s.time_signatures.front() = {0, uniform(rng, 1, 13), kDenominators[uniform(rng, 0, 3)]};
    for (int i = 0; i < n; ++i) {
      s.time_signatures.push_back({uniform(rng, 1, static_cast<int>(span)), uniform(rng, 1, 13), kDenominators[uniform(rng, 0, 3)]});
    }
    std::sort(s.time_signatures.begin(), s.time_signatures.end(),
              [](const auto& a, const auto& b) { return a.tick < b.tick; });
  }
  return s;
}

std::filesystem::path data_dir() { return NOTETOK_TEST_DATA_DIR; }

std::vector<std::filesystem::path> data_files(const std::string& subdir) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(data_dir() / subdir)) {
    if (e.is_regular_file() && e.path().extension() == ".mid") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<TokenizerConfig> feature_rich_configs(Strategy strategy) {
  std::vector<TokenizerConfig> out;
  auto base = TokenizerConfig::defaults(strategy);
  switch (strategy) {
    case Strategy::MIDILike:
    case Strategy::TSD:
    case Strategy::REMI: {
      auto rich = base;
      rich.use_chords = rich.use_rests = rich.use_tempos = rich.use_time_signatures = true;
      rich.chord_unknown = true;
      rich.use_programs = rich.one_token_stream = true;
      out.push_back(rich);
      auto per_track = rich;
      per_track.one_token_stream = false;
      per_track.rest_min_beats = 0.5;
      per_track.n_velocities = 32;
      per_track.beat_res = 12;
      out.push_back(per_track);
      auto plain_per_track = base;
      plain_per_track.use_tempos = true;
      plain_per_track.use_rests = true;
      out.push_back(plain_per_track);
      break;
    }
    case Strategy::Structured: {
      auto programs = base;
      programs.use_programs = true;
      programs.one_token_stream = true;
      out.push_back(programs);
      auto coarse = base;
      coarse.beat_res = 4;
      coarse.max_duration_beats = 2;
      out.push_back(coarse);
      break;
    }
    case Strategy::Octuple: {
      auto rich = base;
      rich.use_tempos = rich.use_time_signatures = true;
      rich.max_bars = 512;
      out.push_back(rich);
      auto ts_only = base;
      ts_only.use_time_signatures = true;
      ts_only.max_bars = 512;
      out.push_back(ts_only);
      break;
    }
  }
  return out;
}

std::string describe_difference(const Score& expected, const Score& actual) {
  std::ostringstream out;
  if (expected.ticks_per_quarter != actual.ticks_per_quarter) {
    out << "tpq " << expected.ticks_per_quarter << " vs " << actual.ticks_per_quarter << "; ";
  }
  if (expected.tempos != actual.tempos) {
    out << "tempos (" << expected.tempos.size() << " vs " << actual.tempos.size() << ")";
    for (std::size_t i = 0; i < std::min(expected.tempos.size(), actual.tempos.size()); ++i) {
      if (!(expected.tempos[i] == actual.tempos[i])) {
        out << " first diff @" << i << ": " << expected.tempos[i].tick << "/" << expected.tempos[i].bpm << " vs "
            << actual.tempos[i].tick << "/" << actual.tempos[i].bpm;
        break;
      }
    }
    out << "; ";
  }
  if (expected.time_signatures != actual.time_signatures) {
    out << "time signatures (" << expected.time_signatures.size() << " vs " << actual.time_signatures.size() << ")";
    for (std::size_t i = 0; i < std::min(expected.time_signatures.size(), actual.time_signatures.size()); ++i) {
      const auto& a = expected.time_signatures[i];
      const auto& b = actual.time_signatures[i];
      if (!(a == b)) {
        out << " first diff @" << i << ": " << a.tick << " " << a.numerator << "/" << a.denominator << " vs " << b.tick
            << " " << b.numerator << "/" << b.denominator;
        break;
      }
    }
    out << "; ";
  }
  if (expected.tracks.size() != actual.tracks.size()) {
    out << "track count " << expected.tracks.size() << " vs " << actual.tracks.size() << "; ";
  } else {
    for (std::size_t t = 0; t < expected.tracks.size(); ++t) {
      const Track& a = expected.tracks[t];
      const Track& b = actual.tracks[t];
      if (a.program != b.program || a.is_drum != b.is_drum) out << "track " << t << " program/drum differ; ";
      if (a.notes != b.notes) {
        out << "track " << t << " notes (" << a.notes.size() << " vs " << b.notes.size() << ")";
        for (std::size_t i = 0; i < std::min(a.notes.size(), b.notes.size()); ++i) {
          if (!(a.notes[i] == b.notes[i])) {
            const Note& x = a.notes[i];
            const Note& y = b.notes[i];
            out << " first diff @" << i << ": p" << x.pitch << " v" << x.velocity << " " << x.onset << "-" << x.offset
                << " vs p" << y.pitch << " v" << y.velocity << " " << y.onset << "-" << y.offset;
            break;
          }
        }
        out << "; ";
      }
    }
  }
  return out.str();
}

bool on_grid(const Score& score, int beat_res) {
  const int tpq = score.ticks_per_quarter;
  auto ok = [&](int64_t tick) { return quantize_tick(tick, tpq, beat_res) == tick; };
  for (const Track& t : score.tracks) {
    for (const Note& n : t.notes) {
      if (!ok(n.onset) || !ok(n.offset)) return false;
    }
  }
  for (const auto& t : score.tempos) {
    if (!ok(t.tick)) return false;
  }
  for (const auto& t : score.time_signatures) {
    if (!ok(t.tick)) return false;
  }
  return true;
}

}  // namespace notetok::testing
