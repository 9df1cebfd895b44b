#include "notetok/augment.hpp"

#include <algorithm>

namespace notetok {

std::vector<Score> augment_pitch(const Score& score, const std::vector<int>& octave_offsets,
                                 const TokenizerConfig& config) {
  std::vector<Score> out;
  for (int offset : octave_offsets) {
    Score s = score;
    for (Track& t : s.tracks) {
      if (t.is_drum) continue;
      std::vector<Note> kept;
      for (Note n : t.notes) {
        n.pitch += 12 * offset;
        if (n.pitch >= config.pitch_low && n.pitch < config.pitch_high) kept.push_back(n);
      }
      t.notes = std::move(kept);
    }
    std::erase_if(s.tracks, [](const Track& t) { return t.notes.empty(); });
    if (s.note_count() > 0) out.push_back(std::move(s));
  }
  return out;
}

std::vector<Score> augment_velocity(const Score& score, const std::vector<int>& offsets) {
  std::vector<Score> out;
  for (int offset : offsets) {
    Score s = score;
    for (Track& t : s.tracks) {
      for (Note& n : t.notes) n.velocity = std::clamp(n.velocity + offset, 1, 127);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Score> augment_duration(const Score& score, const std::vector<int>& sample_offsets,
                                    const TokenizerConfig& config) {
  const int tpq = score.ticks_per_quarter;
  const int res = config.beat_res;
  std::vector<Score> out;
  for (int offset : sample_offsets) {
    Score s = score;
    for (Track& t : s.tracks) {
      for (Note& n : t.notes) {
        const int64_t on = tick_to_sample(n.onset, tpq, res);
        int64_t dur = tick_to_sample(n.offset, tpq, res) - on + offset;
        dur = std::max<int64_t>(dur, 1);
        if (config.strategy != Strategy::MIDILike) dur = std::min<int64_t>(dur, config.max_duration_samples());
        n.offset = sample_to_tick(on + dur, tpq, res);
      }
      t = fix_overlapping_notes(std::move(t));
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace notetok
