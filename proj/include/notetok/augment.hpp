#pragma once

// Score-level augmentation. Inputs are expected to be preprocessed; outputs
// stay on the same grid.

#include <vector>

#include "notetok/config.hpp"
#include "notetok/score.hpp"

namespace notetok {

/// One score per offset: pitches move by 12 * offset semitones. Notes leaving
/// the config's pitch range are dropped, drum tracks are left alone, and
/// scores left without notes are omitted.
std::vector<Score> augment_pitch(const Score& score, const std::vector<int>& octave_offsets,
                                 const TokenizerConfig& config);

/// One score per offset: velocity + offset clamped to [1, 127]. Values are
/// not re-binned here; tokenization does that.
std::vector<Score> augment_velocity(const Score& score, const std::vector<int>& offsets);

/// One score per offset: note offsets move by `offset` grid samples. Durations
/// stay within [1, max duration] samples (no upper cap for MIDILike) and
/// same-pitch overlaps are fixed afterwards.
std::vector<Score> augment_duration(const Score& score, const std::vector<int>& sample_offsets,
                                    const TokenizerConfig& config);

}  // namespace notetok
