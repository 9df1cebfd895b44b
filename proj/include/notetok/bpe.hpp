#pragma once

// Byte pair encoding over base token ids. Pairs are merged directly on ids;
// no intermediate byte alphabet is involved.

#include <cstddef>
#include <utility>
#include <vector>

namespace notetok {

struct MergeTable {
  std::size_t base_size = 0;
  /// Merge k creates id base_size + k from (left, right).
  std::vector<std::pair<int, int>> merges;

  std::size_t vocab_size() const { return base_size + merges.size(); }
  bool operator==(const MergeTable&) const = default;
};

/// Learns merges until the vocabulary reaches `target_vocab` or no adjacent
/// pair occurs at least twice. Pairs never span two sequences and never
/// involve ids below `n_special`. Ties go to the smallest (left, right).
/// Throws Error(TargetTooSmall) if target_vocab <= base_size and
/// Error(EmptyCorpus) if the corpus holds no ids.
MergeTable train_bpe(const std::vector<std::vector<int>>& corpus, std::size_t base_size, std::size_t target_vocab,
                     int n_special = 0);

/// Replays merges in training order, left to right and non-overlapping.
/// Throws Error(UnknownId) for ids outside [0, base_size).
std::vector<int> apply_bpe(const MergeTable& table, const std::vector<int>& ids);

/// Expands learned ids back to base ids. Throws Error(UnknownId) for ids
/// outside [0, vocab_size()).
std::vector<int> decode_bpe(const MergeTable& table, const std::vector<int>& ids);

}  // namespace notetok
