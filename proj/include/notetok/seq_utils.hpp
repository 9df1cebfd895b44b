#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "notetok/error.hpp"

namespace notetok {

/// Greedy chunks of max_len; the final chunk is kept only if it holds at
/// least min_len items. Throws Error(InvalidArgument) unless
/// 1 <= min_len <= max_len.
template <typename T>
std::vector<std::vector<T>> split_sequence(const std::vector<T>& items, std::size_t min_len, std::size_t max_len) {
  if (min_len < 1 || min_len > max_len) {
    throw Error(ErrorCode::InvalidArgument, "split lengths must satisfy 1 <= min_len <= max_len");
  }
  std::vector<std::vector<T>> chunks;
  for (std::size_t i = 0; i < items.size(); i += max_len) {
    const std::size_t end = std::min(items.size(), i + max_len);
    if (end - i < min_len) break;
    chunks.emplace_back(items.begin() + static_cast<std::ptrdiff_t>(i), items.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return chunks;
}

enum class PadSide { Left, Right };

struct PadOptions {
  int pad_id = 0;
  PadSide side = PadSide::Right;
  bool add_bos = false;
  bool add_eos = false;
  int bos_id = 1;
  int eos_id = 2;
};

struct PaddedBatch {
  std::vector<std::vector<int>> ids;
  std::vector<std::vector<int>> mask;  // 1 for real tokens (BOS/EOS included), 0 for padding
};

PaddedBatch pad_batch(const std::vector<std::vector<int>>& sequences, const PadOptions& options = {});

/// (ids[0..n-1), ids[1..n)). Throws Error(InvalidArgument) for n < 2.
std::pair<std::vector<int>, std::vector<int>> shift_labels(const std::vector<int>& ids);

}  // namespace notetok
