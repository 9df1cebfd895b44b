#include "notetok/seq_utils.hpp"

#include <algorithm>

namespace notetok {

PaddedBatch pad_batch(const std::vector<std::vector<int>>& sequences, const PadOptions& options) {
  std::vector<std::vector<int>> rows;
  rows.reserve(sequences.size());
  std::size_t width = 0;
  for (const auto& seq : sequences) {
    std::vector<int> row;
    row.reserve(seq.size() + 2);
    if (options.add_bos) row.push_back(options.bos_id);
    row.insert(row.end(), seq.begin(), seq.end());
    if (options.add_eos) row.push_back(options.eos_id);
    width = std::max(width, row.size());
    rows.push_back(std::move(row));
  }

  PaddedBatch batch;
  for (auto& row : rows) {
    const std::size_t pad = width - row.size();
    std::vector<int> mask(row.size(), 1);
    if (options.side == PadSide::Left) {
      row.insert(row.begin(), pad, options.pad_id);
      mask.insert(mask.begin(), pad, 0);
    } else {
      row.insert(row.end(), pad, options.pad_id);
      mask.insert(mask.end(), pad, 0);
    }
    batch.ids.push_back(std::move(row));
    batch.mask.push_back(std::move(mask));
  }
  return batch;
}

std::pair<std::vector<int>, std::vector<int>> shift_labels(const std::vector<int>& ids) {
  if (ids.size() < 2) throw Error(ErrorCode::InvalidArgument, "label shifting needs at least two ids");
  return {std::vector<int>(ids.begin(), ids.end() - 1), std::vector<int>(ids.begin() + 1, ids.end())};
}

}  // namespace notetok
