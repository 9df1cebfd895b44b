#include "notetok/bpe.hpp"

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>

#include "notetok/error.hpp"

namespace notetok {
namespace {

using PairKey = uint64_t;

PairKey key_of(int left, int right) {
  return (static_cast<uint64_t>(static_cast<uint32_t>(left)) << 32) | static_cast<uint32_t>(right);
}

std::pair<int, int> pair_of(PairKey key) {
  return {static_cast<int>(key >> 32), static_cast<int>(key & 0xFFFFFFFFu)};
}

// Adjacent-pair counts over a linked symbol list, updated incrementally as
// merges rewrite it.
class PairIndex {
 public:
  explicit PairIndex(int n_special) : n_special_(n_special) {}

  void add(int left, int right, int position) {
    if (left < n_special_ || right < n_special_) return;
    const PairKey key = key_of(left, right);
    bump(key, +1);
    positions_[key].push_back(position);
  }

  void remove(int left, int right) {
    if (left < n_special_ || right < n_special_) return;
    bump(key_of(left, right), -1);
  }

  /// Most frequent pair (smallest on ties) with its count; count 0 if none.
  std::pair<PairKey, int> best() const {
    if (ranked_.empty()) return {0, 0};
    const auto& [neg_count, left, right] = *ranked_.begin();
    return {key_of(left, right), -neg_count};
  }

  std::vector<int> take_positions(PairKey key) {
    auto node = positions_.extract(key);
    if (node.empty()) return {};
    std::vector<int> pos = std::move(node.mapped());
    std::sort(pos.begin(), pos.end());
    pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
    return pos;
  }

 private:
  void bump(PairKey key, int delta) {
    auto [left, right] = pair_of(key);
    int& count = counts_[key];
    if (count > 0) ranked_.erase({-count, left, right});
    count += delta;
    if (count > 0) {
      ranked_.insert({-count, left, right});
    } else {
      counts_.erase(key);
    }
  }

  int n_special_;
  std::unordered_map<PairKey, int> counts_;
  std::unordered_map<PairKey, std::vector<int>> positions_;
  std::set<std::tuple<int, int, int>> ranked_;
};

void check_base_ids(const std::vector<int>& ids, std::size_t base_size) {
  for (int id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= base_size) {
      throw Error(ErrorCode::UnknownId, "id " + std::to_string(id) + " is not a base vocabulary id");
    }
  }
}

}  // namespace

MergeTable train_bpe(const std::vector<std::vector<int>>& corpus, std::size_t base_size, std::size_t target_vocab,
                     int n_special) {
  if (target_vocab <= base_size) {
    throw Error(ErrorCode::TargetTooSmall, "target vocabulary " + std::to_string(target_vocab) +
                                               " must exceed the base size " + std::to_string(base_size));
  }
  std::vector<int> sym;
  std::vector<int> prev;
  std::vector<int> next;
  for (const auto& seq : corpus) {
    check_base_ids(seq, base_size);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const auto pos = static_cast<int>(sym.size());
      sym.push_back(seq[i]);
      prev.push_back(i == 0 ? -1 : pos - 1);
      next.push_back(i + 1 == seq.size() ? -1 : pos + 1);
    }
  }
  if (sym.empty()) throw Error(ErrorCode::EmptyCorpus, "no token ids to learn from");

  PairIndex index(n_special);
  for (std::size_t i = 0; i < sym.size(); ++i) {
    if (next[i] >= 0) index.add(sym[i], sym[static_cast<std::size_t>(next[i])], static_cast<int>(i));
  }

  std::vector<bool> alive(sym.size(), true);
  MergeTable table;
  table.base_size = base_size;
  while (table.vocab_size() < target_vocab) {
    const auto [key, count] = index.best();
    if (count < 2) break;
    const auto [a, b] = pair_of(key);
    const int merged = static_cast<int>(table.vocab_size());
    table.merges.emplace_back(a, b);

    for (int i : index.take_positions(key)) {
      const auto ui = static_cast<std::size_t>(i);
      if (!alive[ui] || sym[ui] != a || next[ui] < 0) continue;
      const int j = next[ui];
      const auto uj = static_cast<std::size_t>(j);
      if (sym[uj] != b) continue;
      const int p = prev[ui];
      const int n = next[uj];
      if (p >= 0) index.remove(sym[static_cast<std::size_t>(p)], a);
      if (n >= 0) index.remove(b, sym[static_cast<std::size_t>(n)]);
      index.remove(a, b);

      sym[ui] = merged;
      alive[uj] = false;
      next[ui] = n;
      if (n >= 0) prev[static_cast<std::size_t>(n)] = i;

      if (p >= 0) index.add(sym[static_cast<std::size_t>(p)], merged, p);
      if (n >= 0) index.add(merged, sym[static_cast<std::size_t>(n)], i);
    }
  }
  return table;
}

std::vector<int> apply_bpe(const MergeTable& table, const std::vector<int>& ids) {
  check_base_ids(ids, table.base_size);
  std::unordered_map<PairKey, int> rank;
  rank.reserve(table.merges.size());
  for (std::size_t k = 0; k < table.merges.size(); ++k) {
    rank.emplace(key_of(table.merges[k].first, table.merges[k].second), static_cast<int>(k));
  }

  std::vector<int> seq = ids;
  std::vector<int> scratch;
  while (seq.size() >= 2) {
    int best = -1;
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
      auto it = rank.find(key_of(seq[i], seq[i + 1]));
      if (it != rank.end() && (best < 0 || it->second < best)) best = it->second;
    }
    if (best < 0) break;
    const auto [a, b] = table.merges[static_cast<std::size_t>(best)];
    const int merged = static_cast<int>(table.base_size) + best;
    scratch.clear();
    for (std::size_t i = 0; i < seq.size();) {
      if (i + 1 < seq.size() && seq[i] == a && seq[i + 1] == b) {
        scratch.push_back(merged);
        i += 2;
      } else {
        scratch.push_back(seq[i]);
        ++i;
      }
    }
    seq.swap(scratch);
  }
  return seq;
}

std::vector<int> decode_bpe(const MergeTable& table, const std::vector<int>& ids) {
  std::vector<int> out;
  std::vector<int> stack;
  for (int id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= table.vocab_size()) {
      throw Error(ErrorCode::UnknownId, "id " + std::to_string(id) + " is outside the vocabulary");
    }
    stack.push_back(id);
    while (!stack.empty()) {
      const int top = stack.back();
      stack.pop_back();
      if (static_cast<std::size_t>(top) < table.base_size) {
        out.push_back(top);
      } else {
        const auto& [left, right] = table.merges[static_cast<std::size_t>(top) - table.base_size];
        stack.push_back(right);
        stack.push_back(left);
      }
    }
  }
  return out;
}

}  // namespace notetok
