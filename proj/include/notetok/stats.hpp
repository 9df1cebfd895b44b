#pragma once

#include <cstddef>
#include <vector>

#include "notetok/score.hpp"
#include "notetok/tokenizer.hpp"

namespace notetok {

/// Corpus totals. Tokens are time steps (tuples for multi-vocabulary
/// strategies); beats are summed piecewise over time signatures.
struct CompressionStats {
  std::size_t files = 0;
  std::size_t skipped = 0;  // scores that preprocess to nothing
  std::size_t notes = 0;
  double beats = 0.0;
  std::size_t tokens = 0;
  std::size_t bpe_tokens = 0;  // equals tokens without merges

  double tokens_per_beat() const { return beats > 0.0 ? static_cast<double>(tokens) / beats : 0.0; }
  double bpe_tokens_per_beat() const { return beats > 0.0 ? static_cast<double>(bpe_tokens) / beats : 0.0; }
  /// Relative length reduction brought by BPE, in [0, 1).
  double reduction() const { return tokens > 0 ? 1.0 - static_cast<double>(bpe_tokens) / static_cast<double>(tokens) : 0.0; }
};

CompressionStats compression_stats(const std::vector<Score>& corpus, const Tokenizer& tokenizer);

/// Adds one tokenized score to running totals; `preprocessed` must be
/// preprocess(score) for the tokenizer that produced `sequences`.
void accumulate_stats(CompressionStats& stats, const Score& preprocessed, const std::vector<TokSequence>& sequences);

}  // namespace notetok
