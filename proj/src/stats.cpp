#include "notetok/stats.hpp"

#include "notetok/error.hpp"

namespace notetok {

void accumulate_stats(CompressionStats& stats, const Score& preprocessed, const std::vector<TokSequence>& sequences) {
  ++stats.files;
  stats.notes += preprocessed.note_count();
  stats.beats += count_beats(preprocessed);
  for (const TokSequence& seq : sequences) {
    stats.tokens += seq.steps();
    stats.bpe_tokens += seq.bpe_ids ? seq.bpe_ids->size() : seq.steps();
  }
}

CompressionStats compression_stats(const std::vector<Score>& corpus, const Tokenizer& tokenizer) {
  CompressionStats stats;
  for (const Score& score : corpus) {
    try {
      const Score pre = preprocess(score, tokenizer.config());
      accumulate_stats(stats, pre, tokenizer.tokenize(score));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyScore) throw;
      ++stats.skipped;
    }
  }
  return stats;
}

}  // namespace notetok
