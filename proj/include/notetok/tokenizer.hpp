#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "notetok/bpe.hpp"
#include "notetok/config.hpp"
#include "notetok/midi_io.hpp"
#include "notetok/score.hpp"
#include "notetok/strategies.hpp"
#include "notetok/vocabulary.hpp"

namespace notetok {

/// One tokenized stream. For multi-vocabulary strategies `tokens` and `ids`
/// are flattened tuples of `arity` entries, one vocabulary per position.
struct TokSequence {
  std::vector<std::string> tokens;
  std::vector<int> ids;
  std::size_t arity = 1;
  std::optional<std::vector<int>> bpe_ids;
  /// Program key of the source track in per-track mode (-1 for drums).
  int program = 0;

  /// Number of time steps (tuples for multi-vocabulary strategies).
  std::size_t steps() const { return ids.size() / arity; }
  bool operator==(const TokSequence&) const = default;
};

class Tokenizer {
 public:
  /// Validates the config and builds the vocabulary. Throws
  /// Error(InvalidConfig).
  explicit Tokenizer(TokenizerConfig config);

  const TokenizerConfig& config() const { return config_; }
  std::size_t arity() const { return vocabs_.size(); }
  const Vocabulary& vocabulary(std::size_t position = 0) const { return vocabs_.at(position); }
  const std::vector<Vocabulary>& vocabularies() const { return vocabs_; }
  /// Size of the first (or only) vocabulary, before BPE.
  std::size_t base_vocab_size() const { return vocabs_.front().size(); }
  /// Base size plus learned BPE tokens.
  std::size_t vocab_size() const;

  /// One sequence per track, or a single one in one-stream mode. BPE ids are
  /// filled in when merges are loaded. Throws Error(EmptyScore).
  std::vector<TokSequence> tokenize(const Score& score) const;
  std::vector<TokSequence> tokenize(const midi::MidiFile& file) const;

  /// Inverse of tokenize on preprocessed content; ticks_per_quarter of the
  /// result is beat_res. Uses `ids` when present, else expands `bpe_ids`,
  /// else maps `tokens`. Throws Error(UnknownToken), Error(UnknownId) or
  /// Error(EmptyScore).
  Score detokenize(const std::vector<TokSequence>& sequences) const;

  /// Flat conversion; entry i uses vocabulary i % arity().
  std::vector<std::string> ids_to_tokens(const std::vector<int>& ids) const;
  std::vector<int> tokens_to_ids(const std::vector<std::string>& tokens) const;

  /// Learns merges on the base ids of `corpus`, replacing any previous ones.
  /// Throws Error(InvalidConfig) for multi-vocabulary strategies.
  void train_bpe(const std::vector<TokSequence>& corpus, std::size_t target_vocab);
  void set_merges(MergeTable table);
  bool has_bpe() const { return !merges_.merges.empty(); }
  const MergeTable& merges() const { return merges_; }
  std::vector<int> apply_bpe(const std::vector<int>& ids) const;
  std::vector<int> decode_bpe(const std::vector<int>& ids) const;

  std::string to_json() const;
  /// Throws Error(VersionMismatch) or Error(CorruptConfig).
  static Tokenizer from_json(const std::string& text);
  /// Throws Error(IoError) in addition to the from_json errors.
  void save(const std::filesystem::path& path) const;
  static Tokenizer load(const std::filesystem::path& path);

 private:
  std::vector<int> base_ids(const TokSequence& seq) const;

  TokenizerConfig config_;
  std::vector<Vocabulary> vocabs_;
  MergeTable merges_;
};

inline constexpr int kConfigFormatVersion = 1;

std::string config_to_json(const TokenizerConfig& config);
/// Missing keys keep their defaults for the given strategy. Throws
/// Error(CorruptConfig) on malformed input.
TokenizerConfig config_from_json(const std::string& text);

/// {"ids": ..., "programs": [...], "bpe": bool}. ids are the BPE ids when
/// the tokenizer has merges; per-track mode nests one array per track and
/// multi-vocabulary ids are arrays of tuples.
std::string sequences_to_json(const std::vector<TokSequence>& sequences, const Tokenizer& tokenizer);
/// Throws Error(CorruptConfig) on a malformed document.
std::vector<TokSequence> sequences_from_json(const std::string& text, const Tokenizer& tokenizer);

}  // namespace notetok
