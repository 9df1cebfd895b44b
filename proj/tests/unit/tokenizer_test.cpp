#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <random>

#include "notetok/error.hpp"
#include "notetok/tokenizer.hpp"
#include "test_support.hpp"

namespace notetok {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("notetok_tok_" + std::to_string(std::random_device{}()))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

ErrorCode error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

Score two_tracks() {
  Score s;
  s.ticks_per_quarter = 8;
  s.time_signatures = {{0, 4, 4}};
  s.tracks = {Track{0, false, {{60, 127, 0, 8}, {64, 102, 8, 16}}}, Track{0, true, {{36, 127, 0, 4}}}};
  return s;
}

std::vector<TokSequence> corpus_for(const Tokenizer& tok, int n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<TokSequence> out;
  for (int i = 0; i < n; ++i) {
    for (auto& seq : tok.tokenize(testing::random_score(rng))) out.push_back(std::move(seq));
  }
  return out;
}

TEST(Tokenize, PerTrackModeGivesOneSequencePerTrack) {
  const Tokenizer tok(TokenizerConfig::defaults(Strategy::TSD));
  const auto seqs = tok.tokenize(two_tracks());
  ASSERT_EQ(seqs.size(), 2u);
  EXPECT_EQ(seqs[0].program, 0);
  EXPECT_EQ(seqs[1].program, -1);
  EXPECT_EQ(seqs[1].tokens, (std::vector<std::string>{"Pitch_36", "Velocity_127", "Duration_4"}));
}

TEST(Tokenize, OneStreamModeGivesASingleSequence) {
  auto cfg = TokenizerConfig::defaults(Strategy::TSD);
  cfg.use_programs = cfg.one_token_stream = true;
  const auto seqs = Tokenizer(cfg).tokenize(two_tracks());
  ASSERT_EQ(seqs.size(), 1u);
  EXPECT_EQ(seqs[0].tokens.front(), "Program_-1");
}

TEST(Tokenize, IdsAndTokensAreParallel) {
  const Tokenizer tok(TokenizerConfig::defaults(Strategy::REMI));
  for (const auto& seq : tok.tokenize(two_tracks())) {
    ASSERT_EQ(seq.ids.size(), seq.tokens.size());
    for (std::size_t i = 0; i < seq.ids.size(); ++i) EXPECT_EQ(tok.vocabulary().token(seq.ids[i]), seq.tokens[i]);
  }
}

TEST(Tokenize, EmptyAfterPreprocessingThrows) {
  Score s;
  s.tracks = {Track{0, false, {{5, 100, 0, 480}}}};
  EXPECT_EQ(error_of([&] { Tokenizer(TokenizerConfig::defaults()).tokenize(s); }), ErrorCode::EmptyScore);
}

TEST(Tokenize, IsDeterministic) {
  std::mt19937_64 rng(2);
  const Tokenizer tok(testing::feature_rich_configs(Strategy::REMI).front());
  for (int i = 0; i < 10; ++i) {
    const Score s = testing::random_score(rng);
    EXPECT_EQ(tok.tokenize(s), tok.tokenize(s));
  }
}

TEST(Tokenize, AcceptsRawMidi) {
  const Tokenizer tok(TokenizerConfig::defaults());
  const Score s = two_tracks();
  EXPECT_EQ(tok.tokenize(score_to_midi(s)), tok.tokenize(s));
}

TEST(Detokenize, SingleRemiNote) {
  const Tokenizer tok(TokenizerConfig::defaults(Strategy::REMI));
  TokSequence seq;
  seq.tokens = {"Bar_None", "Position_0", "Pitch_60", "Velocity_127", "Duration_8"};
  const Score s = tok.detokenize({seq});
  EXPECT_EQ(s.ticks_per_quarter, 8);
  ASSERT_EQ(s.tracks.size(), 1u);
  EXPECT_EQ(s.tracks[0].notes, (std::vector<Note>{{60, 127, 0, 8}}));
  EXPECT_EQ(s.time_signatures, (std::vector<TimeSigChange>{{0, 4, 4}}));
}

TEST(Detokenize, OnlySpecialTokensIsEmptyScore) {
  const Tokenizer tok(TokenizerConfig::defaults());
  TokSequence seq;
  seq.tokens = {"BOS_None", "PAD_None", "EOS_None"};
  EXPECT_EQ(error_of([&] { tok.detokenize({seq}); }), ErrorCode::EmptyScore);
  EXPECT_EQ(error_of([&] { tok.detokenize({}); }), ErrorCode::EmptyScore);
}

TEST(Detokenize, UnknownTokenIsReported) {
  const Tokenizer tok(TokenizerConfig::defaults());
  TokSequence seq;
  seq.tokens = {"Pitch_60", "Velocity_127", "Duration_999"};
  EXPECT_EQ(error_of([&] { tok.detokenize({seq}); }), ErrorCode::UnknownToken);
}

TEST(Detokenize, InvertsTokenizeForEveryStrategy) {
  std::mt19937_64 rng(8);
  for (Strategy s : {Strategy::MIDILike, Strategy::TSD, Strategy::REMI, Strategy::Structured, Strategy::Octuple}) {
    auto configs = testing::feature_rich_configs(s);
    configs.push_back(TokenizerConfig::defaults(s));
    for (const auto& cfg : configs) {
      const Tokenizer tok(cfg);
      for (int i = 0; i < 15; ++i) {
        const Score score = testing::random_score(rng);
        const Score expected = rescale_ticks(preprocess(score, cfg), cfg.beat_res);
        const Score actual = tok.detokenize(tok.tokenize(score));
        ASSERT_EQ(expected, actual) << to_string(s) << ": " << testing::describe_difference(expected, actual);
      }
    }
  }
}

TEST(Detokenize, UsesBpeIdsOrTokensWhenIdsAreAbsent) {
  Tokenizer tok(TokenizerConfig::defaults(Strategy::TSD));
  tok.train_bpe(corpus_for(tok, 20, 4), tok.base_vocab_size() + 40);
  const auto seqs = tok.tokenize(two_tracks());
  const Score expected = tok.detokenize(seqs);
  auto bpe_only = seqs;
  for (auto& s : bpe_only) {
    s.ids.clear();
    s.tokens.clear();
  }
  EXPECT_EQ(tok.detokenize(bpe_only), expected);
  auto tokens_only = seqs;
  for (auto& s : tokens_only) {
    s.ids.clear();
    s.bpe_ids.reset();
  }
  EXPECT_EQ(tok.detokenize(tokens_only), expected);
}

TEST(Conversion, IdsAndTokens) {
  const Tokenizer tok(TokenizerConfig::defaults());
  EXPECT_TRUE(tok.ids_to_tokens({}).empty());
  EXPECT_TRUE(tok.tokens_to_ids({}).empty());
  EXPECT_EQ(tok.ids_to_tokens({0}), (std::vector<std::string>{"PAD_None"}));
  EXPECT_EQ(error_of([&] { tok.tokens_to_ids({"Nope_1"}); }), ErrorCode::UnknownToken);
  EXPECT_EQ(error_of([&] { tok.ids_to_tokens({-1}); }), ErrorCode::UnknownId);
  std::vector<int> all(tok.base_vocab_size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  EXPECT_EQ(tok.tokens_to_ids(tok.ids_to_tokens(all)), all);
}

TEST(Conversion, MultiVocabularyUsesOneVocabularyPerPosition) {
  const Tokenizer tok(TokenizerConfig::defaults(Strategy::Octuple));
  const std::vector<std::string> tuple{"Pitch_60", "Velocity_127", "Duration_8", "Program_0", "Position_0", "Bar_0"};
  const auto ids = tok.tokens_to_ids(tuple);
  EXPECT_EQ(tok.ids_to_tokens(ids), tuple);
  EXPECT_EQ(error_of([&] { tok.tokens_to_ids({"Velocity_127"}); }), ErrorCode::UnknownToken);
}

TEST(Persistence, SaveLoadRestoresEverything) {
  TempDir dir;
  for (Strategy s : {Strategy::MIDILike, Strategy::TSD, Strategy::REMI, Strategy::Structured, Strategy::Octuple}) {
    for (const auto& cfg : testing::feature_rich_configs(s)) {
      const Tokenizer tok(cfg);
      const fs::path file = dir.path() / "tok.json";
      tok.save(file);
      const Tokenizer loaded = Tokenizer::load(file);
      EXPECT_EQ(loaded.config(), tok.config());
      EXPECT_EQ(loaded.vocabularies(), tok.vocabularies());
      EXPECT_EQ(loaded.to_json(), tok.to_json());
    }
  }
}

TEST(Persistence, MergesSurviveReload) {
  TempDir dir;
  Tokenizer tok(TokenizerConfig::defaults(Strategy::REMI));
  const auto corpus = corpus_for(tok, 20, 5);
  tok.train_bpe(corpus, tok.base_vocab_size() + 100);
  ASSERT_TRUE(tok.has_bpe());
  tok.save(dir.path() / "tok.json");
  const Tokenizer loaded = Tokenizer::load(dir.path() / "tok.json");
  EXPECT_EQ(loaded.merges(), tok.merges());
  EXPECT_EQ(loaded.vocab_size(), tok.vocab_size());
  for (const auto& seq : corpus) EXPECT_EQ(loaded.apply_bpe(seq.ids), tok.apply_bpe(seq.ids));
}

TEST(Persistence, Errors) {
  TempDir dir;
  const Tokenizer tok(TokenizerConfig::defaults());
  EXPECT_EQ(error_of([&] { Tokenizer::load(dir.path() / "missing.json"); }), ErrorCode::IoError);
  EXPECT_EQ(error_of([&] { tok.save(dir.path() / "no" / "such" / "dir" / "t.json"); }), ErrorCode::IoError);

  std::string text = tok.to_json();
  const auto at = text.find("\"version\": 1");
  ASSERT_NE(at, std::string::npos) << text.substr(0, 200);
  std::string future = text;
  future.replace(at, 12, "\"version\": 99");
  EXPECT_EQ(error_of([&] { Tokenizer::from_json(future); }), ErrorCode::VersionMismatch);

  EXPECT_EQ(error_of([&] { Tokenizer::from_json("not json"); }), ErrorCode::CorruptConfig);
  EXPECT_EQ(error_of([&] { Tokenizer::from_json("{}"); }), ErrorCode::CorruptConfig);
  EXPECT_EQ(error_of([&] { Tokenizer::from_json(R"({"version": 1})"); }), ErrorCode::CorruptConfig);

  std::string tampered = text;
  const auto pitch = tampered.find("\"Pitch_21\"");
  ASSERT_NE(pitch, std::string::npos);
  tampered.replace(pitch, 10, "\"Pitch_20\"");
  EXPECT_EQ(error_of([&] { Tokenizer::from_json(tampered); }), ErrorCode::CorruptConfig);
}

TEST(Persistence, RejectsMergesForAnotherVocabulary) {
  Tokenizer tok(TokenizerConfig::defaults());
  MergeTable wrong;
  wrong.base_size = tok.base_vocab_size() + 1;
  wrong.merges = {{4, 5}};
  EXPECT_EQ(error_of([&] { tok.set_merges(wrong); }), ErrorCode::CorruptConfig);
  MergeTable forward;
  forward.base_size = tok.base_vocab_size();
  forward.merges = {{4, static_cast<int>(tok.base_vocab_size()) + 3}};
  EXPECT_EQ(error_of([&] { tok.set_merges(forward); }), ErrorCode::CorruptConfig);
}

TEST(Bpe, TokenizeFillsBpeIds) {
  Tokenizer tok(TokenizerConfig::defaults(Strategy::TSD));
  tok.train_bpe(corpus_for(tok, 20, 6), tok.base_vocab_size() + 50);
  for (const auto& seq : tok.tokenize(two_tracks())) {
    ASSERT_TRUE(seq.bpe_ids.has_value());
    EXPECT_EQ(tok.decode_bpe(*seq.bpe_ids), seq.ids);
    EXPECT_LE(seq.bpe_ids->size(), seq.ids.size());
  }
}

TEST(Bpe, MultiVocabularyStrategiesRefuseTraining) {
  Tokenizer tok(TokenizerConfig::defaults(Strategy::Octuple));
  const auto corpus = tok.tokenize(two_tracks());
  EXPECT_EQ(error_of([&] { tok.train_bpe(corpus, 2000); }), ErrorCode::InvalidConfig);
}

TEST(SequenceJson, RoundTripsInEveryMode) {
  std::vector<TokenizerConfig> configs{TokenizerConfig::defaults(Strategy::TSD),
                                       testing::feature_rich_configs(Strategy::REMI).front(),
                                       TokenizerConfig::defaults(Strategy::Octuple)};
  for (const auto& cfg : configs) {
    for (bool bpe : {false, true}) {
      Tokenizer tok(cfg);
      if (bpe && tok.arity() != 1) continue;
      if (bpe) tok.train_bpe(corpus_for(tok, 10, 7), tok.base_vocab_size() + 30);
      const auto seqs = tok.tokenize(two_tracks());
      const auto back = sequences_from_json(sequences_to_json(seqs, tok), tok);
      ASSERT_EQ(back.size(), seqs.size());
      for (std::size_t i = 0; i < seqs.size(); ++i) {
        EXPECT_EQ(back[i].ids, seqs[i].ids);
        EXPECT_EQ(back[i].tokens, seqs[i].tokens);
        EXPECT_EQ(back[i].program, seqs[i].program);
        EXPECT_EQ(back[i].bpe_ids, seqs[i].bpe_ids);
      }
      EXPECT_EQ(tok.detokenize(back), tok.detokenize(seqs));
    }
  }
}

TEST(SequenceJson, MalformedDocumentsAreCorrupt) {
  const Tokenizer tok(TokenizerConfig::defaults(Strategy::Octuple));
  EXPECT_EQ(error_of([&] { sequences_from_json("{}", tok); }), ErrorCode::CorruptConfig);
  EXPECT_EQ(error_of([&] { sequences_from_json(R"({"ids": [[1, 2]]})", tok); }), ErrorCode::CorruptConfig);
  EXPECT_EQ(error_of([&] { sequences_from_json(R"({"ids": [], "bpe": true})", tok); }), ErrorCode::CorruptConfig);
}

}  // namespace
}  // namespace notetok
