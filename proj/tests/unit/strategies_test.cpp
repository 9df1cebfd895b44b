#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "notetok/error.hpp"
#include "notetok/strategies.hpp"
#include "notetok/tokenizer.hpp"
#include "test_support.hpp"

namespace notetok {
namespace {

using Tokens = std::vector<std::string>;

Score grid_score(std::vector<Note> notes, int res = 8) {
  Score s;
  s.ticks_per_quarter = res;
  s.time_signatures = {{0, 4, 4}};
  s.tracks = {Track{0, false, std::move(notes)}};
  return s;
}

Tokens tokens_of(const TokenizerConfig& cfg, const Score& score) {
  const auto seqs = Tokenizer(cfg).tokenize(score);
  EXPECT_EQ(seqs.size(), 1u);
  return seqs.front().tokens;
}

std::set<std::string> types_of(const Tokens& tokens) {
  std::set<std::string> out;
  for (const auto& t : tokens) out.insert(std::string(split_token(t).type));
  return out;
}

const Note kOneBeat{60, 127, 0, 8};

TEST(MidiLike, SingleNote) {
  EXPECT_EQ(tokens_of(TokenizerConfig::defaults(Strategy::MIDILike), grid_score({kOneBeat})),
            (Tokens{"NoteOn_60", "Velocity_127", "TimeShift_8", "NoteOff_60"}));
}

TEST(MidiLike, SimultaneousNotesShareTheirTick) {
  const auto t = tokens_of(TokenizerConfig::defaults(Strategy::MIDILike), grid_score({kOneBeat, {64, 127, 0, 8}}));
  EXPECT_EQ(t, (Tokens{"NoteOn_60", "Velocity_127", "NoteOn_64", "Velocity_127", "TimeShift_8", "NoteOff_60",
                       "NoteOff_64"}));
}

TEST(MidiLike, LongGapIsSplitGreedily) {
  const auto t = tokens_of(TokenizerConfig::defaults(Strategy::MIDILike), grid_score({kOneBeat, {62, 127, 168, 176}}));
  EXPECT_EQ(t, (Tokens{"NoteOn_60", "Velocity_127", "TimeShift_8", "NoteOff_60", "TimeShift_64", "TimeShift_64",
                       "TimeShift_32", "NoteOn_62", "Velocity_127", "TimeShift_8", "NoteOff_62"}));
}

TEST(MidiLike, NoteOffPrecedesReOnsetAtTheSameTick) {
  const auto t = tokens_of(TokenizerConfig::defaults(Strategy::MIDILike), grid_score({kOneBeat, {60, 127, 8, 16}}));
  EXPECT_EQ(t, (Tokens{"NoteOn_60", "Velocity_127", "TimeShift_8", "NoteOff_60", "NoteOn_60", "Velocity_127",
                       "TimeShift_8", "NoteOff_60"}));
}

TEST(Tsd, SingleNote) {
  EXPECT_EQ(tokens_of(TokenizerConfig::defaults(Strategy::TSD), grid_score({kOneBeat})),
            (Tokens{"Pitch_60", "Velocity_127", "Duration_8"}));
}

TEST(Tsd, NotesOneBeatApart) {
  EXPECT_EQ(tokens_of(TokenizerConfig::defaults(Strategy::TSD), grid_score({kOneBeat, {62, 127, 8, 16}})),
            (Tokens{"Pitch_60", "Velocity_127", "Duration_8", "TimeShift_8", "Pitch_62", "Velocity_127", "Duration_8"}));
}

TEST(Tsd, RestsReplaceSilence) {
  auto cfg = TokenizerConfig::defaults(Strategy::TSD);
  cfg.use_rests = true;
  // Silence from 8 to 28: two whole-beat rests, then a 4-sample shift.
  EXPECT_EQ(tokens_of(cfg, grid_score({kOneBeat, {62, 127, 28, 36}})),
            (Tokens{"Pitch_60", "Velocity_127", "Duration_8", "TimeShift_8", "Rest_16", "TimeShift_4", "Pitch_62",
                    "Velocity_127", "Duration_8"}));
}

TEST(Remi, SingleNote) {
  EXPECT_EQ(tokens_of(TokenizerConfig::defaults(Strategy::REMI), grid_score({kOneBeat})),
            (Tokens{"Bar_None", "Position_0", "Pitch_60", "Velocity_127", "Duration_8"}));
}

TEST(Remi, NoteAtTheStartOfBarTwo) {
  EXPECT_EQ(tokens_of(TokenizerConfig::defaults(Strategy::REMI), grid_score({{60, 127, 64, 72}})),
            (Tokens{"Bar_None", "Bar_None", "Bar_None", "Position_0", "Pitch_60", "Velocity_127", "Duration_8"}));
}

TEST(Remi, TempoFollowsPosition) {
  auto cfg = TokenizerConfig::defaults(Strategy::REMI);
  cfg.use_tempos = true;
  cfg.tempo_bins = {60.0, 120.0, 180.0};
  Score s = grid_score({kOneBeat});
  s.tempos = {{0, 120.0}};
  EXPECT_EQ(tokens_of(cfg, s),
            (Tokens{"Bar_None", "Position_0", "Tempo_120.0", "Pitch_60", "Velocity_127", "Duration_8"}));
}

TEST(Remi, ProgramAndChordPrecedeNotes) {
  auto cfg = TokenizerConfig::defaults(Strategy::REMI);
  cfg.use_chords = cfg.use_programs = true;
  Score s = grid_score({{60, 127, 12, 20}, {64, 127, 12, 20}, {67, 127, 12, 20}});
  s.tracks[0].program = 5;
  EXPECT_EQ(tokens_of(cfg, s),
            (Tokens{"Bar_None", "Position_12", "Chord_maj", "Program_5", "Pitch_60", "Velocity_127", "Duration_8",
                    "Program_5", "Pitch_64", "Velocity_127", "Duration_8", "Program_5", "Pitch_67", "Velocity_127",
                    "Duration_8"}));
}

TEST(Remi, PositionsStayInsideTheirBar) {
  std::mt19937_64 rng(17);
  auto cfg = TokenizerConfig::defaults(Strategy::REMI);
  cfg.use_time_signatures = cfg.use_tempos = cfg.use_rests = true;
  const Tokenizer tok(cfg);
  for (int i = 0; i < 40; ++i) {
    for (const auto& seq : tok.tokenize(testing::random_score(rng))) {
      TimeSig ts{4, 4};
      for (std::size_t k = 0; k < seq.tokens.size(); ++k) {
        const auto parts = split_token(seq.tokens[k]);
        if (parts.type != "Position") continue;
        if (k + 1 < seq.tokens.size() && split_token(seq.tokens[k + 1]).type == "TimeSig") {
          const auto v = split_token(seq.tokens[k + 1]).value;
          const auto slash = v.find('/');
          ts = {std::stoi(std::string(v.substr(0, slash))), std::stoi(std::string(v.substr(slash + 1)))};
        }
        EXPECT_LT(std::stoi(std::string(parts.value)), cfg.bar_samples(ts)) << seq.tokens[k];
      }
    }
  }
}

TEST(Structured, OneNoteIsFourTokens) {
  EXPECT_EQ(tokens_of(TokenizerConfig::defaults(Strategy::Structured), grid_score({kOneBeat})),
            (Tokens{"TimeShift_0", "Pitch_60", "Velocity_127", "Duration_8"}));
}

TEST(Structured, SimultaneousNotesUseZeroShift) {
  EXPECT_EQ(tokens_of(TokenizerConfig::defaults(Strategy::Structured), grid_score({kOneBeat, {64, 127, 0, 8}, {60, 127, 8, 12}})),
            (Tokens{"TimeShift_0", "Pitch_60", "Velocity_127", "Duration_8", "TimeShift_0", "Pitch_64", "Velocity_127",
                    "Duration_8", "TimeShift_8", "Pitch_60", "Velocity_127", "Duration_4"}));
}

TEST(Structured, TypesCycleForAnyInput) {
  std::mt19937_64 rng(23);
  const Tokenizer tok(TokenizerConfig::defaults(Strategy::Structured));
  const Tokens cycle{"Pitch", "Velocity", "Duration", "TimeShift"};
  for (int i = 0; i < 50; ++i) {
    for (const auto& seq : tok.tokenize(testing::random_score(rng))) {
      ASSERT_EQ(seq.tokens.size() % 4, 0u);
      // Read cyclically from the first Pitch token.
      for (std::size_t k = 0; k < seq.tokens.size(); ++k) {
        EXPECT_EQ(split_token(seq.tokens[(k + 1) % seq.tokens.size()]).type, cycle[k % 4]);
      }
    }
  }
}

TEST(Octuple, TupleCarriesBarAndPosition) {
  const auto t = tokens_of(TokenizerConfig::defaults(Strategy::Octuple), grid_score({{60, 127, 3 * 32 + 4, 3 * 32 + 12}}));
  EXPECT_EQ(t, (Tokens{"Pitch_60", "Velocity_127", "Duration_8", "Program_0", "Position_4", "Bar_3"}));
}

TEST(Octuple, OneTuplePerNote) {
  std::mt19937_64 rng(29);
  for (const auto& cfg : testing::feature_rich_configs(Strategy::Octuple)) {
    const Tokenizer tok(cfg);
    for (int i = 0; i < 30; ++i) {
      const Score s = testing::random_score(rng);
      const auto seqs = tok.tokenize(s);
      ASSERT_EQ(seqs.size(), 1u);
      EXPECT_EQ(seqs[0].steps(), preprocess(s, cfg).note_count());
      EXPECT_EQ(seqs[0].ids.size() % tok.arity(), 0u);
    }
  }
}

TEST(Octuple, BarOverflow) {
  auto cfg = TokenizerConfig::defaults(Strategy::Octuple);
  cfg.max_bars = 2;
  try {
    Tokenizer(cfg).tokenize(grid_score({{60, 127, 64, 72}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BarOverflow);
  }
}

TEST(Decode, LonePitchYieldsNothing) {
  const auto cfg = TokenizerConfig::defaults(Strategy::TSD);
  EXPECT_TRUE(decode_tokens({"Pitch_60"}, cfg).notes.empty());
  EXPECT_TRUE(decode_tokens({"Pitch_60", "Velocity_127"}, cfg).notes.empty());
}

TEST(Decode, DanglingNoteOnClosesAtTheFinalTick) {
  const auto cfg = TokenizerConfig::defaults(Strategy::MIDILike);
  const auto d = decode_tokens({"NoteOn_60", "Velocity_127", "TimeShift_8", "TimeShift_4"}, cfg);
  ASSERT_EQ(d.notes.size(), 1u);
  EXPECT_EQ(d.notes[0].note, (Note{60, 127, 0, 12}));
}

TEST(Decode, NoteOnWithoutVelocityInheritsThePreviousOne) {
  const auto cfg = TokenizerConfig::defaults(Strategy::MIDILike);
  const auto d = decode_tokens({"NoteOn_60", "TimeShift_8", "NoteOff_60", "NoteOn_62", "Velocity_93", "TimeShift_8",
                                "NoteOff_62", "NoteOn_64", "TimeShift_8", "NoteOff_64"},
                               cfg);
  ASSERT_EQ(d.notes.size(), 3u);
  EXPECT_EQ(d.notes[0].note.velocity, 64);
  EXPECT_EQ(d.notes[1].note.velocity, 93);
  EXPECT_EQ(d.notes[2].note.velocity, 93);
}

TEST(Decode, ChordTokensAreSkipped) {
  auto cfg = TokenizerConfig::defaults(Strategy::TSD);
  cfg.use_chords = true;
  const auto d = decode_tokens({"Chord_maj", "Pitch_60", "Velocity_127", "Duration_8"}, cfg);
  ASSERT_EQ(d.notes.size(), 1u);
  EXPECT_EQ(d.notes[0].note, kOneBeat);
}

TEST(Decode, RandomTokenStreamsStayWellFormed) {
  std::mt19937_64 rng(31);
  for (Strategy s : {Strategy::MIDILike, Strategy::TSD, Strategy::REMI, Strategy::Structured, Strategy::Octuple}) {
    for (const auto& cfg : testing::feature_rich_configs(s)) {
      const auto vocabs = build_vocabularies(cfg);
      for (int i = 0; i < 200; ++i) {
        Tokens tokens;
        const int len = std::uniform_int_distribution<int>(0, 120)(rng);
        for (int k = 0; k < len * static_cast<int>(vocabs.size()); ++k) {
          const auto& voc = vocabs[static_cast<std::size_t>(k) % vocabs.size()];
          tokens.push_back(voc.token(std::uniform_int_distribution<int>(0, static_cast<int>(voc.size()) - 1)(rng)));
        }
        const auto d = decode_tokens(tokens, cfg);
        for (const auto& pn : d.notes) {
          EXPECT_GE(pn.note.onset, 0);
          EXPECT_LT(pn.note.onset, pn.note.offset);
        }
        if (s != Strategy::MIDILike) {
          for (std::size_t k = 1; k < d.notes.size(); ++k) EXPECT_LE(d.notes[k - 1].note.onset, d.notes[k].note.onset);
        }
        for (std::size_t k = 1; k < d.tempos.size(); ++k) EXPECT_LE(d.tempos[k - 1].tick, d.tempos[k].tick);
        for (std::size_t k = 1; k < d.time_signatures.size(); ++k) {
          EXPECT_LE(d.time_signatures[k - 1].tick, d.time_signatures[k].tick);
        }
      }
    }
  }
}

TEST(Decode, InvertsEmissionOnRandomScores) {
  std::mt19937_64 rng(37);
  for (Strategy s : {Strategy::MIDILike, Strategy::TSD, Strategy::REMI, Strategy::Structured, Strategy::Octuple}) {
    for (const auto& cfg : testing::feature_rich_configs(s)) {
      const Tokenizer tok(cfg);
      for (int i = 0; i < 40; ++i) {
        const Score score = testing::random_score(rng);
        const Score expected = rescale_ticks(preprocess(score, cfg), cfg.beat_res);
        const Score actual = tok.detokenize(tok.tokenize(score));
        EXPECT_EQ(expected, actual) << to_string(s) << ": " << testing::describe_difference(expected, actual);
      }
    }
  }
}

TEST(FeatureTable, EmittedTypesMatchEachRow) {
  const std::vector<std::pair<Strategy, std::set<std::string>>> rows{
      {Strategy::MIDILike, {"NoteOn", "NoteOff", "Velocity", "TimeShift", "Chord", "Rest", "Tempo", "TimeSig", "Program"}},
      {Strategy::TSD, {"Pitch", "Velocity", "Duration", "TimeShift", "Chord", "Rest", "Tempo", "TimeSig", "Program"}},
      {Strategy::REMI, {"Bar", "Position", "Pitch", "Velocity", "Duration", "Chord", "Rest", "Tempo", "TimeSig", "Program"}},
      {Strategy::Structured, {"TimeShift", "Program", "Pitch", "Velocity", "Duration"}},
      {Strategy::Octuple, {"Pitch", "Velocity", "Duration", "Program", "Position", "Bar", "Tempo", "TimeSig"}},
  };
  for (const auto& [strategy, expected] : rows) {
    const auto cfg = testing::feature_rich_configs(strategy).front();
    const Tokenizer tok(cfg);
    std::mt19937_64 rng(41);
    std::set<std::string> seen;
    for (int i = 0; i < 60; ++i) {
      for (const auto& seq : tok.tokenize(testing::random_score(rng))) {
        const auto t = types_of(seq.tokens);
        seen.insert(t.begin(), t.end());
      }
    }
    EXPECT_EQ(seen, expected) << to_string(strategy);
  }
}

TEST(Events, OrderIsTotal) {
  std::mt19937_64 rng(43);
  auto cfg = testing::feature_rich_configs(Strategy::TSD).front();
  for (int i = 0; i < 20; ++i) {
    const Score grid = rescale_ticks(preprocess(testing::random_score(rng), cfg), cfg.beat_res);
    std::vector<const Track*> tracks;
    for (const auto& t : grid.tracks) tracks.push_back(&t);
    const auto events = collect_events(grid, tracks, cfg);
    for (std::size_t k = 1; k < events.size(); ++k) EXPECT_FALSE(event_less(events[k], events[k - 1]));
    for (std::size_t a = 0; a < std::min<std::size_t>(events.size(), 60); ++a) {
      for (std::size_t b = 0; b < std::min<std::size_t>(events.size(), 60); ++b) {
        const int relations = event_less(events[a], events[b]) + event_less(events[b], events[a]) + (events[a] == events[b]);
        EXPECT_EQ(relations, 1);
      }
    }
  }
}

TEST(Events, PriorityAtEqualTicks) {
  Event ts{EventKind::TimeSig, 4};
  Event tempo{EventKind::Tempo, 4};
  Event off{EventKind::NoteOff, 4};
  Event chord{EventKind::Chord, 4};
  Event note{EventKind::Note, 4};
  EXPECT_TRUE(event_less(ts, tempo));
  EXPECT_TRUE(event_less(tempo, off));
  EXPECT_TRUE(event_less(off, chord));
  EXPECT_TRUE(event_less(chord, note));
  Event early_note{EventKind::Note, 3};
  EXPECT_TRUE(event_less(early_note, ts));
}

}  // namespace
}  // namespace notetok
