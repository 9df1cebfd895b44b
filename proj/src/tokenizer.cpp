#include "notetok/tokenizer.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "notetok/error.hpp"

namespace notetok {
namespace {

using nlohmann::json;

json config_json(const TokenizerConfig& c) {
  json ts = json::array();
  for (const TimeSig& t : c.time_signature_set) ts.push_back({t.numerator, t.denominator});
  return {
      {"strategy", std::string(to_string(c.strategy))},
      {"pitch_range", {c.pitch_low, c.pitch_high}},
      {"n_velocities", c.n_velocities},
      {"beat_res", c.beat_res},
      {"max_duration_beats", c.max_duration_beats},
      {"use_chords", c.use_chords},
      {"use_rests", c.use_rests},
      {"use_tempos", c.use_tempos},
      {"use_time_signatures", c.use_time_signatures},
      {"use_programs", c.use_programs},
      {"one_token_stream", c.one_token_stream},
      {"tempo_bins", c.tempo_bins},
      {"time_signature_set", ts},
      {"rest_min_beats", c.rest_min_beats},
      {"chord_unknown", c.chord_unknown},
      {"max_bars", c.max_bars},
      {"special_tokens", c.special_tokens},
  };
}

TokenizerConfig parse_config(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::CorruptConfig, "config must be a JSON object");
  try {
    TokenizerConfig c = TokenizerConfig::defaults(
        j.contains("strategy") ? strategy_from_string(j.at("strategy").get<std::string>()) : Strategy::TSD);
    auto read = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    if (j.contains("pitch_range")) {
      const auto range = j.at("pitch_range").get<std::vector<int>>();
      if (range.size() != 2) throw Error(ErrorCode::CorruptConfig, "pitch_range must hold two integers");
      c.pitch_low = range[0];
      c.pitch_high = range[1];
    }
    read("n_velocities", c.n_velocities);
    read("beat_res", c.beat_res);
    read("max_duration_beats", c.max_duration_beats);
    read("use_chords", c.use_chords);
    read("use_rests", c.use_rests);
    read("use_tempos", c.use_tempos);
    read("use_time_signatures", c.use_time_signatures);
    read("use_programs", c.use_programs);
    read("one_token_stream", c.one_token_stream);
    read("tempo_bins", c.tempo_bins);
    if (j.contains("time_signature_set")) {
      c.time_signature_set.clear();
      for (const auto& pair : j.at("time_signature_set")) {
        const auto v = pair.get<std::vector<int>>();
        if (v.size() != 2) throw Error(ErrorCode::CorruptConfig, "time signatures are [numerator, denominator]");
        c.time_signature_set.push_back({v[0], v[1]});
      }
    }
    read("rest_min_beats", c.rest_min_beats);
    read("chord_unknown", c.chord_unknown);
    read("max_bars", c.max_bars);
    read("special_tokens", c.special_tokens);
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptConfig, std::string("bad config field: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidConfig) throw Error(ErrorCode::CorruptConfig, e.what());
    throw;
  }
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptConfig, std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

Tokenizer::Tokenizer(TokenizerConfig config) : config_(std::move(config)) {
  config_.validate();
  vocabs_ = build_vocabularies(config_);
  merges_.base_size = vocabs_.front().size();
}

std::size_t Tokenizer::vocab_size() const { return arity() == 1 ? merges_.vocab_size() : base_vocab_size(); }

std::vector<TokSequence> Tokenizer::tokenize(const Score& score) const {
  const Score grid = rescale_ticks(preprocess(score, config_), config_.beat_res);
  std::vector<std::vector<const Track*>> streams;
  if (config_.one_token_stream) {
    streams.emplace_back();
    for (const Track& t : grid.tracks) streams.back().push_back(&t);
  } else {
    for (const Track& t : grid.tracks) streams.push_back({&t});
  }

  std::vector<TokSequence> out;
  for (const auto& tracks : streams) {
    TokSequence seq;
    seq.arity = arity();
    seq.program = config_.one_token_stream ? 0 : tracks.front()->program_key();
    seq.tokens = emit_tokens(collect_events(grid, tracks, config_), config_);
    seq.ids = tokens_to_ids(seq.tokens);
    if (has_bpe()) seq.bpe_ids = apply_bpe(seq.ids);
    out.push_back(std::move(seq));
  }
  return out;
}

std::vector<TokSequence> Tokenizer::tokenize(const midi::MidiFile& file) const {
  return tokenize(score_from_midi(file));
}

std::vector<int> Tokenizer::base_ids(const TokSequence& seq) const {
  if (!seq.ids.empty()) return seq.ids;
  if (seq.bpe_ids) return decode_bpe(*seq.bpe_ids);
  return tokens_to_ids(seq.tokens);
}

Score Tokenizer::detokenize(const std::vector<TokSequence>& sequences) const {
  Score out;
  out.ticks_per_quarter = config_.beat_res;
  std::map<int, Track> merged;  // one-stream mode, keyed by program key
  std::optional<DecodedStream> globals;

  for (const TokSequence& seq : sequences) {
    const auto tokens = ids_to_tokens(base_ids(seq));
    DecodedStream decoded = decode_tokens(tokens, config_, seq.program);
    auto fill = [](Track& t, int key) {
      t.is_drum = key < 0;
      t.program = key < 0 ? 0 : key;
    };
    if (config_.one_token_stream) {
      for (const auto& pn : decoded.notes) {
        Track& t = merged[pn.program];
        fill(t, pn.program);
        t.notes.push_back(pn.note);
      }
    } else {
      std::vector<std::pair<int, Track>> local;
      for (const auto& pn : decoded.notes) {
        auto it = std::find_if(local.begin(), local.end(), [&](const auto& e) { return e.first == pn.program; });
        if (it == local.end()) {
          local.emplace_back(pn.program, Track{});
          it = std::prev(local.end());
          fill(it->second, pn.program);
        }
        it->second.notes.push_back(pn.note);
      }
      for (auto& [key, t] : local) out.tracks.push_back(std::move(t));
    }
    if (!globals) globals = std::move(decoded);
  }
  for (auto& [key, t] : merged) out.tracks.push_back(std::move(t));
  for (Track& t : out.tracks) std::sort(t.notes.begin(), t.notes.end(), note_less);

  if (globals && config_.use_tempos) out.tempos = globals->tempos;
  if (globals && config_.use_time_signatures) out.time_signatures = globals->time_signatures;
  if (out.time_signatures.empty() || out.time_signatures.front().tick > 0) {
    out.time_signatures.insert(out.time_signatures.begin(), TimeSigChange{0, 4, 4});
  }
  if (out.note_count() == 0) throw Error(ErrorCode::EmptyScore, "token sequences decode to no notes");
  return out;
}

std::vector<std::string> Tokenizer::ids_to_tokens(const std::vector<int>& ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) out.push_back(vocabs_[i % arity()].token(ids[i]));
  return out;
}

std::vector<int> Tokenizer::tokens_to_ids(const std::vector<std::string>& tokens) const {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) out.push_back(vocabs_[i % arity()].id(tokens[i]));
  return out;
}

void Tokenizer::train_bpe(const std::vector<TokSequence>& corpus, std::size_t target_vocab) {
  if (arity() != 1) throw Error(ErrorCode::InvalidConfig, "BPE needs a single-vocabulary strategy");
  std::vector<std::vector<int>> ids;
  ids.reserve(corpus.size());
  for (const TokSequence& seq : corpus) ids.push_back(base_ids(seq));
  merges_ = notetok::train_bpe(ids, base_vocab_size(), target_vocab, static_cast<int>(config_.special_tokens.size()));
}

void Tokenizer::set_merges(MergeTable table) {
  if (arity() != 1 && !table.merges.empty()) {
    throw Error(ErrorCode::InvalidConfig, "BPE needs a single-vocabulary strategy");
  }
  if (table.base_size != base_vocab_size()) {
    throw Error(ErrorCode::CorruptConfig, "merge table was learned on another vocabulary");
  }
  for (std::size_t k = 0; k < table.merges.size(); ++k) {
    const auto limit = static_cast<int>(table.base_size + k);
    const auto [l, r] = table.merges[k];
    if (l < 0 || r < 0 || l >= limit || r >= limit) {
      throw Error(ErrorCode::CorruptConfig, "merge " + std::to_string(k) + " refers to an id not yet defined");
    }
  }
  merges_ = std::move(table);
}

std::vector<int> Tokenizer::apply_bpe(const std::vector<int>& ids) const {
  if (arity() != 1) throw Error(ErrorCode::InvalidConfig, "BPE needs a single-vocabulary strategy");
  return notetok::apply_bpe(merges_, ids);
}

std::vector<int> Tokenizer::decode_bpe(const std::vector<int>& ids) const {
  if (arity() != 1) throw Error(ErrorCode::InvalidConfig, "BPE needs a single-vocabulary strategy");
  return notetok::decode_bpe(merges_, ids);
}

std::string Tokenizer::to_json() const {
  json vocab;
  if (arity() == 1) {
    vocab = vocabs_.front().tokens();
  } else {
    vocab = json::array();
    for (const auto& v : vocabs_) vocab.push_back(v.tokens());
  }
  json merges = json::array();
  for (const auto& [l, r] : merges_.merges) merges.push_back({l, r});
  json doc = {
      {"version", kConfigFormatVersion},
      {"config", config_json(config_)},
      {"vocabulary", vocab},
      {"bpe_merges", merges},
  };
  return doc.dump(2) + "\n";
}

Tokenizer Tokenizer::from_json(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_object() || !doc.contains("version")) throw Error(ErrorCode::CorruptConfig, "missing \"version\"");
  if (!doc.at("version").is_number_integer() || doc.at("version").get<int>() != kConfigFormatVersion) {
    throw Error(ErrorCode::VersionMismatch, "unsupported tokenizer file version " + doc.at("version").dump());
  }
  if (!doc.contains("config")) throw Error(ErrorCode::CorruptConfig, "missing \"config\"");
  Tokenizer tok(parse_config(doc.at("config")));

  try {
    if (doc.contains("vocabulary")) {
      const json& v = doc.at("vocabulary");
      std::vector<std::vector<std::string>> stored;
      if (tok.arity() == 1) {
        stored.push_back(v.get<std::vector<std::string>>());
      } else {
        stored = v.get<std::vector<std::vector<std::string>>>();
      }
      if (stored.size() != tok.arity()) throw Error(ErrorCode::CorruptConfig, "vocabulary count does not match");
      for (std::size_t i = 0; i < stored.size(); ++i) {
        if (stored[i] != tok.vocabs_[i].tokens()) {
          throw Error(ErrorCode::CorruptConfig, "stored vocabulary does not match its config");
        }
      }
    }
    MergeTable table;
    table.base_size = tok.base_vocab_size();
    if (doc.contains("bpe_merges")) {
      for (const auto& m : doc.at("bpe_merges")) {
        const auto pair = m.get<std::vector<int>>();
        if (pair.size() != 2) throw Error(ErrorCode::CorruptConfig, "merges are [left, right] pairs");
        table.merges.emplace_back(pair[0], pair[1]);
      }
    }
    tok.set_merges(std::move(table));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptConfig, std::string("bad tokenizer file: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidConfig) throw Error(ErrorCode::CorruptConfig, e.what());
    throw;
  }
  return tok;
}

void Tokenizer::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << to_json();
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

Tokenizer Tokenizer::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::string config_to_json(const TokenizerConfig& config) { return config_json(config).dump(2) + "\n"; }

TokenizerConfig config_from_json(const std::string& text) { return parse_config(parse_json(text)); }

std::string sequences_to_json(const std::vector<TokSequence>& sequences, const Tokenizer& tokenizer) {
  auto stream_ids = [&](const TokSequence& seq) {
    const std::vector<int> ids = tokenizer.has_bpe() ? (seq.bpe_ids ? *seq.bpe_ids : tokenizer.apply_bpe(seq.ids))
                                                     : seq.ids;
    if (tokenizer.arity() == 1) return json(ids);
    json tuples = json::array();
    for (std::size_t i = 0; i + tokenizer.arity() <= ids.size(); i += tokenizer.arity()) {
      tuples.push_back(std::vector<int>(ids.begin() + static_cast<std::ptrdiff_t>(i),
                                        ids.begin() + static_cast<std::ptrdiff_t>(i + tokenizer.arity())));
    }
    return tuples;
  };
  json doc;
  json programs = json::array();
  if (tokenizer.config().one_token_stream) {
    doc["ids"] = sequences.empty() ? json::array() : stream_ids(sequences.front());
    if (!sequences.empty()) programs.push_back(sequences.front().program);
  } else {
    doc["ids"] = json::array();
    for (const auto& seq : sequences) {
      doc["ids"].push_back(stream_ids(seq));
      programs.push_back(seq.program);
    }
  }
  doc["programs"] = programs;
  doc["bpe"] = tokenizer.has_bpe();
  doc["arity"] = tokenizer.arity();
  return doc.dump() + "\n";
}

std::vector<TokSequence> sequences_from_json(const std::string& text, const Tokenizer& tokenizer) {
  const json doc = parse_json(text);
  try {
    if (!doc.is_object() || !doc.contains("ids")) throw Error(ErrorCode::CorruptConfig, "token file lacks \"ids\"");
    const bool bpe = doc.value("bpe", false);
    if (bpe && !tokenizer.has_bpe()) {
      throw Error(ErrorCode::CorruptConfig, "token file holds BPE ids but the tokenizer has no merges");
    }
    const std::vector<int> programs = doc.contains("programs") ? doc.at("programs").get<std::vector<int>>()
                                                               : std::vector<int>{};
    std::vector<json> streams;
    if (tokenizer.config().one_token_stream) {
      streams.push_back(doc.at("ids"));
    } else {
      for (const auto& s : doc.at("ids")) streams.push_back(s);
    }
    std::vector<TokSequence> out;
    for (std::size_t i = 0; i < streams.size(); ++i) {
      TokSequence seq;
      seq.arity = tokenizer.arity();
      seq.program = i < programs.size() ? programs[i] : 0;
      std::vector<int> ids;
      if (tokenizer.arity() == 1) {
        ids = streams[i].get<std::vector<int>>();
      } else {
        for (const auto& tuple : streams[i]) {
          const auto t = tuple.get<std::vector<int>>();
          if (t.size() != tokenizer.arity()) throw Error(ErrorCode::CorruptConfig, "tuple of the wrong arity");
          ids.insert(ids.end(), t.begin(), t.end());
        }
      }
      if (bpe) {
        seq.bpe_ids = ids;
        seq.ids = tokenizer.decode_bpe(ids);
      } else {
        seq.ids = std::move(ids);
      }
      seq.tokens = tokenizer.ids_to_tokens(seq.ids);
      out.push_back(std::move(seq));
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptConfig, std::string("bad token file: ") + e.what());
  }
}

}  // namespace notetok
