// Corpus-scale front end: tokenize, detokenize, train-bpe, stats, augment,
// split.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "notetok/augment.hpp"
#include "notetok/error.hpp"
#include "notetok/midi_io.hpp"
#include "notetok/seq_utils.hpp"
#include "notetok/stats.hpp"
#include "notetok/tokenizer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace notetok;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNoInput = 2;
constexpr int kExitAllFailed = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<fs::path> find_files(const fs::path& root, const std::vector<std::string>& extensions) {
  std::vector<fs::path> out;
  if (!fs::is_directory(root)) throw UsageError("not a directory: " + root.string());
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = lower(entry.path().extension().string());
    if (std::find(extensions.begin(), extensions.end(), ext) != extensions.end()) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<fs::path> find_midis(const fs::path& root) { return find_files(root, {".mid", ".midi"}); }

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + p.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out || !(out << text)) throw Error(ErrorCode::IoError, "cannot write " + p.string());
}

fs::path mirrored(const fs::path& file, const fs::path& in_root, const fs::path& out_root, const std::string& ext) {
  fs::path rel = fs::relative(file, in_root);
  rel.replace_extension(ext);
  return out_root / rel;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("not an integer list: " + text);
    }
  }
  return out;
}

unsigned default_jobs() {
  if (const char* env = std::getenv("NOTETOK_JOBS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Results must be written
// to per-index slots so output does not depend on scheduling.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
}

struct FileResult {
  bool ok = false;
  std::string error;
};

int finish(const std::string& verb, const std::vector<fs::path>& files, const std::vector<FileResult>& results) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (results[i].ok) {
      ++ok;
    } else {
      std::cerr << "failed: " << files[i].string() << ": " << results[i].error << "\n";
    }
  }
  std::cerr << verb << " " << ok << "/" << files.size() << " files\n";
  return ok > 0 ? kExitOk : kExitAllFailed;
}

void write_report(const fs::path& out_dir, const std::vector<fs::path>& files, const std::vector<FileResult>& results) {
  json ok = json::array();
  json failed = json::array();
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (results[i].ok) {
      ok.push_back(files[i].string());
    } else {
      failed.push_back({{"file", files[i].string()}, {"error", results[i].error}});
    }
  }
  write_text(out_dir / "report.json", json{{"succeeded", ok}, {"failed", failed}}.dump(2) + "\n");
}

template <typename Fn>
FileResult guarded(Fn&& fn) {
  try {
    fn();
    return {true, {}};
  } catch (const std::exception& e) {
    return {false, e.what()};
  }
}

// Config flags shared by commands that build or load a tokenizer.
struct ConfigFlags {
  std::string config_path;
  std::string strategy;
  std::string pitch_range;
  int velocities = 0;
  int beat_res = 0;
  int max_duration = 0;
  int tempos = 0;
  int max_bars = 0;
  bool use_chords = false, use_rests = false, use_tempos = false, use_time_signatures = false,
       use_programs = false, one_stream = false;
  std::vector<CLI::Option*> options;

  void attach(CLI::App* app, bool with_velocities = true) {
    options.push_back(app->add_option("--config", config_path, "Tokenizer or config JSON file")->check(CLI::ExistingFile));
    options.push_back(app->add_option("--strategy", strategy, "MIDILike, TSD, REMI, Structured or Octuple"));
    options.push_back(app->add_option("--pitch-range", pitch_range, "low:high, high exclusive"));
    if (with_velocities) options.push_back(app->add_option("--velocities", velocities, "Number of velocity bins"));
    options.push_back(app->add_option("--beat-res", beat_res, "Grid samples per quarter note"));
    options.push_back(app->add_option("--max-duration", max_duration, "Longest duration in beats"));
    options.push_back(app->add_option("--tempos", tempos, "Number of tempo bins over [40, 250] bpm"));
    options.push_back(app->add_option("--max-bars", max_bars, "Octuple bar vocabulary size"));
    app->add_flag("--use-chords", use_chords);
    app->add_flag("--use-rests", use_rests);
    app->add_flag("--use-tempos", use_tempos);
    app->add_flag("--use-time-signatures", use_time_signatures);
    app->add_flag("--use-programs", use_programs);
    app->add_flag("--one-stream", one_stream);
  }

  bool given(const char* name) const {
    for (auto* o : options) {
      if (o->get_name() == name) return o->count() > 0;
    }
    return false;
  }

  Tokenizer build() const {
    std::optional<Tokenizer> loaded;
    TokenizerConfig cfg;
    if (!config_path.empty()) {
      const std::string text = read_text(config_path);
      const auto doc = json::parse(text, nullptr, false);
      if (!doc.is_discarded() && doc.is_object() && doc.contains("version")) {
        loaded = Tokenizer::from_json(text);
        cfg = loaded->config();
      } else {
        cfg = config_from_json(text);
      }
    } else {
      cfg = TokenizerConfig::defaults(given("--strategy") ? strategy_from_string(strategy) : Strategy::TSD);
    }
    bool changed = false;
    auto set = [&](auto& field, const auto& value) {
      if (field != value) {
        field = value;
        changed = true;
      }
    };
    if (given("--strategy")) {
      const Strategy s = strategy_from_string(strategy);
      if (s != cfg.strategy) {
        set(cfg.strategy, s);
        if (s == Strategy::Octuple) {
          cfg.use_programs = true;
          cfg.one_token_stream = true;
        }
      }
    }
    if (given("--pitch-range")) {
      const auto sep = pitch_range.find_first_of(":,");
      if (sep == std::string::npos) throw UsageError("--pitch-range expects low:high");
      set(cfg.pitch_low, std::stoi(pitch_range.substr(0, sep)));
      set(cfg.pitch_high, std::stoi(pitch_range.substr(sep + 1)));
    }
    if (given("--velocities")) set(cfg.n_velocities, velocities);
    if (given("--beat-res")) set(cfg.beat_res, beat_res);
    if (given("--max-duration")) set(cfg.max_duration_beats, max_duration);
    if (given("--max-bars")) set(cfg.max_bars, max_bars);
    if (given("--tempos")) {
      if (tempos < 2) throw UsageError("--tempos needs at least 2 bins");
      std::vector<double> bins;
      for (int k = 0; k < tempos; ++k) bins.push_back(std::round((40.0 + k * 210.0 / (tempos - 1)) * 100.0) / 100.0);
      set(cfg.tempo_bins, bins);
    }
    if (use_chords) set(cfg.use_chords, true);
    if (use_rests) set(cfg.use_rests, true);
    if (use_tempos) set(cfg.use_tempos, true);
    if (use_time_signatures) set(cfg.use_time_signatures, true);
    if (use_programs) set(cfg.use_programs, true);
    if (one_stream) set(cfg.one_token_stream, true);
    if (loaded && !changed) return *loaded;
    return Tokenizer(cfg);
  }
};

int cmd_tokenize(const fs::path& in_dir, const fs::path& out_dir, const Tokenizer& tok, unsigned jobs) {
  const auto files = find_midis(in_dir);
  if (files.empty()) {
    std::cerr << "no MIDI files found in " << in_dir.string() << "\n";
    return kExitNoInput;
  }
  fs::create_directories(out_dir);
  tok.save(out_dir / "tokenizer.json");
  std::vector<FileResult> results(files.size());
  parallel_for(files.size(), jobs, [&](std::size_t i) {
    results[i] = guarded([&] {
      const auto seqs = tok.tokenize(midi::read_midi_file(files[i]));
      write_text(mirrored(files[i], in_dir, out_dir, ".json"), sequences_to_json(seqs, tok));
    });
  });
  write_report(out_dir, files, results);
  return finish("tokenized", files, results);
}

std::vector<fs::path> find_token_files(const fs::path& in_dir) {
  std::vector<fs::path> out;
  for (const auto& p : find_files(in_dir, {".json"})) {
    const auto name = p.filename().string();
    if (name != "tokenizer.json" && name != "report.json") out.push_back(p);
  }
  return out;
}

int cmd_detokenize(const fs::path& in_dir, const Tokenizer& tok, const fs::path& out_dir, unsigned jobs) {
  const auto files = find_token_files(in_dir);
  if (files.empty()) {
    std::cerr << "no token files found in " << in_dir.string() << "\n";
    return kExitNoInput;
  }
  std::vector<FileResult> results(files.size());
  parallel_for(files.size(), jobs, [&](std::size_t i) {
    results[i] = guarded([&] {
      const Score score = tok.detokenize(sequences_from_json(read_text(files[i]), tok));
      const fs::path target = mirrored(files[i], in_dir, out_dir, ".mid");
      fs::create_directories(target.parent_path());
      midi::write_midi_file(score_to_midi(score), target);
    });
  });
  return finish("detokenized", files, results);
}

int cmd_train_bpe(const fs::path& in_dir, Tokenizer tok, const fs::path& out_path, std::size_t vocab_size,
                  unsigned jobs) {
  auto files = find_midis(in_dir);
  const bool from_midi = !files.empty();
  if (!from_midi) files = find_token_files(in_dir);
  if (files.empty()) {
    std::cerr << "no MIDI files found in " << in_dir.string() << "\n";
    return kExitNoInput;
  }
  std::vector<std::vector<TokSequence>> per_file(files.size());
  std::vector<FileResult> results(files.size());
  parallel_for(files.size(), jobs, [&](std::size_t i) {
    results[i] = guarded([&] {
      per_file[i] = from_midi ? tok.tokenize(midi::read_midi_file(files[i]))
                              : sequences_from_json(read_text(files[i]), tok);
    });
  });
  std::vector<TokSequence> corpus;
  for (auto& seqs : per_file) {
    for (auto& s : seqs) corpus.push_back(std::move(s));
  }
  const int code = finish("read", files, results);
  if (code != kExitOk) return code;
  tok.train_bpe(corpus, vocab_size);
  tok.save(out_path);
  std::cerr << "learned " << tok.merges().merges.size() << " merges; vocabulary size " << tok.vocab_size() << "\n";
  return kExitOk;
}

int cmd_stats(const fs::path& in_dir, const Tokenizer& tok, const std::string& csv_path, unsigned jobs) {
  const auto files = find_midis(in_dir);
  if (files.empty()) {
    std::cerr << "no MIDI files found in " << in_dir.string() << "\n";
    return kExitNoInput;
  }
  std::vector<std::optional<CompressionStats>> per_file(files.size());
  std::vector<FileResult> results(files.size());
  parallel_for(files.size(), jobs, [&](std::size_t i) {
    results[i] = guarded([&] {
      const Score score = score_from_midi(midi::read_midi_file(files[i]));
      CompressionStats s;
      accumulate_stats(s, preprocess(score, tok.config()), tok.tokenize(score));
      per_file[i] = s;
    });
  });
  CompressionStats total;
  for (const auto& s : per_file) {
    if (!s) continue;
    total.files += s->files;
    total.notes += s->notes;
    total.beats += s->beats;
    total.tokens += s->tokens;
    total.bpe_tokens += s->bpe_tokens;
  }
  const int code = finish("measured", files, results);

  const std::string strategy(to_string(tok.config().strategy));
  std::ostringstream tpb, bpe_tpb, red;
  tpb << std::fixed << std::setprecision(2) << total.tokens_per_beat();
  bpe_tpb << std::fixed << std::setprecision(2) << total.bpe_tokens_per_beat();
  red << std::fixed << std::setprecision(1) << 100.0 * total.reduction();
  const std::vector<std::pair<std::string, std::string>> rows{
      {"strategy", strategy},
      {"vocab_size", std::to_string(tok.vocab_size())},
      {"base_vocab_size", std::to_string(tok.base_vocab_size())},
      {"files", std::to_string(total.files)},
      {"notes", std::to_string(total.notes)},
      {"tokens_per_beat", tpb.str()},
      {"bpe_tokens_per_beat", bpe_tpb.str()},
      {"bpe_reduction_pct", red.str()},
  };
  for (const auto& [k, v] : rows) std::cout << std::left << std::setw(20) << k << std::right << std::setw(12) << v << "\n";
  if (!csv_path.empty()) {
    std::string header, values;
    for (const auto& [k, v] : rows) {
      header += (header.empty() ? "" : ",") + k;
      values += (values.empty() ? "" : ",") + v;
    }
    write_text(csv_path, header + "\n" + values + "\n");
  }
  return code;
}

std::string signed_tag(char prefix, int v) { return std::string(1, prefix) + (v >= 0 ? "+" : "") + std::to_string(v); }

int cmd_augment(const fs::path& in_dir, const fs::path& out_dir, const Tokenizer& tok, std::vector<int> octaves,
                std::vector<int> velocities, std::vector<int> durations, unsigned jobs) {
  const auto files = find_midis(in_dir);
  if (files.empty()) {
    std::cerr << "no MIDI files found in " << in_dir.string() << "\n";
    return kExitNoInput;
  }
  for (auto* list : {&octaves, &velocities, &durations}) {
    if (list->empty()) list->push_back(0);
  }
  const TokenizerConfig& cfg = tok.config();
  std::vector<FileResult> results(files.size());
  parallel_for(files.size(), jobs, [&](std::size_t i) {
    results[i] = guarded([&] {
      const Score base = preprocess(score_from_midi(midi::read_midi_file(files[i])), cfg);
      fs::path stem = mirrored(files[i], in_dir, out_dir, "");
      for (int o : octaves) {
        const auto pitched = augment_pitch(base, {o}, cfg);
        if (pitched.empty()) continue;
        for (int v : velocities) {
          const Score vel = augment_velocity(pitched.front(), {v}).front();
          for (int d : durations) {
            if (o == 0 && v == 0 && d == 0) continue;
            const Score out = augment_duration(vel, {d}, cfg).front();
            fs::path target = stem;
            target += "_" + signed_tag('p', o) + "_" + signed_tag('v', v) + "_" + signed_tag('d', d) + ".mid";
            if (target.has_parent_path()) fs::create_directories(target.parent_path());
            midi::write_midi_file(score_to_midi(out), target);
          }
        }
      }
    });
  });
  return finish("augmented", files, results);
}

int cmd_split(const fs::path& in_dir, const fs::path& out_dir, std::size_t min_len, std::size_t max_len,
              unsigned jobs) {
  if (min_len < 1 || min_len > max_len) throw UsageError("need 1 <= --min-len <= --max-len");
  const auto files = find_token_files(in_dir);
  if (files.empty()) {
    std::cerr << "no token files found in " << in_dir.string() << "\n";
    return kExitNoInput;
  }
  std::vector<FileResult> results(files.size());
  parallel_for(files.size(), jobs, [&](std::size_t i) {
    results[i] = guarded([&] {
      const json doc = json::parse(read_text(files[i]));
      const json& ids = doc.at("ids");
      const std::size_t arity = doc.value("arity", std::size_t{1});
      std::vector<json> streams;
      const bool nested = arity == 1 && !ids.empty() && ids.front().is_array();
      if (nested) {
        for (const auto& s : ids) streams.push_back(s);
      } else {
        streams.push_back(ids);
      }
      const auto programs = doc.value("programs", std::vector<int>{});
      const fs::path stem = mirrored(files[i], in_dir, out_dir, "");
      for (std::size_t s = 0; s < streams.size(); ++s) {
        const std::vector<json> items(streams[s].begin(), streams[s].end());
        const auto chunks = split_sequence(items, min_len, max_len);
        for (std::size_t c = 0; c < chunks.size(); ++c) {
          json out{{"ids", nested ? json::array({chunks[c]}) : json(chunks[c])},
                   {"programs", s < programs.size() ? json::array({programs[s]}) : json::array()},
                   {"bpe", doc.value("bpe", false)},
                   {"arity", arity}};
          fs::path target = stem;
          target += "_s" + std::to_string(s) + "_c" + std::to_string(c) + ".json";
          write_text(target, out.dump() + "\n");
        }
      }
    });
  });
  return finish("split", files, results);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"notetok: MIDI tokenization toolkit"};
  app.require_subcommand(1);
  unsigned jobs = default_jobs();
  app.add_option("-j,--jobs", jobs, "Parallel workers (default: NOTETOK_JOBS or core count)")->check(CLI::PositiveNumber);

  std::string in_dir, out_dir, tokenizer_path, output_path, csv_path;
  std::size_t vocab_size = 0, min_len = 0, max_len = 0;
  std::string octaves, velocity_offsets, duration_offsets;

  ConfigFlags tok_flags, stats_flags, aug_flags;

  auto* tokenize = app.add_subcommand("tokenize", "Tokenize every MIDI file under a directory");
  tokenize->add_option("in_dir", in_dir)->required();
  tokenize->add_option("out_dir", out_dir)->required();
  tok_flags.attach(tokenize);

  auto* detokenize = app.add_subcommand("detokenize", "Render token files back to MIDI");
  detokenize->add_option("in_dir", in_dir)->required();
  detokenize->add_option("out_dir", out_dir)->required();
  detokenize->add_option("--tokenizer", tokenizer_path, "Tokenizer JSON file")->required()->check(CLI::ExistingFile);

  auto* train = app.add_subcommand("train-bpe", "Learn BPE merges from MIDI or token files");
  train->add_option("in_dir", in_dir)->required();
  train->add_option("--tokenizer", tokenizer_path, "Tokenizer JSON file")->required()->check(CLI::ExistingFile);
  train->add_option("--vocab-size", vocab_size, "Target vocabulary size")->required();
  train->add_option("-o,--output", output_path, "Where to write the trained tokenizer (default: in place)");

  auto* stats = app.add_subcommand("stats", "Tokens per beat and vocabulary statistics");
  stats->add_option("in_dir", in_dir)->required();
  stats->add_option("--tokenizer", tokenizer_path, "Tokenizer JSON file")->check(CLI::ExistingFile);
  stats->add_option("--csv", csv_path, "Also write the row as CSV");
  stats_flags.attach(stats);

  auto* augment = app.add_subcommand("augment", "Write pitch/velocity/duration variants of MIDI files");
  augment->add_option("in_dir", in_dir)->required();
  augment->add_option("out_dir", out_dir)->required();
  augment->add_option("--pitch-octaves", octaves, "Comma-separated octave offsets");
  augment->add_option("--velocities", velocity_offsets, "Comma-separated velocity offsets");
  augment->add_option("--durations", duration_offsets, "Comma-separated duration offsets in grid samples");
  aug_flags.attach(augment, false);

  auto* split = app.add_subcommand("split", "Cut token files into subsequences");
  split->add_option("in_dir", in_dir)->required();
  split->add_option("out_dir", out_dir)->required();
  split->add_option("--min-len", min_len)->required();
  split->add_option("--max-len", max_len)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*tokenize) return cmd_tokenize(in_dir, out_dir, tok_flags.build(), jobs);
    if (*detokenize) return cmd_detokenize(in_dir, Tokenizer::load(tokenizer_path), out_dir, jobs);
    if (*train) {
      return cmd_train_bpe(in_dir, Tokenizer::load(tokenizer_path), output_path.empty() ? tokenizer_path : output_path,
                           vocab_size, jobs);
    }
    if (*stats) {
      if (!tokenizer_path.empty()) stats_flags.config_path = tokenizer_path;
      return cmd_stats(in_dir, stats_flags.build(), csv_path, jobs);
    }
    if (*augment) {
      return cmd_augment(in_dir, out_dir, aug_flags.build(), parse_int_list(octaves), parse_int_list(velocity_offsets),
                         parse_int_list(duration_offsets), jobs);
    }
    if (*split) return cmd_split(in_dir, out_dir, min_len, max_len, jobs);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::InvalidConfig || e.code() == ErrorCode::TargetTooSmall ? kExitUsage : kExitAllFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAllFailed;
  }
  return kExitUsage;
}
