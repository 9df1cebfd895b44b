#include "notetok/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "notetok/error.hpp"

namespace notetok {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidConfig, what);
}

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::MIDILike: return "MIDILike";
    case Strategy::TSD: return "TSD";
    case Strategy::REMI: return "REMI";
    case Strategy::Structured: return "Structured";
    case Strategy::Octuple: return "Octuple";
  }
  return "?";
}

Strategy strategy_from_string(std::string_view name) {
  std::string lower;
  for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  for (Strategy s : {Strategy::MIDILike, Strategy::TSD, Strategy::REMI, Strategy::Structured, Strategy::Octuple}) {
    std::string candidate;
    for (char c : to_string(s)) candidate.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (candidate == lower) return s;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown strategy '" + std::string(name) + "'");
}

std::vector<double> default_tempo_bins() {
  std::vector<double> bins;
  constexpr int n = 32;
  for (int k = 0; k < n; ++k) {
    const double bpm = 40.0 + k * (250.0 - 40.0) / (n - 1);
    bins.push_back(std::round(bpm * 100.0) / 100.0);
  }
  return bins;
}

std::vector<TimeSig> default_time_signatures() {
  std::vector<TimeSig> out;
  for (int n = 1; n <= 8; ++n) out.push_back({n, 4});
  for (int n : {3, 6, 9, 12}) out.push_back({n, 8});
  return out;
}

TokenizerConfig TokenizerConfig::defaults(Strategy strategy) {
  TokenizerConfig c;
  c.strategy = strategy;
  c.tempo_bins = default_tempo_bins();
  c.time_signature_set = default_time_signatures();
  if (strategy == Strategy::Octuple) {
    c.use_programs = true;
    c.one_token_stream = true;
  }
  return c;
}

int TokenizerConfig::rest_step() const {
  return static_cast<int>(std::lround(rest_min_beats * beat_res));
}

int TokenizerConfig::max_bar_samples() const {
  if (!use_time_signatures) return bar_samples({4, 4});
  int best = 0;
  for (const TimeSig& ts : time_signature_set) best = std::max(best, bar_samples(ts));
  return best;
}

void TokenizerConfig::validate() const {
  require(0 <= pitch_low && pitch_low < pitch_high && pitch_high <= 128, "pitch range must satisfy 0 <= low < high <= 128");
  require(1 <= n_velocities && n_velocities <= 127, "n_velocities must be in 1..127");
  require(beat_res >= 1, "beat_res must be >= 1");
  require(max_duration_beats >= 1, "max_duration_beats must be >= 1");
  require(max_bars >= 1, "max_bars must be >= 1");

  require(!special_tokens.empty(), "at least one special token is required");
  std::set<std::string> seen;
  for (const auto& s : special_tokens) {
    require(!s.empty() && s.find('_') == std::string::npos, "special token names must be non-empty without '_'");
    require(seen.insert(s).second, "duplicate special token " + s);
  }

  if (use_tempos) {
    require(!tempo_bins.empty(), "use_tempos requires tempo bins");
    for (std::size_t i = 0; i < tempo_bins.size(); ++i) {
      require(tempo_bins[i] > 0.0, "tempo bins must be positive");
      require(std::round(tempo_bins[i] * 100.0) / 100.0 == tempo_bins[i], "tempo bins must have at most two decimals");
      require(i == 0 || tempo_bins[i - 1] < tempo_bins[i], "tempo bins must be strictly increasing");
    }
  }
  if (use_time_signatures) {
    require(!time_signature_set.empty(), "use_time_signatures requires a time signature set");
    std::set<TimeSig> unique(time_signature_set.begin(), time_signature_set.end());
    require(unique.size() == time_signature_set.size(), "duplicate time signature");
    for (const TimeSig& ts : time_signature_set) {
      require(ts.numerator >= 1 && ts.numerator <= 255, "time signature numerator out of range");
      require(ts.denominator == 2 || ts.denominator == 4 || ts.denominator == 8 || ts.denominator == 16,
              "time signature denominator must be 2, 4, 8 or 16");
      require(ts.numerator * 4 * beat_res % ts.denominator == 0,
              "bar of " + std::to_string(ts.numerator) + "/" + std::to_string(ts.denominator) +
                  " is not a whole number of grid samples");
    }
  }
  if (use_rests) {
    require(rest_min_beats > 0.0, "rest_min_beats must be > 0");
    const double samples = rest_min_beats * beat_res;
    require(std::abs(samples - std::round(samples)) < 1e-9 && rest_step() >= 1,
            "rest_min_beats * beat_res must be a whole number of samples");
    require(rest_step() <= max_duration_samples(), "rest step exceeds the maximum duration");
  }

  require(!one_token_stream || use_programs, "one_token_stream requires use_programs");
  switch (strategy) {
    case Strategy::Structured:
      require(!use_chords && !use_rests && !use_tempos && !use_time_signatures,
              "Structured supports no chord, rest, tempo or time signature tokens");
      break;
    case Strategy::Octuple:
      require(!use_chords && !use_rests, "Octuple supports no chord or rest tokens");
      require(use_programs && one_token_stream, "Octuple requires use_programs and one_token_stream");
      break;
    default:
      break;
  }
}

}  // namespace notetok
