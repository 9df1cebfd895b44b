#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace notetok {

/// Bidirectional map between "Type_Value" token strings and dense ids.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(const std::vector<std::string>& tokens);

  /// Appends a token; throws Error(InvalidConfig) on duplicates.
  int add(const std::string& token);

  /// Throws Error(UnknownToken).
  int id(std::string_view token) const;
  /// Throws Error(UnknownId).
  const std::string& token(int id) const;

  bool contains(std::string_view token) const;
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

std::string make_token(std::string_view type, std::string_view value);
std::string make_token(std::string_view type, long long value);

/// Splits at the first '_': "TimeSig_3/4" -> {"TimeSig", "3/4"}.
struct TokenParts {
  std::string_view type;
  std::string_view value;
};
TokenParts split_token(std::string_view token);

}  // namespace notetok
