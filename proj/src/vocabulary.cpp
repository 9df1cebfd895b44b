#include "notetok/vocabulary.hpp"

#include "notetok/error.hpp"

namespace notetok {

Vocabulary::Vocabulary(const std::vector<std::string>& tokens) {
  for (const auto& t : tokens) add(t);
}

int Vocabulary::add(const std::string& token) {
  const auto id = static_cast<int>(tokens_.size());
  if (!ids_.emplace(token, id).second) throw Error(ErrorCode::InvalidConfig, "duplicate token " + token);
  tokens_.push_back(token);
  return id;
}

int Vocabulary::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  if (it == ids_.end()) throw Error(ErrorCode::UnknownToken, "'" + std::string(token) + "' is not in the vocabulary");
  return it->second;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw Error(ErrorCode::UnknownId, "id " + std::to_string(id) + " is outside the vocabulary");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

bool Vocabulary::contains(std::string_view token) const { return ids_.count(std::string(token)) > 0; }

std::string make_token(std::string_view type, std::string_view value) {
  std::string out(type);
  out.push_back('_');
  out.append(value);
  return out;
}

std::string make_token(std::string_view type, long long value) { return make_token(type, std::to_string(value)); }

TokenParts split_token(std::string_view token) {
  const auto pos = token.find('_');
  if (pos == std::string_view::npos) return {token, {}};
  return {token.substr(0, pos), token.substr(pos + 1)};
}

}  // namespace notetok
