#include "enatt/vocab.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace enatt {

Vocabulary::Vocabulary() {
  push("<pad>");
  push("<unk>");
}

void Vocabulary::push(const std::string& tok) {
  token_to_id_.emplace(tok, static_cast<int>(id_to_token_.size()));
  id_to_token_.push_back(tok);
}

Vocabulary Vocabulary::build(const std::vector<std::string>& tokens) {
  std::vector<std::string> sorted = tokens;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  Vocabulary v;
  for (const auto& t : sorted)
    if (!v.contains(t)) v.push(t);
  return v;
}

int Vocabulary::id(const std::string& token) const {
  auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || id >= size())
    throw std::out_of_range("Vocabulary: id " + std::to_string(id) +
                            " outside [0," + std::to_string(size()) + ")");
  return id_to_token_[static_cast<size_t>(id)];
}

bool Vocabulary::contains(const std::string& token) const {
  return token_to_id_.count(token) != 0;
}

void Vocabulary::save(std::ostream& out) const {
  for (const auto& t : id_to_token_) out << t << '\n';
}

Vocabulary Vocabulary::load(std::istream& in) {
  Vocabulary v;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    if (row >= 2) {
      if (v.contains(line))
        throw std::runtime_error("Vocabulary::load: duplicate token '" + line + "'");
      v.push(line);
    } else if (line != v.id_to_token_[static_cast<size_t>(row)]) {
      throw std::runtime_error("Vocabulary::load: bad reserved row " +
                               std::to_string(row));
    }
    ++row;
  }
  if (row < 2) throw std::runtime_error("Vocabulary::load: missing reserved rows");
  return v;
}

std::vector<std::string> split_tokens(const std::string& text) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    size_t j = i;
    while (j < text.size() && text[j] != ' ') ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<int> token_ids(const Vocabulary& vocab,
                           std::span<const std::string> tokens) {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(vocab.id(t));
  return ids;
}

}  // namespace enatt
