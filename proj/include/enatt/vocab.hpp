#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace enatt {

// Token table with two reserved ids: 0 = padding, 1 = unknown. All other ids
// map bijectively onto the tokens the table was built from, in sorted order,
// so construction is deterministic for a given token multiset.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  Vocabulary();
  // Builds from a token stream: sorted unique tokens get ids 2, 3, ...
  static Vocabulary build(const std::vector<std::string>& tokens);

  int id(const std::string& token) const;  // unseen -> kUnk
  const std::string& token(int id) const;  // throws on out-of-range id
  int size() const { return static_cast<int>(id_to_token_.size()); }
  bool contains(const std::string& token) const;

  // One token per line, id order, reserved rows included.
  void save(std::ostream& out) const;
  static Vocabulary load(std::istream& in);

 private:
  std::unordered_map<std::string, int> token_to_id_;
  std::vector<std::string> id_to_token_;
  void push(const std::string& tok);
};

// Whitespace tokenizer used for all corpus text.
std::vector<std::string> split_tokens(const std::string& text);

// Ids for a token sequence (unseen tokens map to the unknown id).
std::vector<int> token_ids(const Vocabulary& vocab,
                           std::span<const std::string> tokens);

}  // namespace enatt
