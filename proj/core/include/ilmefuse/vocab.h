// Copyright 2026 The ilmefuse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ILMEFUSE_VOCAB_H_
#define ILMEFUSE_VOCAB_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ilmefuse {

// char_like units score one error per symbol, word_like per word.
enum class TokenClass { kSpecial, kCharLike, kWordLike };

const char* TokenClassName(TokenClass c);
TokenClass TokenClassFromName(const std::string& name);

// Closed symbol table. Ids are dense; pad/sos/eos are fixed reserved slots
// and blank lives one past the end so that decoder and LM distributions
// (|V| wide) structurally exclude it while the CTC head (|V|+1 wide)
// includes it.
class Vocab {
 public:
  static constexpr int kPadId = 0;
  static constexpr int kSosId = 1;
  static constexpr int kEosId = 2;
  static constexpr int kFirstContentId = 3;

  struct Entry {
    std::string symbol;
    TokenClass cls;
  };

  Vocab() = default;

  // lang_a symbols become char_like, lang_b word_like.
  static Vocab Build(const std::vector<std::string>& lang_a,
                     const std::vector<std::string>& lang_b);

  int size() const { return static_cast<int>(entries_.size()); }
  int blank_id() const { return size(); }
  int content_size() const { return size() - kFirstContentId; }

  const std::string& Symbol(int id) const;
  TokenClass Class(int id) const;
  int Id(const std::string& symbol) const;
  bool Contains(const std::string& symbol) const { return by_symbol_.count(symbol) > 0; }
  bool IsContent(int id) const { return id >= kFirstContentId && id < size(); }

  std::vector<int> ContentIds() const;
  std::vector<int> ContentIds(TokenClass cls) const;

  // Joins symbols with the display convention used throughout: word_like
  // units space-separated, char_like runs glued.
  std::string Render(const std::vector<int>& ids) const;

  uint64_t Hash() const;

  void Save(const std::string& path) const;
  static Vocab Load(const std::string& path);

 private:
  void Append(const std::string& symbol, TokenClass cls);

  std::vector<Entry> entries_;
  std::map<std::string, int> by_symbol_;
};

}  // namespace ilmefuse

#endif  // ILMEFUSE_VOCAB_H_
