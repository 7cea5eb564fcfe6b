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

#include "ilmefuse/vocab.h"

#include <fstream>

#include "ilmefuse/common.h"
#include "json.hpp"

namespace ilmefuse {

const char* TokenClassName(TokenClass c) {
  switch (c) {
    case TokenClass::kSpecial: return "special";
    case TokenClass::kCharLike: return "char_like";
    case TokenClass::kWordLike: return "word_like";
  }
  return "?";
}

TokenClass TokenClassFromName(const std::string& name) {
  if (name == "special") return TokenClass::kSpecial;
  if (name == "char_like") return TokenClass::kCharLike;
  if (name == "word_like") return TokenClass::kWordLike;
  Fail("unknown token class \"", name, "\"");
}

void Vocab::Append(const std::string& symbol, TokenClass cls) {
  Check(!symbol.empty(), "Vocab: empty symbol");
  Check(by_symbol_.count(symbol) == 0, "Vocab: duplicate symbol \"", symbol, "\"");
  by_symbol_[symbol] = static_cast<int>(entries_.size());
  entries_.push_back({symbol, cls});
}

Vocab Vocab::Build(const std::vector<std::string>& lang_a,
                   const std::vector<std::string>& lang_b) {
  Vocab v;
  v.Append("<pad>", TokenClass::kSpecial);
  v.Append("<sos>", TokenClass::kSpecial);
  v.Append("<eos>", TokenClass::kSpecial);
  for (const std::string& s : lang_a) {
    Check(s.size() == 1, "Vocab: char_like symbol \"", s, "\" must be a single character");
    v.Append(s, TokenClass::kCharLike);
  }
  for (const std::string& s : lang_b) {
    Check(s.size() >= 2, "Vocab: word_like symbol \"", s, "\" must span several characters");
    v.Append(s, TokenClass::kWordLike);
  }
  return v;
}

const std::string& Vocab::Symbol(int id) const {
  Check(id >= 0 && id < size(), "Vocab: id ", id, " out of range 0..", size() - 1);
  return entries_[id].symbol;
}

TokenClass Vocab::Class(int id) const {
  Check(id >= 0 && id < size(), "Vocab: id ", id, " out of range 0..", size() - 1);
  return entries_[id].cls;
}

int Vocab::Id(const std::string& symbol) const {
  auto it = by_symbol_.find(symbol);
  Check(it != by_symbol_.end(), "Vocab: unknown symbol \"", symbol, "\"");
  return it->second;
}

std::vector<int> Vocab::ContentIds() const {
  std::vector<int> ids;
  for (int id = kFirstContentId; id < size(); ++id) ids.push_back(id);
  return ids;
}

std::vector<int> Vocab::ContentIds(TokenClass cls) const {
  std::vector<int> ids;
  for (int id = kFirstContentId; id < size(); ++id) {
    if (entries_[id].cls == cls) ids.push_back(id);
  }
  return ids;
}

std::string Vocab::Render(const std::vector<int>& ids) const {
  std::string out;
  TokenClass prev = TokenClass::kSpecial;
  for (int id : ids) {
    const Entry& e = entries_[id];
    const bool glue = e.cls == TokenClass::kCharLike && prev == TokenClass::kCharLike;
    if (!out.empty() && !glue) out += ' ';
    out += e.symbol;
    prev = e.cls;
  }
  return out;
}

uint64_t Vocab::Hash() const {
  uint64_t h = 14695981039346656037ull;
  for (int id = 0; id < size(); ++id) {
    h = Fnv1a(&id, sizeof(id), h);
    h = Fnv1a(entries_[id].symbol.data(), entries_[id].symbol.size(), h);
    const int cls = static_cast<int>(entries_[id].cls);
    h = Fnv1a(&cls, sizeof(cls), h);
  }
  return h;
}

void Vocab::Save(const std::string& path) const {
  nlohmann::json items = nlohmann::json::array();
  for (int id = 0; id < size(); ++id) {
    items.push_back({{"symbol", entries_[id].symbol},
                     {"id", id},
                     {"class", TokenClassName(entries_[id].cls)}});
  }
  std::ofstream out(path);
  Check(out.good(), "Vocab: cannot write ", path);
  out << items.dump(2) << "\n";
  Check(out.good(), "Vocab: write failed for ", path);
}

Vocab Vocab::Load(const std::string& path) {
  std::ifstream in(path);
  Check(in.good(), "Vocab: cannot read ", path);
  nlohmann::json items;
  try {
    in >> items;
  } catch (const std::exception& e) {
    Fail("Vocab: ", path, " is not valid JSON: ", e.what());
  }
  Check(items.is_array(), "Vocab: ", path, " must hold a JSON array");
  Vocab v;
  for (const auto& item : items) {
    const int id = item.at("id").get<int>();
    Check(id == v.size(), "Vocab: ids must be dense and ordered; got ", id, " at position ",
          v.size());
    v.Append(item.at("symbol").get<std::string>(),
             TokenClassFromName(item.at("class").get<std::string>()));
  }
  Check(v.size() > Vocab::kFirstContentId, "Vocab: no content symbols in ", path);
  Check(v.Symbol(kPadId) == "<pad>" && v.Symbol(kSosId) == "<sos>" &&
            v.Symbol(kEosId) == "<eos>",
        "Vocab: reserved symbols out of place in ", path);
  return v;
}

}  // namespace ilmefuse
