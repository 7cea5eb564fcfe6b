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

#include "ilmefuse/corpus.h"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>

namespace ilmefuse {

namespace {

constexpr char kFeatMagic[8] = {'I', 'L', 'M', 'F', 'F', 'E', 'A', 'T'};
constexpr uint32_t kFeatVersion = 1;

// LangB surface forms. Lowercase and >= 2 chars each, while LangA symbols
// are uppercase letters, so a glued char_like run can never spell one.
constexpr const char* kWordList[] = {
    "cat",  "dog",   "run",  "blue", "stone", "river", "lamp",  "cloud",
    "tree", "moon",  "sand", "bird", "glass", "road",  "light", "rain",
    "wind", "leaf",  "sun",  "door", "ship",  "hill",  "corn",  "milk",
    "snow", "star",  "wolf", "rock", "fish",  "gold",  "iron",  "rose",
    "salt", "night", "fern", "pond", "dust",  "bell",  "moss",  "reed"};
constexpr int kWordListSize = static_cast<int>(sizeof(kWordList) / sizeof(kWordList[0]));

double Float32(double x) { return static_cast<double>(static_cast<float>(x)); }

std::string PadIndex(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06d", i);
  return buf;
}

int DrawFrom(const std::vector<double>& probs, Rng* rng) {
  const double u = rng->Uniform();
  double c = 0.0;
  for (size_t i = 0; i + 1 < probs.size(); ++i) {
    c += probs[i];
    if (u < c) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

template <typename T>
void WriteRaw(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T ReadRaw(std::istream& in, const std::string& path, const char* what) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  Check(in.good(), "feature file ", path, ": truncated while reading ", what);
  return value;
}

std::vector<int> TokensFromSymbols(const nlohmann::json& arr, const Vocab& vocab,
                                   const std::string& where) {
  Check(arr.is_array(), where, ": \"tokens\" is not an array");
  std::vector<int> tokens;
  tokens.reserve(arr.size());
  for (const auto& sym : arr) {
    Check(sym.is_string(), where, ": token entries must be symbol strings");
    const std::string s = sym.get<std::string>();
    Check(vocab.Contains(s), where, ": unknown symbol \"", s, "\"");
    tokens.push_back(vocab.Id(s));
  }
  return tokens;
}

nlohmann::json SymbolsFromTokens(const std::vector<int>& tokens, const Vocab& vocab) {
  nlohmann::json arr = nlohmann::json::array();
  for (int id : tokens) arr.push_back(vocab.Symbol(id));
  return arr;
}

nlohmann::json SpecToJson(const CorpusSpec& s) {
  return {{"seed", s.seed},
          {"lang_a_size", s.lang_a_size},
          {"lang_b_size", s.lang_b_size},
          {"mix_ratio", s.mix_ratio},
          {"persistence", s.persistence},
          {"domain", s.domain},
          {"tilt_a", s.tilt_a},
          {"tilt_b", s.tilt_b},
          {"utterances", s.utterances},
          {"min_len", s.min_len},
          {"max_len", s.max_len},
          {"len_geometric", s.len_geometric},
          {"frames_per_token", s.frames_per_token},
          {"noise_sigma", s.noise_sigma},
          {"d_feat", s.d_feat}};
}

}  // namespace

void CorpusSpec::Validate() const {
  Check(lang_a_size >= 2 && lang_a_size <= 26, "corpus: lang_a_size must be in [2, 26], got ",
        lang_a_size);
  Check(lang_b_size >= 2 && lang_b_size <= kWordListSize,
        "corpus: lang_b_size must be in [2, ", kWordListSize, "], got ", lang_b_size);
  Check(mix_ratio >= 0.0 && mix_ratio <= 1.0, "corpus: mix_ratio must be in [0, 1], got ",
        mix_ratio);
  Check(persistence >= 0.0 && persistence <= 1.0,
        "corpus: persistence must be in [0, 1], got ", persistence);
  Check(tilt_a >= 0.0 && tilt_a <= 1.0, "corpus: tilt_a must be in [0, 1], got ", tilt_a);
  Check(tilt_b >= 0.0 && tilt_b <= 1.0, "corpus: tilt_b must be in [0, 1], got ", tilt_b);
  Check(utterances >= 1, "corpus: utterances must be >= 1, got ", utterances);
  Check(min_len >= 1 && max_len >= min_len, "corpus: need 1 <= min_len <= max_len, got ",
        min_len, "..", max_len);
  Check(len_geometric >= 0.0 && len_geometric < 1.0,
        "corpus: len_geometric must be in [0, 1), got ", len_geometric);
  Check(frames_per_token >= 1, "corpus: frames_per_token must be >= 1, got ",
        frames_per_token);
  Check(noise_sigma >= 0.0, "corpus: noise_sigma must be >= 0, got ", noise_sigma);
  Check(d_feat >= 1, "corpus: d_feat must be >= 1, got ", d_feat);
}

Vocab BuildVocabForSpec(const CorpusSpec& spec) {
  spec.Validate();
  std::vector<std::string> lang_a;
  for (int i = 0; i < spec.lang_a_size; ++i) lang_a.push_back(std::string(1, 'A' + i));
  std::vector<std::string> lang_b;
  for (int i = 0; i < spec.lang_b_size; ++i) lang_b.push_back(kWordList[i]);
  return Vocab::Build(lang_a, lang_b);
}

Tensor BuildCodebook(const Vocab& vocab, int d_feat, uint64_t seed) {
  Check(d_feat >= 1, "codebook: d_feat must be >= 1");
  Rng rng(Rng::DeriveSeed(seed, "codebook"));
  Tensor book(vocab.size(), d_feat);
  for (int id : vocab.ContentIds()) {
    for (int j = 0; j < d_feat; ++j) book.at(id, j) = Float32(2.0 * rng.Uniform() - 1.0);
  }
  return book;
}

std::vector<double> DomainUnigram(const CorpusSpec& spec, TokenClass cls) {
  Check(cls == TokenClass::kCharLike || cls == TokenClass::kWordLike,
        "unigram: want char_like or word_like");
  const int n = cls == TokenClass::kCharLike ? spec.lang_a_size : spec.lang_b_size;
  const double tilt = cls == TokenClass::kCharLike ? spec.tilt_a : spec.tilt_b;
  std::vector<double> w(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    // Per-(domain, language, token) profile value in [0, 1); hash-derived
    // so the same domain tilts identically in every split and seed. The
    // FNV hash alone barely changes its high bits when only the trailing
    // token index differs, so it is pushed through the SplitMix64
    // finalizer before use.
    const uint64_t h =
        Fnv1a(StrCat("unigram.", spec.domain, ".", TokenClassName(cls), ".", i));
    const double u = Rng(h).Uniform();
    // 3u^2 has mean 1 over u ~ U[0,1), so the tilt reshapes without
    // shifting the overall scale; tilt 0 is exactly uniform.
    w[i] = (1.0 - tilt) + tilt * 3.0 * u * u;
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

std::vector<Utterance> GenerateTranscripts(const CorpusSpec& spec, const Vocab& vocab) {
  spec.Validate();
  const std::vector<int> ids_a = vocab.ContentIds(TokenClass::kCharLike);
  const std::vector<int> ids_b = vocab.ContentIds(TokenClass::kWordLike);
  Check(static_cast<int>(ids_a.size()) == spec.lang_a_size &&
            static_cast<int>(ids_b.size()) == spec.lang_b_size,
        "corpus: vocab does not match the spec's language sizes");
  const std::vector<double> pa = DomainUnigram(spec, TokenClass::kCharLike);
  const std::vector<double> pb = DomainUnigram(spec, TokenClass::kWordLike);

  const double m = spec.mix_ratio;
  const double z = std::max(m, 1.0 - m);
  const double leave_a = (1.0 - spec.persistence) * (1.0 - m) / z;
  const double leave_b = (1.0 - spec.persistence) * m / z;

  std::vector<Utterance> utts;
  utts.reserve(spec.utterances);
  for (int i = 0; i < spec.utterances; ++i) {
    Rng rng(Rng::DeriveSeed(spec.seed, StrCat("utt.", i)));
    int len = spec.min_len;
    while (len < spec.max_len && rng.Uniform() < spec.len_geometric) ++len;

    Utterance utt;
    utt.utt_id = StrCat("d", spec.domain, "-", PadIndex(i));
    utt.domain = spec.domain;
    utt.tokens.reserve(len);
    bool in_a = rng.Uniform() < m;
    for (int k = 0; k < len; ++k) {
      if (k > 0) {
        const double leave = in_a ? leave_a : leave_b;
        if (rng.Uniform() < leave) in_a = !in_a;
      }
      if (in_a) {
        utt.tokens.push_back(ids_a[DrawFrom(pa, &rng)]);
      } else {
        utt.tokens.push_back(ids_b[DrawFrom(pb, &rng)]);
      }
    }
    utts.push_back(std::move(utt));
  }
  return utts;
}

Tensor SynthesizeFeatures(const std::vector<int>& tokens, const CorpusSpec& spec,
                          const Tensor& codebook, Rng* rng) {
  Check(!tokens.empty(), "synthesize: empty token sequence");
  Check(codebook.cols() == spec.d_feat, "synthesize: codebook is ", codebook.cols(),
        "-dim, spec wants ", spec.d_feat);
  Tensor features(static_cast<int>(tokens.size()) * spec.frames_per_token, spec.d_feat);
  int row = 0;
  for (int id : tokens) {
    Check(id >= 0 && id < codebook.rows(), "synthesize: token ", id,
          " has no codebook entry");
    for (int r = 0; r < spec.frames_per_token; ++r) {
      for (int j = 0; j < spec.d_feat; ++j) {
        features.at(row, j) =
            Float32(codebook.at(id, j) + spec.noise_sigma * rng->Gaussian());
      }
      ++row;
    }
  }
  return features;
}

void SynthesizeCorpusFeatures(const CorpusSpec& spec, const Tensor& codebook,
                              std::vector<Utterance>* utterances) {
  Check(utterances != nullptr, "synthesize: null utterance list");
  for (size_t i = 0; i < utterances->size(); ++i) {
    Rng rng(Rng::DeriveSeed(spec.seed, StrCat("feat.", i)));
    (*utterances)[i].features =
        SynthesizeFeatures((*utterances)[i].tokens, spec, codebook, &rng);
  }
}

void WriteTranscripts(const std::string& path, const std::vector<Utterance>& utterances,
                      const Vocab& vocab) {
  std::ofstream out(path);
  Check(out.good(), "transcripts: cannot write ", path);
  for (const Utterance& utt : utterances) {
    const nlohmann::json rec = {{"utt_id", utt.utt_id},
                                {"tokens", SymbolsFromTokens(utt.tokens, vocab)},
                                {"domain", utt.domain}};
    out << rec.dump() << '\n';
  }
  out.flush();
  Check(out.good(), "transcripts: write failed for ", path);
}

std::vector<Utterance> ReadTranscripts(const std::string& path, const Vocab& vocab) {
  std::ifstream in(path);
  Check(in.good(), "transcripts: cannot read ", path);
  std::vector<Utterance> utts;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      Fail("transcripts ", path, ":", line_no, ": bad JSON: ", e.what());
    }
    const std::string where = StrCat("transcripts ", path, ":", line_no);
    Check(rec.contains("utt_id") && rec.contains("tokens"), where,
          ": need utt_id and tokens");
    Utterance utt;
    utt.utt_id = rec.at("utt_id").get<std::string>();
    utt.tokens = TokensFromSymbols(rec.at("tokens"), vocab, where);
    utt.domain = rec.value("domain", 0);
    utts.push_back(std::move(utt));
  }
  return utts;
}

void WriteFeatures(const std::string& path, const std::vector<Utterance>& utterances,
                   int d_feat, uint64_t vocab_hash) {
  std::ofstream out(path, std::ios::binary);
  Check(out.good(), "features: cannot write ", path);
  out.write(kFeatMagic, sizeof(kFeatMagic));
  WriteRaw<uint32_t>(out, kFeatVersion);
  WriteRaw<uint32_t>(out, static_cast<uint32_t>(d_feat));
  WriteRaw<uint64_t>(out, vocab_hash);
  WriteRaw<uint64_t>(out, utterances.size());

  uint64_t offset = 0;  // float index into the data section
  for (const Utterance& utt : utterances) {
    Check(utt.features.cols() == d_feat, "features: utterance ", utt.utt_id, " is ",
          utt.features.cols(), "-dim, expected ", d_feat);
    WriteRaw<uint32_t>(out, static_cast<uint32_t>(utt.utt_id.size()));
    out.write(utt.utt_id.data(), static_cast<std::streamsize>(utt.utt_id.size()));
    WriteRaw<uint32_t>(out, static_cast<uint32_t>(utt.features.rows()));
    WriteRaw<uint64_t>(out, offset);
    offset += static_cast<uint64_t>(utt.features.size());
  }
  for (const Utterance& utt : utterances) {
    for (int i = 0; i < utt.features.size(); ++i) {
      WriteRaw<float>(out, static_cast<float>(utt.features[i]));
    }
  }
  out.flush();
  Check(out.good(), "features: write failed for ", path);
}

void LoadFeaturesInto(const std::string& path, uint64_t vocab_hash,
                      std::vector<Utterance>* utterances) {
  Check(utterances != nullptr, "features: null utterance list");
  std::ifstream in(path, std::ios::binary);
  Check(in.good(), "features: cannot read ", path);
  char magic[sizeof(kFeatMagic)];
  in.read(magic, sizeof(magic));
  Check(in.good() && std::memcmp(magic, kFeatMagic, sizeof(kFeatMagic)) == 0, "feature file ",
        path, ": bad magic (not a feature file?)");
  const auto version = ReadRaw<uint32_t>(in, path, "version");
  Check(version == kFeatVersion, "feature file ", path, ": unsupported version ", version);
  const auto d_feat = ReadRaw<uint32_t>(in, path, "d_feat");
  const auto stored_hash = ReadRaw<uint64_t>(in, path, "vocab hash");
  Check(stored_hash == vocab_hash, "feature file ", path,
        ": vocab hash mismatch (features were synthesized for a different vocab)");
  const auto count = ReadRaw<uint64_t>(in, path, "utterance count");
  Check(count <= (1u << 24), "feature file ", path, ": implausible utterance count ", count);

  struct Entry {
    uint32_t frames;
    uint64_t offset;
  };
  std::map<std::string, Entry> table;
  for (uint64_t i = 0; i < count; ++i) {
    const auto name_len = ReadRaw<uint32_t>(in, path, "utt_id length");
    Check(name_len <= (1u << 16), "feature file ", path, ": implausible utt_id length");
    std::string utt_id(name_len, '\0');
    in.read(utt_id.data(), name_len);
    Check(in.good(), "feature file ", path, ": truncated while reading utt_id");
    const auto frames = ReadRaw<uint32_t>(in, path, "frame count");
    const auto offset = ReadRaw<uint64_t>(in, path, "offset");
    Check(table.emplace(std::move(utt_id), Entry{frames, offset}).second, "feature file ",
          path, ": duplicate utt_id in table");
  }
  const std::streampos data_start = in.tellg();

  for (Utterance& utt : *utterances) {
    const auto it = table.find(utt.utt_id);
    Check(it != table.end(), "feature file ", path, ": no features for utterance ",
          utt.utt_id);
    const Entry& e = it->second;
    in.seekg(data_start + static_cast<std::streamoff>(e.offset * sizeof(float)));
    Tensor f(static_cast<int>(e.frames), static_cast<int>(d_feat));
    for (int k = 0; k < f.size(); ++k) {
      f[k] = static_cast<double>(ReadRaw<float>(in, path, "frame values"));
    }
    utt.features = std::move(f);
  }
}

void WriteTextSet(const std::string& path, const std::vector<std::vector<int>>& sequences,
                  const Vocab& vocab) {
  std::ofstream out(path);
  Check(out.good(), "text set: cannot write ", path);
  for (const std::vector<int>& seq : sequences) {
    out << nlohmann::json{{"tokens", SymbolsFromTokens(seq, vocab)}}.dump() << '\n';
  }
  out.flush();
  Check(out.good(), "text set: write failed for ", path);
}

std::vector<std::vector<int>> ReadTextSet(const std::string& path, const Vocab& vocab) {
  std::ifstream in(path);
  Check(in.good(), "text set: cannot read ", path);
  std::vector<std::vector<int>> seqs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      Fail("text set ", path, ":", line_no, ": bad JSON: ", e.what());
    }
    const std::string where = StrCat("text set ", path, ":", line_no);
    Check(rec.contains("tokens"), where, ": need tokens");
    seqs.push_back(TokensFromSymbols(rec.at("tokens"), vocab, where));
  }
  return seqs;
}

namespace {

std::vector<std::vector<int>> TokensOnly(const std::vector<Utterance>& utts) {
  std::vector<std::vector<int>> seqs;
  seqs.reserve(utts.size());
  for (const Utterance& u : utts) seqs.push_back(u.tokens);
  return seqs;
}

std::vector<std::vector<int>> Merge(const std::vector<std::vector<int>>& a,
                                    const std::vector<std::vector<int>>& b) {
  std::vector<std::vector<int>> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// One ASR split: transcripts + synthesized features, utt_ids prefixed with
// the split name so no two files share ids.
nlohmann::json WriteSplit(const std::string& dir, const std::string& split,
                          const CorpusSpec& spec, const Vocab& vocab, const Tensor& codebook) {
  std::vector<Utterance> utts = GenerateTranscripts(spec, vocab);
  SynthesizeCorpusFeatures(spec, codebook, &utts);
  for (Utterance& u : utts) u.utt_id = StrCat(split, "-", u.utt_id);
  const std::string transcripts = dir + "/" + split + ".jsonl";
  const std::string features = dir + "/" + split + ".feats";
  WriteTranscripts(transcripts, utts, vocab);
  WriteFeatures(features, utts, spec.d_feat, vocab.Hash());
  return {{"transcripts", split + ".jsonl"},
          {"features", split + ".feats"},
          {"utterances", spec.utterances},
          {"domain", spec.domain},
          {"spec", SpecToJson(spec)}};
}

nlohmann::json WriteLmSet(const std::string& dir, const std::string& name,
                          const std::vector<std::vector<int>>& seqs, const Vocab& vocab,
                          const std::string& note) {
  WriteTextSet(dir + "/lm/" + name + ".jsonl", seqs, vocab);
  return {{"path", "lm/" + name + ".jsonl"},
          {"sequences", seqs.size()},
          {"note", note}};
}

int Scaled(int base, double scale) {
  const int n = static_cast<int>(base * scale);
  return std::max(4, n);
}

}  // namespace

nlohmann::json WriteDataset(const DatasetPreset& preset, const std::string& out_dir) {
  Check(preset.scale > 0.0, "dataset: scale must be positive, got ", preset.scale);
  Check(preset.noise_sigma >= 0.0, "dataset: noise_sigma must be >= 0");
  const bool smoke = preset.name == "smoke";
  const bool crossdomain = preset.name == "crossdomain";
  const bool multilingual = preset.name == "multilingual";
  Check(smoke || crossdomain || multilingual, "dataset: unknown preset \"", preset.name,
        "\" (want smoke, crossdomain or multilingual)");

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  fs::create_directories(out_dir + "/lm");

  // Base layout shared by every spec in the dataset.
  CorpusSpec base;
  base.seed = preset.seed;
  base.noise_sigma = preset.noise_sigma;
  if (smoke) {
    base.lang_a_size = 6;
    base.lang_b_size = 4;
    base.min_len = 2;
    base.max_len = 5;
    base.len_geometric = 0.5;
  }
  const Vocab vocab = BuildVocabForSpec(base);
  const Tensor codebook = BuildCodebook(vocab, base.d_feat, preset.seed);
  vocab.Save(out_dir + "/vocab.json");

  auto derived = [&](const std::string& tag, int domain, double mix, double persistence,
                     double tilt, int utterances) {
    CorpusSpec s = base;
    s.seed = Rng::DeriveSeed(preset.seed, tag);
    s.domain = domain;
    s.mix_ratio = mix;
    s.persistence = persistence;
    s.tilt_a = tilt;
    s.tilt_b = tilt;
    s.utterances = Scaled(utterances, preset.scale);
    return s;
  };

  nlohmann::json splits = nlohmann::json::object();
  nlohmann::json lm_sets = nlohmann::json::object();

  if (smoke) {
    const CorpusSpec train = derived("asr_train", 1, 0.8, 0.6, 0.3, 12);
    splits["asr_train"] = WriteSplit(out_dir, "asr_train", train, vocab, codebook);
    splits["asr_valid"] =
        WriteSplit(out_dir, "asr_valid", derived("asr_valid", 1, 0.8, 0.6, 0.3, 4), vocab,
                   codebook);
    splits["tune"] =
        WriteSplit(out_dir, "tune", derived("tune", 1, 0.8, 0.6, 0.3, 4), vocab, codebook);
    splits["test"] =
        WriteSplit(out_dir, "test", derived("test", 1, 0.8, 0.6, 0.3, 4), vocab, codebook);
    const auto lm_text = GenerateTranscripts(derived("lm_text", 1, 0.8, 0.6, 0.3, 20), vocab);
    lm_sets["lm1"] = WriteLmSet(out_dir, "lm1", TokensOnly(lm_text), vocab, "in-domain text");
    const auto lm_valid =
        GenerateTranscripts(derived("lm_valid", 1, 0.8, 0.6, 0.3, 8), vocab);
    lm_sets["lm_valid"] =
        WriteLmSet(out_dir, "lm_valid", TokensOnly(lm_valid), vocab, "held-out text");
  } else if (crossdomain) {
    // Domain 1 plays the SEAME-like role (mix 0.83), domain 2 the
    // ASRU-like one (mix 0.97). ASR trains on domain 1; tune/test are
    // domain 2, so decoding faces a domain shift.
    const double kTilt = 0.6;
    splits["asr_train"] = WriteSplit(
        out_dir, "asr_train", derived("asr_train", 1, 0.83, 0.7, kTilt, 150), vocab, codebook);
    splits["asr_valid"] = WriteSplit(
        out_dir, "asr_valid", derived("asr_valid", 1, 0.83, 0.7, kTilt, 24), vocab, codebook);
    splits["tune"] =
        WriteSplit(out_dir, "tune", derived("tune", 2, 0.97, 0.7, kTilt, 24), vocab, codebook);
    splits["test"] =
        WriteSplit(out_dir, "test", derived("test", 2, 0.97, 0.7, kTilt, 40), vocab, codebook);

    const auto d1 =
        TokensOnly(GenerateTranscripts(derived("lm_d1", 1, 0.83, 0.7, kTilt, 200), vocab));
    const auto d2 =
        TokensOnly(GenerateTranscripts(derived("lm_d2", 2, 0.97, 0.7, kTilt, 200), vocab));
    const auto extra_a =
        TokensOnly(GenerateTranscripts(derived("lm_mono_a", 0, 1.0, 1.0, 0.0, 100), vocab));
    const auto extra_b =
        TokensOnly(GenerateTranscripts(derived("lm_mono_b", 0, 0.0, 1.0, 0.0, 100), vocab));
    const auto extra = Merge(extra_a, extra_b);

    lm_sets["lm1"] = WriteLmSet(out_dir, "lm1", d1, vocab, "domain-1 CS text");
    lm_sets["lm2"] =
        WriteLmSet(out_dir, "lm2", Merge(d1, extra), vocab, "domain-1 CS + monolingual extra");
    lm_sets["lm3"] = WriteLmSet(out_dir, "lm3", d2, vocab, "domain-2 CS text");
    lm_sets["lm4"] =
        WriteLmSet(out_dir, "lm4", Merge(d2, extra), vocab, "domain-2 CS + monolingual extra");
    lm_sets["lm5"] = WriteLmSet(out_dir, "lm5", Merge(d1, d2), vocab, "merged CS text");
    lm_sets["lm6"] = WriteLmSet(out_dir, "lm6", Merge(Merge(d1, d2), extra), vocab,
                                "merged CS + monolingual extra");
    const auto lm_valid =
        TokensOnly(GenerateTranscripts(derived("lm_valid", 2, 0.97, 0.7, kTilt, 40), vocab));
    lm_sets["lm_valid"] =
        WriteLmSet(out_dir, "lm_valid", lm_valid, vocab, "held-out domain-2 text");
  } else {  // multilingual
    // Monolingual-only training utterances (persistence 1 never switches
    // inside an utterance); validation/tune/test are code-switched.
    const double kTilt = 0.3;
    splits["asr_train"] = WriteSplit(
        out_dir, "asr_train", derived("asr_train", 1, 0.5, 1.0, kTilt, 150), vocab, codebook);
    splits["asr_valid"] = WriteSplit(
        out_dir, "asr_valid", derived("asr_valid", 1, 0.5, 0.3, kTilt, 24), vocab, codebook);
    splits["tune"] =
        WriteSplit(out_dir, "tune", derived("tune", 1, 0.5, 0.3, kTilt, 24), vocab, codebook);
    splits["test"] =
        WriteSplit(out_dir, "test", derived("test", 1, 0.5, 0.3, kTilt, 40), vocab, codebook);

    const auto cs =
        TokensOnly(GenerateTranscripts(derived("lm_cs", 1, 0.5, 0.3, kTilt, 200), vocab));
    lm_sets["lm_cs"] = WriteLmSet(out_dir, "lm_cs", cs, vocab, "code-switched text");
    const auto lm_valid =
        TokensOnly(GenerateTranscripts(derived("lm_valid", 1, 0.5, 0.3, kTilt, 40), vocab));
    lm_sets["lm_valid"] =
        WriteLmSet(out_dir, "lm_valid", lm_valid, vocab, "held-out code-switched text");
  }

  nlohmann::json manifest = {{"preset", preset.name},
                             {"seed", preset.seed},
                             {"scale", preset.scale},
                             {"noise_sigma", preset.noise_sigma},
                             {"vocab", "vocab.json"},
                             {"vocab_hash", vocab.Hash()},
                             {"d_feat", base.d_feat},
                             {"frames_per_token", base.frames_per_token},
                             {"splits", splits},
                             {"lm_sets", lm_sets}};
  std::ofstream out(out_dir + "/manifest.json");
  Check(out.good(), "dataset: cannot write manifest");
  out << manifest.dump(2) << '\n';
  out.flush();
  Check(out.good(), "dataset: manifest write failed");
  return manifest;
}

}  // namespace ilmefuse
