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

#ifndef ILMEFUSE_CORPUS_H_
#define ILMEFUSE_CORPUS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "ilmefuse/rng.h"
#include "ilmefuse/tensor.h"
#include "ilmefuse/vocab.h"
#include "json.hpp"

namespace ilmefuse {

// One synthetic corpus: a two-state Markov language process (LangA
// char_like, LangB word_like) with domain-tilted unigrams inside each
// language, plus codebook-based feature synthesis.
struct CorpusSpec {
  uint64_t seed = 1;
  int lang_a_size = 12;  // char_like symbols (uppercase letters)
  int lang_b_size = 8;   // word_like symbols
  double mix_ratio = 0.8;    // stationary probability of a LangA unit
  double persistence = 0.7;  // probability of staying in the current language
  int domain = 1;            // selects the unigram tilt profile
  double tilt_a = 0.0;       // tilt strength over LangA, 0 = uniform
  double tilt_b = 0.0;
  int utterances = 100;
  int min_len = 3;
  int max_len = 9;
  double len_geometric = 0.7;  // continue probability per extra token
  int frames_per_token = 4;    // r
  double noise_sigma = 0.3;
  int d_feat = 16;

  void Validate() const;
};

struct Utterance {
  std::string utt_id;
  std::vector<int> tokens;  // content token ids
  int domain = 0;
  Tensor features;  // (r * tokens) x d_feat; empty until synthesized
};

// Vocab for a spec's sizes: uppercase letters for LangA, a fixed word list
// for LangB. Char runs can never spell a word, so rendering stays
// unambiguous.
Vocab BuildVocabForSpec(const CorpusSpec& spec);

// Per-token base feature vectors (one row per vocab id, content rows
// populated), entries uniform in [-1, 1] and quantized to float32 so
// synthesized features round-trip the feature file bit-exactly.
Tensor BuildCodebook(const Vocab& vocab, int d_feat, uint64_t seed);

// Exact token distribution inside one language for the spec's domain, in
// ContentIds(cls) order. Pure function of (domain, tilt, size) — the seed
// does not enter, so every split of a domain shares one distribution.
std::vector<double> DomainUnigram(const CorpusSpec& spec, TokenClass cls);

// Transcripts only; features are synthesized separately. Utterance i draws
// from its own derived stream, so a prefix of a bigger corpus is stable.
std::vector<Utterance> GenerateTranscripts(const CorpusSpec& spec, const Vocab& vocab);

// r frames per token: codebook row + sigma * Gaussian noise, quantized to
// float32.
Tensor SynthesizeFeatures(const std::vector<int>& tokens, const CorpusSpec& spec,
                          const Tensor& codebook, Rng* rng);

// Fills every utterance's features from per-utterance derived streams.
void SynthesizeCorpusFeatures(const CorpusSpec& spec, const Tensor& codebook,
                              std::vector<Utterance>* utterances);

// Transcript JSONL: {"utt_id", "tokens": [symbol strings], "domain"}.
void WriteTranscripts(const std::string& path, const std::vector<Utterance>& utterances,
                      const Vocab& vocab);
std::vector<Utterance> ReadTranscripts(const std::string& path, const Vocab& vocab);

// Feature container: magic + version, d_feat, vocab hash, an utt_id/offset
// table, then float32 little-endian frames.
void WriteFeatures(const std::string& path, const std::vector<Utterance>& utterances,
                   int d_feat, uint64_t vocab_hash);
// Attaches features to matching utt_ids; vocab hash mismatch is an error.
void LoadFeaturesInto(const std::string& path, uint64_t vocab_hash,
                      std::vector<Utterance>* utterances);

// LM text sets: JSONL {"tokens": [symbol strings]}.
void WriteTextSet(const std::string& path, const std::vector<std::vector<int>>& sequences,
                  const Vocab& vocab);
std::vector<std::vector<int>> ReadTextSet(const std::string& path, const Vocab& vocab);

// A generated dataset directory: vocab, ASR splits with features, LM text
// sets, and a manifest describing every file.
struct DatasetPreset {
  std::string name;      // smoke | crossdomain | multilingual
  uint64_t seed = 1;
  double scale = 1.0;    // multiplies utterance counts (tests shrink with it)
  double noise_sigma = 0.5;
};

// Writes the dataset under out_dir and returns the manifest that was
// saved as out_dir/manifest.json.
nlohmann::json WriteDataset(const DatasetPreset& preset, const std::string& out_dir);

}  // namespace ilmefuse

#endif  // ILMEFUSE_CORPUS_H_
