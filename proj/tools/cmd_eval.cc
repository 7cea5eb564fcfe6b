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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include "cli_util.h"
#include "commands.h"
#include "ilmefuse/common.h"
#include "ilmefuse/evalkit.h"

namespace ilmefuse {
namespace cli {

namespace {

// utt_id -> top-1 token sequence from a decode output.
std::map<std::string, std::vector<int>> ReadNbestTop1(const std::string& path) {
  std::ifstream in(path);
  Check(in.good(), "eval: cannot read nbest file ", path);
  std::map<std::string, std::vector<int>> top1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      Fail("nbest ", path, ":", line_no, ": bad JSON: ", e.what());
    }
    Check(rec.contains("utt_id") && rec.contains("nbest"), "nbest ", path, ":", line_no,
          ": need utt_id and nbest");
    const std::string utt_id = rec.at("utt_id").get<std::string>();
    const nlohmann::json& nbest = rec.at("nbest");
    Check(nbest.is_array() && !nbest.empty(), "nbest ", path, ":", line_no,
          ": empty n-best list");
    std::vector<int> tokens = nbest.at(0).at("tokens").get<std::vector<int>>();
    Check(top1.emplace(utt_id, std::move(tokens)).second, "nbest ", path, ":", line_no,
          ": duplicate utt_id \"", utt_id, "\"");
  }
  return top1;
}

void AppendMetric(std::string* csv, const char* metric, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  csv->append(metric);
  csv->push_back(',');
  csv->append(buf);
  csv->push_back('\n');
}

}  // namespace

void CmdEval(const nlohmann::json& config) {
  CheckKeys(config, "eval",
            {"data_dir", "out_dir", "split", "nbest", "pooling", "lm_checkpoint", "text",
             "skip_infinite"});
  const std::string data_dir = RequireString(config, "data_dir", "eval");
  const std::string out_dir = RequireString(config, "out_dir", "eval");
  const std::string split = GetString(config, "split", "test");
  const std::string nbest_path = GetString(config, "nbest", "");
  const std::string pooling_name = GetString(config, "pooling", "pooled");
  const std::string lm_path = GetString(config, "lm_checkpoint", "");
  const std::string text = GetString(config, "text", "");
  const bool skip_infinite = GetBool(config, "skip_infinite", false);
  Check(!nbest_path.empty() || !lm_path.empty(),
        "eval: nothing to do (give an nbest file, an lm_checkpoint, or both)");

  MerPooling pooling = MerPooling::kPooled;
  if (pooling_name == "per_utterance_average") {
    pooling = MerPooling::kPerUtteranceAverage;
  } else {
    Check(pooling_name == "pooled", "eval: pooling must be pooled or per_utterance_average");
  }

  const Dataset ds = Dataset::Open(data_dir);
  std::filesystem::create_directories(out_dir);
  std::string csv = "metric,value\n";
  nlohmann::json report = nlohmann::json::object();

  if (!nbest_path.empty()) {
    const std::vector<Utterance> refs = ds.LoadTranscripts(split);
    const std::map<std::string, std::vector<int>> top1 = ReadNbestTop1(nbest_path);
    std::vector<MixedTokenSeq> ref_seqs;
    std::vector<MixedTokenSeq> hyp_seqs;
    ref_seqs.reserve(refs.size());
    hyp_seqs.reserve(refs.size());
    for (const Utterance& ref : refs) {
      const auto it = top1.find(ref.utt_id);
      Check(it != top1.end(), "eval: nbest file has no hypothesis for utterance ",
            ref.utt_id);
      ref_seqs.push_back(ToMixedSeq(ref.tokens, ds.vocab));
      hyp_seqs.push_back(ToMixedSeq(it->second, ds.vocab));
    }
    const MerReport mer = MerCorpus(ref_seqs, hyp_seqs, pooling);
    AppendMetric(&csv, "mer", mer.mer);
    AppendMetric(&csv, "substitutions", static_cast<double>(mer.substitutions));
    AppendMetric(&csv, "insertions", static_cast<double>(mer.insertions));
    AppendMetric(&csv, "deletions", static_cast<double>(mer.deletions));
    AppendMetric(&csv, "ref_len", static_cast<double>(mer.ref_len));
    const double char_mer =
        mer.char_like.ref_len == 0
            ? 0.0
            : static_cast<double>(mer.char_like.substitutions + mer.char_like.insertions +
                                  mer.char_like.deletions) /
                  static_cast<double>(mer.char_like.ref_len);
    const double word_mer =
        mer.word_like.ref_len == 0
            ? 0.0
            : static_cast<double>(mer.word_like.substitutions + mer.word_like.insertions +
                                  mer.word_like.deletions) /
                  static_cast<double>(mer.word_like.ref_len);
    AppendMetric(&csv, "mer_char_like", char_mer);
    AppendMetric(&csv, "mer_word_like", word_mer);
    AppendMetric(&csv, "utterances", static_cast<double>(ref_seqs.size()));
    report["mer"] = mer.mer;
    report["utterances"] = ref_seqs.size();
  }

  if (!lm_path.empty()) {
    const LmModel lm = LoadLmModel(lm_path, ds.vocab);
    const std::vector<std::vector<int>> seqs =
        text.empty() ? TokensOnly(ds.LoadTranscripts(split)) : ds.LoadTextSet(text);
    const PerplexityReport ppl = Perplexity(
        [&lm](const std::vector<int>& tokens) { return LmSequenceLogProb(lm, tokens); },
        seqs, skip_infinite);
    AppendMetric(&csv, "perplexity", ppl.perplexity);
    AppendMetric(&csv, "predicted_tokens", static_cast<double>(ppl.predicted_tokens));
    AppendMetric(&csv, "skipped_sequences", static_cast<double>(ppl.skipped_sequences));
    report["perplexity"] = ppl.perplexity;
  }

  const std::string csv_path = out_dir + "/eval.csv";
  std::ofstream out(csv_path);
  Check(out.good(), "eval: cannot write ", csv_path);
  out << csv;
  out.flush();
  Check(out.good(), "eval: write failed for ", csv_path);

  const nlohmann::json resolved = {
      {"data_dir", data_dir},   {"out_dir", out_dir}, {"split", split},
      {"nbest", nbest_path},    {"pooling", pooling_name},
      {"lm_checkpoint", lm_path}, {"text", text},     {"skip_infinite", skip_infinite}};
  WriteResolvedConfig(out_dir, "eval", resolved);

  std::string summary = "eval:";
  if (report.contains("mer")) {
    summary += StrCat(" mer ", report["mer"].get<double>());
  }
  if (report.contains("perplexity")) {
    summary += StrCat(" perplexity ", report["perplexity"].get<double>());
  }
  std::printf("%s -> %s\n", summary.c_str(), csv_path.c_str());
}

}  // namespace cli
}  // namespace ilmefuse
