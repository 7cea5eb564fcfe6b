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

#include "cli_util.h"

#include <atomic>
#include <exception>
#include <filesystem>
#include <mutex>
#include <thread>

#include "ilmefuse/common.h"

namespace ilmefuse {
namespace cli {

nlohmann::json ResolveConfig(const std::string& config_path,
                             const std::vector<std::string>& overrides) {
  nlohmann::json config = nlohmann::json::object();
  if (!config_path.empty()) {
    config = LoadJsonFile(config_path);
    Check(config.is_object(), "config ", config_path, ": top level must be an object");
  }
  for (const std::string& assignment : overrides) {
    ApplyDottedOverride(&config, assignment);
  }
  return config;
}

void WriteResolvedConfig(const std::string& out_dir, const std::string& command,
                         const nlohmann::json& resolved) {
  std::filesystem::create_directories(out_dir);
  nlohmann::json wrapped = resolved;
  wrapped["command"] = command;
  SaveJsonFile(out_dir + "/resolved_config.json", wrapped);
}

Dataset Dataset::Open(const std::string& dir) {
  Dataset ds;
  ds.dir = dir;
  ds.manifest = LoadJsonFile(dir + "/manifest.json");
  ds.vocab = Vocab::Load(dir + "/" + ds.manifest.value("vocab", "vocab.json"));
  const uint64_t stored = ds.manifest.value("vocab_hash", uint64_t{0});
  Check(stored == ds.vocab.Hash(), "dataset ", dir,
        ": manifest vocab hash does not match vocab.json");
  return ds;
}

int Dataset::d_feat() const { return GetInt(manifest, "d_feat", 16); }

const nlohmann::json& Dataset::Split(const std::string& name) const {
  Check(manifest.contains("splits") && manifest["splits"].contains(name), "dataset ", dir,
        ": no split named \"", name, "\"");
  return manifest["splits"][name];
}

std::vector<Utterance> Dataset::LoadSplit(const std::string& name) const {
  const nlohmann::json& split = Split(name);
  std::vector<Utterance> utts =
      ReadTranscripts(dir + "/" + split.at("transcripts").get<std::string>(), vocab);
  LoadFeaturesInto(dir + "/" + split.at("features").get<std::string>(), vocab.Hash(), &utts);
  return utts;
}

std::vector<Utterance> Dataset::LoadTranscripts(const std::string& name) const {
  const nlohmann::json& split = Split(name);
  return ReadTranscripts(dir + "/" + split.at("transcripts").get<std::string>(), vocab);
}

std::vector<std::vector<int>> Dataset::LoadTextSet(const std::string& name) const {
  Check(manifest.contains("lm_sets") && manifest["lm_sets"].contains(name), "dataset ", dir,
        ": no LM text set named \"", name, "\"");
  return ReadTextSet(dir + "/" + manifest["lm_sets"][name].at("path").get<std::string>(),
                     vocab);
}

std::vector<TrainUtterance> ToTrainUtterances(const std::vector<Utterance>& utts) {
  std::vector<TrainUtterance> out;
  out.reserve(utts.size());
  for (const Utterance& u : utts) {
    Check(u.features.rows() > 0, "utterance ", u.utt_id, ": no features loaded");
    out.push_back(TrainUtterance{u.utt_id, u.tokens, u.features});
  }
  return out;
}

std::vector<std::vector<int>> TokensOnly(const std::vector<Utterance>& utts) {
  std::vector<std::vector<int>> out;
  out.reserve(utts.size());
  for (const Utterance& u : utts) out.push_back(u.tokens);
  return out;
}

FusionConfig FusionFromJson(const nlohmann::json& j) {
  CheckKeys(j, "fusion config",
            {"lambda_lm", "lambda_ilm", "ctc_weight", "ilm_target", "beam_size",
             "max_len_ratio", "length_penalty"});
  FusionConfig c;
  c.lambda_lm = GetDouble(j, "lambda_lm", c.lambda_lm);
  c.lambda_ilm = GetDouble(j, "lambda_ilm", c.lambda_ilm);
  c.ctc_weight = GetDouble(j, "ctc_weight", c.ctc_weight);
  c.ilm_target = IlmTargetFromName(GetString(j, "ilm_target", IlmTargetName(c.ilm_target)));
  c.beam_size = GetInt(j, "beam_size", c.beam_size);
  c.max_len_ratio = GetDouble(j, "max_len_ratio", c.max_len_ratio);
  c.length_penalty = GetDouble(j, "length_penalty", c.length_penalty);
  c.Validate();
  return c;
}

nlohmann::json FusionToJson(const FusionConfig& c) {
  return {{"lambda_lm", c.lambda_lm},
          {"lambda_ilm", c.lambda_ilm},
          {"ctc_weight", c.ctc_weight},
          {"ilm_target", IlmTargetName(c.ilm_target)},
          {"beam_size", c.beam_size},
          {"max_len_ratio", c.max_len_ratio},
          {"length_penalty", c.length_penalty}};
}

AsrConfig AsrConfigFromJson(const nlohmann::json& j, int d_feat, int vocab_size) {
  CheckKeys(j, "model config",
            {"d_model", "heads", "ffn", "enc_blocks", "dec_blocks", "subsample", "dropout"});
  AsrConfig c;
  c.d_feat = d_feat;
  c.d_model = GetInt(j, "d_model", c.d_model);
  c.heads = GetInt(j, "heads", c.heads);
  c.ffn = GetInt(j, "ffn", c.ffn);
  c.enc_blocks = GetInt(j, "enc_blocks", c.enc_blocks);
  c.dec_blocks = GetInt(j, "dec_blocks", c.dec_blocks);
  c.subsample = GetInt(j, "subsample", c.subsample);
  c.dropout = GetDouble(j, "dropout", c.dropout);
  c.vocab_size = vocab_size;
  c.Validate();
  return c;
}

nlohmann::json AsrConfigToJson(const AsrConfig& c) {
  return {{"d_feat", c.d_feat},     {"d_model", c.d_model},
          {"heads", c.heads},       {"ffn", c.ffn},
          {"enc_blocks", c.enc_blocks}, {"dec_blocks", c.dec_blocks},
          {"subsample", c.subsample},   {"dropout", c.dropout},
          {"vocab_size", c.vocab_size}};
}

LmConfig LmConfigFromJson(const nlohmann::json& j, int vocab_size) {
  CheckKeys(j, "model config", {"d_model", "heads", "ffn", "blocks", "dropout"});
  LmConfig c;
  c.d_model = GetInt(j, "d_model", c.d_model);
  c.heads = GetInt(j, "heads", c.heads);
  c.ffn = GetInt(j, "ffn", c.ffn);
  c.blocks = GetInt(j, "blocks", c.blocks);
  c.dropout = GetDouble(j, "dropout", c.dropout);
  c.vocab_size = vocab_size;
  c.Validate();
  return c;
}

nlohmann::json LmConfigToJson(const LmConfig& c) {
  return {{"d_model", c.d_model}, {"heads", c.heads},         {"ffn", c.ffn},
          {"blocks", c.blocks},   {"dropout", c.dropout},     {"vocab_size", c.vocab_size}};
}

TrainSchedule ScheduleFromJson(const nlohmann::json& j, uint64_t seed) {
  CheckKeys(j, "schedule config",
            {"epochs", "batch_size", "warmup_steps", "lr_factor", "dropout", "ctc_weight",
             "average_top_k"});
  TrainSchedule s;
  s.epochs = GetInt(j, "epochs", s.epochs);
  s.batch_size = GetInt(j, "batch_size", s.batch_size);
  s.warmup_steps = GetInt(j, "warmup_steps", s.warmup_steps);
  s.lr_factor = GetDouble(j, "lr_factor", s.lr_factor);
  s.dropout = GetDouble(j, "dropout", s.dropout);
  s.ctc_weight = GetDouble(j, "ctc_weight", s.ctc_weight);
  s.average_top_k = GetInt(j, "average_top_k", s.average_top_k);
  s.seed = seed;
  s.Validate();
  return s;
}

nlohmann::json ScheduleToJson(const TrainSchedule& s) {
  return {{"epochs", s.epochs},
          {"batch_size", s.batch_size},
          {"warmup_steps", s.warmup_steps},
          {"lr_factor", s.lr_factor},
          {"dropout", s.dropout},
          {"ctc_weight", s.ctc_weight},
          {"average_top_k", s.average_top_k}};
}

void SaveAsrCheckpoint(const std::string& path, const AsrModel& model,
                       const ParamStore& params, const nlohmann::json& extra) {
  CheckpointMeta meta;
  meta.kind = "asr";
  meta.vocab_hash = model.vocab.Hash();
  meta.arch = AsrConfigToJson(model.cfg);
  meta.extra = extra;
  SaveCheckpoint(path, meta, params);
}

namespace {

// A loaded parameter set must cover the freshly built architecture
// exactly: same names, same shapes, nothing extra.
void AdoptParams(ParamStore* into, ParamStore from, const std::string& path) {
  Check(into->size() == from.size(), "checkpoint ", path, ": has ", from.size(),
        " parameters, architecture wants ", into->size());
  for (const auto& [name, param] : *into) {
    Check(from.Has(name), "checkpoint ", path, ": missing parameter \"", name, "\"");
    const Param& loaded = from.Get(name);
    Check(loaded.value.rows() == param.value.rows() && loaded.value.cols() == param.value.cols(),
          "checkpoint ", path, ": parameter \"", name, "\" is ", loaded.value.rows(), "x",
          loaded.value.cols(), ", architecture wants ", param.value.rows(), "x",
          param.value.cols());
  }
  *into = std::move(from);
}

void CheckVocabHash(const Checkpoint& ckpt, const std::string& path, const Vocab& vocab) {
  Check(ckpt.meta.vocab_hash == vocab.Hash(), "checkpoint ", path,
        ": vocab hash mismatch (model was trained on a different vocab)");
}

}  // namespace

AsrModel LoadAsrModel(const std::string& path, const Vocab& vocab) {
  Checkpoint ckpt = LoadCheckpoint(path);
  Check(ckpt.meta.kind == "asr", "checkpoint ", path, ": kind is \"", ckpt.meta.kind,
        "\", expected \"asr\"");
  CheckVocabHash(ckpt, path, vocab);
  const nlohmann::json& arch = ckpt.meta.arch;
  AsrConfig cfg;
  cfg.d_feat = GetInt(arch, "d_feat", cfg.d_feat);
  cfg.d_model = GetInt(arch, "d_model", cfg.d_model);
  cfg.heads = GetInt(arch, "heads", cfg.heads);
  cfg.ffn = GetInt(arch, "ffn", cfg.ffn);
  cfg.enc_blocks = GetInt(arch, "enc_blocks", cfg.enc_blocks);
  cfg.dec_blocks = GetInt(arch, "dec_blocks", cfg.dec_blocks);
  cfg.subsample = GetInt(arch, "subsample", cfg.subsample);
  cfg.dropout = GetDouble(arch, "dropout", cfg.dropout);
  cfg.vocab_size = vocab.size();
  Check(GetInt(arch, "vocab_size", vocab.size()) == vocab.size(), "checkpoint ", path,
        ": stored vocab size disagrees with the vocab");
  cfg.Validate();
  AsrModel model = AsrModel::NewRandom(cfg, vocab, /*seed=*/0);
  AdoptParams(&model.params, std::move(ckpt.params), path);
  return model;
}

void SaveLmCheckpoint(const std::string& path, const LmModel& model,
                      const ParamStore& params, const nlohmann::json& extra) {
  CheckpointMeta meta;
  meta.kind = "lm";
  meta.vocab_hash = model.vocab.Hash();
  meta.arch = LmConfigToJson(model.cfg);
  meta.extra = extra;
  SaveCheckpoint(path, meta, params);
}

LmModel LoadLmModel(const std::string& path, const Vocab& vocab) {
  Checkpoint ckpt = LoadCheckpoint(path);
  Check(ckpt.meta.kind == "lm", "checkpoint ", path, ": kind is \"", ckpt.meta.kind,
        "\", expected \"lm\"");
  CheckVocabHash(ckpt, path, vocab);
  const nlohmann::json& arch = ckpt.meta.arch;
  LmConfig cfg;
  cfg.d_model = GetInt(arch, "d_model", cfg.d_model);
  cfg.heads = GetInt(arch, "heads", cfg.heads);
  cfg.ffn = GetInt(arch, "ffn", cfg.ffn);
  cfg.blocks = GetInt(arch, "blocks", cfg.blocks);
  cfg.dropout = GetDouble(arch, "dropout", cfg.dropout);
  cfg.vocab_size = vocab.size();
  Check(GetInt(arch, "vocab_size", vocab.size()) == vocab.size(), "checkpoint ", path,
        ": stored vocab size disagrees with the vocab");
  cfg.Validate();
  LmModel model = LmModel::NewRandom(cfg, vocab, /*seed=*/0);
  AdoptParams(&model.params, std::move(ckpt.params), path);
  return model;
}

void SaveIlmCheckpoint(const std::string& path, const IlmParams& ilm, const AsrModel& asr,
                       const nlohmann::json& extra) {
  CheckpointMeta meta;
  meta.kind = "ilm";
  meta.vocab_hash = asr.vocab.Hash();
  meta.arch = {{"method", CrossModeName(ilm.kind)}, {"hidden", ilm.hidden}};
  meta.extra = extra;
  meta.extra["asr_checksum"] = asr.params.Checksum();
  SaveCheckpoint(path, meta, ilm.params);
}

IlmParams LoadIlmParams(const std::string& path, const AsrModel& asr) {
  Checkpoint ckpt = LoadCheckpoint(path);
  Check(ckpt.meta.kind == "ilm", "checkpoint ", path, ": kind is \"", ckpt.meta.kind,
        "\", expected \"ilm\"");
  CheckVocabHash(ckpt, path, asr.vocab);
  const uint64_t trained_for = ckpt.meta.extra.value("asr_checksum", uint64_t{0});
  Check(trained_for == asr.params.Checksum(), "checkpoint ", path,
        ": this internal LM was estimated for a different ASR model");
  IlmParams ilm;
  ilm.kind = CrossModeFromName(RequireString(ckpt.meta.arch, "method", "ilm checkpoint"));
  Check(ilm.kind != CrossMode::kFull, "checkpoint ", path, ": method cannot be \"full\"");
  ilm.hidden = GetInt(ckpt.meta.arch, "hidden", 0);
  // A freshly attached estimator defines the expected parameter set.
  IlmParams expected = AttachIlm(asr, ilm.kind, ilm.hidden, /*seed=*/0);
  ilm.params = expected.params;
  AdoptParams(&ilm.params, std::move(ckpt.params), path);
  return ilm;
}

void ParallelFor(int n, int jobs, const std::function<void(int)>& fn) {
  Check(jobs >= 1, "jobs must be >= 1, got ", jobs);
  if (jobs == 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex mu;
  std::exception_ptr first_error;
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  const int workers = std::min(jobs, n);
  threads.reserve(workers);
  for (int t = 0; t < workers; ++t) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace cli
}  // namespace ilmefuse
