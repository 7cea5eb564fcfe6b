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

#include "ilmefuse/train.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>
#include <utility>

#include "ilmefuse/checkpoint.h"

namespace ilmefuse {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.98;
constexpr double kAdamEps = 1e-9;

void AddGrads(std::map<std::string, Tensor>* into, const std::map<std::string, Tensor>& add) {
  for (const auto& [name, g] : add) {
    auto it = into->find(name);
    if (it == into->end()) {
      into->emplace(name, g);
    } else {
      Check(it->second.SameShape(g), "train: gradient shape changed for ", name);
      for (int i = 0; i < g.size(); ++i) it->second[i] += g[i];
    }
  }
}

void ScaleGrads(std::map<std::string, Tensor>* grads, double s) {
  for (auto& [name, g] : *grads) {
    (void)name;
    for (int i = 0; i < g.size(); ++i) g[i] *= s;
  }
}

// Best-validation snapshots, kept sorted by (loss, epoch) so ties resolve
// to the earlier epoch and at most top_k + 1 copies are ever alive.
class SnapshotPool {
 public:
  explicit SnapshotPool(int top_k) : top_k_(top_k) {}

  void Offer(double valid_loss, int epoch, const ParamStore& params) {
    entries_.emplace_back(valid_loss, epoch, params);
    std::stable_sort(entries_.begin(), entries_.end(),
                     [](const Entry& a, const Entry& b) {
                       if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
                       return std::get<1>(a) < std::get<1>(b);
                     });
    if (entries_.size() > static_cast<size_t>(top_k_)) entries_.resize(top_k_);
  }

  ParamStore Average() const {
    std::vector<const ParamStore*> stores;
    stores.reserve(entries_.size());
    for (const auto& e : entries_) stores.push_back(&std::get<2>(e));
    return AverageParamStores(stores);
  }

  bool empty() const { return entries_.empty(); }

 private:
  using Entry = std::tuple<double, int, ParamStore>;
  int top_k_;
  std::vector<Entry> entries_;
};

}  // namespace

void TrainSchedule::Validate() const {
  Check(epochs >= 0, "schedule: epochs must be >= 0, got ", epochs);
  Check(batch_size >= 1, "schedule: batch_size must be >= 1, got ", batch_size);
  Check(warmup_steps >= 1, "schedule: warmup_steps must be >= 1, got ", warmup_steps);
  Check(lr_factor > 0.0, "schedule: lr_factor must be positive, got ", lr_factor);
  Check(dropout >= 0.0 && dropout < 1.0, "schedule: dropout must be in [0, 1), got ", dropout);
  Check(ctc_weight >= 0.0 && ctc_weight <= 1.0,
        "schedule: ctc_weight must be in [0, 1], got ", ctc_weight);
  Check(average_top_k >= 1, "schedule: average_top_k must be >= 1, got ", average_top_k);
}

void LossLog::Append(int epoch, const std::string& split, const std::string& criterion,
                     double loss) {
  entries.push_back({epoch, split, criterion, loss});
}

double LossLog::Find(int epoch, const std::string& split, const std::string& criterion) const {
  for (const auto& e : entries) {
    if (e.epoch == epoch && e.split == split && e.criterion == criterion) return e.loss;
  }
  Fail("loss log: no entry for epoch=", epoch, " split=", split, " criterion=", criterion);
}

void LossLog::WriteCsv(const std::string& path) const {
  std::ofstream out(path);
  Check(out.good(), "loss log: cannot write ", path);
  out << "epoch,split,criterion,loss\n";
  char buf[64];
  for (const auto& e : entries) {
    std::snprintf(buf, sizeof(buf), "%.17g", e.loss);
    out << e.epoch << ',' << e.split << ',' << e.criterion << ',' << buf << '\n';
  }
  out.flush();
  Check(out.good(), "loss log: write failed for ", path);
}

LossLog LossLog::ReadCsv(const std::string& path) {
  std::ifstream in(path);
  Check(in.good(), "loss log: cannot read ", path);
  std::string line;
  Check(static_cast<bool>(std::getline(in, line)), "loss log ", path, ": empty file");
  Check(line == "epoch,split,criterion,loss", "loss log ", path, ": unexpected header '", line, "'");
  LossLog log;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string epoch_s, split, criterion, loss_s;
    const bool ok = static_cast<bool>(std::getline(row, epoch_s, ',')) &&
                    static_cast<bool>(std::getline(row, split, ',')) &&
                    static_cast<bool>(std::getline(row, criterion, ',')) &&
                    static_cast<bool>(std::getline(row, loss_s));
    Check(ok, "loss log ", path, ": malformed row '", line, "'");
    try {
      log.entries.push_back({std::stoi(epoch_s), split, criterion, std::stod(loss_s)});
    } catch (const std::exception&) {
      Fail("loss log ", path, ": malformed row '", line, "'");
    }
  }
  return log;
}

AdamNoam::AdamNoam(int d_model, double factor, int warmup_steps)
    : d_model_(d_model), factor_(factor), warmup_(warmup_steps) {
  Check(d_model >= 1, "optimizer: d_model must be positive, got ", d_model);
  Check(factor > 0.0, "optimizer: lr factor must be positive, got ", factor);
  Check(warmup_steps >= 1, "optimizer: warmup_steps must be >= 1, got ", warmup_steps);
}

double AdamNoam::LearningRate(int step) const {
  Check(step >= 1, "optimizer: step index starts at 1, got ", step);
  const double s = static_cast<double>(step);
  return factor_ * std::pow(static_cast<double>(d_model_), -0.5) *
         std::min(std::pow(s, -0.5), s * std::pow(static_cast<double>(warmup_), -1.5));
}

void AdamNoam::Step(ParamStore* store, const std::map<std::string, Tensor>& grads) {
  Check(store != nullptr, "optimizer: null store");
  ++step_;
  const double lr = LearningRate(step_);
  const double bc1 = 1.0 - std::pow(kBeta1, step_);
  const double bc2 = 1.0 - std::pow(kBeta2, step_);
  for (const auto& [name, g] : grads) {
    Check(store->Has(name), "optimizer: gradient for unknown parameter '", name, "'");
    Param& p = store->GetMutable(name);
    Check(p.trainable, "optimizer: parameter '", name, "' is frozen but received a gradient");
    Check(g.SameShape(p.value), "optimizer: gradient shape mismatch for '", name, "'");
    auto it = moments_.find(name);
    if (it == moments_.end()) {
      it = moments_
               .emplace(name, std::make_pair(Tensor(g.rows(), g.cols()),
                                             Tensor(g.rows(), g.cols())))
               .first;
    }
    Tensor& m = it->second.first;
    Tensor& v = it->second.second;
    for (int i = 0; i < g.size(); ++i) {
      m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g[i];
      v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g[i] * g[i];
      p.value[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + kAdamEps);
    }
  }
}

TrainResult TrainAsr(AsrModel* model, const std::vector<TrainUtterance>& train,
                     const std::vector<TrainUtterance>& valid, const TrainSchedule& schedule) {
  Check(model != nullptr, "train_asr: null model");
  model->cfg.Validate();
  schedule.Validate();

  TrainResult result;
  if (schedule.epochs == 0) {
    result.averaged = model->params;
    return result;
  }
  Check(!train.empty(), "train_asr: training set is empty");
  Check(!valid.empty(), "train_asr: validation set is empty");

  const std::vector<std::string> names = model->params.Names();
  AdamNoam opt(model->cfg.d_model, schedule.lr_factor, schedule.warmup_steps);
  Rng shuffle_rng(Rng::DeriveSeed(schedule.seed, "asr.shuffle"));
  Rng dropout_rng(Rng::DeriveSeed(schedule.seed, "asr.dropout"));
  SnapshotPool best(schedule.average_top_k);

  std::vector<int> order(train.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

  for (int epoch = 1; epoch <= schedule.epochs; ++epoch) {
    shuffle_rng.Shuffle(&order);
    double train_ctc = 0.0;
    double train_att = 0.0;
    for (size_t start = 0; start < order.size();
         start += static_cast<size_t>(schedule.batch_size)) {
      const size_t end = std::min(order.size(), start + schedule.batch_size);
      std::map<std::string, Tensor> grads;
      for (size_t k = start; k < end; ++k) {
        const TrainUtterance& utt = train[order[k]];
        Tape tape;
        TrainCtx ctx{&dropout_rng, schedule.dropout};
        AsrLossVars losses;
        try {
          losses =
              BuildAsrLoss(&tape, *model, utt.features, utt.tokens, schedule.ctc_weight, &ctx);
        } catch (const Error& e) {
          Fail("train_asr: utterance '", utt.utt_id, "': ", e.what());
        }
        const double joint = losses.joint.value().at(0, 0);
        Check(std::isfinite(joint), "train_asr: diverged at step ", opt.steps() + 1,
              " on utterance '", utt.utt_id, "' (loss = ", joint, ")");
        train_ctc += losses.ctc.value().at(0, 0);
        train_att += losses.att.value().at(0, 0);
        AddGrads(&grads, tape.Gradients(losses.joint, names));
      }
      ScaleGrads(&grads, 1.0 / static_cast<double>(end - start));
      opt.Step(&model->params, grads);
    }
    train_ctc /= static_cast<double>(train.size());
    train_att /= static_cast<double>(train.size());

    double valid_ctc = 0.0;
    double valid_att = 0.0;
    for (const TrainUtterance& utt : valid) {
      Tape tape;
      AsrLossVars losses;
      try {
        losses = BuildAsrLoss(&tape, *model, utt.features, utt.tokens, schedule.ctc_weight,
                              nullptr);
      } catch (const Error& e) {
        Fail("train_asr: validation utterance '", utt.utt_id, "': ", e.what());
      }
      valid_ctc += losses.ctc.value().at(0, 0);
      valid_att += losses.att.value().at(0, 0);
    }
    valid_ctc /= static_cast<double>(valid.size());
    valid_att /= static_cast<double>(valid.size());

    result.log.Append(epoch, "train", "ctc", train_ctc);
    result.log.Append(epoch, "train", "att", train_att);
    result.log.Append(epoch, "valid", "ctc", valid_ctc);
    result.log.Append(epoch, "valid", "att", valid_att);

    const double valid_joint =
        schedule.ctc_weight * valid_ctc + (1.0 - schedule.ctc_weight) * valid_att;
    Check(std::isfinite(valid_joint), "train_asr: non-finite validation loss after epoch ",
          epoch);
    best.Offer(valid_joint, epoch, model->params);
  }

  result.averaged = best.Average();
  return result;
}

TrainResult TrainLm(LmModel* model, const std::vector<std::vector<int>>& train,
                    const std::vector<std::vector<int>>& valid, const TrainSchedule& schedule) {
  Check(model != nullptr, "train_lm: null model");
  model->cfg.Validate();
  schedule.Validate();

  TrainResult result;
  if (schedule.epochs == 0) {
    result.averaged = model->params;
    return result;
  }
  Check(!train.empty(), "train_lm: training text is empty");
  Check(!valid.empty(), "train_lm: validation text is empty");

  const std::vector<std::string> names = model->params.Names();
  AdamNoam opt(model->cfg.d_model, schedule.lr_factor, schedule.warmup_steps);
  Rng shuffle_rng(Rng::DeriveSeed(schedule.seed, "lm.shuffle"));
  Rng dropout_rng(Rng::DeriveSeed(schedule.seed, "lm.dropout"));
  SnapshotPool best(schedule.average_top_k);

  std::vector<int> order(train.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

  for (int epoch = 1; epoch <= schedule.epochs; ++epoch) {
    shuffle_rng.Shuffle(&order);
    double train_nll = 0.0;
    double train_tokens = 0.0;
    for (size_t start = 0; start < order.size();
         start += static_cast<size_t>(schedule.batch_size)) {
      const size_t end = std::min(order.size(), start + schedule.batch_size);
      std::map<std::string, Tensor> grads;
      for (size_t k = start; k < end; ++k) {
        const std::vector<int>& tokens = train[order[k]];
        Check(!tokens.empty(), "train_lm: sequence ", order[k], " is empty");
        Tape tape;
        TrainCtx ctx{&dropout_rng, schedule.dropout};
        Var loss = BuildLmLoss(&tape, *model, tokens, &ctx);
        const double nll = loss.value().at(0, 0);
        Check(std::isfinite(nll), "train_lm: diverged at step ", opt.steps() + 1,
              " on sequence ", order[k], " (loss = ", nll, ")");
        train_nll += nll;
        train_tokens += static_cast<double>(tokens.size()) + 1.0;  // eos counts
        AddGrads(&grads, tape.Gradients(loss, names));
      }
      ScaleGrads(&grads, 1.0 / static_cast<double>(end - start));
      opt.Step(&model->params, grads);
    }

    double valid_nll = 0.0;
    double valid_tokens = 0.0;
    for (const std::vector<int>& tokens : valid) {
      Check(!tokens.empty(), "train_lm: empty validation sequence");
      Tape tape;
      Var loss = BuildLmLoss(&tape, *model, tokens, nullptr);
      valid_nll += loss.value().at(0, 0);
      valid_tokens += static_cast<double>(tokens.size()) + 1.0;
    }

    // LM losses are logged in nats per token (eos included), so
    // exp(valid loss) is the validation perplexity.
    result.log.Append(epoch, "train", "lm", train_nll / train_tokens);
    result.log.Append(epoch, "valid", "lm", valid_nll / valid_tokens);

    const double valid_ce = valid_nll / valid_tokens;
    Check(std::isfinite(valid_ce), "train_lm: non-finite validation loss after epoch ", epoch);
    best.Offer(valid_ce, epoch, model->params);
  }

  result.averaged = best.Average();
  return result;
}

}  // namespace ilmefuse
