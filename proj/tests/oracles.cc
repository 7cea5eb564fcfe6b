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

#include "oracles.h"

#include <algorithm>
#include <cmath>

#include "ilmefuse/common.h"

namespace ilmefuse {
namespace oracles {

std::vector<int> CollapsePath(const std::vector<int>& path, int blank) {
  std::vector<int> out;
  int prev = -1;
  for (int s : path) {
    if (s != prev && s != blank) out.push_back(s);
    prev = s;
  }
  return out;
}

std::map<std::vector<int>, double> CtcMassBySequence(const Tensor& log_posteriors,
                                                     int blank) {
  const int frames = log_posteriors.rows();
  const int symbols = log_posteriors.cols();
  Check(frames >= 1 && frames <= 8 && symbols <= 6,
        "ctc oracle: instance too large to enumerate");
  std::map<std::vector<int>, double> mass;
  std::vector<int> path(frames, 0);
  for (;;) {
    double p = 1.0;
    for (int t = 0; t < frames; ++t) p *= std::exp(log_posteriors.at(t, path[t]));
    mass[CollapsePath(path, blank)] += p;
    int t = frames - 1;
    while (t >= 0 && ++path[t] == symbols) path[t--] = 0;
    if (t < 0) break;
  }
  return mass;
}

double CtcExactProb(const Tensor& log_posteriors, const std::vector<int>& labels, int blank) {
  const auto mass = CtcMassBySequence(log_posteriors, blank);
  const auto it = mass.find(labels);
  return it == mass.end() ? 0.0 : it->second;
}

double CtcPrefixProb(const Tensor& log_posteriors, const std::vector<int>& prefix, int blank) {
  const auto mass = CtcMassBySequence(log_posteriors, blank);
  double total = 0.0;
  for (const auto& [seq, p] : mass) {
    if (seq.size() < prefix.size()) continue;
    if (std::equal(prefix.begin(), prefix.end(), seq.begin())) total += p;
  }
  return total;
}

namespace {

long EditRec(const std::vector<int>& ref, const std::vector<int>& hyp, size_t i, size_t j) {
  if (i == ref.size()) return static_cast<long>(hyp.size() - j);  // insert the rest
  if (j == hyp.size()) return static_cast<long>(ref.size() - i);  // delete the rest
  long best = (ref[i] == hyp[j] ? 0 : 1) + EditRec(ref, hyp, i + 1, j + 1);
  best = std::min(best, 1 + EditRec(ref, hyp, i, j + 1));      // insertion
  best = std::min(best, 1 + EditRec(ref, hyp, i + 1, j));      // deletion
  return best;
}

}  // namespace

long EditDistanceBruteForce(const std::vector<int>& ref, const std::vector<int>& hyp) {
  Check(ref.size() <= 10 && hyp.size() <= 10, "edit oracle: instance too large to recurse");
  return EditRec(ref, hyp, 0, 0);
}

double CentralDifference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

double MaxRelError(const std::vector<double>& a, const std::vector<double>& b) {
  Check(a.size() == b.size(), "rel error: length mismatch");
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({1.0, std::fabs(a[i]), std::fabs(b[i])});
    worst = std::max(worst, std::fabs(a[i] - b[i]) / scale);
  }
  return worst;
}

}  // namespace oracles
}  // namespace ilmefuse
