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

#include "ilmefuse/checkpoint.h"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "ilmefuse/common.h"

namespace ilmefuse {

namespace {

constexpr char kMagic[8] = {'I', 'L', 'M', 'F', 'C', 'K', 'P', 'T'};
constexpr uint32_t kVersion = 1;

template <typename T>
void WriteRaw(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T ReadRaw(std::istream& in, const std::string& path, const char* what) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  Check(in.good(), "checkpoint ", path, ": truncated while reading ", what);
  return value;
}

void WriteString(std::ostream& out, const std::string& s) {
  WriteRaw<uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string ReadString(std::istream& in, const std::string& path, const char* what) {
  const auto len = ReadRaw<uint64_t>(in, path, what);
  Check(len <= (1u << 24), "checkpoint ", path, ": implausible ", what, " length ", len);
  std::string s(len, '\0');
  in.read(s.data(), static_cast<std::streamsize>(len));
  Check(in.good(), "checkpoint ", path, ": truncated while reading ", what);
  return s;
}

}  // namespace

void SaveCheckpoint(const std::string& path, const CheckpointMeta& meta,
                    const ParamStore& params) {
  std::ofstream out(path, std::ios::binary);
  Check(out.good(), "checkpoint: cannot write ", path);
  out.write(kMagic, sizeof(kMagic));
  WriteRaw<uint32_t>(out, kVersion);

  nlohmann::json meta_json = {{"kind", meta.kind},
                              {"vocab_hash", meta.vocab_hash},
                              {"arch", meta.arch},
                              {"extra", meta.extra}};
  WriteString(out, meta_json.dump());

  WriteRaw<uint64_t>(out, params.size());
  for (const auto& [name, p] : params) {
    WriteString(out, name);
    WriteRaw<uint32_t>(out, static_cast<uint32_t>(p.value.rows()));
    WriteRaw<uint32_t>(out, static_cast<uint32_t>(p.value.cols()));
    WriteRaw<uint8_t>(out, p.trainable ? 1 : 0);
    for (int i = 0; i < p.value.size(); ++i) {
      WriteRaw<float>(out, static_cast<float>(p.value[i]));
    }
  }
  out.flush();
  Check(out.good(), "checkpoint: write failed for ", path);
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  Check(in.good(), "checkpoint: cannot read ", path);
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  Check(in.good() && std::memcmp(magic, kMagic, sizeof(kMagic)) == 0,
        "checkpoint ", path, ": bad magic (not a checkpoint file?)");
  const auto version = ReadRaw<uint32_t>(in, path, "version");
  Check(version == kVersion, "checkpoint ", path, ": unsupported version ", version);

  Checkpoint ckpt;
  const std::string meta_str = ReadString(in, path, "metadata");
  nlohmann::json meta_json;
  try {
    meta_json = nlohmann::json::parse(meta_str);
  } catch (const std::exception& e) {
    Fail("checkpoint ", path, ": corrupt metadata: ", e.what());
  }
  ckpt.meta.kind = meta_json.at("kind").get<std::string>();
  ckpt.meta.vocab_hash = meta_json.at("vocab_hash").get<uint64_t>();
  ckpt.meta.arch = meta_json.at("arch");
  ckpt.meta.extra = meta_json.at("extra");

  const auto count = ReadRaw<uint64_t>(in, path, "param count");
  Check(count <= (1u << 20), "checkpoint ", path, ": implausible param count ", count);
  for (uint64_t i = 0; i < count; ++i) {
    const std::string name = ReadString(in, path, "param name");
    const auto rows = ReadRaw<uint32_t>(in, path, "shape");
    const auto cols = ReadRaw<uint32_t>(in, path, "shape");
    const auto trainable = ReadRaw<uint8_t>(in, path, "flags");
    Param p{name, Tensor(static_cast<int>(rows), static_cast<int>(cols)), trainable != 0};
    for (int k = 0; k < p.value.size(); ++k) {
      p.value[k] = static_cast<double>(ReadRaw<float>(in, path, "values"));
    }
    ckpt.params.Put(std::move(p));
  }
  return ckpt;
}

ParamStore AverageParamStores(const std::vector<const ParamStore*>& stores) {
  Check(!stores.empty(), "average: need at least one snapshot");
  const ParamStore& first = *stores[0];
  for (size_t s = 1; s < stores.size(); ++s) {
    Check(stores[s]->size() == first.size(),
          "average: snapshot ", s, " has a different parameter set");
  }
  ParamStore out;
  std::vector<double> addends(stores.size());
  for (const auto& [name, p] : first) {
    Param avg{name, Tensor(p.value.rows(), p.value.cols()), p.trainable};
    for (int i = 0; i < p.value.size(); ++i) {
      for (size_t s = 0; s < stores.size(); ++s) {
        const Param& q = stores[s]->Get(name);
        Check(q.value.SameShape(p.value), "average: shape mismatch for ", name);
        addends[s] = q.value[i];
      }
      std::sort(addends.begin(), addends.end());
      double sum = 0.0;
      for (double v : addends) sum += v;
      avg.value[i] = sum / static_cast<double>(stores.size());
    }
    out.Put(std::move(avg));
  }
  return out;
}

}  // namespace ilmefuse
