// Copyright 2026 The skillmpc Authors
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

#include "skillmpc/checkpoint.h"

#include <zlib.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "skillmpc/error.h"

namespace skillmpc {

namespace {

using json = nlohmann::json;

constexpr char kMagic[8] = {'S', 'K', 'M', 'P', 'C', 'K', 'P', 'T'};
constexpr std::size_t kHeaderSize = 8 + 4 + 8 + 4;

json EncodeMatrix(const Matrix& m) {
  std::vector<std::uint8_t> bytes(m.size() * sizeof(double));
  if (!bytes.empty()) std::memcpy(bytes.data(), m.data(), bytes.size());
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", json::binary(std::move(bytes))}};
}

Matrix DecodeMatrix(const json& j, const std::string& what) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& bytes = j.at("data").get_binary();
  if (rows < 0 || cols < 0 ||
      bytes.size() != static_cast<std::size_t>(rows * cols) * sizeof(double)) {
    throw CheckpointError("checkpoint array '" + what + "' has an inconsistent size");
  }
  Matrix m(rows, cols);
  if (!bytes.empty()) std::memcpy(m.data(), bytes.data(), bytes.size());
  return m;
}

void AssignChecked(Matrix& dst, const json& j, const std::string& what) {
  Matrix m = DecodeMatrix(j, what);
  if (m.rows() != dst.rows() || m.cols() != dst.cols()) {
    throw CheckpointError("checkpoint array '" + what + "' is " +
                          std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                          ", expected " + std::to_string(dst.rows()) + "x" +
                          std::to_string(dst.cols()));
  }
  dst = std::move(m);
}

json EncodeVector(const Vector& v) { return EncodeMatrix(Matrix(v)); }
Vector DecodeVector(const json& j, const std::string& what) {
  Matrix m = DecodeMatrix(j, what);
  if (m.size() > 0 && m.cols() != 1) throw CheckpointError("checkpoint vector '" + what + "' is not a column");
  return Eigen::Map<Vector>(m.data(), m.size());
}

json EncodeMlp(const Mlp& net) {
  json layers = json::array();
  for (int l = 0; l < net.num_layers(); ++l) {
    layers.push_back({{"w", EncodeMatrix(net.weight(l).value)},
                      {"b", EncodeMatrix(net.bias(l).value)}});
  }
  return json{{"sizes", net.layer_sizes()}, {"layers", layers}};
}

void DecodeMlp(Mlp& net, const json& j, const std::string& what) {
  if (j.at("sizes").get<std::vector<int>>() != net.layer_sizes()) {
    throw CheckpointError("checkpoint network '" + what + "' has different layer sizes");
  }
  const json& layers = j.at("layers");
  for (int l = 0; l < net.num_layers(); ++l) {
    AssignChecked(net.weight(l).value, layers.at(l).at("w"), what + ".w" + std::to_string(l));
    AssignChecked(net.bias(l).value, layers.at(l).at("b"), what + ".b" + std::to_string(l));
  }
}

json EncodeAdam(const Adam& adam) {
  json m = json::array(), v = json::array();
  for (const Matrix& x : adam.first_moments()) m.push_back(EncodeMatrix(x));
  for (const Matrix& x : adam.second_moments()) v.push_back(EncodeMatrix(x));
  return json{{"step", adam.step_count()}, {"m", m}, {"v", v}};
}

void DecodeAdam(Adam& adam, const json& j, const std::string& what) {
  adam.set_step_count(j.at("step").get<std::int64_t>());
  adam.first_moments().clear();
  adam.second_moments().clear();
  for (const json& x : j.at("m")) adam.first_moments().push_back(DecodeMatrix(x, what + ".m"));
  for (const json& x : j.at("v")) adam.second_moments().push_back(DecodeMatrix(x, what + ".v"));
}

json EncodeNormalizer(const Normalizer& n) {
  return json{{"count", n.count()},
              {"mean", EncodeVector(n.mean())},
              {"m2", EncodeVector(n.m2())},
              {"explicit_std", EncodeVector(n.explicit_std())},
              {"frozen", n.frozen()}};
}

void DecodeNormalizer(Normalizer& n, const json& j, const std::string& what) {
  n.Restore(j.at("count").get<long>(), DecodeVector(j.at("mean"), what + ".mean"),
            DecodeVector(j.at("m2"), what + ".m2"),
            DecodeVector(j.at("explicit_std"), what + ".explicit_std"),
            j.at("frozen").get<bool>());
}

void PutU32(std::string& s, std::uint32_t x) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((x >> (8 * i)) & 0xff));
}
void PutU64(std::string& s, std::uint64_t x) {
  for (int i = 0; i < 8; ++i) s.push_back(static_cast<char>((x >> (8 * i)) & 0xff));
}
std::uint64_t GetLE(const std::string& s, std::size_t off, int bytes) {
  std::uint64_t x = 0;
  for (int i = 0; i < bytes; ++i) {
    x |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[off + i])) << (8 * i);
  }
  return x;
}

std::uint32_t Crc32(const std::uint8_t* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  while (n > 0) {
    const uInt chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

// Reads and verifies the container; returns the decoded payload.
json ReadPayload(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CheckpointError("cannot open checkpoint '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string file = ss.str();
  if (file.size() < kHeaderSize || std::memcmp(file.data(), kMagic, 8) != 0) {
    throw CheckpointError("'" + path + "' is not a skillmpc checkpoint");
  }
  const auto version = static_cast<std::uint32_t>(GetLE(file, 8, 4));
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint format version " + std::to_string(version) +
                          " is not supported (this build reads version " +
                          std::to_string(kCheckpointVersion) + ")");
  }
  const std::uint64_t length = GetLE(file, 12, 8);
  const auto expected_crc = static_cast<std::uint32_t>(GetLE(file, 20, 4));
  if (file.size() - kHeaderSize != length) {
    throw CheckpointError("checkpoint checksum error: payload is " +
                          std::to_string(file.size() - kHeaderSize) + " bytes, header says " +
                          std::to_string(length) + " (truncated or corrupt)");
  }
  const auto* payload = reinterpret_cast<const std::uint8_t*>(file.data() + kHeaderSize);
  if (Crc32(payload, length) != expected_crc) {
    throw CheckpointError("checkpoint checksum error: CRC-32 mismatch in '" + path + "'");
  }
  try {
    return json::from_cbor(payload, payload + length);
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("checkpoint payload is malformed: ") + e.what());
  }
}

}  // namespace

void WriteFileAtomic(const std::string& path, const std::string& contents) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(target.parent_path(), ec);
    if (ec) throw Error("cannot create directory '" + target.parent_path().string() + "': " + ec.message());
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write '" + tmp + "'");
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    f.flush();
    if (!f) throw Error("write failed for '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) throw Error("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

void SaveCheckpoint(const std::string& path, const RunConfig& config,
                    const DadsState& state) {
  const Agent& agent = state.agent;
  json payload{
      {"config", FormatConfig(config)},
      {"iteration", state.iteration},
      {"episodes_seen", state.episodes_seen},
      {"dynamics",
       {{"network", EncodeMlp(state.dynamics.network())},
        {"input_indices", state.dynamics.config().input_indices},
        {"predicted_indices", state.dynamics.config().predicted_indices},
        {"expert_count", state.dynamics.expert_count()},
        {"input_normalizer", EncodeNormalizer(state.dynamics.input_normalizer())},
        {"target_normalizer", EncodeNormalizer(state.dynamics.target_normalizer())},
        {"optimizer", EncodeAdam(state.dynamics_optimizer)}}},
      {"policy", {{"network", EncodeMlp(agent.policy().network())},
                  {"optimizer", EncodeAdam(agent.policy_optimizer())}}},
      {"critic", {{"online", EncodeMlp(agent.critic().online())},
                  {"target", EncodeMlp(agent.critic().target())},
                  {"optimizer", EncodeAdam(agent.critic_optimizer())}}},
      {"rng", {state.streams.collect.SerializeState(), state.streams.fit.SerializeState(),
               state.streams.reward.SerializeState(), state.streams.update.SerializeState()}},
  };
  const std::vector<std::uint8_t> cbor = json::to_cbor(payload);
  std::string file(kMagic, 8);
  PutU32(file, kCheckpointVersion);
  PutU64(file, cbor.size());
  PutU32(file, Crc32(cbor.data(), cbor.size()));
  file.append(reinterpret_cast<const char*>(cbor.data()), cbor.size());
  WriteFileAtomic(path, file);
}

RunConfig ReadCheckpointConfig(const std::string& path) {
  const json payload = ReadPayload(path);
  try {
    return ParseConfig(payload.at("config").get<std::string>());
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("checkpoint config is invalid: ") + e.what());
  }
}

std::unique_ptr<DadsTrainer> LoadCheckpoint(const std::string& path) {
  const json payload = ReadPayload(path);
  try {
    const RunConfig config = ParseConfig(payload.at("config").get<std::string>());
    auto trainer = MakeTrainer(config);
    DadsState state = trainer->state();
    state.iteration = payload.at("iteration").get<int>();
    state.episodes_seen = payload.at("episodes_seen").get<int>();

    const json& dyn = payload.at("dynamics");
    if (dyn.at("input_indices").get<std::vector<int>>() != state.dynamics.config().input_indices ||
        dyn.at("predicted_indices").get<std::vector<int>>() != state.dynamics.config().predicted_indices ||
        dyn.at("expert_count").get<int>() != state.dynamics.expert_count()) {
      throw CheckpointError("checkpoint dynamics layout differs from its config");
    }
    DecodeMlp(state.dynamics.network(), dyn.at("network"), "dynamics");
    DecodeNormalizer(state.dynamics.input_normalizer(), dyn.at("input_normalizer"), "input_normalizer");
    DecodeNormalizer(state.dynamics.target_normalizer(), dyn.at("target_normalizer"), "target_normalizer");
    DecodeAdam(state.dynamics_optimizer, dyn.at("optimizer"), "dynamics_optimizer");

    Agent& agent = state.agent;
    DecodeMlp(agent.policy().network(), payload.at("policy").at("network"), "policy");
    DecodeAdam(agent.policy_optimizer(), payload.at("policy").at("optimizer"), "policy_optimizer");
    DecodeMlp(agent.critic().online(), payload.at("critic").at("online"), "critic");
    DecodeMlp(agent.critic().target(), payload.at("critic").at("target"), "critic_target");
    DecodeAdam(agent.critic_optimizer(), payload.at("critic").at("optimizer"), "critic_optimizer");

    const json& rng = payload.at("rng");
    state.streams.collect.RestoreState(rng.at(0).get<std::string>());
    state.streams.fit.RestoreState(rng.at(1).get<std::string>());
    state.streams.reward.RestoreState(rng.at(2).get<std::string>());
    state.streams.update.RestoreState(rng.at(3).get<std::string>());

    trainer->state() = std::move(state);
    return trainer;
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("checkpoint payload is missing a field: ") + e.what());
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("checkpoint config is invalid: ") + e.what());
  }
}

}  // namespace skillmpc
