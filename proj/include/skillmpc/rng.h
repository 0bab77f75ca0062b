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

#ifndef SKILLMPC_RNG_H_
#define SKILLMPC_RNG_H_

#include <cstdint>
#include <random>
#include <string>

namespace skillmpc {

// Seeded random stream. Identical (seed, stream_id) pairs reproduce identical
// draw sequences; the full state (including the cached normal deviate) can be
// serialized for bit-exact resume.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Uniform on [0, 1).
  double Uniform();
  double Uniform(double lo, double hi);
  double Normal();
  double Normal(double mean, double stddev) { return mean + stddev * Normal(); }
  // Uniform integer in [0, n).
  int UniformInt(int n);

  std::mt19937_64& engine() { return engine_; }

  std::string SerializeState() const;
  void RestoreState(const std::string& state);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace skillmpc

#endif  // SKILLMPC_RNG_H_
