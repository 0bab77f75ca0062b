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

#include "skillmpc/rng.h"

#include <sstream>

#include "skillmpc/error.h"

namespace skillmpc {

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32), 0x5eedu};
  engine_.seed(seq);
}

double RngStream::Uniform() { return uniform_(engine_); }

double RngStream::Uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform_(engine_);
}

double RngStream::Normal() { return normal_(engine_); }

int RngStream::UniformInt(int n) {
  if (n <= 0) throw InvalidArgument("UniformInt: n must be positive");
  std::uniform_int_distribution<int> dist(0, n - 1);
  return dist(engine_);
}

std::string RngStream::SerializeState() const {
  std::ostringstream out;
  out << seed_ << ' ' << stream_id_ << ' ' << engine_ << ' ' << uniform_ << ' '
      << normal_;
  return out.str();
}

void RngStream::RestoreState(const std::string& state) {
  std::istringstream in(state);
  in >> seed_ >> stream_id_ >> engine_ >> uniform_ >> normal_;
  if (in.fail()) throw CheckpointError("corrupt rng state");
}

}  // namespace skillmpc
