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

#ifndef SKILLMPC_CHECKPOINT_H_
#define SKILLMPC_CHECKPOINT_H_

#include <cstdint>
#include <memory>
#include <string>

#include "skillmpc/config.h"
#include "skillmpc/trainer.h"

namespace skillmpc {

// File layout: 8-byte magic "SKMPCKPT", u32 format version, u64 payload
// length, u32 CRC-32 of the payload, then a CBOR payload holding the run
// config, every parameter array (raw IEEE doubles), optimizer moments,
// normalizer statistics, RNG states and the iteration index.
inline constexpr std::uint32_t kCheckpointVersion = 1;

// Serializes the run. The file is written to a temporary sibling and renamed
// into place.
void SaveCheckpoint(const std::string& path, const RunConfig& config,
                    const DadsState& state);

// Config stored in a checkpoint.
RunConfig ReadCheckpointConfig(const std::string& path);

// Rebuilds the trainer described by the checkpoint and installs its state.
// Throws CheckpointError on a bad magic, version mismatch (naming both
// versions), length/checksum mismatch or shape mismatch; nothing is
// returned on failure.
std::unique_ptr<DadsTrainer> LoadCheckpoint(const std::string& path);

// Writes `contents` to `path` through a temporary file and rename.
void WriteFileAtomic(const std::string& path, const std::string& contents);

}  // namespace skillmpc

#endif  // SKILLMPC_CHECKPOINT_H_
