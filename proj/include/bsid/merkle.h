// Copyright 2026 The bsid Authors
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

#ifndef BSID_MERKLE_H_
#define BSID_MERKLE_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "bsid/bytes.h"

namespace bsid {

// leaf node     = SHA256(0x00 || leaf)
// interior node = SHA256(0x01 || left || right)
Hash256 MerkleLeafHash(ByteSpan leaf);
Hash256 MerkleNodeHash(const Hash256& left, const Hash256& right);

struct MerkleProof {
  uint32_t leaf_index = 0;
  // Bottom-up. On an odd-width layer the last node is paired with itself,
  // so its sibling entry equals the node.
  std::vector<Hash256> siblings;
  Hash256 root{};

  Bytes Serialize() const;
  static absl::StatusOr<MerkleProof> Parse(ByteSpan data);
};

class MerkleTree {
 public:
  // Fails with InvalidArgument for an empty leaf list.
  static absl::StatusOr<MerkleTree> Build(const std::vector<Bytes>& leaves);

  const Hash256& root() const { return layers_.back().front(); }
  size_t leaf_count() const { return layers_.front().size(); }

  // Fails with InvalidArgument when index >= leaf_count().
  absl::StatusOr<MerkleProof> Prove(size_t index) const;

 private:
  explicit MerkleTree(std::vector<std::vector<Hash256>> layers)
      : layers_(std::move(layers)) {}

  std::vector<std::vector<Hash256>> layers_;
};

// Recomputes the root from `leaf` and the sibling path.
bool VerifyMerkleProof(const MerkleProof& proof, ByteSpan leaf);

}  // namespace bsid

#endif  // BSID_MERKLE_H_
