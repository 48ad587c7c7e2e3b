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

#include "bsid/merkle.h"

#include "absl/strings/str_cat.h"
#include "bsid/crypto.h"
#include "bsid/status_macros.h"

namespace bsid {

namespace {
constexpr uint8_t kLeafTag = 0x00;
constexpr uint8_t kNodeTag = 0x01;
constexpr size_t kMaxProofDepth = 64;
}  // namespace

Hash256 MerkleLeafHash(ByteSpan leaf) {
  Bytes input;
  input.reserve(leaf.size() + 1);
  input.push_back(kLeafTag);
  input.insert(input.end(), leaf.begin(), leaf.end());
  return Sha256(input);
}

Hash256 MerkleNodeHash(const Hash256& left, const Hash256& right) {
  std::array<uint8_t, 65> input;
  input[0] = kNodeTag;
  std::copy(left.begin(), left.end(), input.begin() + 1);
  std::copy(right.begin(), right.end(), input.begin() + 33);
  return Sha256(input);
}

absl::StatusOr<MerkleTree> MerkleTree::Build(const std::vector<Bytes>& leaves) {
  if (leaves.empty()) {
    return absl::InvalidArgumentError(
        "invalid-argument: Merkle tree needs at least one leaf");
  }
  std::vector<std::vector<Hash256>> layers;
  std::vector<Hash256> layer;
  layer.reserve(leaves.size());
  for (const Bytes& leaf : leaves) layer.push_back(MerkleLeafHash(leaf));
  layers.push_back(std::move(layer));
  while (layers.back().size() > 1) {
    const std::vector<Hash256>& below = layers.back();
    std::vector<Hash256> above;
    above.reserve((below.size() + 1) / 2);
    for (size_t i = 0; i < below.size(); i += 2) {
      const Hash256& left = below[i];
      const Hash256& right = i + 1 < below.size() ? below[i + 1] : below[i];
      above.push_back(MerkleNodeHash(left, right));
    }
    layers.push_back(std::move(above));
  }
  return MerkleTree(std::move(layers));
}

absl::StatusOr<MerkleProof> MerkleTree::Prove(size_t index) const {
  if (index >= leaf_count()) {
    return absl::InvalidArgumentError(
        absl::StrCat("invalid-argument: leaf index ", index,
                     " out of range for ", leaf_count(), " leaves"));
  }
  MerkleProof proof;
  proof.leaf_index = static_cast<uint32_t>(index);
  proof.root = root();
  size_t pos = index;
  for (size_t level = 0; level + 1 < layers_.size(); ++level) {
    const std::vector<Hash256>& layer = layers_[level];
    size_t sibling = pos ^ 1;
    if (sibling >= layer.size()) sibling = pos;
    proof.siblings.push_back(layer[sibling]);
    pos >>= 1;
  }
  return proof;
}

bool VerifyMerkleProof(const MerkleProof& proof, ByteSpan leaf) {
  if (proof.siblings.size() < 64 &&
      (proof.leaf_index >> proof.siblings.size()) != 0) {
    return false;
  }
  Hash256 node = MerkleLeafHash(leaf);
  uint64_t pos = proof.leaf_index;
  for (const Hash256& sibling : proof.siblings) {
    node = (pos & 1) ? MerkleNodeHash(sibling, node)
                     : MerkleNodeHash(node, sibling);
    pos >>= 1;
  }
  return node == proof.root;
}

Bytes MerkleProof::Serialize() const {
  ByteWriter w;
  w.U32(leaf_index);
  w.Append(AsSpan(root));
  w.U8(static_cast<uint8_t>(siblings.size()));
  for (const Hash256& s : siblings) w.Append(AsSpan(s));
  return std::move(w).bytes();
}

absl::StatusOr<MerkleProof> MerkleProof::Parse(ByteSpan data) {
  ByteReader r(data);
  MerkleProof proof;
  ASSIGN_OR_RETURN(proof.leaf_index, r.U32());
  ASSIGN_OR_RETURN(proof.root, r.Fixed<32>());
  ASSIGN_OR_RETURN(uint8_t depth, r.U8());
  if (depth > kMaxProofDepth) {
    return absl::InvalidArgumentError("malformed: Merkle proof too deep");
  }
  for (uint8_t i = 0; i < depth; ++i) {
    ASSIGN_OR_RETURN(Hash256 s, r.Fixed<32>());
    proof.siblings.push_back(s);
  }
  if (!r.done())
    return absl::InvalidArgumentError("malformed: trailing proof bytes");
  return proof;
}

}  // namespace bsid
