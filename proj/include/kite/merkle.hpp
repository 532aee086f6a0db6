#pragma once

// Binary Merkle trees. Leaves are hashed under the "leaf" tag, interior
// nodes under "node"; the leaf level is padded with a fixed empty digest to
// a power of two (at least two), so even a single leaf has a sibling.

#include <cstdint>
#include <span>
#include <vector>

#include "kite/elgamal.hpp"
#include "kite/hash.hpp"
#include "kite/params.hpp"

namespace kite {

const Digest& empty_leaf();
Digest leaf_digest(std::span<const std::uint8_t> leaf_data);
Digest node_digest(const Digest& left, const Digest& right);

// Leaf data for the token tree: partyIndex || tokenCount.
Bytes token_leaf(PartyIndex party, std::uint64_t tokens);
// Leaf data for the power snapshot tree: partyIndex || ciphertext.
Bytes power_leaf(PartyIndex party, const Ciphertext& power);

struct MerkleProof {
  std::uint32_t index = 0;
  std::vector<Digest> siblings;  // bottom-up

  bool operator==(const MerkleProof&) const = default;

  // index as u32, then sibling digests concatenated; height = (len - 4) / 32.
  Bytes serialize() const;
  static MerkleProof deserialize(std::span<const std::uint8_t> bytes);

  void encode(ByteWriter& w) const;
  static MerkleProof decode(ByteReader& r);
};

class MerkleTree {
 public:
  // Throws Error(EmptyTree) on an empty leaf list.
  static MerkleTree build(const std::vector<Bytes>& leaves);

  const Digest& root() const { return levels_.back().front(); }
  std::size_t leaf_count() const { return leaf_count_; }
  std::size_t height() const { return levels_.size() - 1; }
  const Digest& leaf(std::size_t index) const { return levels_.front().at(index); }

  // Throws Error(IndexOutOfRange).
  MerkleProof prove(std::size_t index) const;
  // Returns a new tree; only the path from index to the root is rehashed.
  MerkleTree update(std::size_t index, std::span<const std::uint8_t> new_leaf) const;

 private:
  std::size_t leaf_count_ = 0;
  std::vector<std::vector<Digest>> levels_;  // levels_[0] = padded leaf digests
};

Digest mt_root(const std::vector<Bytes>& leaves);
bool mt_verify(std::span<const std::uint8_t> leaf_data, std::uint32_t index, const MerkleProof& proof,
               const Digest& root);

MerkleTree token_tree(std::span<const std::uint64_t> tokens);
MerkleTree power_tree(std::span<const Ciphertext> powers);

}  // namespace kite
