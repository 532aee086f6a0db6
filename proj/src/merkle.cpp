#include "kite/merkle.hpp"

#include "kite/error.hpp"

namespace kite {

const Digest& empty_leaf() {
  static const Digest d = hash(DomainTag::Empty, {});
  return d;
}

Digest leaf_digest(std::span<const std::uint8_t> leaf_data) { return hash(DomainTag::Leaf, leaf_data); }

Digest node_digest(const Digest& left, const Digest& right) {
  std::array<std::uint8_t, 64> buf{};
  std::copy(left.bytes.begin(), left.bytes.end(), buf.begin());
  std::copy(right.bytes.begin(), right.bytes.end(), buf.begin() + 32);
  return hash(DomainTag::Node, buf);
}

Bytes token_leaf(PartyIndex party, std::uint64_t tokens) {
  return ByteWriter().u32(party).u64(tokens).bytes();
}

Bytes power_leaf(PartyIndex party, const Ciphertext& power) {
  ByteWriter w;
  w.u32(party);
  power.encode(w);
  return std::move(w).bytes();
}

Bytes MerkleProof::serialize() const {
  ByteWriter w;
  w.u32(index);
  for (const auto& s : siblings) s.encode(w);
  return std::move(w).bytes();
}

MerkleProof MerkleProof::deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || (bytes.size() - 4) % 32 != 0) {
    throw Error(ErrorCode::InvalidEncoding, "merkle proof length");
  }
  ByteReader r(bytes);
  MerkleProof p;
  p.index = r.u32();
  while (!r.done()) p.siblings.push_back(Digest::decode(r));
  return p;
}

void MerkleProof::encode(ByteWriter& w) const { w.blob(serialize()); }

MerkleProof MerkleProof::decode(ByteReader& r) { return deserialize(r.blob()); }

MerkleTree MerkleTree::build(const std::vector<Bytes>& leaves) {
  if (leaves.empty()) throw Error(ErrorCode::EmptyTree);
  std::size_t padded = 2;
  while (padded < leaves.size()) padded *= 2;
  MerkleTree t;
  t.leaf_count_ = leaves.size();
  std::vector<Digest> level(padded, empty_leaf());
  for (std::size_t i = 0; i < leaves.size(); ++i) level[i] = leaf_digest(leaves[i]);
  t.levels_.push_back(std::move(level));
  while (t.levels_.back().size() > 1) {
    const auto& below = t.levels_.back();
    std::vector<Digest> up(below.size() / 2);
    for (std::size_t i = 0; i < up.size(); ++i) up[i] = node_digest(below[2 * i], below[2 * i + 1]);
    t.levels_.push_back(std::move(up));
  }
  return t;
}

MerkleProof MerkleTree::prove(std::size_t index) const {
  if (index >= leaf_count_) throw Error(ErrorCode::IndexOutOfRange);
  MerkleProof p;
  p.index = static_cast<std::uint32_t>(index);
  std::size_t pos = index;
  for (std::size_t h = 0; h + 1 < levels_.size(); ++h) {
    p.siblings.push_back(levels_[h][pos ^ 1]);
    pos >>= 1;
  }
  return p;
}

MerkleTree MerkleTree::update(std::size_t index, std::span<const std::uint8_t> new_leaf) const {
  if (index >= leaf_count_) throw Error(ErrorCode::IndexOutOfRange);
  MerkleTree t = *this;
  std::size_t pos = index;
  t.levels_[0][pos] = leaf_digest(new_leaf);
  for (std::size_t h = 1; h < t.levels_.size(); ++h) {
    pos >>= 1;
    t.levels_[h][pos] = node_digest(t.levels_[h - 1][2 * pos], t.levels_[h - 1][2 * pos + 1]);
  }
  return t;
}

Digest mt_root(const std::vector<Bytes>& leaves) { return MerkleTree::build(leaves).root(); }

bool mt_verify(std::span<const std::uint8_t> leaf_data, std::uint32_t index, const MerkleProof& proof,
               const Digest& root) {
  if (proof.index != index || proof.siblings.empty() || proof.siblings.size() >= 32) return false;
  // Index bits above the tree height would alias another leaf.
  if ((static_cast<std::uint64_t>(index) >> proof.siblings.size()) != 0) return false;
  Digest acc = leaf_digest(leaf_data);
  std::uint32_t pos = index;
  for (const auto& sib : proof.siblings) {
    acc = (pos & 1) ? node_digest(sib, acc) : node_digest(acc, sib);
    pos >>= 1;
  }
  return acc == root;
}

MerkleTree token_tree(std::span<const std::uint64_t> tokens) {
  std::vector<Bytes> leaves;
  leaves.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) leaves.push_back(token_leaf(static_cast<PartyIndex>(i), tokens[i]));
  return MerkleTree::build(leaves);
}

MerkleTree power_tree(std::span<const Ciphertext> powers) {
  std::vector<Bytes> leaves;
  leaves.reserve(powers.size());
  for (std::size_t i = 0; i < powers.size(); ++i) leaves.push_back(power_leaf(static_cast<PartyIndex>(i), powers[i]));
  return MerkleTree::build(leaves);
}

}  // namespace kite
