#include "kite/authority.hpp"

#include <numeric>

namespace kite {

std::vector<TransferRecord> transfers_since(std::span<const Event> events, std::uint64_t after_seq) {
  std::vector<TransferRecord> out;
  for (const auto& e : events) {
    if (e.kind != EventKind::Transferred || e.seq <= after_seq) continue;
    out.push_back({e.seq, e.payload.at("from").get<PartyIndex>(), e.payload.at("to").get<PartyIndex>(),
                   e.payload.at("amount").get<std::uint64_t>()});
  }
  return out;
}

Authority Authority::setup(std::vector<std::uint64_t> tokens, std::uint32_t num_options, RandomSource& rng,
                           std::uint64_t token_bound) {
  for (auto t : tokens) {
    if (t > token_bound) throw Error(ErrorCode::TokenOutOfBound, std::to_string(t));
  }
  EncKeyPair enc = enc_keygen(rng);
  SigKeyPair sig = sig_keygen(rng);
  return Authority(std::move(enc), std::move(sig), std::move(tokens), num_options);
}

Authority::Authority(EncKeyPair enc, SigKeyPair sig, std::vector<std::uint64_t> tokens, std::uint32_t num_options)
    : enc_(std::move(enc)), sig_(std::move(sig)), tokens_(std::move(tokens)), num_options_(num_options) {
  if (tokens_.empty()) throw Error(ErrorCode::MalformedRequest, "empty token list");
  root_ = token_tree(tokens_).root();
  bundle_.pk_enc = enc_.pk;
  bundle_.vk_sig = sig_.vk;
  bundle_.tokens = tokens_;
  bundle_.token_root = root_;
  bundle_.root_sig = sig_sign(sig_, root_.bytes);
  bundle_.num_options = num_options_;
}

std::uint64_t Authority::max_total() const {
  return std::accumulate(tokens_.begin(), tokens_.end(), std::uint64_t{0});
}

RefreshRootCmd Authority::refresh_root(std::span<const TransferRecord> transfers) {
  std::vector<std::uint64_t> next = tokens_;
  std::uint64_t seq = last_seq_;
  bool any = any_applied_;
  for (const auto& t : transfers) {
    if (any && t.seq <= seq) throw Error(ErrorCode::InconsistentEvents, "transfer out of order");
    if (t.from >= next.size() || t.to >= next.size() || t.from == t.to) {
      throw Error(ErrorCode::InconsistentEvents, "unknown party in transfer");
    }
    if (next[t.from] < t.amount) throw Error(ErrorCode::InconsistentEvents, "transfer exceeds balance");
    next[t.from] -= t.amount;
    next[t.to] += t.amount;
    seq = t.seq;
    any = true;
  }
  tokens_ = std::move(next);
  last_seq_ = seq;
  any_applied_ = any;
  root_ = token_tree(tokens_).root();
  return {tokens_, root_, sig_sign(sig_, root_.bytes)};
}

TallyResult Authority::decrypt_tally(ElectionId eid, const std::vector<Ciphertext>& tallies) const {
  TallyResult r;
  r.eid = eid;
  const std::uint64_t bound = max_total();
  for (const auto& ct : tallies) r.counts.push_back(decrypt(enc_.sk, ct, bound));
  for (auto c : r.counts) {
    if (c < 0) throw Error(ErrorCode::DlogNotFound, "negative tally");
  }
  const Percentages p = basis_points(r.counts);
  r.percentages = p.basis_points;
  r.no_votes = p.no_votes;
  return r;
}

TallyCmd Authority::tally_decrypt(ElectionId eid, const std::vector<Ciphertext>& tallies, RandomSource& rng) const {
  const TallyResult r = decrypt_tally(eid, tallies);
  TallyCmd cmd;
  cmd.eid = eid;
  cmd.percentages = r.percentages;
  cmd.counts = r.counts;
  cmd.proof = nizk::prove_decryption({enc_.pk, tallies, r.counts}, enc_.sk, rng);
  return cmd;
}

}  // namespace kite
