#include "kite/nizk.hpp"

#include <algorithm>
#include <set>

#include "kite/error.hpp"

namespace kite::nizk {
namespace {

DomainTag fs_tag(Relation relation) {
  switch (relation) {
    case Relation::Delegation: return DomainTag::FsDelegation;
    case Relation::Vote: return DomainTag::FsVote;
    case Relation::Decryption: return DomainTag::FsDecryption;
  }
  throw Error(ErrorCode::InvalidEncoding, "unknown relation");
}

// Claim "ct encrypts m under pk": (c1, c2 - g^m) = x * (g, pk).
DleqStatement encrypts(const Point& pk, const Ciphertext& ct, const Point& gm) {
  return {Point::generator(), ct.c1, pk, ct.c2 - gm};
}

// Claim "a - b encrypts 0".
DleqStatement difference_encrypts_zero(const Point& pk, const Ciphertext& a, const Ciphertext& b) {
  return {Point::generator(), a.c1 - b.c1, pk, a.c2 - b.c2};
}

struct OrEntry {
  DleqStatement branch[2];
};

struct Commit {
  Point a1, a2;
};

Commit real_commit(const DleqStatement& st, const Scalar& w) { return {st.g1 * w, st.g2 * w}; }

void append_points(ByteWriter& w, const std::vector<Point>& pts) {
  for (const auto& p : pts) p.encode(w);
}

// Proof layout for the disjunctive vector relations:
//   points  = [a1_0, a2_0, a1_1, a2_1] per entry, then [a1, a2] of the sum
//   scalars = [e_0, z_0, z_1] per entry, then z of the sum; e_1 = e - e_0
Proof prove_or_vector(Relation relation, const Bytes& statement, const std::vector<OrEntry>& entries,
                      const std::vector<int>& known, const std::vector<Scalar>& witnesses,
                      const DleqStatement& sum, const Scalar& sum_witness, RandomSource& rng) {
  const std::size_t n = entries.size();
  Proof proof;
  proof.relation = relation;
  proof.points.resize(4 * n + 2);
  proof.scalars.resize(3 * n + 1);

  std::vector<Scalar> nonces(n);
  std::vector<DleqTranscript> fakes(n);
  for (std::size_t k = 0; k < n; ++k) {
    const int b = known[k];
    const int other = 1 - b;
    nonces[k] = Scalar::random(rng);
    const Commit real = real_commit(entries[k].branch[b], nonces[k]);
    fakes[k] = simulate_or_branch(entries[k].branch[other], Scalar::random(rng), rng);
    proof.points[4 * k + 2 * b] = real.a1;
    proof.points[4 * k + 2 * b + 1] = real.a2;
    proof.points[4 * k + 2 * other] = fakes[k].a1;
    proof.points[4 * k + 2 * other + 1] = fakes[k].a2;
  }
  const Scalar sum_nonce = Scalar::random(rng);
  const Commit sum_commit = real_commit(sum, sum_nonce);
  proof.points[4 * n] = sum_commit.a1;
  proof.points[4 * n + 1] = sum_commit.a2;

  ByteWriter cw;
  append_points(cw, proof.points);
  const Scalar e = fs_challenge(relation, statement, cw.bytes());

  for (std::size_t k = 0; k < n; ++k) {
    const int b = known[k];
    const Scalar e_real = e - fakes[k].e;
    const Scalar z_real = nonces[k] + e_real * witnesses[k];
    const Scalar e0 = b == 0 ? e_real : fakes[k].e;
    proof.scalars[3 * k] = e0;
    proof.scalars[3 * k + 1 + b] = z_real;
    proof.scalars[3 * k + 1 + (1 - b)] = fakes[k].z;
  }
  proof.scalars[3 * n] = sum_nonce + e * sum_witness;
  return proof;
}

bool verify_or_vector(Relation relation, const Bytes& statement, const std::vector<OrEntry>& entries,
                      const DleqStatement& sum, const Proof& proof) {
  const std::size_t n = entries.size();
  if (proof.relation != relation) return false;
  if (proof.points.size() != 4 * n + 2 || proof.scalars.size() != 3 * n + 1) return false;

  ByteWriter cw;
  append_points(cw, proof.points);
  const Scalar e = fs_challenge(relation, statement, cw.bytes());

  for (std::size_t k = 0; k < n; ++k) {
    const Scalar e0 = proof.scalars[3 * k];
    const Scalar e1 = e - e0;
    const DleqTranscript t0{proof.points[4 * k], proof.points[4 * k + 1], e0, proof.scalars[3 * k + 1]};
    const DleqTranscript t1{proof.points[4 * k + 2], proof.points[4 * k + 3], e1, proof.scalars[3 * k + 2]};
    if (!check_transcript(entries[k].branch[0], t0)) return false;
    if (!check_transcript(entries[k].branch[1], t1)) return false;
  }
  const DleqTranscript ts{proof.points[4 * n], proof.points[4 * n + 1], e, proof.scalars[3 * n]};
  return check_transcript(sum, ts);
}

void encode_indices(ByteWriter& w, const std::vector<PartyIndex>& v) {
  w.u32(static_cast<std::uint32_t>(v.size()));
  for (auto p : v) w.u32(p);
}

bool distinct(const std::vector<PartyIndex>& v) {
  std::set<PartyIndex> s(v.begin(), v.end());
  return s.size() == v.size();
}

std::vector<OrEntry> delegation_entries(const DelegationStatement& st) {
  const Point gt = Point::base_mul(Scalar::from_u64(st.tokens));
  std::vector<OrEntry> entries;
  entries.reserve(st.ct_vec.size());
  for (const auto& ct : st.ct_vec) {
    entries.push_back({{encrypts(st.pk, ct, Point::identity()), encrypts(st.pk, ct, gt)}});
  }
  return entries;
}

Ciphertext sum_of(const std::vector<Ciphertext>& v) {
  Ciphertext acc = zero_ciphertext();
  for (const auto& ct : v) acc = ct_add(acc, ct);
  return acc;
}

DleqStatement delegation_sum(const DelegationStatement& st) {
  return encrypts(st.pk, sum_of(st.ct_vec), Point::base_mul(Scalar::from_u64(st.tokens)));
}

std::vector<OrEntry> vote_entries(const VoteStatement& st) {
  std::vector<OrEntry> entries;
  entries.reserve(st.vote_vec.size());
  for (const auto& ct : st.vote_vec) {
    entries.push_back({{encrypts(st.pk, ct, Point::identity()), difference_encrypts_zero(st.pk, ct, st.power)}});
  }
  return entries;
}

DleqStatement vote_sum(const VoteStatement& st) {
  return difference_encrypts_zero(st.pk, sum_of(st.vote_vec), st.power);
}

std::vector<DleqStatement> decryption_entries(const DecryptionStatement& st) {
  std::vector<DleqStatement> out;
  out.reserve(st.tallies.size());
  for (std::size_t i = 0; i < st.tallies.size(); ++i) {
    const auto& ct = st.tallies[i];
    out.push_back({Point::generator(), st.pk, ct.c1, ct.c2 - Point::base_mul(st.counts[i])});
  }
  return out;
}

bool delegation_shape_ok(const DelegationStatement& st) {
  return !st.ct_vec.empty() && st.ct_vec.size() == st.anon_set.size() && st.tokens >= 1 &&
         distinct(st.anon_set);
}

}  // namespace

Bytes Proof::serialize() const {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(relation));
  w.items(points);
  w.items(scalars);
  return std::move(w).bytes();
}

Proof Proof::deserialize(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  Proof p;
  const std::uint8_t tag = r.u8();
  if (tag < 1 || tag > 3) throw Error(ErrorCode::InvalidEncoding, "unknown relation tag");
  p.relation = static_cast<Relation>(tag);
  p.points = r.items<Point>();
  p.scalars = r.items<Scalar>();
  r.expect_done();
  return p;
}

bool check_transcript(const DleqStatement& st, const DleqTranscript& tr) {
  return st.g1 * tr.z == tr.a1 + st.h1 * tr.e && st.g2 * tr.z == tr.a2 + st.h2 * tr.e;
}

DleqTranscript simulate_or_branch(const DleqStatement& st, const Scalar& challenge, RandomSource& rng) {
  DleqTranscript t;
  t.e = challenge;
  t.z = Scalar::random(rng);
  t.a1 = st.g1 * t.z - st.h1 * challenge;
  t.a2 = st.g2 * t.z - st.h2 * challenge;
  return t;
}

Scalar fs_challenge(Relation relation, std::span<const std::uint8_t> statement,
                    std::span<const std::uint8_t> commitments) {
  ByteWriter w;
  w.blob(statement);
  w.raw(commitments);
  Bytes data = std::move(w).bytes();
  std::array<std::uint8_t, 64> wide{};
  data.push_back(0);
  const Digest lo = hash(fs_tag(relation), data);
  data.back() = 1;
  const Digest hi = hash(fs_tag(relation), data);
  std::copy(lo.bytes.begin(), lo.bytes.end(), wide.begin());
  std::copy(hi.bytes.begin(), hi.bytes.end(), wide.begin() + 32);
  return Scalar::reduce_wide(wide);
}

Bytes DelegationStatement::serialize() const {
  ByteWriter w;
  pk.encode(w);
  encode_indices(w, anon_set);
  w.items(ct_vec);
  w.u64(tokens);
  token_root.encode(w);
  token_proof.encode(w);
  w.u32(voter);
  return std::move(w).bytes();
}

Bytes VoteStatement::serialize() const {
  ByteWriter w;
  pk.encode(w);
  power.encode(w);
  w.items(vote_vec);
  w.u32(delegate);
  snapshot_root.encode(w);
  snapshot_proof.encode(w);
  w.u64(eid);
  return std::move(w).bytes();
}

Bytes DecryptionStatement::serialize() const {
  ByteWriter w;
  pk.encode(w);
  w.items(tallies);
  w.u32(static_cast<std::uint32_t>(counts.size()));
  for (auto c : counts) w.i64(c);
  return std::move(w).bytes();
}

// ---- delegation ------------------------------------------------------------

Proof detail::prove_delegation_unchecked(const DelegationStatement& st, const DelegationWitness& wit,
                                         RandomSource& rng) {
  const auto entries = delegation_entries(st);
  std::vector<int> known(entries.size(), 0);
  if (wit.target_pos < known.size()) known[wit.target_pos] = 1;
  Scalar total;
  for (const auto& r : wit.r_vec) total += r;
  return prove_or_vector(Relation::Delegation, st.serialize(), entries, known, wit.r_vec,
                         delegation_sum(st), total, rng);
}

Proof prove_delegation(const DelegationStatement& st, const DelegationWitness& wit, RandomSource& rng) {
  if (!delegation_shape_ok(st) || wit.r_vec.size() != st.ct_vec.size() || wit.target_pos >= st.ct_vec.size()) {
    throw Error(ErrorCode::WitnessMismatch, "delegation witness shape");
  }
  for (std::size_t k = 0; k < st.ct_vec.size(); ++k) {
    const std::int64_t m = k == wit.target_pos ? static_cast<std::int64_t>(st.tokens) : 0;
    const Ciphertext expect{Point::base_mul(wit.r_vec[k]), Point::base_mul(m) + st.pk * wit.r_vec[k]};
    if (!(expect == st.ct_vec[k])) throw Error(ErrorCode::WitnessMismatch, "delegation ciphertext");
  }
  return detail::prove_delegation_unchecked(st, wit, rng);
}

bool verify_delegation(const DelegationStatement& st, const Proof& proof) {
  if (!delegation_shape_ok(st)) return false;
  if (!mt_verify(token_leaf(st.voter, st.tokens), st.voter, st.token_proof, st.token_root)) return false;
  return verify_or_vector(Relation::Delegation, st.serialize(), delegation_entries(st), delegation_sum(st), proof);
}

// ---- vote ------------------------------------------------------------------

Proof detail::prove_vote_unchecked(const VoteStatement& st, const VoteWitness& wit, RandomSource& rng) {
  const auto entries = vote_entries(st);
  std::vector<int> known(entries.size(), 0);
  if (wit.choice < known.size()) known[wit.choice] = 1;
  Scalar total;
  for (const auto& r : wit.r_vec) total += r;
  return prove_or_vector(Relation::Vote, st.serialize(), entries, known, wit.r_vec, vote_sum(st), total, rng);
}

Proof prove_vote(const VoteStatement& st, const VoteWitness& wit, RandomSource& rng) {
  if (st.vote_vec.empty() || wit.r_vec.size() != st.vote_vec.size() || wit.choice >= st.vote_vec.size()) {
    throw Error(ErrorCode::WitnessMismatch, "vote witness shape");
  }
  for (std::size_t j = 0; j < st.vote_vec.size(); ++j) {
    const Ciphertext zero_enc{Point::base_mul(wit.r_vec[j]), st.pk * wit.r_vec[j]};
    const Ciphertext expect = j == wit.choice ? ct_add(st.power, zero_enc) : zero_enc;
    if (!(expect == st.vote_vec[j])) throw Error(ErrorCode::WitnessMismatch, "vote ciphertext");
  }
  return detail::prove_vote_unchecked(st, wit, rng);
}

bool verify_vote(const VoteStatement& st, const Proof& proof) {
  if (st.vote_vec.empty()) return false;
  if (!mt_verify(power_leaf(st.delegate, st.power), st.delegate, st.snapshot_proof, st.snapshot_root)) return false;
  return verify_or_vector(Relation::Vote, st.serialize(), vote_entries(st), vote_sum(st), proof);
}

// ---- decryption ------------------------------------------------------------

Proof detail::prove_decryption_unchecked(const DecryptionStatement& st, const Scalar& sk, RandomSource& rng) {
  const auto entries = decryption_entries(st);
  Proof proof;
  proof.relation = Relation::Decryption;
  std::vector<Scalar> nonces(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    nonces[i] = Scalar::random(rng);
    const Commit c = real_commit(entries[i], nonces[i]);
    proof.points.push_back(c.a1);
    proof.points.push_back(c.a2);
  }
  ByteWriter cw;
  append_points(cw, proof.points);
  const Scalar e = fs_challenge(Relation::Decryption, st.serialize(), cw.bytes());
  for (const auto& w : nonces) proof.scalars.push_back(w + e * sk);
  return proof;
}

Proof prove_decryption(const DecryptionStatement& st, const Scalar& sk, RandomSource& rng) {
  if (st.tallies.size() != st.counts.size() || st.tallies.empty()) {
    throw Error(ErrorCode::WitnessMismatch, "decryption statement shape");
  }
  if (!(Point::base_mul(sk) == st.pk)) throw Error(ErrorCode::WitnessMismatch, "secret key");
  for (std::size_t i = 0; i < st.tallies.size(); ++i) {
    const auto& ct = st.tallies[i];
    if (!(ct.c2 - ct.c1 * sk == Point::base_mul(st.counts[i]))) {
      throw Error(ErrorCode::WitnessMismatch, "count does not match tally");
    }
  }
  return detail::prove_decryption_unchecked(st, sk, rng);
}

bool verify_decryption(const DecryptionStatement& st, const Proof& proof) {
  const std::size_t n = st.tallies.size();
  if (n == 0 || st.counts.size() != n) return false;
  if (proof.relation != Relation::Decryption || proof.points.size() != 2 * n || proof.scalars.size() != n) {
    return false;
  }
  ByteWriter cw;
  append_points(cw, proof.points);
  const Scalar e = fs_challenge(Relation::Decryption, st.serialize(), cw.bytes());
  const auto entries = decryption_entries(st);
  for (std::size_t i = 0; i < n; ++i) {
    if (!check_transcript(entries[i], {proof.points[2 * i], proof.points[2 * i + 1], e, proof.scalars[i]})) {
      return false;
    }
  }
  return true;
}

}  // namespace kite::nizk
