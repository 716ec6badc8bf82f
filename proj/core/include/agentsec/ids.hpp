// Seeded identifier generation. Session ids, privacy keys and transport ids
// must be unguessable to an adversary (128 bits) yet reproducible run-to-run,
// so they are drawn from a deterministic generator owned by each SUT.
#pragma once

#include <cstdint>
#include <string>

namespace agentsec {

// splitmix64: tiny, well-mixed PRNG step. Used both for id material and for
// deriving independent sub-seeds (per trial, per component) from a run seed.
std::uint64_t splitmix64(std::uint64_t& state);

// Derives an independent seed from (base, salt); stable across platforms.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt);

class IdGenerator {
 public:
  explicit IdGenerator(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ULL) {}

  // 32 lowercase hex chars (128 bits), optionally prefixed: "sid-3f2e...".
  std::string next(const std::string& prefix);

  // Raw 64-bit draw.
  std::uint64_t next_u64() { return splitmix64(state_); }

  void reseed(std::uint64_t seed) { state_ = seed ^ 0x9e3779b97f4a7c15ULL; }

 private:
  std::uint64_t state_;
};

}  // namespace agentsec
