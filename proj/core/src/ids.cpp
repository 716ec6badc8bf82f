#include "agentsec/ids.hpp"

namespace agentsec {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
  std::uint64_t s = base ^ (salt * 0xff51afd7ed558ccdULL + 0x2545f4914f6cdd1dULL);
  return splitmix64(s);
}

std::string IdGenerator::next(const std::string& prefix) {
  static const char* hex = "0123456789abcdef";
  std::string out = prefix;
  for (int word = 0; word < 2; ++word) {
    std::uint64_t v = splitmix64(state_);
    for (int i = 15; i >= 0; --i) out.push_back(hex[(v >> (i * 4)) & 0xF]);
  }
  return out;
}

}  // namespace agentsec
