#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace spellscan {

// 64-bit FNV-1a. Used for content fingerprints in manifests and checkpoints,
// not for anything security related.
class Fnv1a {
 public:
  void update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
  }
  std::uint64_t value() const { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string fnv1a_hex(std::string_view bytes);

}  // namespace spellscan
