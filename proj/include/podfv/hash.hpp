#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string_view>

namespace podfv {

/// FNV-1a, used as the content hash stored in artifact headers.
class Hasher {
public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      state_ ^= p[i];
      state_ *= 1099511628211ULL;
    }
  }
  void value(double x) { bytes(&x, sizeof x); }
  void value(std::int64_t x) { bytes(&x, sizeof x); }
  void value(std::uint64_t x) { bytes(&x, sizeof x); }
  void values(std::span<const double> xs) { bytes(xs.data(), xs.size_bytes()); }
  void text(std::string_view s) { bytes(s.data(), s.size()); }
  std::uint64_t digest() const { return state_; }

private:
  std::uint64_t state_ = 14695981039346656037ULL;
};

}  // namespace podfv
