#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace facedup::hashing {

/// Incremental BLAKE3 hasher (unkeyed hash mode, portable implementation).
class Blake3 {
 public:
  static constexpr std::size_t kOutLen = 32;

  Blake3();
  void update(std::span<const std::byte> input);
  /// Extendable output; the first 32 bytes are the standard digest.
  void finalize(std::span<std::uint8_t> out) const;
  std::array<std::uint8_t, kOutLen> finalize() const;

 private:
  struct ChunkState {
    std::array<std::uint32_t, 8> cv;
    std::uint64_t chunk_counter = 0;
    std::array<std::uint8_t, 64> block{};
    std::uint8_t block_len = 0;
    std::uint8_t blocks_compressed = 0;
    std::uint32_t flags = 0;

    std::size_t len() const { return 64u * blocks_compressed + block_len; }
  };

  void add_chunk_chaining_value(std::array<std::uint32_t, 8> cv,
                                std::uint64_t total_chunks);

  ChunkState chunk_;
  std::vector<std::array<std::uint32_t, 8>> cv_stack_;
};

}  // namespace facedup::hashing
