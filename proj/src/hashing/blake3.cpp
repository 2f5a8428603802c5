#include "facedup/hashing/blake3.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

namespace facedup::hashing {
namespace {

constexpr std::uint32_t kChunkStart = 1u << 0;
constexpr std::uint32_t kChunkEnd = 1u << 1;
constexpr std::uint32_t kParent = 1u << 2;
constexpr std::uint32_t kRoot = 1u << 3;
constexpr std::size_t kChunkLen = 1024;
constexpr std::size_t kBlockLen = 64;

constexpr std::array<std::uint32_t, 8> kIv = {
    0x6A09E667, 0xBB67AE85, 0x3C6EF372, 0xA54FF53A,
    0x510E527F, 0x9B05688C, 0x1F83D9AB, 0x5BE0CD19};

constexpr std::array<std::size_t, 16> kMsgPermutation = {
    2, 6, 3, 10, 7, 0, 4, 13, 1, 11, 12, 5, 9, 14, 15, 8};

using Words16 = std::array<std::uint32_t, 16>;
using Words8 = std::array<std::uint32_t, 8>;

inline void g(Words16& s, int a, int b, int c, int d, std::uint32_t mx,
              std::uint32_t my) {
  s[a] = s[a] + s[b] + mx;
  s[d] = std::rotr(s[d] ^ s[a], 16);
  s[c] = s[c] + s[d];
  s[b] = std::rotr(s[b] ^ s[c], 12);
  s[a] = s[a] + s[b] + my;
  s[d] = std::rotr(s[d] ^ s[a], 8);
  s[c] = s[c] + s[d];
  s[b] = std::rotr(s[b] ^ s[c], 7);
}

inline void round_fn(Words16& s, const Words16& m) {
  g(s, 0, 4, 8, 12, m[0], m[1]);
  g(s, 1, 5, 9, 13, m[2], m[3]);
  g(s, 2, 6, 10, 14, m[4], m[5]);
  g(s, 3, 7, 11, 15, m[6], m[7]);
  g(s, 0, 5, 10, 15, m[8], m[9]);
  g(s, 1, 6, 11, 12, m[10], m[11]);
  g(s, 2, 7, 8, 13, m[12], m[13]);
  g(s, 3, 4, 9, 14, m[14], m[15]);
}

Words16 compress(const Words8& cv, const Words16& block_words, std::uint64_t counter,
                 std::uint32_t block_len, std::uint32_t flags) {
  Words16 state = {cv[0], cv[1], cv[2], cv[3], cv[4], cv[5], cv[6], cv[7],
                   kIv[0], kIv[1], kIv[2], kIv[3],
                   static_cast<std::uint32_t>(counter),
                   static_cast<std::uint32_t>(counter >> 32), block_len, flags};
  Words16 m = block_words;
  for (int r = 0; r < 7; ++r) {
    round_fn(state, m);
    if (r < 6) {
      Words16 permuted;
      for (std::size_t i = 0; i < 16; ++i) permuted[i] = m[kMsgPermutation[i]];
      m = permuted;
    }
  }
  for (std::size_t i = 0; i < 8; ++i) {
    state[i] ^= state[i + 8];
    state[i + 8] ^= cv[i];
  }
  return state;
}

Words16 words_from_le_bytes(const std::uint8_t* bytes) {
  Words16 w;
  for (std::size_t i = 0; i < 16; ++i) {
    w[i] = static_cast<std::uint32_t>(bytes[4 * i]) |
           static_cast<std::uint32_t>(bytes[4 * i + 1]) << 8 |
           static_cast<std::uint32_t>(bytes[4 * i + 2]) << 16 |
           static_cast<std::uint32_t>(bytes[4 * i + 3]) << 24;
  }
  return w;
}

Words8 first8(const Words16& w) {
  Words8 out;
  std::copy_n(w.begin(), 8, out.begin());
  return out;
}

struct Output {
  Words8 input_cv;
  Words16 block_words;
  std::uint64_t counter;
  std::uint32_t block_len;
  std::uint32_t flags;

  Words8 chaining_value() const {
    return first8(compress(input_cv, block_words, counter, block_len, flags));
  }

  void root_output_bytes(std::span<std::uint8_t> out) const {
    std::uint64_t block_counter = 0;
    std::size_t pos = 0;
    while (pos < out.size()) {
      const Words16 words =
          compress(input_cv, block_words, block_counter, block_len, flags | kRoot);
      for (std::size_t i = 0; i < 16 && pos < out.size(); ++i) {
        for (int b = 0; b < 4 && pos < out.size(); ++b) {
          out[pos++] = static_cast<std::uint8_t>(words[i] >> (8 * b));
        }
      }
      ++block_counter;
    }
  }
};

Output parent_output(const Words8& left, const Words8& right) {
  Words16 block;
  std::copy(left.begin(), left.end(), block.begin());
  std::copy(right.begin(), right.end(), block.begin() + 8);
  return {kIv, block, 0, static_cast<std::uint32_t>(kBlockLen), kParent};
}

}  // namespace

Blake3::Blake3() { chunk_.cv = kIv; }

namespace {

template <typename Chunk>
std::uint32_t start_flag(const Chunk& c) {
  return c.blocks_compressed == 0 ? kChunkStart : 0;
}

template <typename Chunk>
Output chunk_output(const Chunk& c) {
  return {c.cv, words_from_le_bytes(c.block.data()), c.chunk_counter, c.block_len,
          c.flags | start_flag(c) | kChunkEnd};
}

}  // namespace

void Blake3::add_chunk_chaining_value(std::array<std::uint32_t, 8> cv,
                                      std::uint64_t total_chunks) {
  while ((total_chunks & 1) == 0) {
    cv = parent_output(cv_stack_.back(), cv).chaining_value();
    cv_stack_.pop_back();
    total_chunks >>= 1;
  }
  cv_stack_.push_back(cv);
}

void Blake3::update(std::span<const std::byte> input) {
  const auto* data = reinterpret_cast<const std::uint8_t*>(input.data());
  std::size_t remaining = input.size();
  while (remaining > 0) {
    if (chunk_.len() == kChunkLen) {
      const Words8 chunk_cv = chunk_output(chunk_).chaining_value();
      const std::uint64_t total_chunks = chunk_.chunk_counter + 1;
      add_chunk_chaining_value(chunk_cv, total_chunks);
      chunk_ = ChunkState{};
      chunk_.cv = kIv;
      chunk_.chunk_counter = total_chunks;
    }
    // Fill the current chunk block by block.
    std::size_t want = kChunkLen - chunk_.len();
    std::size_t take = std::min(want, remaining);
    while (take > 0) {
      if (chunk_.block_len == kBlockLen) {
        const Words16 words = words_from_le_bytes(chunk_.block.data());
        chunk_.cv = first8(compress(chunk_.cv, words, chunk_.chunk_counter,
                                    static_cast<std::uint32_t>(kBlockLen),
                                    chunk_.flags | start_flag(chunk_)));
        ++chunk_.blocks_compressed;
        chunk_.block.fill(0);
        chunk_.block_len = 0;
      }
      const std::size_t n = std::min<std::size_t>(kBlockLen - chunk_.block_len, take);
      std::memcpy(chunk_.block.data() + chunk_.block_len, data, n);
      chunk_.block_len = static_cast<std::uint8_t>(chunk_.block_len + n);
      data += n;
      take -= n;
      remaining -= n;
    }
  }
}

void Blake3::finalize(std::span<std::uint8_t> out) const {
  Output output = chunk_output(chunk_);
  for (std::size_t i = cv_stack_.size(); i-- > 0;) {
    output = parent_output(cv_stack_[i], output.chaining_value());
  }
  output.root_output_bytes(out);
}

std::array<std::uint8_t, Blake3::kOutLen> Blake3::finalize() const {
  std::array<std::uint8_t, kOutLen> out{};
  finalize(out);
  return out;
}

}  // namespace facedup::hashing
