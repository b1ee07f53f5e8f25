#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <vector>

namespace isingmc {

inline constexpr uint32_t kMtStateSize = 624;

/// How the 624-word block regeneration is implemented; the output stream is
/// bit-identical either way. The plain variant mirrors the original scalar
/// generation loop, the blockwise variant runs it four state words at a time.
enum class TwistImpl : uint8_t { plain, blockwise };

/// Scalar MT19937. Matches the canonical generator (and std::mt19937)
/// output-for-output for any seed.
class Mt19937 {
  public:
    explicit Mt19937(uint32_t seed, TwistImpl impl = TwistImpl::blockwise) : impl_(impl) {
        reseed(seed);
    }

    void reseed(uint32_t seed);

    /// One output per call, the way the unoptimized tier consumes it.
    uint32_t next_u32();

    /// Fills `out`; identical stream to repeated next_u32(), but tempering
    /// whole state runs at a time.
    void fill(std::span<uint32_t> out);

    /// Total outputs produced since the last reseed.
    uint64_t generated() const {
        return blocks_ == 0 ? 0 : (blocks_ - 1) * uint64_t(kMtStateSize) + cursor_;
    }

    std::span<const uint32_t> words() const { return words_; }

  private:
    void twist();

    std::array<uint32_t, kMtStateSize> words_;
    uint32_t cursor_ = kMtStateSize;
    uint64_t blocks_ = 0;
    TwistImpl impl_ = TwistImpl::blockwise;
};

/// K MT19937 generators advanced in lockstep, state stored lane-interleaved:
/// word w of lane k sits at words[w*K + k]. Lane k's output stream is
/// bit-identical to Mt19937(seeds[k]).
class InterlacedMt {
  public:
    explicit InterlacedMt(std::span<const uint32_t> seeds);

    /// Lane seeds base_seed + 0 .. base_seed + lanes-1.
    static InterlacedMt with_base_seed(uint32_t base_seed, uint32_t lanes);

    uint32_t lanes() const { return lanes_; }

    /// Writes the next output of every lane; out.size() must equal lanes().
    void next_block(std::span<uint32_t> out);

    /// Writes whole blocks back to back; out.size() must be a multiple of lanes().
    void fill_blocks(std::span<uint32_t> out);

    /// fill_blocks followed by u32_to_unit, fused into one pass over the
    /// state; bit-identical to converting the raw words separately.
    void fill_unit_floats(std::span<float> out);

    uint64_t blocks_generated() const {
        return twists_ == 0 ? 0 : (twists_ - 1) * uint64_t(kMtStateSize) + cursor_;
    }

  private:
    void twist();

    uint32_t lanes_;
    std::vector<uint32_t> words_;  // kMtStateSize * lanes_
    uint32_t cursor_ = kMtStateSize;
    uint64_t twists_ = 0;
};

/// x / 2^32 rounded toward zero to a float; strictly below 1, monotone.
inline float u32_to_unit(uint32_t x) {
    if (x == 0) return 0.0f;
    const int bits = 32 - std::countl_zero(x);
    if (bits > 24) x &= ~((uint32_t(1) << (bits - 24)) - 1);
    return static_cast<float>(x) * 0x1p-32f;
}

/// Bulk u32_to_unit, bit-identical to the scalar mapping.
void convert_unit_floats(std::span<const uint32_t> in, std::span<float> out);

}  // namespace isingmc
