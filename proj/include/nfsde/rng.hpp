#ifndef NFSDE_RNG_HPP
#define NFSDE_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>

namespace nfsde {

// SplitMix64 finalizer (Steele/Lea/Flood). Used statelessly to derive
// per-path seeds from a master seed: thread count and evaluation order
// never touch the stream.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_path_seed(std::uint64_t master_seed, std::uint64_t path_index) {
    return splitmix64(master_seed ^ splitmix64(path_index + 1));
}

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
// Key = 64-bit seed, counter words 2/3 = (stream, purpose) so each
// (seed, stream, purpose) triple is an independent substream.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint32_t stream = 0, std::uint32_t purpose = 0)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream), purpose_(purpose) {}

    std::uint64_t next_u64() {
        if (pos_ == 0) {
            block_ = philox10({static_cast<std::uint32_t>(counter_),
                               static_cast<std::uint32_t>(counter_ >> 32),
                               stream_, purpose_},
                              key_);
            ++counter_;
            pos_ = 2;
        }
        --pos_;
        const int base = 2 * (1 - pos_);
        return (static_cast<std::uint64_t>(block_[base + 1]) << 32) | block_[base];
    }

    // Uniform strictly inside (0, 1); 53 random bits plus a half-ulp
    // offset so log() is always finite.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

    // Box-Muller; second value of each pair is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double exponential(double rate) { return -std::log(uniform01()) / rate; }

private:
    static std::array<std::uint32_t, 4> philox10(std::array<std::uint32_t, 4> ctr,
                                                 std::array<std::uint32_t, 2> key) {
        constexpr std::uint32_t kWeyl0 = 0x9E3779B9u, kWeyl1 = 0xBB67AE85u;
        constexpr std::uint32_t kMul0 = 0xD2511F53u, kMul1 = 0xCD9E8D57u;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                   static_cast<std::uint32_t>(p0)};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint32_t stream_, purpose_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int pos_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace nfsde

#endif
