#ifndef PKINV_RNG_HPP
#define PKINV_RNG_HPP

#include <cstdint>
#include <random>

namespace pkinv {

// Seeded generator with bias-free bounded draws.  std::mt19937_64's output
// sequence is pinned by the standard; the distributions here avoid
// std::uniform_int_distribution, whose mapping is implementation-defined,
// so identical seeds give identical runs on every platform.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // uniform in [0, bound), bound >= 1
    uint64_t below(uint64_t bound) {
        const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    // uniform in [0, 1) with 53-bit resolution
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

// stream splitter for independent per-trial generators
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace pkinv

#endif  // PKINV_RNG_HPP
