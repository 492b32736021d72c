#pragma once

#include <cstdint>
#include <cmath>

namespace ionsim {

// xoshiro256++ with splitmix64 seeding. Hand-rolled samplers so that results
// are identical on every platform and compiler; seeded streams derived from
// (seed, stream, substream) counters are independent and replayable.
class Rng {
  public:
    explicit Rng(uint64_t seed) { seed_state(seed); }
    Rng(uint64_t seed, uint64_t stream, uint64_t substream = 0) {
        seed_state(mix(mix(seed ^ 0x9e3779b97f4a7c15ull, stream), substream));
    }

    uint64_t u64() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0,1)
    double uniform() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

    // uniform in (0,1], safe as log() argument
    double uniform_pos() { return (static_cast<double>(u64() >> 11) + 1.0) * 0x1.0p-53; }

    uint64_t below(uint64_t n) { return u64() % n; }

    bool bernoulli(double p) { return uniform() < p; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform_pos();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(6.283185307179586 * u2);
        have_spare_ = true;
        return r * std::cos(6.283185307179586 * u2);
    }

    double exponential(double mean) { return -mean * std::log(uniform_pos()); }

    // exact Poisson: Knuth product method, halved recursively for large mean
    uint64_t poisson(double mean) {
        uint64_t n = 0;
        while (mean > 24.0) {
            n += poisson_knuth(mean / 2.0);
            mean /= 2.0;
        }
        return n + poisson_knuth(mean);
    }

    uint64_t binomial(uint64_t trials, double p) {
        uint64_t k = 0;
        for (uint64_t i = 0; i < trials; ++i)
            k += bernoulli(p) ? 1 : 0;
        return k;
    }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static uint64_t mix(uint64_t z, uint64_t add) {
        z += 0x9e3779b97f4a7c15ull + add;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    void seed_state(uint64_t seed) {
        uint64_t z = seed;
        for (auto& s : s_) {
            z = mix(z, 0);
            s = z;
        }
        have_spare_ = false;
    }

    uint64_t poisson_knuth(double mean) {
        const double limit = std::exp(-mean);
        uint64_t k = 0;
        double prod = uniform();
        while (prod > limit) {
            ++k;
            prod *= uniform();
        }
        return k;
    }

    uint64_t s_[4]{};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace ionsim
