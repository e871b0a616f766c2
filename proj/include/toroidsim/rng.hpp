#ifndef TOROIDSIM_RNG_HPP
#define TOROIDSIM_RNG_HPP

#include <cstdint>
#include <random>

namespace tsim {

// splitmix64; used to decorrelate per-trajectory substreams from one master seed
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master ^ mix64(index + 0x632be59bd9b4e019ull));
}

class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return uni_(engine_); }
    double exponential(double rate) {
        // inverse-CDF keeps the draw count fixed at one uniform per call
        double u = uni_(engine_);
        return -std::log1p(-u) / rate;
    }
    double normal(double mean, double sd) {
        return mean + sd * norm_(engine_);
    }
    std::uint64_t raw() { return engine_(); }

  private:
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> uni_{0.0, 1.0};
    std::normal_distribution<double> norm_{0.0, 1.0};
};

} // namespace tsim

#endif
