#ifndef QUATNN_RNG_HPP
#define QUATNN_RNG_HPP

#include <cstdint>
#include <random>

#include "quatnn/quaternion.hpp"

namespace quatnn {

/// Seedable random source used everywhere randomness is needed.
///
/// The generator is std::mt19937_64, whose output sequence is fixed by the
/// C++ standard. Value derivations are spelled out here instead of using
/// std::*_distribution (whose mappings are implementation-defined), so a
/// given seed yields the same stream on every platform:
///   - unit():    take the top 53 bits of one draw, scale by 2^-53 -> [0, 1)
///   - gaussian(): Box-Muller on two unit draws
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform double in [0, 1).
    double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    /// Standard normal deviate, Box-Muller transform.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - unit();  // (0, 1], keeps log finite
        const double u2 = unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// Quaternion with each component uniform in [lo, hi). Components are
    /// drawn in (w, x, y, z) order.
    Quaternion quaternion_box(double lo, double hi) {
        const double w = uniform(lo, hi);
        const double x = uniform(lo, hi);
        const double y = uniform(lo, hi);
        const double z = uniform(lo, hi);
        return {w, x, y, z};
    }

    /// Uniformly distributed unit quaternion: four i.i.d. gaussians,
    /// normalized. Redraws in the (measure-zero) case of a zero vector.
    Quaternion unit_quaternion() {
        for (;;) {
            const double w = gaussian();
            const double x = gaussian();
            const double y = gaussian();
            const double z = gaussian();
            const Quaternion q{w, x, y, z};
            const double n = norm(q);
            if (n > 1e-300) return q / n;
        }
    }

    /// Fisher-Yates shuffle over a container of indices.
    template <typename Container>
    void shuffle(Container& c) {
        for (std::size_t i = c.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(gen_() % i);
            std::swap(c[i - 1], c[j]);
        }
    }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace quatnn

#endif
