// rng.hpp
// Counter-based pseudo-random draws. Every variate is a pure function of
// (seed, dimension, time index, substream), so parallel replication order
// cannot perturb the stream.

#pragma once

#include <cstdint>
#include <cmath>

namespace cointkit {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t dim,
                                  std::uint64_t t, std::uint64_t sub) {
    std::uint64_t h = mix64(seed ^ 0x2545f4914f6cdd1dULL);
    h = mix64(h ^ dim * 0xd6e8feb86659fd93ULL);
    h = mix64(h ^ t * 0xa0761d6478bd642fULL);
    h = mix64(h ^ sub * 0xe7037ed1a0b428dbULL);
    return h;
}

// Uniform in the open interval (0,1): 53-bit mantissa shifted off zero.
inline double to_open_unit(std::uint64_t h) {
    return (static_cast<double>(h >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

} // namespace detail

/// Standard normal draw addressed by (seed, dimension, time); Box-Muller on
/// two counter-hashed uniforms.
inline double counter_gaussian(std::uint64_t seed, std::uint64_t dim, std::uint64_t t) {
    const double u1 = detail::to_open_unit(detail::counter_hash(seed, dim, t, 0));
    const double u2 = detail::to_open_unit(detail::counter_hash(seed, dim, t, 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

/// Uniform (0,1) draw addressed by (seed, dimension, time).
inline double counter_uniform(std::uint64_t seed, std::uint64_t dim, std::uint64_t t) {
    return detail::to_open_unit(detail::counter_hash(seed, dim, t, 2));
}

} // namespace cointkit
