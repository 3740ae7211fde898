#pragma once

#include <cstdint>

namespace bapmsim::rng {

/// splitmix64 finalizer; used as a counter-based generator so draws are
/// independent of event-dispatch order.
std::uint64_t mix(std::uint64_t x);
std::uint64_t mix(std::uint64_t a, std::uint64_t b);
std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c);

/// Uniform in (0, 1), derived from the top 53 bits of the key; never
/// returns exactly 0 or 1 so it is safe to feed into an inverse CDF.
double uniform01(std::uint64_t key);

/// Inverse standard-normal CDF (Acklam's rational approximation, ~1e-9
/// absolute error). Deterministic across platforms, unlike the
/// distribution adapters in <random>.
double normal_icdf(double p);

/// Mean-one lognormal multiplier: exp(-sigma^2/2 + sigma * z).
double lognormal_mult(std::uint64_t seed, std::uint64_t stream, std::uint64_t idx, double sigma);

} // namespace bapmsim::rng
