#pragma once

#include <cstdint>

namespace garchqr {

/// xoshiro256++ stream seeded from (seed, stream) through SplitMix64.
/// Streams indexed by a counter are independent for practical purposes and
/// do not depend on thread scheduling, so parallel replicates reproduce
/// bit-for-bit. Samplers are hand-rolled (Box-Muller, Marsaglia-Tsang)
/// rather than <random> distributions to keep draws platform-stable.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64();
    /// Uniform on [0,1) with 53 random bits.
    double next_double();
    /// Uniform on (0,1).
    double next_double_open();

    double next_normal();
    double next_exponential();
    /// Gamma(shape, 1) for shape > 0.
    double next_gamma(double shape);
    /// Student's t with nu > 0 degrees of freedom (not standardized).
    double next_student_t(double nu);

private:
    std::uint64_t s_[4];
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

} // namespace garchqr
