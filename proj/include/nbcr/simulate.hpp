#ifndef NBCR_SIMULATE_HPP
#define NBCR_SIMULATE_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "nbcr/nbd_model.hpp"

namespace nbcr {

/// Philox4x32-10 counter-based generator. The key is the seed, the upper half of
/// the counter is the stream id and the lower half counts blocks, so every
/// (seed, stream_id) pair is an independent, reproducible substream.
class SeededStream {
public:
    using result_type = std::uint64_t;

    SeededStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    std::uint64_t next_u64() noexcept;
    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() noexcept;
    double normal() noexcept;

    // UniformRandomBitGenerator
    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }
    result_type operator()() noexcept { return next_u64(); }

private:
    void refill() noexcept;

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
    bool has_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

/// One Philox4x32-10 block, exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key) noexcept;

/// Gamma(shape, scale) variate; shape < 1 goes through the shape + 1 boost.
double sample_gamma(double shape, double scale, SeededStream& stream);

/// Poisson(mu) variate: sequential-search inversion for mu <= 10, transformed
/// rejection (PTRS) above. mu = 0 returns 0.
std::int64_t sample_poisson_one(double mu, SeededStream& stream);

std::vector<std::int64_t> sample_poisson(double mu, std::int64_t n, SeededStream& stream);

/// NB(mu, P) draws through the Gamma-Poisson mixture: Lambda ~ Gamma(mu / P, P),
/// X ~ Poisson(Lambda). P = 0 draws Poisson(mu).
std::vector<std::int64_t> sample_nb(const NbParams& params, std::int64_t n, SeededStream& stream);

} // namespace nbcr

#endif // NBCR_SIMULATE_HPP
