#include "nbcr/simulate.hpp"

#include <cmath>

#include "nbcr/error.hpp"

namespace nbcr {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) noexcept {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return ctr;
}

SeededStream::SeededStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
    : seed_(seed), stream_id_(stream_id) {}

void SeededStream::refill() noexcept {
    const std::array<std::uint32_t, 4> counter{
        static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
    const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
    buffer_ = philox4x32(counter, key);
    ++block_;
    used_ = 0;
}

std::uint64_t SeededStream::next_u64() noexcept {
    if (used_ > 2)
        refill();
    const std::uint64_t value = (static_cast<std::uint64_t>(buffer_[used_ + 1]) << 32) | buffer_[used_];
    used_ += 2;
    return value;
}

double SeededStream::uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double SeededStream::normal() noexcept {
    if (has_spare_normal_) {
        has_spare_normal_ = false;
        return spare_normal_;
    }
    // Marsaglia polar method
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = v * factor;
    has_spare_normal_ = true;
    return u * factor;
}

double sample_gamma(double shape, double scale, SeededStream& stream) {
    if (!(shape > 0.0) || !(scale > 0.0))
        throw Error(ErrorCode::Domain, "gamma shape and scale must be positive");
    if (shape < 1.0) {
        // G(a) = G(a + 1) U^(1/a)
        const double boosted = sample_gamma(shape + 1.0, 1.0, stream);
        return scale * std::exp(std::log(boosted) + std::log(stream.uniform()) / shape);
    }
    // Marsaglia-Tsang
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x, v;
        do {
            x = stream.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = stream.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2)
            return scale * d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v)))
            return scale * d * v;
    }
}

std::int64_t sample_poisson_one(double mu, SeededStream& stream) {
    if (!(mu >= 0.0) || !std::isfinite(mu))
        throw Error(ErrorCode::Domain, "Poisson mean must be finite and nonnegative");
    if (mu == 0.0)
        return 0;

    if (mu <= 10.0) {
        const double u = stream.uniform();
        std::int64_t x = 0;
        double prob = std::exp(-mu);
        double cdf = prob;
        // the bound on x guards against cdf stalling just below u from rounding
        while (u > cdf && x < 1000) {
            ++x;
            prob *= mu / static_cast<double>(x);
            cdf += prob;
        }
        return x;
    }

    // Hormann (1993) transformed rejection with squeeze
    const double slam = std::sqrt(mu);
    const double loglam = std::log(mu);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    while (true) {
        const double u = stream.uniform() - 0.5;
        const double v = stream.uniform();
        const double us = 0.5 - std::fabs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mu + 0.43);
        if (us >= 0.07 && v <= vr)
            return static_cast<std::int64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us))
            continue;
        if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <= -mu + k * loglam - log_gamma(k + 1.0))
            return static_cast<std::int64_t>(k);
    }
}

std::vector<std::int64_t> sample_poisson(double mu, std::int64_t n, SeededStream& stream) {
    if (!(mu > 0.0))
        throw Error(ErrorCode::Domain, "Poisson mean must be positive");
    if (n < 1)
        throw Error(ErrorCode::Domain, "sample size must be positive");
    std::vector<std::int64_t> out(static_cast<std::size_t>(n));
    for (auto& x : out)
        x = sample_poisson_one(mu, stream);
    return out;
}

std::vector<std::int64_t> sample_nb(const NbParams& params, std::int64_t n, SeededStream& stream) {
    if (params.is_poisson())
        return sample_poisson(params.mu(), n, stream);
    if (n < 1)
        throw Error(ErrorCode::Domain, "sample size must be positive");
    const double shape = params.mu() / params.p_shape();
    const double scale = params.p_shape();
    std::vector<std::int64_t> out(static_cast<std::size_t>(n));
    for (auto& x : out)
        x = sample_poisson_one(sample_gamma(shape, scale, stream), stream);
    return out;
}

} // namespace nbcr
