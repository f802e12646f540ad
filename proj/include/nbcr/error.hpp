#ifndef NBCR_ERROR_HPP
#define NBCR_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace nbcr {

enum class ErrorCode {
    Domain,          // argument outside a function's mathematical domain
    EmptySample,     // fewer than two observations
    NegativeCount,
    ZeroMean,        // all-zero sample, ln(mu_hat) undefined
    ZeroVariance,    // constant sample, ln(P_hat + 1) undefined
    DomainInvalid,   // candidate outside {mu > 0, P > -1, mu + P > 0}
    GridTooCoarse,
    InvalidGrid,
    EmptyGrid,
    Parse,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace nbcr

#endif // NBCR_ERROR_HPP
