#include "nbcr/error.hpp"

namespace nbcr {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::Domain: return "Domain";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::NegativeCount: return "NegativeCount";
    case ErrorCode::ZeroMean: return "ZeroMean";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::DomainInvalid: return "DomainInvalid";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::Parse: return "Parse";
    }
    return "Unknown";
}

} // namespace nbcr
