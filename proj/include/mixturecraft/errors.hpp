#ifndef MIXTURECRAFT_ERRORS_HPP
#define MIXTURECRAFT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mixturecraft {

enum class errc {
    unknown_density,
    invalid_parameter,
    dimension_error,
    zero_on_ball,
    continuity_required,
    parse_error,
    invalid_mixture,
    bandwidth_not_found,
    quadrature_inconsistency,
    zero_kernel,
    budget_exceeded,
    ess_bound_required,
    quadrature_budget,
};

inline const char* errc_name(errc c)
{
    switch (c) {
        case errc::unknown_density:         return "UnknownDensity";
        case errc::invalid_parameter:       return "InvalidParameter";
        case errc::dimension_error:         return "DimensionError";
        case errc::zero_on_ball:            return "ZeroOnBall";
        case errc::continuity_required:     return "ContinuityRequired";
        case errc::parse_error:             return "ParseError";
        case errc::invalid_mixture:         return "InvalidMixture";
        case errc::bandwidth_not_found:     return "BandwidthNotFound";
        case errc::quadrature_inconsistency: return "QuadratureInconsistency";
        case errc::zero_kernel:             return "ZeroKernel";
        case errc::budget_exceeded:         return "BudgetExceeded";
        case errc::ess_bound_required:      return "EssBoundRequired";
        case errc::quadrature_budget:       return "QuadratureBudget";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what)
{
    throw Error(code, what);
}

} // namespace mixturecraft

#endif
