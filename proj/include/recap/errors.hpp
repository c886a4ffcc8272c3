// errors.hpp - Exception types for the recap library.
// Every failure mode has its own type so callers (and tests) can catch the
// exact condition; what() carries indices/values for diagnostics.

#ifndef RECAP_ERRORS_HPP
#define RECAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace recap {

class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

#define RECAP_DEFINE_ERROR(Name)                                     \
    class Name : public Error {                                      \
    public:                                                          \
        explicit Name(const std::string& msg) : Error(#Name, msg) {} \
    }

// Kernel / probability-table validation
RECAP_DEFINE_ERROR(NegativeProbability);
RECAP_DEFINE_ERROR(MassExceedsOne);
RECAP_DEFINE_ERROR(MassDeficit);
RECAP_DEFINE_ERROR(HomogeneityViolation);

// Numerics
RECAP_DEFINE_ERROR(DomainError);
RECAP_DEFINE_ERROR(NoConvergence);
RECAP_DEFINE_ERROR(AllZeroCoefficients);
RECAP_DEFINE_ERROR(NoSignChange);

// Companion engine
RECAP_DEFINE_ERROR(HorizonTooShort);
RECAP_DEFINE_ERROR(SpectralRadiusOutOfRange);
RECAP_DEFINE_ERROR(UnsupportedMode);

// HARQ closed forms
RECAP_DEFINE_ERROR(PsiOutOfDomain);
RECAP_DEFINE_ERROR(InfiniteMoment);

// Effective channel
RECAP_DEFINE_ERROR(DimensionCap);
RECAP_DEFINE_ERROR(NonMonotoneOutage);
RECAP_DEFINE_ERROR(TargetOutOfRange);
RECAP_DEFINE_ERROR(LambertDomain);

// Multilayer
RECAP_DEFINE_ERROR(InfeasiblePowerSplit);
RECAP_DEFINE_ERROR(NonMonotoneLayers);

// CLI / configuration
RECAP_DEFINE_ERROR(ConfigParse);

#undef RECAP_DEFINE_ERROR

} // namespace recap

#endif // RECAP_ERRORS_HPP
