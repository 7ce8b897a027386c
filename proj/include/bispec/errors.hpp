#ifndef BISPEC_ERRORS_HPP
#define BISPEC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bispec {

// Base for everything the library throws.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input outside an operation's stated domain. The CLI maps this to exit code 2.
struct PreconditionError : Error {
    using Error::Error;
};

struct ConvergenceError : Error {
    using Error::Error;
};

// Requested evaluation point too close to an eigenvalue of the data.
struct PoleProximityError : Error {
    PoleProximityError(const std::string& what, double nearest)
        : Error(what), nearest_eigenvalue(nearest) {}
    double nearest_eigenvalue;
};

// Plane-wave expansion tail above tolerance at the chosen lmax.
struct TruncationError : Error {
    using Error::Error;
};

// Bessel evaluation would overflow double range.
struct OverflowError : Error {
    using Error::Error;
};

inline void require(bool ok, const std::string& msg)
{
    if (!ok) throw PreconditionError(msg);
}

} // namespace bispec

#endif // BISPEC_ERRORS_HPP
