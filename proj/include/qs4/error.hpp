#ifndef QS4_ERROR_HPP
#define QS4_ERROR_HPP

#include <stdexcept>
#include <string>

namespace qs4 {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input or configuration. The CLI maps this to exit status 1.
class ValidationError : public Error {
public:
    using Error::Error;
};

// A numerical safety check fired mid-computation (Nyquist guard, tail test,
// step-size underflow). The CLI maps this to exit status 2.
class NumericalGuardError : public Error {
public:
    using Error::Error;
};

inline void require(bool ok, const std::string& what)
{
    if (!ok) throw ValidationError(what);
}

} // namespace qs4

#endif
