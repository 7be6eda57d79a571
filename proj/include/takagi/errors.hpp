#pragma once

#include <stdexcept>
#include <string>

namespace takagi {

/// Base of every domain error raised by the library. `name()` is the stable
/// identifier the CLI prints verbatim.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* name() const noexcept = 0;
};

#define TAKAGI_DEFINE_ERROR(Type)                                          \
    class Type : public Error {                                            \
    public:                                                                \
        using Error::Error;                                                \
        const char* name() const noexcept override { return #Type; }       \
    }

/// The point is a corner j/2r^n of some partial sum inside the requested depth.
TAKAGI_DEFINE_ERROR(PointInCorner);
/// An interval with nonzero slope was used where a flat one is required.
TAKAGI_DEFINE_ERROR(NotFlat);
/// Fewer zero times of the slope walk than requested within the search depth.
TAKAGI_DEFINE_ERROR(NotEnoughZeros);
/// An infinite-horizon property could not be settled within the budget.
TAKAGI_DEFINE_ERROR(BudgetInconclusive);
/// Requested depth exceeds the enumeration or memory cap.
TAKAGI_DEFINE_ERROR(DepthCap);
/// Argument outside the domain an operation accepts (e.g. x outside [0,1)).
TAKAGI_DEFINE_ERROR(OutOfRange);

#undef TAKAGI_DEFINE_ERROR

} // namespace takagi
