#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace curvflow {

// Root of every error raised by the library. Subclasses are named after the
// failure they report so callers can catch narrowly.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define CURVFLOW_DEFINE_ERROR(Name)                 \
    class Name : public Error {                     \
    public:                                         \
        using Error::Error;                         \
    };

// manifold
CURVFLOW_DEFINE_ERROR(InvalidGridSpec)
CURVFLOW_DEFINE_ERROR(MeshFormatError)
CURVFLOW_DEFINE_ERROR(NonTriangleFace)
CURVFLOW_DEFINE_ERROR(DegenerateTriangle)
CURVFLOW_DEFINE_ERROR(SizeMismatch)

// psi expressions
CURVFLOW_DEFINE_ERROR(DimensionMismatch)
CURVFLOW_DEFINE_ERROR(EvalDomainError)

// flow / solvers
CURVFLOW_DEFINE_ERROR(NonPositiveField)
CURVFLOW_DEFINE_ERROR(IllConditionedInitialData)
CURVFLOW_DEFINE_ERROR(ZeroDenominator)
CURVFLOW_DEFINE_ERROR(StepRejectedPositivity)
CURVFLOW_DEFINE_ERROR(NewtonNoConvergence)
CURVFLOW_DEFINE_ERROR(PositivityLost)
CURVFLOW_DEFINE_ERROR(EigenNoConvergence)
CURVFLOW_DEFINE_ERROR(InnerSolverFailure)
CURVFLOW_DEFINE_ERROR(InvalidDimension)
CURVFLOW_DEFINE_ERROR(InvalidArgument)

#undef CURVFLOW_DEFINE_ERROR

class ParseError : public Error {
public:
    ParseError(std::size_t offset, const std::string& message)
        : Error("parse error at byte " + std::to_string(offset) + ": " + message),
          offset_(offset), message_(message) {}

    std::size_t offset() const noexcept { return offset_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::size_t offset_;
    std::string message_;
};

}  // namespace curvflow
