#pragma once

#include <stdexcept>
#include <string>

namespace blowup {

/// Parameters outside the range where a formula or construction is defined.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Evaluation of an unbounded profile at the origin.
class SingularityError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Any numerical procedure that could not reach its accuracy target.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive quadrature ran out of refinements. Carries the best estimate.
class QuadratureFailure : public NumericalFailure {
public:
    QuadratureFailure(double estimate, double error_bound)
        : NumericalFailure("quadrature did not converge: estimate " + std::to_string(estimate) +
                           ", error bound " + std::to_string(error_bound)),
          estimate_(estimate),
          error_bound_(error_bound) {}

    double estimate() const noexcept { return estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double estimate_;
    double error_bound_;
};

}  // namespace blowup
