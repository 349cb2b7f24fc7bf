#pragma once

#include <stdexcept>
#include <string>

namespace gfd {

/// Root of the library's exception hierarchy.  Everything thrown by gfd::
/// derives from this, so callers can distinguish library failures from
/// runtime_errors raised elsewhere.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// A documented precondition of an operation was violated by the caller
/// (bad parameter range, mismatched lengths, contract breach).
class precondition_error : public error {
 public:
  explicit precondition_error(const std::string& what) : error(what) {}
};

/// An argument lies outside the mathematical domain of the function
/// (e.g. kernel evaluated at t <= 0, transform on the branch cut).
class domain_error : public precondition_error {
 public:
  explicit domain_error(const std::string& what) : precondition_error(what) {}
};

/// The requested operation is not defined for this variant of the input
/// (e.g. Bernstein representation of a tabulated kernel).
class unsupported_variant_error : public error {
 public:
  explicit unsupported_variant_error(const std::string& what) : error(what) {}
};

/// A numerical process failed: divergent quadrature, eigensolver breakdown,
/// non-finite intermediate, optimizer collapse.
class numerical_error : public error {
 public:
  explicit numerical_error(const std::string& what) : error(what) {}
};

/// A linear solve hit a diagonal or pivot below the machine guard; usually
/// means the regularization parameter or the step size must change.
class ill_conditioning_error : public numerical_error {
 public:
  explicit ill_conditioning_error(const std::string& what) : numerical_error(what) {}
};

}  // namespace gfd
