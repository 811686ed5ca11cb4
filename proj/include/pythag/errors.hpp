#pragma once

#include <stdexcept>
#include <string>

namespace pythag {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An element has no inverse modulo the requested modulus.
class NotInvertible : public Error {
public:
    using Error::Error;
};

/// |S(a,b;c)| exceeded the Weil bound; this can only mean an implementation bug.
class WeilViolation : public Error {
public:
    using Error::Error;
};

/// Window parameters violate 1 <= Y <= M <= n or n is even.
class BadWindow : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature could not reach its tolerance within the node budget.
class QuadratureFailure : public Error {
public:
    using Error::Error;
};

/// An integer computation would leave the 64-bit range.
class Overflow : public Error {
public:
    using Error::Error;
};

/// The singular series is only defined for odd n.
class EvenInput : public Error {
public:
    using Error::Error;
};

/// The product formula for P(n) requires a square-free argument.
class NotSquarefree : public Error {
public:
    using Error::Error;
};

/// Perron check parameters violate gcd(beta2, 2*beta1) = 1 or square-freeness.
class BadCoprimality : public Error {
public:
    using Error::Error;
};

/// A chain index or TParams tuple does not satisfy its invariants.
class BadParams : public Error {
public:
    using Error::Error;
};

/// A report file could not be written.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace pythag
