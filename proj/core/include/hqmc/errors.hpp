#pragma once

#include <stdexcept>
#include <string>

namespace hqmc {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not fit the operation (non-square input, dim mismatch).
class DimensionError : public Error {
   public:
    using Error::Error;
};

/// A model violates one of its structural invariants.
class ModelError : public Error {
   public:
    using Error::Error;
};

/// A symbol, state or proposition name is not known to the model.
class LookupError : public Error {
   public:
    using Error::Error;
};

/// Malformed input document.
class ParseError : public Error {
   public:
    using Error::Error;
};

/// A brute-force enumeration would exceed its configured cap.
class CapExceededError : public Error {
   public:
    using Error::Error;
};

}  // namespace hqmc
