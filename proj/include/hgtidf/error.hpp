#pragma once

#include <stdexcept>
#include <string>

namespace hgtidf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A numeric precondition was violated (e.g. k > n in a tail probability).
class DomainError : public Error {
  public:
    using Error::Error;
};

/// Malformed input while reading a corpus, snapshot or configuration file.
class ParseError : public Error {
  public:
    using Error::Error;
};

/// Lookup of a term or document that does not exist.
class NotFoundError : public Error {
  public:
    using Error::Error;
};

}  // namespace hgtidf
