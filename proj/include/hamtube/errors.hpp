#pragma once
#include <stdexcept>
#include <string>

namespace hamtube {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// malformed config or mismatched dimensions
struct SchemaError : Error {
  using Error::Error;
};

// point outside the region where a tube is defined
struct DomainExit : Error {
  using Error::Error;
};

struct ConvergenceError : Error {
  using Error::Error;
};

struct PreconditionError : Error {
  using Error::Error;
};

// a constructed object failed its own numeric invariants
struct CertificationError : Error {
  using Error::Error;
};

}  // namespace hamtube
