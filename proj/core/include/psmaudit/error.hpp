#pragma once

#include <stdexcept>
#include <string>

namespace psmaudit {

// Every failure raised by the library derives from Error. The CLI maps any
// Error to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Input that parsed but left nothing to work with (empty corpus, empty
// blocklist, no accounts).
class EmptyInputError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Model file is truncated, corrupted, or written by another format version.
class DecodeError : public Error {
 public:
  using Error::Error;
};

// A model was handed data it was not trained on.
class ProvenanceError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Returns the toolkit version embedded in every report.
std::string toolkit_version();

}  // namespace psmaudit
