#pragma once

#include <stdexcept>
#include <string>

namespace hyperdist {

// Base class for all toolkit errors. CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Dataset or score file that does not match the expected column layout.
class FormatError : public Error {
 public:
  using Error::Error;
};

// PPMI/PLMI weighting requested on a matrix with no counts.
class DegenerateSpaceError : public Error {
 public:
  using Error::Error;
};

// Context id or string not present in the space.
class UnknownContextError : public Error {
 public:
  using Error::Error;
};

// Target with no nonzero contexts where a nonempty row is required.
class EmptyRowError : public Error {
 public:
  using Error::Error;
};

// Space or auxiliary file failed magic/version/checksum/structure checks.
class CorruptSpaceError : public Error {
 public:
  using Error::Error;
};

// SLQS-style ratio with a zero reference entropy.
class DegenerateEntropyError : public Error {
 public:
  using Error::Error;
};

// RCTC scored without a word-word PMI table.
class MissingAuxiliaryError : public Error {
 public:
  using Error::Error;
};

// Average precision over a ranking that contains no positive instance.
class UndefinedApError : public Error {
 public:
  using Error::Error;
};

}  // namespace hyperdist
