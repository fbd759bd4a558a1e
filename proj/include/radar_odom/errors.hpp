#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace radar_odom {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input bytes or text could not be decoded. offset is a byte offset for
/// binary formats and a 1-based line number for text formats.
class MalformedFile : public Error {
 public:
  MalformedFile(const std::string& what, std::uint64_t offset)
      : Error(what + " (at " + std::to_string(offset) + ")"), offset_(offset) {}

  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

class MissingMetadata : public Error {
 public:
  using Error::Error;
};

class RegistrationFailed : public Error {
 public:
  using Error::Error;
};

class TooFewCorrespondences : public RegistrationFailed {
 public:
  TooFewCorrespondences(std::size_t found, std::size_t required)
      : RegistrationFailed("too few correspondences: " + std::to_string(found) + " < " + std::to_string(required)),
        found_(found) {}

  std::size_t found() const { return found_; }

 private:
  std::size_t found_;
};

class SingularNormalEquations : public RegistrationFailed {
 public:
  SingularNormalEquations() : RegistrationFailed("normal equations are rank deficient") {}
};

class PathTooShort : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

}  // namespace radar_odom
