#pragma once

#include <stdexcept>
#include <string>

namespace turnkit {

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// File or stream content that does not conform to a turnkit format.
class ParseError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

class InvalidArgumentError : public Error {
public:
  using Error::Error;
};

// A required joint is marked missing in the frame.
class MissingJointError : public Error {
public:
  using Error::Error;
};

// A body vector too short to define a direction.
class DegenerateVectorError : public Error {
public:
  using Error::Error;
};

// Sequence has fewer than two frames.
class TooShortError : public Error {
public:
  using Error::Error;
};

// Every frame transition was skipped due to missing or degenerate data.
class NoUsableTransitionError : public Error {
public:
  using Error::Error;
};

}  // namespace turnkit
