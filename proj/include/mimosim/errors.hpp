#ifndef MIMOSIM_ERRORS_HPP
#define MIMOSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mimosim {

/// Base class of every error thrown by the simulator.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A parameter is outside its admissible range. The message names the parameter.
class InvalidParameter : public Error {
public:
  using Error::Error;
};

/// Bit stream lengths do not fit the transport block layout.
class FramingError : public Error {
public:
  using Error::Error;
};

/// Matrix or vector dimensions disagree.
class ShapeError : public Error {
public:
  using Error::Error;
};

class SingularMatrix : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

/// A measure was requested over an empty population.
class UndefinedMeasure : public Error {
public:
  using Error::Error;
};

class TrainingDiverged : public Error {
public:
  TrainingDiverged(int epoch, const std::string& what)
      : Error(what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

private:
  int epoch_;
};

} // namespace mimosim

#endif // MIMOSIM_ERRORS_HPP
