#pragma once

#include <stdexcept>
#include <string>

namespace ncs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NonFiniteState : public Error {
 public:
  using Error::Error;
};

class StepUnderflow : public Error {
 public:
  using Error::Error;
};

/// More than `max_consecutive_jumps` jumps at one continuous time.
class ConsecutiveJumpOverflow : public Error {
 public:
  ConsecutiveJumpOverflow(double t, unsigned long long jumps)
      : Error("consecutive jump overflow at t = " + std::to_string(t) + " after " +
              std::to_string(jumps) + " jumps"),
        t_(t), jumps_(jumps) {}

  double time() const { return t_; }
  unsigned long long jumps() const { return jumps_; }

 private:
  double t_;
  unsigned long long jumps_;
};

class EmptyTrajectory : public Error {
 public:
  EmptyTrajectory() : Error("trajectory has no jumps") {}
};

class EtaOutOfRange : public Error {
 public:
  using Error::Error;
};

class NonSmoothGuard : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ncs
