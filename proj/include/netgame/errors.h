#pragma once

#include <stdexcept>
#include <string>

namespace netgame {

/// Shapes of the arguments do not fit together.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An argument is outside the domain an operation is defined on.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A linear system was numerically singular.
class SingularityError : public std::runtime_error {
 public:
  SingularityError(const std::string& what, double rcond)
      : std::runtime_error(what), rcond_(rcond) {}

  /// Reciprocal condition estimate of the offending matrix.
  double rcond() const { return rcond_; }

 private:
  double rcond_;
};

/// A Sylvester-type equation has no unique solution (shared spectrum).
class NonUniqueSolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gain construction failed (Riccati, observer or stabilizer design).
class SynthesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A standing assumption required by a strategy does not hold.
class AssumptionError : public std::runtime_error {
 public:
  AssumptionError(int assumption, const std::string& what)
      : std::runtime_error(what), assumption_(assumption) {}

  int assumption() const { return assumption_; }

 private:
  int assumption_;
};

/// Simulation produced a non-finite state.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}

  double time() const { return time_; }

 private:
  double time_;
};

/// An agent tried to read data from an agent that is not its neighbor.
class FirewallViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed scenario or controller document.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Controller file was synthesized for a different scenario.
class StaleControllerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace netgame
