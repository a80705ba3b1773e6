#pragma once

#include <stdexcept>
#include <string>

namespace robopainter {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parameter file problems, split by what went wrong so callers can map them
// to distinct exit codes / messages.
struct ParamsError : Error {
  enum class Kind { Parse, MissingKey, UnitViolation, InvariantViolation };
  Kind kind;
  ParamsError(Kind k, const std::string& what) : Error(what), kind(k) {}
};

struct RoomError : Error {
  using Error::Error;
};

// Castor trail length d ~ 0 makes the steering rate 1/d blow up.
struct CastorSingularity : Error {
  using Error::Error;
};

// Joint-space inertia not invertible at the requested state.
struct SingularInertia : Error {
  using Error::Error;
};

// Constraint matrix lost row rank; multiplier recovery is ill-posed.
struct RankDeficient : Error {
  using Error::Error;
};

struct PlanError : Error {
  enum class Kind { WallTooNarrow, WallTooTall, BadStandoff, BadDuration, StripOutOfRange };
  Kind kind;
  PlanError(Kind k, const std::string& what) : Error(what), kind(k) {}
};

// Windowed statistic queried before the window filled.
struct WindowNotFull : Error {
  using Error::Error;
};

// Iterative inverse kinematics failed to meet tolerance (likely unreachable).
struct NoConvergence : Error {
  int iterations;
  double residual;
  NoConvergence(int iters, double res, const std::string& what)
      : Error(what), iterations(iters), residual(res) {}
};

// Unrecoverable failure while executing a mission (maps to CLI exit code 3).
struct MissionError : Error {
  using Error::Error;
};

}  // namespace robopainter
