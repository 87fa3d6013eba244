#pragma once

#include <stdexcept>
#include <string>

namespace consecrm {

// Failure categories shared across the library. Instance validation returns
// violations as data instead of throwing; everything else throws Error.
enum class Errc {
  occupied_slot,
  not_contained,
  wrong_scenario,
  wrong_shape,
  too_large,
  bad_spec,
  duplicate_name,
  bad_bounds,
  bad_gamma,
  zero_denominator,
  zero_attraction,
  mismatch,
  not_optimal,
  invariant_breach,
  lp_not_optimal,
  bad_input,
};

inline const char* to_string(Errc c) {
  switch (c) {
    case Errc::occupied_slot: return "OccupiedSlot";
    case Errc::not_contained: return "NotContained";
    case Errc::wrong_scenario: return "WrongScenario";
    case Errc::wrong_shape: return "WrongShape";
    case Errc::too_large: return "TooLarge";
    case Errc::bad_spec: return "BadSpec";
    case Errc::duplicate_name: return "DuplicateName";
    case Errc::bad_bounds: return "BadBounds";
    case Errc::bad_gamma: return "BadGamma";
    case Errc::zero_denominator: return "ZeroDenominator";
    case Errc::zero_attraction: return "ZeroAttraction";
    case Errc::mismatch: return "Mismatch";
    case Errc::not_optimal: return "NotOptimal";
    case Errc::invariant_breach: return "InvariantBreach";
    case Errc::lp_not_optimal: return "LpNotOptimal";
    case Errc::bad_input: return "BadInput";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace consecrm
