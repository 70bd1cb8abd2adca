#pragma once

namespace bandalloc {

// Outcome of an envelope computation. Infeasibility is a result, not an error.
enum class Status { ok, infeasible, solver_failure };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::ok:
      return "ok";
    case Status::infeasible:
      return "infeasible";
    case Status::solver_failure:
      return "solver_failure";
  }
  return "unknown";
}

}  // namespace bandalloc
