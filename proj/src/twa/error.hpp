#pragma once

#include <stdexcept>
#include <string>

namespace twa {

enum class errc {
  ok = 0,
  cycle_detected,
  disconnected,
  non_positive_weight,
  unknown_root,
  unknown_vertex,
  negative_mass,
  not_normalized,
  unmapped_point,
  too_large,
  infeasible_marginals,
  mass_leak,
  single_point,
  non_contraction_violated,
  empty_metric,
  parse_error,
  invalid_argument,
  internal,
};

/// Library error: a code from the fixed set plus a human-readable message
/// naming the offending edge/vertex/value.
class Error : public std::runtime_error {
 public:
  Error(errc code, std::string msg) : std::runtime_error(std::move(msg)), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw Error(code, msg); }

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::ok: return "ok";
    case errc::cycle_detected: return "cycle_detected";
    case errc::disconnected: return "disconnected";
    case errc::non_positive_weight: return "non_positive_weight";
    case errc::unknown_root: return "unknown_root";
    case errc::unknown_vertex: return "unknown_vertex";
    case errc::negative_mass: return "negative_mass";
    case errc::not_normalized: return "not_normalized";
    case errc::unmapped_point: return "unmapped_point";
    case errc::too_large: return "too_large";
    case errc::infeasible_marginals: return "infeasible_marginals";
    case errc::mass_leak: return "mass_leak";
    case errc::single_point: return "single_point";
    case errc::non_contraction_violated: return "non_contraction_violated";
    case errc::empty_metric: return "empty_metric";
    case errc::parse_error: return "parse_error";
    case errc::invalid_argument: return "invalid_argument";
    case errc::internal: return "internal";
  }
  return "unknown";
}

}  // namespace twa
