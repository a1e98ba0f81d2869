#pragma once
/**
 * @file idm.hpp
 * @brief Intelligent driver model acceleration.
 */

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace argus {

struct IdmParams
{
  double v0{10.0};     ///< desired speed, m/s
  double s0{4.0};      ///< minimum net distance, m
  double T{0.25};      ///< time headway, s
  double a_max{11.0};  ///< m/s^2
  double b_comf{20.0}; ///< m/s^2
  double sigma{4.0};

  void validate() const
  {
    if (!(v0 > 0.0) || !(s0 > 0.0) || !(T > 0.0) || !(a_max > 0.0) || !(b_comf > 0.0) ||
        !(sigma > 0.0)) {
      throw std::invalid_argument("IDM parameters must all be positive");
    }
  }
};

inline constexpr double kMinNetGap = 0.1;

struct LeadingActor
{
  std::string id;
  double net_gap{std::numeric_limits<double>::infinity()};  ///< m, bumper to bumper
  double rel_speed{0.0};  ///< v_ego - v_lead
  bool is_virtual{false}; ///< stop-signal region

  bool operator==(const LeadingActor&) const = default;
};

inline double idm_desired_gap(double v, double dv, const IdmParams& p)
{
  return std::max(0.0, p.s0 + v * p.T + v * dv / (2.0 * std::sqrt(p.a_max * p.b_comf)));
}

/// Free-road acceleration (no leading actor).
inline double idm_free_accel(double v, const IdmParams& p)
{
  return p.a_max * (1.0 - std::pow(v / p.v0, p.sigma));
}

inline double idm_accel(double v, const LeadingActor& lead, const IdmParams& p)
{
  if (!std::isfinite(lead.net_gap)) {
    return idm_free_accel(v, p);
  }
  const double s = std::max(kMinNetGap, lead.net_gap);
  const double ratio = idm_desired_gap(v, lead.rel_speed, p) / s;
  return p.a_max * (1.0 - std::pow(v / p.v0, p.sigma) - ratio * ratio);
}

}  // namespace argus
