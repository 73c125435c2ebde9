#include "gridplan/lattice_sampler.hpp"

#include <algorithm>
#include <cmath>

#include "gridplan/polynomial.hpp"

namespace gridplan {

namespace {

struct LonProfile {
  PolynomialProfile poly;
  double t1{kHorizonSeconds};
  double hold_s{0.0};  // station held after t1 (stop profiles)
  Maneuver maneuver{Maneuver::kLaneKeep};
};

struct LatProfile {
  PolynomialProfile poly;
  double span{0.0};  // transition length in s
  double l_end{0.0};
};

// Reference sample that extends straight past the line end, so candidates
// near the route end stay well-defined.
struct RefSample {
  Vec2 base;
  Vec2 normal;
  double heading{0.0};
  double kappa{0.0};
};

RefSample sample_ref(const ReferenceLine& ref, double s) {
  RefSample out;
  const double len = ref.length();
  if (s <= len) {
    out.base = ref.point_at(s);
    out.normal = ref.normal_at(s);
    out.heading = ref.heading_at(s);
    out.kappa = ref.curvature_at(s);
  } else {
    const Vec2 tangent = ref.tangent_at(len);
    out.base = ref.point_at(len) + tangent * (s - len);
    out.normal = ref.normal_at(len);
    out.heading = ref.heading_at(len);
    out.kappa = 0.0;
  }
  return out;
}

Maneuver combined_maneuver(Maneuver lon, double l0, double l_end) {
  if (l_end - l0 > 1.0) return Maneuver::kLaneChangeLeft;
  if (l_end - l0 < -1.0) return Maneuver::kLaneChangeRight;
  return lon;
}

}  // namespace

FrenetState ego_frenet_state(const EgoState& ego, const ReferenceLine& ref) {
  FrenetState fs = project_to_frenet(ego.position(), ref);
  const double dtheta =
      std::clamp(wrap_angle(ego.heading - ref.heading_at(fs.s)), -1.0, 1.0);
  fs.s_dot = std::max(0.0, ego.v * std::cos(dtheta));
  fs.s_ddot = ego.a * std::cos(dtheta);
  fs.l_prime = std::tan(dtheta);
  fs.l_pprime = 0.0;
  return fs;
}

CandidateSet lattice_sampler(const EgoState& ego, const ReferenceLine& ref, const StGraph& st,
                             double target_speed, const LatticeConfig& config) {
  const FrenetState init = ego_frenet_state(ego, ref);

  std::vector<LonProfile> lon_profiles;
  // Cruise: end speed sweep around the target, end position free.
  for (double dv : config.cruise_speed_offsets) {
    const double ve = std::max(0.0, target_speed + dv);
    LonProfile p;
    p.poly = fit_quartic(init.s, init.s_dot, init.s_ddot, ve, 0.0, kHorizonSeconds);
    p.maneuver = Maneuver::kLaneKeep;
    lon_profiles.push_back(std::move(p));
  }
  // Follow / overtake around each occupied band.
  const int last = kHorizonSteps - 1;
  for (const StBand& band : st.bands) {
    if (!band.present(last)) continue;
    const double slope = band.slope();
    for (double gap : config.follow_gaps) {
      const double s1 = band.lower(last) - gap;
      if (s1 < init.s + 0.5) continue;
      LonProfile p;
      p.poly = fit_quintic(init.s, init.s_dot, init.s_ddot, s1, std::max(0.0, slope), 0.0,
                           kHorizonSeconds);
      p.maneuver = Maneuver::kFollow;
      lon_profiles.push_back(std::move(p));
    }
    const double reach_cap = init.s + (std::max(init.s_dot, target_speed) + 2.0) * kHorizonSeconds;
    for (double gap : config.overtake_gaps) {
      const double s1 = band.upper(last) + gap;
      if (s1 > reach_cap) continue;
      LonProfile p;
      p.poly = fit_quintic(init.s, init.s_dot, init.s_ddot, s1,
                           std::max(target_speed, slope), 0.0, kHorizonSeconds);
      p.maneuver = Maneuver::kOvertake;
      lon_profiles.push_back(std::move(p));
    }
  }
  // Stop at an explicit target.
  if (config.stop_s) {
    const double s1 = *config.stop_s - config.stop_margin;
    if (s1 > init.s + 0.3) {
      for (double t1 : config.stop_times) {
        LonProfile p;
        p.poly = fit_quintic(init.s, init.s_dot, init.s_ddot, s1, 0.0, 0.0, t1);
        p.t1 = t1;
        p.hold_s = s1;
        p.maneuver = Maneuver::kStop;
        lon_profiles.push_back(std::move(p));
      }
    }
  }

  // Lateral quintic offset paths over the transition span.
  std::vector<double> l_ends = config.lateral_offsets;
  if (config.lane_change) {
    l_ends.push_back(config.lane_width);
    l_ends.push_back(-config.lane_width);
  }
  const double span = std::clamp(init.s_dot * kHorizonSeconds, 15.0, 40.0);
  std::vector<LatProfile> lat_profiles;
  for (double l_end : l_ends) {
    LatProfile p;
    p.poly = fit_quintic(init.l, init.l_prime, init.l_pprime, l_end, 0.0, 0.0, span);
    p.span = span;
    p.l_end = l_end;
    lat_profiles.push_back(std::move(p));
  }

  CandidateSet set;
  for (const LonProfile& lon : lon_profiles) {
    for (const LatProfile& lat : lat_profiles) {
      if (static_cast<int>(set.size()) >= config.max_candidates) break;
      Trajectory traj;
      traj.source = TrajectorySource::kLattice;
      traj.maneuver = combined_maneuver(lon.maneuver, init.l, lat.l_end);
      traj.start = {0.0, ego.x, ego.y, ego.heading, ego.v};
      traj.waypoints.reserve(kHorizonSteps);
      bool ok = true;
      double prev_s = init.s;
      for (int k = 1; k <= kHorizonSteps && ok; ++k) {
        const double t = kDt * k;
        double s = 0.0;
        double s_dot = 0.0;
        if (t <= lon.t1) {
          s = lon.poly.eval(t);
          s_dot = lon.poly.eval(t, 1);
        } else {
          s = lon.hold_s;
          s_dot = 0.0;
        }
        if (s < prev_s - 1e-9 || s_dot < -1e-6) {
          ok = false;  // reversing profile
          break;
        }
        prev_s = s;
        const double sigma = std::max(0.0, s - init.s);
        double l = lat.l_end;
        double l_prime = 0.0;
        if (sigma <= lat.span) {
          l = lat.poly.eval(sigma);
          l_prime = lat.poly.eval(sigma, 1);
        }
        if (std::abs(l) <= config.corridor_half_width && st.occupied(s, k - 1)) {
          ok = false;  // enters an occupied band inside the corridor
          break;
        }
        const RefSample rs = sample_ref(ref, s);
        const double one_kl = std::max(0.1, 1.0 - rs.kappa * l);
        const Vec2 p = rs.base + rs.normal * l;
        const double heading = wrap_angle(rs.heading + std::atan2(l_prime, one_kl));
        const double v =
            std::max(0.0, s_dot) * std::sqrt(one_kl * one_kl + l_prime * l_prime);
        traj.waypoints.push_back({t, p.x, p.y, heading, v});
      }
      if (ok) set.add(std::move(traj));
    }
  }

  return kinematic_filter(set, config.limits);
}

}  // namespace gridplan
