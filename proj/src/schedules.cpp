#include "mr/schedules.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "mr/errors.hpp"

namespace mr {

ScheduleConfig ScheduleConfig::parse(const std::string& text) {
  ScheduleConfig c;
  if (text == "classic") {
    c.kind = ScheduleKind::Classic;
  } else if (text.rfind("poly:r=", 0) == 0) {
    c.kind = ScheduleKind::Polynomial;
    c.r = std::stod(text.substr(7));
    if (!(c.r > 0.0)) throw Error("polynomial schedule requires r > 0 (rule-compliant for r >= 2)");
  } else if (text == "sc-const") {
    c.kind = ScheduleKind::StronglyConvexConstant;
  } else {
    throw Error("unknown schedule: " + text + " (expected classic | poly:r=<r> | sc-const)");
  }
  return c;
}

std::string ScheduleConfig::to_string() const {
  switch (kind) {
    case ScheduleKind::Classic: return "classic";
    case ScheduleKind::Polynomial: {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "poly:r=%.17g", r);
      return buf;
    }
    case ScheduleKind::StronglyConvexConstant: return "sc-const";
  }
  return "classic";
}

Schedule::Schedule(ScheduleConfig config) : config_(config) { reset(); }

double Schedule::t_of(long k) const {
  // Polynomial admits a closed form; Classic is handled incrementally.
  return (static_cast<double>(k) - 1.0 + config_.r) / config_.r;
}

void Schedule::reset() {
  if (config_.kind == ScheduleKind::StronglyConvexConstant) return;
  j_ = 0;
  t_j_ = 1.0;
  t_next_ = config_.kind == ScheduleKind::Classic
                ? (1.0 + std::sqrt(1.0 + 4.0 * t_j_ * t_j_)) / 2.0
                : t_of(2);
}

Schedule::Step Schedule::advance() {
  if (config_.kind == ScheduleKind::StronglyConvexConstant) {
    const double sl = std::sqrt(config_.lipschitz), sm = std::sqrt(config_.mu);
    ++j_;
    return Step{std::numeric_limits<double>::quiet_NaN(), (sl - sm) / (sl + sm)};
  }
  const double beta = (t_j_ - 1.0) / t_next_;
  const double t_ret = t_next_;
  ++j_;
  t_j_ = t_next_;
  t_next_ = config_.kind == ScheduleKind::Classic
                ? (1.0 + std::sqrt(1.0 + 4.0 * t_j_ * t_j_)) / 2.0
                : t_of(j_ + 2);
  return Step{t_ret, beta};
}

std::vector<double> t_sequence(const ScheduleConfig& config, long count) {
  if (config.kind == ScheduleKind::StronglyConvexConstant)
    throw Error("sc-const schedule has no t-sequence");
  std::vector<double> t;
  t.reserve(static_cast<std::size_t>(count));
  if (config.kind == ScheduleKind::Classic) {
    double tk = 1.0;
    for (long k = 0; k < count; ++k) {
      t.push_back(tk);
      tk = (1.0 + std::sqrt(1.0 + 4.0 * tk * tk)) / 2.0;
    }
  } else {
    for (long k = 1; k <= count; ++k)
      t.push_back((static_cast<double>(k) - 1.0 + config.r) / config.r);
  }
  return t;
}

bool validate_nesterov_rule(const ScheduleConfig& config, long horizon) {
  if (horizon < 2) throw Error("validate_nesterov_rule requires horizon >= 2");
  if (config.kind == ScheduleKind::StronglyConvexConstant) return false;
  const auto t = t_sequence(config, horizon);
  if (t[0] != 1.0) return false;
  for (long k = 0; k + 1 < horizon; ++k) {
    const auto i = static_cast<std::size_t>(k);
    if (!(t[i + 1] > t[i])) return false;
    if (t[i + 1] * t[i + 1] - t[i + 1] > t[i] * t[i] + 1e-12) return false;
  }
  return t[static_cast<std::size_t>(horizon - 1)] > t[1];
}

}  // namespace mr
