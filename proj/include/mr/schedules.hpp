#pragma once

#include <string>
#include <vector>

namespace mr {

enum class ScheduleKind { Classic, Polynomial, StronglyConvexConstant };

struct ScheduleConfig {
  ScheduleKind kind = ScheduleKind::Classic;
  double r = 2.0;       // Polynomial: t_{k+1} = (k+r)/r, rule-compliant for r >= 2
  double mu = 0.0;      // StronglyConvexConstant
  double lipschitz = 0.0;

  // "classic", "poly:r=<r>", "sc-const"
  static ScheduleConfig parse(const std::string& text);
  std::string to_string() const;
};

/// Extrapolation-parameter state machine. One advance() per solver step:
/// the j-th advance returns (t_{j+1}, beta_j = (t_j - 1)/t_{j+1}).
/// StronglyConvexConstant emits the fixed beta = (sqrt(L)-sqrt(mu))/(sqrt(L)+sqrt(mu))
/// and has no t-sequence (t_next is NaN).
class Schedule {
 public:
  explicit Schedule(ScheduleConfig config);

  struct Step {
    double t_next;
    double beta;
  };

  Step advance();
  void reset();  // back to j = 1, t_1 = 1; no-op for StronglyConvexConstant

  long index() const { return j_; }          // number of advances since reset
  double t_current() const { return t_j_; }  // t_{j+1} after j advances
  double t_lookahead() const { return t_next_; }
  const ScheduleConfig& config() const { return config_; }

 private:
  double t_of(long k) const;  // t_k, k >= 1

  ScheduleConfig config_;
  long j_ = 0;
  double t_j_ = 1.0;
  double t_next_ = 1.0;
};

/// First `count` values t_1..t_count of the Nesterov sequence; throws for
/// StronglyConvexConstant which has none.
std::vector<double> t_sequence(const ScheduleConfig& config, long count);

/// Checks t_1 = 1, strict monotonicity, divergence proxy t_horizon > t_2 and
/// t_{k+1}^2 - t_{k+1} <= t_k^2 + 1e-12 up to the horizon.
bool validate_nesterov_rule(const ScheduleConfig& config, long horizon);

}  // namespace mr
