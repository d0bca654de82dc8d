#pragma once

// Real parameter sequences (alpha_n, gamma_n, lambda_n) with the asymptotic
// properties that the convergence theorems are conditioned on.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace fixedpoint {

/// value(n) = min(1, c / (n + 1 + offset)^p).
struct PowerFamily {
  double c = 1.0;
  double p = 1.0;
  double offset = 0.0;
};

/// value(n) = v.
struct ConstantFamily {
  double v = 0.5;
};

/// value(n) = 1 / (n + shift).
struct HarmonicShiftedFamily {
  double shift = 1.0;
};

struct ScheduleFlags {
  bool tends_to_zero = false;
  bool sum_diverges = false;
  bool inf_positive = false;
  bool sup_below_one = false;

  friend bool operator==(const ScheduleFlags&, const ScheduleFlags&) = default;
};

/// Explicit values for n = 1..size(); the last value repeats afterwards.
/// The flags are whatever the caller asserts about the infinite sequence.
struct CustomFamily {
  std::vector<double> values;
  ScheduleFlags asserted;
};

using ScheduleFamily =
    std::variant<PowerFamily, ConstantFamily, HarmonicShiftedFamily, CustomFamily>;

/// What a schedule is about to be used for; each role has its own hypotheses.
enum class ScheduleRole {
  unconstrained,
  alpha,   // in (0,1], -> 0, sum = inf
  gamma,   // in (0,1), inf > 0, sup < 1
  lambda,  // > 0, inf > 0
};

class ScheduleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Schedule {
 public:
  Schedule(ScheduleFamily family, ScheduleFlags flags, bool verified)
      : family_(std::move(family)), flags_(flags), verified_(verified) {}

  /// n is 1-based.
  double operator()(std::size_t n) const {
    struct V {
      std::size_t n;
      double operator()(const PowerFamily& f) const {
        const double base = static_cast<double>(n) + 1.0 + f.offset;
        return std::min(1.0, f.c / std::pow(base, f.p));
      }
      double operator()(const ConstantFamily& f) const { return f.v; }
      double operator()(const HarmonicShiftedFamily& f) const {
        return 1.0 / (static_cast<double>(n) + f.shift);
      }
      double operator()(const CustomFamily& f) const {
        const std::size_t i = n == 0 ? 0 : n - 1;
        return f.values[std::min(i, f.values.size() - 1)];
      }
    };
    return std::visit(V{n}, family_);
  }

  const ScheduleFamily& family() const noexcept { return family_; }
  const ScheduleFlags& flags() const noexcept { return flags_; }

  /// False for custom schedules, whose flags are asserted rather than derived.
  bool verified() const noexcept { return verified_; }

  double partial_sum(std::size_t n_max) const {
    double s = 0.0;
    for (std::size_t n = 1; n <= n_max; ++n) s += (*this)(n);
    return s;
  }

 private:
  ScheduleFamily family_;
  ScheduleFlags flags_;
  bool verified_;
};

namespace detail {

inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw ScheduleError(std::string(what) + " must be finite");
}

inline ScheduleFlags derive_flags(const PowerFamily& f) {
  if (!(f.c > 0.0)) throw ScheduleError("power schedule: c must be > 0");
  if (!(f.p > 0.0)) throw ScheduleError("power schedule: p must be > 0");
  if (!(f.offset >= 0.0)) throw ScheduleError("power schedule: offset must be >= 0");
  require_finite(f.c, "power schedule c");
  require_finite(f.p, "power schedule p");
  require_finite(f.offset, "power schedule offset");
  ScheduleFlags flags;
  flags.tends_to_zero = true;
  flags.sum_diverges = f.p <= 1.0;
  flags.inf_positive = false;
  // The sequence is nonincreasing, so its sup is the n = 1 value.
  flags.sup_below_one = std::min(1.0, f.c / std::pow(2.0 + f.offset, f.p)) < 1.0;
  return flags;
}

inline ScheduleFlags derive_flags(const ConstantFamily& f) {
  require_finite(f.v, "constant schedule value");
  ScheduleFlags flags;
  flags.tends_to_zero = f.v == 0.0;
  flags.sum_diverges = f.v > 0.0;
  flags.inf_positive = f.v > 0.0;
  flags.sup_below_one = f.v < 1.0;
  return flags;
}

inline ScheduleFlags derive_flags(const HarmonicShiftedFamily& f) {
  require_finite(f.shift, "harmonic shift");
  if (!(f.shift > -1.0)) throw ScheduleError("harmonic schedule: shift must be > -1");
  ScheduleFlags flags;
  flags.tends_to_zero = true;
  flags.sum_diverges = true;
  flags.inf_positive = false;
  flags.sup_below_one = 1.0 / (1.0 + f.shift) < 1.0;
  return flags;
}

inline ScheduleFlags derive_flags(const CustomFamily& f) {
  if (f.values.empty()) throw ScheduleError("custom schedule: no values");
  for (double v : f.values) require_finite(v, "custom schedule value");
  return f.asserted;
}

}  // namespace detail

/// Throws ScheduleError naming the first hypothesis of `role` the schedule
/// does not satisfy.
inline void require_role(const Schedule& s, ScheduleRole role) {
  const ScheduleFlags& f = s.flags();
  auto need = [](bool ok, const char* msg) {
    if (!ok) throw ScheduleError(msg);
  };
  auto values_in = [&s](double lo, bool lo_open, double hi, bool hi_open) {
    auto ok = [&](double v) {
      return (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
    };
    if (const auto* c = std::get_if<CustomFamily>(&s.family())) {
      for (double v : c->values)
        if (!ok(v)) return false;
      return true;
    }
    // Built-in families are monotone or constant; probing the head decides it.
    for (std::size_t n = 1; n <= 64; ++n)
      if (!ok(s(n))) return false;
    return true;
  };

  switch (role) {
    case ScheduleRole::unconstrained:
      return;
    case ScheduleRole::alpha:
      need(values_in(0.0, true, 1.0, false), "alpha schedule: values must lie in (0, 1]");
      need(f.tends_to_zero, "alpha schedule: alpha_n must tend to 0");
      need(f.sum_diverges, "alpha schedule: the series sum alpha_n must diverge");
      return;
    case ScheduleRole::gamma:
      need(values_in(0.0, true, 1.0, true), "gamma schedule: values must lie in (0, 1)");
      need(f.inf_positive, "gamma schedule: inf gamma_n must be positive");
      need(f.sup_below_one, "gamma schedule: sup gamma_n must be below 1");
      return;
    case ScheduleRole::lambda:
      need(values_in(0.0, true, INFINITY, true), "lambda schedule: values must be positive");
      need(f.inf_positive, "lambda schedule: inf lambda_n must be positive");
      return;
  }
}

inline Schedule make_schedule(ScheduleFamily family,
                              ScheduleRole role = ScheduleRole::unconstrained) {
  const bool verified = !std::holds_alternative<CustomFamily>(family);
  const ScheduleFlags flags =
      std::visit([](const auto& f) { return detail::derive_flags(f); }, family);
  Schedule s(std::move(family), flags, verified);
  require_role(s, role);
  return s;
}

/// The canonical anchor schedule alpha_n = 1 / (n + 1).
inline Schedule default_alpha() {
  return make_schedule(PowerFamily{1.0, 1.0, 0.0}, ScheduleRole::alpha);
}

}  // namespace fixedpoint
