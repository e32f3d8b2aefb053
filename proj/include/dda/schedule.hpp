#pragma once

#include <cmath>

#include "dda/errors.hpp"

namespace dda {

// Geometric weight schedule a_t = a/(1-a*mu)^t, A_t = sum_{tau<=t} a_tau,
// maintained incrementally. For mu = 0 this degenerates to a_t = a,
// A_t = a*t. The ratio a_t/A_t is tracked in a form that stays finite even
// when the raw weights grow large.
struct StepSchedule {
  double a = 0.0;
  double mu = 0.0;
  long t = 0;
  double a_t = 0.0;   // current weight (a_0 = a before the first advance)
  double A_t = 0.0;   // cumulative weight

  StepSchedule(double a_, double mu_) : a(a_), mu(mu_), a_t(a_) {
    if (!(a > 0.0)) throw PreconditionError("step schedule: a must be positive");
    if (mu > 0.0 && !(a * mu < 1.0))
      throw PreconditionError("step schedule: a must be below 1/mu");
    if (mu < 0.0) throw PreconditionError("step schedule: mu must be nonnegative");
  }

  void advance() {
    ++t;
    a_t /= 1.0 - a * mu;
    A_t += a_t;
    ratio_ = (1.0 - a * mu) * (ratio_ + 1.0);  // A_t / a_{t+1}
  }

  // a_t / A_t, stable for arbitrarily large t.
  double weight_fraction() const {
    double r = ratio_ / (1.0 - a * mu) - 1.0;  // A_{t-1} / a_t
    return 1.0 / (1.0 + r);
  }

  // Largest round count before a_t or A_t leaves double range.
  long safe_horizon() const {
    if (mu == 0.0) return static_cast<long>(1e15);
    double growth = -std::log1p(-a * mu);  // log of per-round weight factor
    return static_cast<long>(std::floor((690.0 - std::log(a)) / growth));
  }

 private:
  double ratio_ = 0.0;  // A_t / a_{t+1}
};

}  // namespace dda
