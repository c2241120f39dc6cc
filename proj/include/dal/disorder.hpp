#pragma once

#include <string>
#include <vector>

#include "dal/rng.hpp"
#include "dal/types.hpp"

namespace dal {

enum class DisorderLaw {
  Uniform,       // density 1/M on [0, M]
  PowerTail,     // CDF (t/M)^tau, tau >= 1
  Kumaraswamy,   // CDF 1 - (1 - (t/M)^a)^b, a,b >= 1
};

/// Single-site law mu supported on [0, M], with exact CDF, quantile,
/// mean and a finite density bound. reflected() gives the law of
/// M - omega; reflecting twice returns to the base law.
class DisorderSpec {
 public:
  static DisorderSpec uniform(double M);
  static DisorderSpec power_tail(double M, double tau);
  static DisorderSpec kumaraswamy(double M, double a, double b);

  DisorderLaw law() const { return law_; }
  double support_max() const { return M_; }
  bool is_reflected() const { return reflected_; }
  double param_a() const { return a_; }
  double param_b() const { return b_; }

  double cdf(double t) const;
  double quantile(double u) const;  // inverse CDF on [0,1]
  double mean() const;
  double density_bound() const;

  DisorderSpec reflected() const;

  /// Inverse-CDF draw from one uniform variate of the stream.
  double sample(RandomStream& rng) const { return quantile(rng.uniform01()); }

  std::string describe() const;

 private:
  DisorderSpec(DisorderLaw law, double M, double a, double b, bool reflected);
  double base_cdf(double t) const;
  double base_quantile(double u) const;
  double base_mean() const;

  DisorderLaw law_;
  double M_;
  double a_ = 0.0, b_ = 0.0;  // tau lives in a_ for PowerTail
  bool reflected_ = false;
};

/// Pointwise check of mu((0,t]) <= alpha * t^tau over a grid of small t.
struct TailConditionReport {
  bool holds = false;
  double worst_margin = 0.0;  // min over grid of alpha*t^tau - cdf(t)
  double worst_t = 0.0;
  double alpha = 0.0;
  double tau = 0.0;
  std::vector<double> grid;
  std::vector<double> margins;
};

/// The disorder argument is the reflected law (the law of M - omega).
/// Requires tau > d/2; margins within 1e-12 of zero count as holding
/// (the equality cases of the closed-form CDFs).
TailConditionReport check_tail_condition(const DisorderSpec& reflected_law, double alpha, double tau,
                                         const std::vector<double>& tgrid, int d);

}  // namespace dal
