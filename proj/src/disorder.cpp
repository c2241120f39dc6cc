#include "dal/disorder.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace dal {

DisorderSpec::DisorderSpec(DisorderLaw law, double M, double a, double b, bool reflected)
    : law_(law), M_(M), a_(a), b_(b), reflected_(reflected) {
  if (!(M > 0.0)) throw std::invalid_argument("disorder: M must be > 0");
}

DisorderSpec DisorderSpec::uniform(double M) { return DisorderSpec(DisorderLaw::Uniform, M, 0, 0, false); }

DisorderSpec DisorderSpec::power_tail(double M, double tau) {
  if (!(tau >= 1.0))
    throw std::invalid_argument("disorder: power-tail tau must be >= 1 for a bounded density");
  return DisorderSpec(DisorderLaw::PowerTail, M, tau, 0, false);
}

DisorderSpec DisorderSpec::kumaraswamy(double M, double a, double b) {
  if (!(a >= 1.0) || !(b >= 1.0))
    throw std::invalid_argument("disorder: kumaraswamy shape parameters must be >= 1");
  return DisorderSpec(DisorderLaw::Kumaraswamy, M, a, b, false);
}

double DisorderSpec::base_cdf(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= M_) return 1.0;
  const double y = t / M_;
  switch (law_) {
    case DisorderLaw::Uniform:
      return y;
    case DisorderLaw::PowerTail:
      return std::pow(y, a_);
    case DisorderLaw::Kumaraswamy:
      return 1.0 - std::pow(1.0 - std::pow(y, a_), b_);
  }
  return 0.0;
}

double DisorderSpec::base_quantile(double u) const {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return M_;
  switch (law_) {
    case DisorderLaw::Uniform:
      return M_ * u;
    case DisorderLaw::PowerTail:
      return M_ * std::pow(u, 1.0 / a_);
    case DisorderLaw::Kumaraswamy:
      return M_ * std::pow(1.0 - std::pow(1.0 - u, 1.0 / b_), 1.0 / a_);
  }
  return 0.0;
}

double DisorderSpec::base_mean() const {
  switch (law_) {
    case DisorderLaw::Uniform:
      return M_ / 2.0;
    case DisorderLaw::PowerTail:
      return M_ * a_ / (a_ + 1.0);
    case DisorderLaw::Kumaraswamy: {
      // E = M * b * B(1 + 1/a, b)
      double lb = std::lgamma(1.0 + 1.0 / a_) + std::lgamma(b_) - std::lgamma(1.0 + 1.0 / a_ + b_);
      return M_ * b_ * std::exp(lb);
    }
  }
  return 0.0;
}

double DisorderSpec::cdf(double t) const {
  if (!reflected_) return base_cdf(t);
  if (t < 0.0) return 0.0;
  if (t >= M_) return 1.0;
  return 1.0 - base_cdf(M_ - t);
}

double DisorderSpec::quantile(double u) const {
  if (!reflected_) return base_quantile(u);
  return M_ - base_quantile(1.0 - u);
}

double DisorderSpec::mean() const { return reflected_ ? M_ - base_mean() : base_mean(); }

double DisorderSpec::density_bound() const {
  // Reflection mirrors the density, so the bound is shared.
  switch (law_) {
    case DisorderLaw::Uniform:
      return 1.0 / M_;
    case DisorderLaw::PowerTail:
      return a_ / M_;  // density tau*y^{tau-1}/M peaks at y=1 for tau >= 1
    case DisorderLaw::Kumaraswamy: {
      // Scan the unit interval for the density max; the density is smooth
      // and unimodal for a,b >= 1.
      auto dens = [&](double y) {
        if (y <= 0.0 || y >= 1.0) {
          if (y <= 0.0) return a_ > 1.0 ? 0.0 : b_ / M_ * a_;
          return 0.0;
        }
        return a_ * b_ / M_ * std::pow(y, a_ - 1.0) * std::pow(1.0 - std::pow(y, a_), b_ - 1.0);
      };
      double best = std::max(dens(1e-12), dens(1.0 - 1e-12));
      for (int i = 1; i < 4096; ++i) best = std::max(best, dens(double(i) / 4096.0));
      return best;
    }
  }
  return 0.0;
}

DisorderSpec DisorderSpec::reflected() const {
  DisorderSpec r = *this;
  r.reflected_ = !reflected_;
  return r;
}

std::string DisorderSpec::describe() const {
  std::ostringstream os;
  switch (law_) {
    case DisorderLaw::Uniform:
      os << "uniform[0," << M_ << "]";
      break;
    case DisorderLaw::PowerTail:
      os << "power(tau=" << a_ << ")[0," << M_ << "]";
      break;
    case DisorderLaw::Kumaraswamy:
      os << "kumaraswamy(a=" << a_ << ",b=" << b_ << ")[0," << M_ << "]";
      break;
  }
  if (reflected_) os << " reflected";
  return os.str();
}

TailConditionReport check_tail_condition(const DisorderSpec& reflected_law, double alpha, double tau,
                                         const std::vector<double>& tgrid, int d) {
  if (!(alpha > 0.0)) throw std::invalid_argument("check_tail_condition: alpha must be > 0");
  if (!(tau > double(d) / 2.0))
    throw std::invalid_argument("check_tail_condition: tau must exceed d/2");
  if (tgrid.empty()) throw std::invalid_argument("check_tail_condition: empty grid");
  TailConditionReport rep;
  rep.alpha = alpha;
  rep.tau = tau;
  rep.grid = tgrid;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (double t : tgrid) {
    if (!(t > 0.0)) throw std::invalid_argument("check_tail_condition: grid points must be > 0");
    double margin = alpha * std::pow(t, tau) - reflected_law.cdf(t);
    rep.margins.push_back(margin);
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_t = t;
    }
  }
  rep.holds = rep.worst_margin >= -1e-12;
  return rep;
}

}  // namespace dal
