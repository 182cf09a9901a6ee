#include "orank/lbfgs.hpp"

#include "orank/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace orank {

namespace {

constexpr double kStepMin = 1e-15;
constexpr double kStepMax = 1e15;
constexpr double kXtol = 1e-15;

// Safeguarded cubic/quadratic step of Moré and Thuente (MINPACK-2 dcstep).
struct StepInterval {
  double stx, fx, dx;
  double sty, fy, dy;
  bool brackt = false;
};

double dcstep(StepInterval& iv, double stp, double fp, double dp, double stpmin, double stpmax) {
  auto& [stx, fx, dx, sty, fy, dy, brackt] = iv;
  auto sign = [](double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); };
  const double sgnd = sign(dp) * sign(dx);
  double stpf;

  if (fp > fx) {
    // higher function value: minimizer is bracketed
    const double theta = 3.0 * (fx - fp) / (stp - stx) + dx + dp;
    const double s = std::max({std::abs(theta), std::abs(dx), std::abs(dp)});
    double gamma = s * std::sqrt((theta / s) * (theta / s) - (dx / s) * (dp / s));
    if (stp < stx) gamma = -gamma;
    const double p = (gamma - dx) + theta;
    const double q = ((gamma - dx) + gamma) + dp;
    const double stpc = stx + (p / q) * (stp - stx);
    const double stpq = stx + ((dx / ((fx - fp) / (stp - stx) + dx)) / 2.0) * (stp - stx);
    stpf = std::abs(stpc - stx) <= std::abs(stpq - stx) ? stpc : stpc + (stpq - stpc) / 2.0;
    brackt = true;
  } else if (sgnd < 0.0) {
    // derivatives of opposite sign: bracketed
    const double theta = 3.0 * (fx - fp) / (stp - stx) + dx + dp;
    const double s = std::max({std::abs(theta), std::abs(dx), std::abs(dp)});
    double gamma = s * std::sqrt((theta / s) * (theta / s) - (dx / s) * (dp / s));
    if (stp > stx) gamma = -gamma;
    const double p = (gamma - dp) + theta;
    const double q = ((gamma - dp) + gamma) + dx;
    const double stpc = stp + (p / q) * (stx - stp);
    const double stpq = stp + (dp / (dp - dx)) * (stx - stp);
    stpf = std::abs(stpc - stp) > std::abs(stpq - stp) ? stpc : stpq;
    brackt = true;
  } else if (std::abs(dp) < std::abs(dx)) {
    // derivative magnitude decreases
    const double theta = 3.0 * (fx - fp) / (stp - stx) + dx + dp;
    const double s = std::max({std::abs(theta), std::abs(dx), std::abs(dp)});
    double gamma = s * std::sqrt(std::max(0.0, (theta / s) * (theta / s) - (dx / s) * (dp / s)));
    if (stp > stx) gamma = -gamma;
    const double p = (gamma - dp) + theta;
    const double q = (gamma + (dx - dp)) + gamma;
    const double r = p / q;
    double stpc;
    if (r < 0.0 && gamma != 0.0) {
      stpc = stp + r * (stx - stp);
    } else if (stp > stx) {
      stpc = stpmax;
    } else {
      stpc = stpmin;
    }
    const double stpq = stp + (dp / (dp - dx)) * (stx - stp);
    if (brackt) {
      stpf = std::abs(stpc - stp) < std::abs(stpq - stp) ? stpc : stpq;
      if (stp > stx) {
        stpf = std::min(stp + 0.66 * (sty - stp), stpf);
      } else {
        stpf = std::max(stp + 0.66 * (sty - stp), stpf);
      }
    } else {
      stpf = std::abs(stpc - stp) > std::abs(stpq - stp) ? stpc : stpq;
      stpf = std::clamp(stpf, stpmin, stpmax);
    }
  } else {
    // derivative magnitude does not decrease
    if (brackt) {
      const double theta = 3.0 * (fp - fy) / (sty - stp) + dy + dp;
      const double s = std::max({std::abs(theta), std::abs(dy), std::abs(dp)});
      double gamma = s * std::sqrt((theta / s) * (theta / s) - (dy / s) * (dp / s));
      if (stp > sty) gamma = -gamma;
      const double p = (gamma - dp) + theta;
      const double q = ((gamma - dp) + gamma) + dy;
      stpf = stp + (p / q) * (sty - stp);
    } else {
      stpf = stp > stx ? stpmax : stpmin;
    }
  }

  if (fp > fx) {
    sty = stp;
    fy = fp;
    dy = dp;
  } else {
    if (sgnd < 0.0) {
      sty = stx;
      fy = fx;
      dy = dx;
    }
    stx = stp;
    fx = fp;
    dx = dp;
  }
  return stpf;
}

enum class SearchTask { Evaluate, Converged, Warning };

// Reverse-communication driver, MINPACK-2 dcsrch.
class Dcsrch {
 public:
  Dcsrch(double f0, double g0, double stp, double ftol, double gtol)
      : gtol_(gtol), finit_(f0), ginit_(g0), gtest_(ftol * g0) {
    width_ = kStepMax - kStepMin;
    width1_ = width_ / 0.5;
    iv_ = {0.0, f0, g0, 0.0, f0, g0, false};
    stmin_ = 0.0;
    stmax_ = stp + 4.0 * stp;
  }

  SearchTask iterate(double& stp, double f, double g) {
    const double ftest = finit_ + stp * gtest_;
    if (stage_ == 1 && f <= ftest && g >= 0.0) stage_ = 2;

    if (iv_.brackt && (stp <= stmin_ || stp >= stmax_)) return SearchTask::Warning;
    if (iv_.brackt && stmax_ - stmin_ <= kXtol * stmax_) return SearchTask::Warning;
    if (stp == kStepMax && f <= ftest && g <= gtest_) return SearchTask::Warning;
    if (stp == kStepMin && (f > ftest || g >= gtest_)) return SearchTask::Warning;
    if (f <= ftest && std::abs(g) <= gtol_ * (-ginit_)) return SearchTask::Converged;

    if (stage_ == 1 && f <= iv_.fx && f > ftest) {
      // modified function psi(stp) = f(stp) - f(0) - ftol * stp * f'(0)
      StepInterval m{iv_.stx, iv_.fx - iv_.stx * gtest_, iv_.dx - gtest_,
                     iv_.sty, iv_.fy - iv_.sty * gtest_, iv_.dy - gtest_, iv_.brackt};
      stp = dcstep(m, stp, f - stp * gtest_, g - gtest_, stmin_, stmax_);
      iv_ = {m.stx, m.fx + m.stx * gtest_, m.dx + gtest_,
             m.sty, m.fy + m.sty * gtest_, m.dy + gtest_, m.brackt};
    } else {
      stp = dcstep(iv_, stp, f, g, stmin_, stmax_);
    }

    if (iv_.brackt) {
      if (std::abs(iv_.sty - iv_.stx) >= 0.66 * width1_) stp = iv_.stx + 0.5 * (iv_.sty - iv_.stx);
      width1_ = width_;
      width_ = std::abs(iv_.sty - iv_.stx);
      stmin_ = std::min(iv_.stx, iv_.sty);
      stmax_ = std::max(iv_.stx, iv_.sty);
    } else {
      stmin_ = stp + 1.1 * (stp - iv_.stx);
      stmax_ = stp + 4.0 * (stp - iv_.stx);
    }

    stp = std::clamp(stp, kStepMin, kStepMax);
    if ((iv_.brackt && (stp <= stmin_ || stp >= stmax_)) ||
        (iv_.brackt && stmax_ - stmin_ <= kXtol * stmax_)) {
      stp = iv_.stx;
    }
    return SearchTask::Evaluate;
  }

 private:
  double gtol_;
  double finit_, ginit_, gtest_;
  int stage_ = 1;
  StepInterval iv_{};
  double stmin_, stmax_;
  double width_, width1_;
};

void require_finite(double f, const char* where) {
  if (!std::isfinite(f)) {
    throw NumericalError(std::string(where) + ": objective returned a non-finite value");
  }
}

}  // namespace

std::string_view to_string(LbfgsStop s) {
  switch (s) {
    case LbfgsStop::RelChange: return "RelChange";
    case LbfgsStop::GradTol: return "GradTol";
    case LbfgsStop::MaxIters: return "MaxIters";
    case LbfgsStop::LineSearchFail: return "LineSearchFail";
  }
  return "?";
}

void LbfgsConfig::validate() const {
  if (memory < 1 || max_iters < 1 || ls_max_iters < 1) {
    throw DomainError("L-BFGS: memory and iteration caps must be at least 1");
  }
  if (!(0.0 < ls_ftol && ls_ftol < ls_gtol && ls_gtol < 1.0)) {
    throw DomainError("L-BFGS: line-search constants need 0 < ftol < gtol < 1");
  }
  if (!(rel_change_tol > 0.0) || !(grad_per_entry_tol > 0.0) || !(ls_step0 > 0.0)) {
    throw DomainError("L-BFGS: tolerances and initial step must be positive");
  }
}

LineSearchResult more_thuente_search(const ObjectiveFn& f, const Vector& x, double f0,
                                     const Vector& g0, const Vector& d, const LbfgsConfig& cfg) {
  const double dg0 = d.dot(g0);
  if (!(dg0 < 0.0)) throw ContractError("line search: direction is not a descent direction");

  LineSearchResult best;
  best.f = f0;
  best.x = x;
  best.grad = g0;

  Dcsrch search(f0, dg0, cfg.ls_step0, cfg.ls_ftol, cfg.ls_gtol);
  double stp = cfg.ls_step0;
  Vector xt(x.size());
  Vector gt(x.size());
  int evals = 0;
  double last_finite = 0.0;
  while (evals < cfg.ls_max_iters) {
    xt = x + stp * d;
    const double ft = f(xt, gt);
    ++evals;
    if (!std::isfinite(ft) || !gt.allFinite()) {
      // overflow from an extrapolated step: retreat toward the last finite step
      stp = last_finite + 0.5 * (stp - last_finite);
      continue;
    }
    last_finite = stp;
    if (ft < best.f) {
      best.f = ft;
      best.step = stp;
      best.x = xt;
      best.grad = gt;
    }
    const double dgt = gt.dot(d);
    const double tried = stp;
    const SearchTask task = search.iterate(stp, ft, dgt);
    if (task == SearchTask::Converged) {
      best.f = ft;
      best.step = tried;
      best.x = xt;
      best.grad = gt;
      best.converged = true;
      break;
    }
    if (task == SearchTask::Warning) break;
  }
  best.evals = evals;
  return best;
}

LineSearchResult more_thuente_search(const ObjectiveFn& f, const Vector& x, const Vector& d,
                                     const LbfgsConfig& cfg) {
  Vector g(x.size());
  const double f0 = f(x, g);
  require_finite(f0, "line search");
  auto r = more_thuente_search(f, x, f0, g, d, cfg);
  ++r.evals;
  return r;
}

Vector two_loop_direction(const Vector& g, const std::vector<Vector>& s_hist,
                          const std::vector<Vector>& y_hist) {
  const std::size_t m = s_hist.size();
  Vector q = g;
  std::vector<double> alpha(m), rho(m);
  for (std::size_t i = m; i-- > 0;) {
    rho[i] = 1.0 / y_hist[i].dot(s_hist[i]);
    alpha[i] = rho[i] * s_hist[i].dot(q);
    q -= alpha[i] * y_hist[i];
  }
  if (m > 0) q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
  for (std::size_t i = 0; i < m; ++i) {
    const double beta = rho[i] * y_hist[i].dot(q);
    q += (alpha[i] - beta) * s_hist[i];
  }
  return -q;
}

LbfgsReport lbfgs_minimize(const ObjectiveFn& f, Vector x0, const LbfgsConfig& cfg) {
  cfg.validate();
  if (!x0.allFinite()) throw DomainError("L-BFGS: starting point is not finite");

  LbfgsReport rep;
  const double n = static_cast<double>(x0.size());
  Vector x = std::move(x0);
  Vector g(x.size());
  double fx = f(x, g);
  rep.evaluations = 1;
  require_finite(fx, "L-BFGS");

  std::vector<Vector> s_hist, y_hist;
  auto finish = [&](LbfgsStop why) {
    rep.x_final = x;
    rep.f_final = fx;
    rep.grad_norm_final = g.norm();
    rep.stop_reason = why;
    return rep;
  };

  if (g.norm() / n < cfg.grad_per_entry_tol) return finish(LbfgsStop::GradTol);

  while (rep.iterations < cfg.max_iters) {
    Vector d = two_loop_direction(g, s_hist, y_hist);
    if (!(d.dot(g) < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      d = -g;
    }
    LineSearchResult ls = more_thuente_search(f, x, fx, g, d, cfg);
    rep.evaluations += ls.evals;
    if (ls.step == 0.0) return finish(LbfgsStop::LineSearchFail);

    Vector s = ls.x - x;
    Vector y = ls.grad - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(std::move(y));
      if (static_cast<int>(s_hist.size()) > cfg.memory) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
      }
    }
    const double rel = s.norm() / std::max(1.0, x.norm());
    x = std::move(ls.x);
    fx = ls.f;
    g = std::move(ls.grad);
    ++rep.iterations;

    if (g.norm() / n < cfg.grad_per_entry_tol) return finish(LbfgsStop::GradTol);
    if (rel < cfg.rel_change_tol) return finish(LbfgsStop::RelChange);
  }
  return finish(LbfgsStop::MaxIters);
}

}  // namespace orank
