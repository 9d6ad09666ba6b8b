// Copyright 2026 The dfreeze Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dfreeze/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "dfreeze/error.hpp"
#include "dfreeze/units.hpp"

namespace dfreeze {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, const Eigen::VectorXd& step,
                             const NelderMeadOptions& opt) {
  const Eigen::Index p = x0.size();
  std::vector<Eigen::VectorXd> pts(p + 1, x0);
  std::vector<double> val(p + 1);
  for (Eigen::Index i = 0; i < p; ++i) pts[i + 1][i] += step[i];
  for (Eigen::Index i = 0; i <= p; ++i) val[i] = f(pts[i]);

  NelderMeadResult r;
  std::vector<Eigen::Index> order(p + 1);
  for (r.iterations = 0; r.iterations < opt.max_iterations; ++r.iterations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return val[a] < val[b]; });
    const Eigen::Index best = order.front(), worst = order.back(), second = order[p - 1];

    double size = 0.0;
    for (Eigen::Index i = 0; i <= p; ++i) size = std::max(size, (pts[i] - pts[best]).cwiseAbs().maxCoeff());
    const double spread = val[worst] - val[best];
    if (spread <= opt.f_tolerance * (std::abs(val[best]) + 1e-300) || size <= opt.x_tolerance) {
      r.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(p);
    for (Eigen::Index i = 0; i <= p; ++i) {
      if (i != worst) centroid += pts[i];
    }
    centroid /= static_cast<double>(p);

    const Eigen::VectorXd xr = centroid + (centroid - pts[worst]);
    const double fr = f(xr);
    if (fr < val[best]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = f(xe);
      if (fe < fr) {
        pts[worst] = xe;
        val[worst] = fe;
      } else {
        pts[worst] = xr;
        val[worst] = fr;
      }
      continue;
    }
    if (fr < val[second]) {
      pts[worst] = xr;
      val[worst] = fr;
      continue;
    }
    const bool outside = fr < val[worst];
    const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                                       : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
    const double fc = f(xc);
    if (fc < (outside ? fr : val[worst])) {
      pts[worst] = xc;
      val[worst] = fc;
      continue;
    }
    for (Eigen::Index i = 0; i <= p; ++i) {
      if (i == best) continue;
      pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
      val[i] = f(pts[i]);
    }
  }
  const auto it = std::min_element(val.begin(), val.end());
  r.x = pts[it - val.begin()];
  r.f = *it;
  return r;
}

double FitResult::value(const std::string& name) const {
  for (const auto& p : parameters) {
    if (p.name == name) return p.value;
  }
  throw PreconditionError("FitResult: no parameter named '" + name + "'");
}

double FitResult::sigma(const std::string& name) const {
  for (const auto& p : parameters) {
    if (p.name == name) return p.sigma;
  }
  throw PreconditionError("FitResult: no parameter named '" + name + "'");
}

namespace {

struct Problem {
  const Model& model;
  const std::vector<double>& x;
  const std::vector<double>& y;

  Eigen::VectorXd residuals(const Eigen::VectorXd& p) const {
    Eigen::VectorXd r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = model(x[i], p) - y[i];
    return r;
  }
  double rss(const Eigen::VectorXd& p) const {
    const double v = residuals(p).squaredNorm();
    return std::isfinite(v) ? v : kInf;
  }
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& p) const {
    Eigen::MatrixXd J(x.size(), p.size());
    for (Eigen::Index k = 0; k < p.size(); ++k) {
      const double h = 1e-6 * std::max(1e-3, std::abs(p[k]));
      Eigen::VectorXd a = p, b = p;
      a[k] += h;
      b[k] -= h;
      J.col(k) = (residuals(a) - residuals(b)) / (2 * h);
    }
    return J;
  }
};

// Levenberg-Marquardt polish; only improving steps are accepted.
Eigen::VectorXd polish(const Problem& pr, Eigen::VectorXd p, double& f) {
  double lambda = 1e-3;
  for (int it = 0; it < 200; ++it) {
    const Eigen::MatrixXd J = pr.jacobian(p);
    const Eigen::VectorXd r = pr.residuals(p);
    const Eigen::MatrixXd A = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    bool improved = false;
    for (int tries = 0; tries < 12; ++tries) {
      Eigen::MatrixXd D = A;
      D.diagonal() += lambda * A.diagonal().cwiseMax(1e-12);
      const Eigen::VectorXd step = D.ldlt().solve(-g);
      const Eigen::VectorXd q = p + step;
      const double fq = pr.rss(q);
      if (fq < f) {
        const double gain = f - fq;
        p = q;
        f = fq;
        lambda = std::max(lambda / 10, 1e-12);
        improved = true;
        if (gain <= 1e-15 * (f + 1e-300)) return p;
        break;
      }
      lambda *= 10;
    }
    if (!improved) break;
  }
  return p;
}

}  // namespace

FitResult least_squares(const std::string& tag, const std::vector<std::string>& names,
                        const Model& model, const std::vector<double>& x,
                        const std::vector<double>& y,
                        const std::vector<Eigen::VectorXd>& starts,
                        const Eigen::VectorXd& step) {
  if (x.size() != y.size()) throw PreconditionError(tag + ": x and y lengths differ");
  if (starts.empty()) throw PreconditionError(tag + ": no starting points");
  const Problem pr{model, x, y};
  auto objective = [&](const Eigen::VectorXd& p) { return pr.rss(p); };

  FitResult out;
  out.model = tag;
  double init = kInf;
  NelderMeadResult best;
  best.f = kInf;
  for (const auto& s : starts) {
    init = std::min(init, pr.rss(s));
    NelderMeadResult r = nelder_mead(objective, s, step);
    // One restart from the optimum shakes off a collapsed simplex.
    NelderMeadResult r2 = nelder_mead(objective, r.x, step * 0.1);
    if (r2.f <= r.f) r = r2;
    if (r.f < best.f) best = r;
  }
  if (!std::isfinite(best.f)) {
    throw FitError(tag + ": objective is not finite at any starting point");
  }
  double f = best.f;
  const Eigen::VectorXd p = polish(pr, best.x, f);

  out.converged = best.converged || f < best.f;
  out.residual_norm = std::sqrt(f);
  out.initial_residual_norm = std::sqrt(init);

  const Eigen::MatrixXd J = pr.jacobian(p);
  const Eigen::Index m = static_cast<Eigen::Index>(x.size());
  const double s2 = m > p.size() ? f / static_cast<double>(m - p.size()) : 0.0;
  const Eigen::MatrixXd A = J.transpose() * J;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  Eigen::VectorXd sig = Eigen::VectorXd::Constant(p.size(), kInf);
  if (lu.isInvertible()) {
    const Eigen::MatrixXd cov = s2 * lu.inverse();
    for (Eigen::Index k = 0; k < p.size(); ++k) sig[k] = std::sqrt(std::max(0.0, cov(k, k)));
  } else {
    out.degenerate = true;
    out.note = "singular normal matrix";
  }
  for (Eigen::Index k = 0; k < p.size(); ++k) out.parameters.push_back({names[k], p[k], sig[k]});
  return out;
}

namespace {

void require_samples(const std::vector<double>& t, const std::vector<double>& y,
                     std::size_t min_n, const char* who) {
  if (t.size() != y.size()) throw PreconditionError(std::string(who) + ": length mismatch");
  if (t.size() < min_n) {
    std::ostringstream msg;
    msg << who << ": need at least " << min_n << " samples, got " << t.size();
    throw PreconditionError(msg.str());
  }
}

double range_of(const std::vector<double>& y) {
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  return *hi - *lo;
}

double mean_of(const std::vector<double>& y) {
  return std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
}

}  // namespace

FitResult fit_stretched_exponential(const std::vector<double>& t,
                                    const std::vector<double>& y,
                                    std::optional<double> fixed_alpha) {
  require_samples(t, y, 6, "fit_stretched_exponential");
  if (range_of(y) < 1e-9) throw FitError("fit_stretched_exponential: data shows no decay");
  const double span = *std::max_element(t.begin(), t.end());

  // 1/e crossing as the T2 seed.
  double t2 = span;
  for (std::size_t i = 1; i < y.size(); ++i) {
    const double e = std::exp(-1.0);
    if ((y[i - 1] - e) * (y[i] - e) <= 0.0 && y[i - 1] != y[i]) {
      t2 = t[i - 1] + (e - y[i - 1]) * (t[i] - t[i - 1]) / (y[i] - y[i - 1]);
      break;
    }
  }

  FitResult r;
  if (fixed_alpha) {
    const double a = *fixed_alpha;
    Model m = [a](double x, const Eigen::VectorXd& p) { return std::exp(-std::pow(x / std::abs(p[0]), a)); };
    r = least_squares("stretched_exponential", {"T2"}, m, t, y,
                      {Eigen::VectorXd::Constant(1, t2)}, Eigen::VectorXd::Constant(1, 0.2 * t2));
    r.parameters.push_back({"alpha", a, 0.0});
  } else {
    Model m = [](double x, const Eigen::VectorXd& p) {
      return std::exp(-std::pow(x / std::abs(p[0]), std::abs(p[1])));
    };
    std::vector<Eigen::VectorXd> starts;
    for (double a : {0.6, 1.0, 1.6}) starts.push_back(Eigen::Vector2d(t2, a));
    r = least_squares("stretched_exponential", {"T2", "alpha"}, m, t, y, starts,
                      Eigen::Vector2d(0.2 * t2, 0.2));
    r.parameters[1].value = std::abs(r.parameters[1].value);
  }
  r.parameters[0].value = std::abs(r.parameters[0].value);
  if (!std::isfinite(r.residual_norm)) {
    throw FitError("fit_stretched_exponential: did not converge");
  }
  if (r.parameters[0].value > 1e3 * span) {
    std::ostringstream msg;
    msg << "fit_stretched_exponential: no decay within the data span (T2 = "
        << r.parameters[0].value << ", residual " << r.residual_norm << ")";
    throw FitError(msg.str());
  }
  return r;
}

FitResult fit_decaying_sinusoid(const std::vector<double>& t, const std::vector<double>& y) {
  require_samples(t, y, 6, "fit_decaying_sinusoid");
  const double c0 = mean_of(y);
  const double amp0 = range_of(y) / 2;
  const double span = t.back() - t.front();
  if (amp0 < 1e-12 || !(span > 0.0)) {
    FitResult r;
    r.model = "decaying_sinusoid";
    r.degenerate = true;
    r.note = "zero amplitude; frequency unidentifiable";
    r.parameters = {{"amplitude", 0.0, 0.0}, {"frequency", 0.0, kInf}, {"phase", 0.0, kInf},
                    {"decay", kInf, kInf}, {"offset", c0, 0.0}};
    return r;
  }

  // Periodogram scan for the starting frequency.
  const double f_max = 0.5 * static_cast<double>(t.size() - 1) / span;
  const double df = 0.25 / span;
  double f0 = df, best_power = -1.0;
  for (double f = df; f <= f_max; f += df) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      re += (y[i] - c0) * std::cos(units::kTwoPi * f * t[i]);
      im += (y[i] - c0) * std::sin(units::kTwoPi * f * t[i]);
    }
    if (re * re + im * im > best_power) {
      best_power = re * re + im * im;
      f0 = f;
    }
  }

  // Internal parameters: A, f, phi, rate = 1/tau, c.
  Model m = [](double x, const Eigen::VectorXd& p) {
    return p[0] * std::exp(-std::abs(p[3]) * x) * std::cos(units::kTwoPi * p[1] * x + p[2]) + p[4];
  };
  std::vector<Eigen::VectorXd> starts;
  for (double phi : {0.0, 0.5 * units::kPi, units::kPi, 1.5 * units::kPi}) {
    for (double rate : {0.0, 1.0 / span}) {
      Eigen::VectorXd s(5);
      s << amp0, f0, phi, rate, c0;
      starts.push_back(s);
    }
  }
  Eigen::VectorXd step(5);
  step << 0.2 * amp0, 0.25 * df, 0.5, 0.5 / span, 0.1 * amp0;
  FitResult r = least_squares("decaying_sinusoid", {"amplitude", "frequency", "phase", "rate", "offset"},
                              m, t, y, starts, step);

  // Report the decay time instead of the rate.
  auto& rate = r.parameters[3];
  const double g = std::abs(rate.value);
  rate.name = "decay";
  rate.sigma = g > 0.0 ? rate.sigma / (g * g) : kInf;
  rate.value = g > 0.0 ? 1.0 / g : kInf;
  if (r.parameters[0].value < 0.0) {
    r.parameters[0].value = -r.parameters[0].value;
    r.parameters[2].value += units::kPi;
  }
  r.parameters[2].value = std::remainder(r.parameters[2].value, units::kTwoPi);
  if (r.parameters[0].value < 2.0 * r.parameters[0].sigma) {
    r.degenerate = true;
    r.note = "amplitude not significant";
  }
  return r;
}

FitResult fit_gaussian(const std::vector<double>& x, const std::vector<double>& y) {
  require_samples(x, y, 5, "fit_gaussian");
  std::vector<double> sorted = y;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double base = sorted[sorted.size() / 2];
  if (range_of(y) < 1e-12) {
    FitResult r;
    r.model = "gaussian";
    r.degenerate = true;
    r.note = "flat data; center unidentifiable";
    r.parameters = {{"center", mean_of(x), kInf}, {"width", 0.0, kInf},
                    {"amplitude", 0.0, 0.0}, {"offset", base, 0.0}};
    return r;
  }
  std::size_t ext = 0;
  for (std::size_t i = 1; i < y.size(); ++i) {
    if (std::abs(y[i] - base) > std::abs(y[ext] - base)) ext = i;
  }
  const double amp0 = y[ext] - base;
  std::size_t above = 0;
  for (double v : y) above += std::abs(v - base) > 0.5 * std::abs(amp0);
  const auto [xlo, xhi] = std::minmax_element(x.begin(), x.end());
  const double dx = (*xhi - *xlo) / static_cast<double>(x.size() - 1);
  const double w0 = std::max(dx, 0.5 * static_cast<double>(above) * dx / 1.1774);

  Model m = [](double v, const Eigen::VectorXd& p) {
    const double z = (v - p[0]) / p[1];
    return p[2] * std::exp(-0.5 * z * z) + p[3];
  };
  std::vector<Eigen::VectorXd> starts;
  for (double ws : {0.5, 1.0, 2.0}) starts.push_back(Eigen::Vector4d(x[ext], ws * w0, amp0, base));
  FitResult r = least_squares("gaussian", {"center", "width", "amplitude", "offset"}, m, x, y,
                              starts, Eigen::Vector4d(0.5 * w0, 0.3 * w0, 0.2 * amp0, 0.1 * std::abs(amp0)));
  r.parameters[1].value = std::abs(r.parameters[1].value);
  if (std::abs(r.parameters[2].value) < 2.0 * r.parameters[2].sigma) {
    r.degenerate = true;
    r.note = "amplitude not significant; center unidentifiable";
  }
  return r;
}

}  // namespace dfreeze
