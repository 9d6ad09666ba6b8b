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

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace dfreeze {

struct NelderMeadOptions {
  int max_iterations = 20000;
  double f_tolerance = 1e-15;
  double x_tolerance = 1e-12;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0,
                             const Eigen::VectorXd& step,
                             const NelderMeadOptions& opt = {});

struct FitParameter {
  std::string name;
  double value = 0.0;
  double sigma = 0.0;
};

struct FitResult {
  std::string model;
  std::vector<FitParameter> parameters;
  double residual_norm = 0.0;          // sqrt(sum r^2) at the optimum
  double initial_residual_norm = 0.0;  // at the best starting point
  bool converged = false;
  bool degenerate = false;
  std::string note;

  double value(const std::string& name) const;
  double sigma(const std::string& name) const;
};

/// Model y(t; p) used by the generic least-squares driver.
using Model = std::function<double(double, const Eigen::VectorXd&)>;

/// Multistart Nelder-Mead followed by a Levenberg-Marquardt polish.
/// Uncertainties come from s^2 (J^T J)^{-1} at the optimum.
FitResult least_squares(const std::string& tag, const std::vector<std::string>& names,
                        const Model& model, const std::vector<double>& x,
                        const std::vector<double>& y,
                        const std::vector<Eigen::VectorXd>& starts,
                        const Eigen::VectorXd& step);

/// exp(-(t/T2)^alpha). Parameters "T2", "alpha". Throws FitError on data
/// without decay; PreconditionError with fewer than 6 samples.
FitResult fit_stretched_exponential(const std::vector<double>& t,
                                    const std::vector<double>& y,
                                    std::optional<double> fixed_alpha = {});

/// A exp(-t/tau) cos(2 pi f t + phi) + c. Parameters "amplitude",
/// "frequency" (MHz), "phase", "decay", "offset".
FitResult fit_decaying_sinusoid(const std::vector<double>& t,
                                const std::vector<double>& y);

/// A exp(-(x - x0)^2 / (2 w^2)) + c. Parameters "center", "width",
/// "amplitude", "offset".
FitResult fit_gaussian(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dfreeze
