#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stableval/errors.hpp"

namespace stableval {

struct score_series {
  std::vector<double> scores;
  int n = 0;
  double mean = 0.0;
  // Bessel-corrected (n - 1 denominator); defined only for n >= 2
  std::optional<double> sample_std;
};

struct stability_params {
  double alpha = 0.10;    // significance level
  double epsilon = 1.0;   // error margin, percentage points
  int n0 = 64;            // initial batch of runs
  int n_cap = 1024;       // hard budget for the iterative procedure
};

struct confidence_interval {
  double center = 0.0;
  double half_width = 0.0;
  double z_value = 0.0;
  double alpha = 0.0;
};

struct adaptive_iteration {
  int n_so_far = 0;
  double sample_std = 0.0;
  long n_required = 0;
};

struct stability_result {
  score_series final_series;
  confidence_interval ci;
  long required_n = 0;
  std::vector<adaptive_iteration> iterations;
  bool converged = false;
};

// runner failure surfaced with whatever iterations completed
class adaptive_runner_error : public error {
 public:
  adaptive_runner_error(const std::string& what, std::vector<adaptive_iteration> trace)
      : error(what), partial_trace(std::move(trace)) {}
  std::vector<adaptive_iteration> partial_trace;
};

score_series summarize(const std::vector<double>& scores);

// element k is the mean of the first k+1 scores, accumulated left to right
std::vector<double> cumulative_averages(const std::vector<double>& scores);

// absolute difference in percentage points
double fluctuation(double experimental, double control);

// smallest 1-based N such that every running average from N on renders the
// same as the final one at the given precision
int stability_point(const std::vector<double>& scores, int decimals = 1);

// upper quantile z with Phi(z) = 1 - alpha/2, |error| < 1e-8
double z_quantile(double alpha);

confidence_interval make_confidence_interval(const score_series& series, double alpha);

// minimum run count so the half width z * s / sqrt(N) is at most epsilon
long required_n(double sample_std, double epsilon, double alpha);

// produces `count` additional run scores; called repeatedly
using score_runner = std::function<std::vector<double>(int count)>;

// iterative procedure: take n0 runs, compute the required N from the sample
// std, extend until the requirement is met or the cap is hit
stability_result adaptive_n(const score_runner& runner, const stability_params& params);

}  // namespace stableval
