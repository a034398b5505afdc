#include "stableval/stats.hpp"

#include <algorithm>
#include <cmath>

#include "stableval/util.hpp"

namespace stableval {

score_series summarize(const std::vector<double>& scores) {
  if (scores.empty()) throw validation_error("summarize requires at least one score");
  score_series s;
  s.scores = scores;
  s.n = static_cast<int>(scores.size());
  double acc = 0.0;
  for (double x : scores) acc += x;
  s.mean = acc / static_cast<double>(s.n);
  if (s.n >= 2) {
    double sq = 0.0;
    for (double x : scores) sq += (x - s.mean) * (x - s.mean);
    s.sample_std = std::sqrt(sq / static_cast<double>(s.n - 1));
  }
  return s;
}

std::vector<double> cumulative_averages(const std::vector<double>& scores) {
  if (scores.empty()) throw validation_error("cumulative_averages requires at least one score");
  std::vector<double> out;
  out.reserve(scores.size());
  double acc = 0.0;
  for (size_t k = 0; k < scores.size(); ++k) {
    acc += scores[k];
    out.push_back(acc / static_cast<double>(k + 1));
  }
  return out;
}

double fluctuation(double experimental, double control) {
  return std::fabs(experimental - control);
}

int stability_point(const std::vector<double>& scores, int decimals) {
  if (scores.empty()) throw validation_error("stability_point requires at least one score");
  auto avgs = cumulative_averages(scores);
  const std::string final_text = format_fixed(avgs.back(), decimals);
  int point = static_cast<int>(avgs.size());
  while (point > 1 && format_fixed(avgs[static_cast<size_t>(point) - 2], decimals) == final_text) {
    --point;
  }
  return point;
}

namespace {

// rational approximation for the inverse standard normal CDF (relative error
// below 1.2e-9), then one Halley step against erfc brings it to full double
// precision
double inverse_normal_cdf(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement on Phi(x) - p = 0
  const double sqrt2pi = 2.5066282746310002;
  double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  double u = e * sqrt2pi * std::exp(x * x / 2.0);
  x = x - u / (1.0 + x * u / 2.0);
  return x;
}

}  // namespace

double z_quantile(double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw validation_error("alpha must lie in (0, 1]");
  }
  if (alpha == 1.0) return 0.0;
  return inverse_normal_cdf(1.0 - alpha / 2.0);
}

confidence_interval make_confidence_interval(const score_series& series, double alpha) {
  if (series.n < 2 || !series.sample_std) {
    throw insufficient_data_error("confidence interval needs at least 2 runs");
  }
  confidence_interval ci;
  ci.alpha = alpha;
  ci.z_value = z_quantile(alpha);
  ci.center = series.mean;
  ci.half_width = ci.z_value * (*series.sample_std) / std::sqrt(static_cast<double>(series.n));
  return ci;
}

long required_n(double sample_std, double epsilon, double alpha) {
  if (!(epsilon > 0.0)) throw validation_error("epsilon must be positive");
  if (sample_std < 0.0) throw validation_error("sample std cannot be negative");
  const double t = z_quantile(alpha) * sample_std / epsilon;
  const long n = static_cast<long>(std::ceil(t * t));
  return std::max(1L, n);
}

stability_result adaptive_n(const score_runner& runner, const stability_params& params) {
  if (params.n_cap < 2) throw validation_error("n_cap must be at least 2");
  if (params.n0 < 2) throw validation_error("n0 must be at least 2");
  if (!(params.epsilon > 0.0)) throw validation_error("epsilon must be positive");
  if (!(params.alpha > 0.0) || params.alpha > 1.0) throw validation_error("alpha must lie in (0, 1]");

  stability_result result;
  std::vector<double> scores;
  auto request = [&](int count) {
    std::vector<double> more;
    try {
      more = runner(count);
    } catch (const std::exception& e) {
      throw adaptive_runner_error(std::string("runner failed: ") + e.what(), result.iterations);
    }
    if (static_cast<int>(more.size()) != count) {
      throw adaptive_runner_error("runner returned " + std::to_string(more.size()) +
                                      " scores, expected " + std::to_string(count),
                                  result.iterations);
    }
    scores.insert(scores.end(), more.begin(), more.end());
  };

  request(std::min(params.n0, params.n_cap));
  for (;;) {
    auto series = summarize(scores);
    const double s = series.sample_std.value_or(0.0);
    const long need = required_n(s, params.epsilon, params.alpha);
    result.iterations.push_back({series.n, s, need});
    if (need <= series.n) {
      result.converged = true;
      break;
    }
    if (series.n >= params.n_cap) {
      result.converged = false;
      break;
    }
    const long target = std::min<long>(need, params.n_cap);
    request(static_cast<int>(target - series.n));
  }

  result.final_series = summarize(scores);
  result.required_n = result.iterations.back().n_required;
  result.ci = make_confidence_interval(result.final_series, params.alpha);
  return result;
}

}  // namespace stableval
