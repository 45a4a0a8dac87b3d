#include <algorithm>
#include <cmath>
#include <limits>

#include "metastab/dynamics.hpp"
#include "metastab/error.hpp"

namespace metastab {

MeanStderr mean_stderr(const std::vector<double>& xs) {
  if (xs.size() < 2) throw NumericError("mean_stderr: need at least two values");
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double var = ss / static_cast<double>(xs.size() - 1);
  return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

LineFit line_fit(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& weights) {
  const std::size_t n = x.size();
  if (n != y.size() || (!weights.empty() && weights.size() != n)) throw ConfigError("line_fit: size mismatch");
  if (n < 2) throw NumericError("line_fit: need at least two points");
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    sw += w;
    sx += w * x[i];
    sy += w * y[i];
  }
  const double mx = sx / sw;
  const double my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    sxx += w * (x[i] - mx) * (x[i] - mx);
    sxy += w * (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw NumericError("line_fit: singular design (all x equal)");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;

  if (weights.empty()) {
    // Residual-based errors.
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    const double s2 = n > 2 ? rss / static_cast<double>(n - 2) : 0.0;
    fit.slope_stderr = std::sqrt(s2 / sxx);
    fit.intercept_stderr = std::sqrt(s2 * (1.0 / static_cast<double>(n) + mx * mx / sxx));
  } else {
    // Inverse-variance weights.
    fit.slope_stderr = std::sqrt(1.0 / sxx);
    fit.intercept_stderr = std::sqrt(1.0 / sw + mx * mx / sxx);
  }
  return fit;
}

ArrheniusFit arrhenius_fit(const std::vector<double>& betas, const std::vector<double>& means,
                           const std::vector<double>& stderrs) {
  if (betas.size() < 3) throw NumericError("arrhenius_fit: need at least three beta values");
  if (means.size() != betas.size() || (!stderrs.empty() && stderrs.size() != betas.size())) {
    throw ConfigError("arrhenius_fit: size mismatch");
  }
  ArrheniusFit fit;
  fit.betas = betas;
  std::vector<double> weights;
  bool weighted = false;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!(means[i] > 0.0) || !std::isfinite(means[i])) throw NumericError("arrhenius_fit: non-positive mean");
    fit.log_means.push_back(std::log(means[i]));
    const double rel = stderrs.empty() ? 0.0 : stderrs[i] / means[i];
    if (rel > 0.0 && std::isfinite(rel)) weighted = true;
    weights.push_back(rel > 0.0 && std::isfinite(rel) ? 1.0 / (rel * rel) : 0.0);
  }
  if (weighted && std::any_of(weights.begin(), weights.end(), [](double w) { return w == 0.0; })) weighted = false;
  const LineFit line = line_fit(betas, fit.log_means, weighted ? weights : std::vector<double>{});
  fit.slope = line.slope;
  fit.intercept = line.intercept;
  fit.slope_stderr = line.slope_stderr;
  fit.intercept_stderr = line.intercept_stderr;
  return fit;
}

KsResult exponential_law_test(const std::vector<double>& samples, double scale) {
  if (samples.size() < 100) throw ConfigError("exponential_law_test: need at least 100 samples");
  double mean = 0.0;
  for (double s : samples) {
    if (!std::isfinite(s) || s < 0.0) throw NumericError("exponential_law_test: invalid sample");
    mean += s;
  }
  mean /= static_cast<double>(samples.size());
  if (!(mean > 0.0)) throw NumericError("exponential_law_test: zero mean");
  std::vector<double> x(samples);
  for (double& v : x) v /= mean;
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = 1.0 - std::exp(-x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  KsResult out;
  out.statistic = d;
  out.threshold = scale * 1.36 / std::sqrt(n);
  out.pass = d < out.threshold;
  return out;
}

namespace {

// Regularized lower incomplete gamma P(a, x): series for x < a + 1, continued
// fraction otherwise.
double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  const double log_front = -x + a * std::log(x) - std::lgamma(a);
  if (x < a + 1.0) {
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k < 10000; ++k) {
      term *= x / (a + k);
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(log_front);
  }
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return 1.0 - std::exp(log_front) * h;
}

}  // namespace

double chi_square_pvalue(double x, double dof) {
  if (!(dof > 0.0)) throw ConfigError("chi_square_pvalue: dof must be positive");
  return std::clamp(1.0 - gamma_p(0.5 * dof, 0.5 * x), 0.0, 1.0);
}

}  // namespace metastab
