#include "headpred/metrics.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace headpred {

double position_error(const Eigen::Vector3d& p_pred, const Eigen::Vector3d& p_true) {
  return (p_pred - p_true).norm() * 1000.0;
}

double orientation_error(const Quaternion& q_pred, const Quaternion& q_true) {
  return geodesic_distance(q_pred, q_true) * 180.0 / std::numbers::pi;
}

SummaryStats summarize(std::span<const double> samples, double level) {
  if (samples.empty()) throw std::invalid_argument("summarize: no samples");
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("summarize: confidence level must lie in (0, 1)");
  }
  SummaryStats s;
  s.n = samples.size();
  s.level = level;

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = s.n / 2;
  s.median = (s.n % 2 == 1) ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);

  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(s.n);
  if (s.n == 1) {
    s.ci_low = s.ci_high = s.mean;
    return s;
  }
  double ss = 0.0;
  for (const double x : sorted) ss += (x - s.mean) * (x - s.mean);
  const double sd = std::sqrt(ss / static_cast<double>(s.n - 1));
  const boost::math::students_t dist(static_cast<double>(s.n - 1));
  const double t = boost::math::quantile(dist, 0.5 + level / 2.0);
  const double half = t * sd / std::sqrt(static_cast<double>(s.n));
  s.ci_low = s.mean - half;
  s.ci_high = s.mean + half;
  return s;
}

}  // namespace headpred
