#include "metaphor/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace metaphor {

std::string GradCheckReport::summary() const {
  std::ostringstream os;
  os << "checked " << checked << " coordinates, max rel. err " << max_relative_error
     << " (tolerance " << tolerance << ", " << failures << " over)";
  return os.str();
}

GradCheckReport grad_check(const std::function<Tensor()>& loss_fn, std::span<const Tensor> params,
                           double tolerance, double step, double floor) {
  zero_grads(params);
  backward(loss_fn());
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (const auto& p : params) analytic.emplace_back(p.grad().begin(), p.grad().end());
  zero_grads(params);

  GradCheckReport report;
  report.tolerance = tolerance;
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto values = params[k].mutable_data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double original = values[i];
      values[i] = original + step;
      const double up = loss_fn().item();
      values[i] = original - step;
      const double down = loss_fn().item();
      values[i] = original;

      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic[k][i];
      const double denom = std::max({std::abs(a), std::abs(numeric), floor});
      const double err = std::abs(a - numeric) / denom;
      ++report.checked;
      if (err > tolerance) ++report.failures;
      if (err > report.max_relative_error) {
        report.max_relative_error = err;
        report.worst_param = k;
        report.worst_index = i;
      }
    }
  }
  return report;
}

}  // namespace metaphor
