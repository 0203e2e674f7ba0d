#include "meg/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "meg/rng.hpp"

namespace meg {

double gradcheck_rel_err(double analytic, double numeric) {
  const double denom = std::max(std::abs(analytic), std::abs(numeric));
  if (denom < 1e-6) return std::abs(analytic - numeric);
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport grad_check(const std::function<double()>& loss, ParamRegistry& registry, double h,
                           std::size_t subsample_above, std::uint64_t subsample_seed) {
  GradCheckReport report;

  const double f0 = loss();
  const double f0_again = loss();
  if (f0 != f0_again) {
    report.deterministic = false;
    return report;
  }

  Rng rng(subsample_seed);
  for (const std::string& name : registry.names()) {
    Tensor& value = registry.param(name);
    const Tensor& analytic = registry.grad(name);
    const std::size_t n = value.numel();

    std::vector<std::size_t> coords;
    if (n > subsample_above) {
      std::unordered_set<std::size_t> chosen;
      while (chosen.size() < subsample_above) chosen.insert(rng.index(n));
      coords.assign(chosen.begin(), chosen.end());
      std::sort(coords.begin(), coords.end());
    } else {
      coords.resize(n);
      for (std::size_t i = 0; i < n; ++i) coords[i] = i;
    }

    for (std::size_t c : coords) {
      const double saved = value.data[c];
      value.data[c] = saved + h;
      const double f_plus = loss();
      value.data[c] = saved - h;
      const double f_minus = loss();
      value.data[c] = saved;

      const double numeric = (f_plus - f_minus) / (2.0 * h);
      const double rel = gradcheck_rel_err(analytic.data[c], numeric);
      ++report.coords_checked;
      if (rel > report.max_rel_err) {
        report.max_rel_err = rel;
        report.worst = {name, c, analytic.data[c], numeric, rel};
      }
    }
  }
  return report;
}

}  // namespace meg
