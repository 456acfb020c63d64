#include "torivec/gradcheck.h"

#include <cmath>
#include <stdexcept>

namespace torivec {

double max_gradient_error(const std::function<double()>& loss,
                          const std::vector<Tensor64*>& leaves,
                          const std::vector<Tensor64>& analytic, double step) {
  if (leaves.size() != analytic.size()) {
    throw std::invalid_argument("gradient check: leaf/gradient count mismatch");
  }
  double max_err = 0.0;
  for (std::size_t l = 0; l < leaves.size(); ++l) {
    Tensor64& leaf = *leaves[l];
    const Tensor64& grad = analytic[l];
    if (!leaf.same_shape(grad)) {
      throw std::invalid_argument("gradient check: gradient shape mismatch at leaf " +
                                  std::to_string(l));
    }
    for (std::int64_t i = 0; i < leaf.size(); ++i) {
      const double saved = leaf[i];
      leaf[i] = saved + step;
      const double up = loss();
      leaf[i] = saved - step;
      const double down = loss();
      leaf[i] = saved;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw std::runtime_error("gradient check: non-finite loss during perturbation");
      }
      const double numeric = (up - down) / (2.0 * step);
      const double a = grad[i];
      if (!std::isfinite(a)) {
        throw std::runtime_error("gradient check: non-finite analytic gradient");
      }
      const double err = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
      max_err = std::max(max_err, err);
    }
  }
  return max_err;
}

}  // namespace torivec
