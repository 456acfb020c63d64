#pragma once

#include <functional>
#include <vector>

#include "torivec/tensor.h"

namespace torivec {

// Central finite-difference verification of analytic gradients, in 64-bit
// arithmetic. `loss` re-evaluates the scalar objective at the current leaf
// values; `analytic` holds the gradient tensor for each leaf, aligned by
// index. Per coordinate the relative error is
//   |analytic - numeric| / max(1e-8, |analytic| + |numeric|)
// and the maximum over all coordinates of all leaves is returned.
// Throws if any evaluation or gradient is non-finite.
double max_gradient_error(const std::function<double()>& loss,
                          const std::vector<Tensor64*>& leaves,
                          const std::vector<Tensor64>& analytic, double step = 1e-5);

}  // namespace torivec
