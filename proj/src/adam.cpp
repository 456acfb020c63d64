#include "torivec/adam.h"

#include <cmath>
#include <stdexcept>

namespace torivec {

template <typename S>
void Adam<S>::step(const std::vector<ParamSlot<S>>& slots) {
  if (m_.empty()) {
    for (const ParamSlot<S>& slot : slots) {
      m_.emplace_back(slot.value->shape());
      v_.emplace_back(slot.value->shape());
    }
  }
  if (slots.size() != m_.size()) {
    throw std::invalid_argument("adam: slot count changed between steps");
  }

  ++step_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_));

  for (std::size_t i = 0; i < slots.size(); ++i) {
    TensorT<S>& param = *slots[i].value;
    const TensorT<S>& grad = *slots[i].grad;
    if (!param.same_shape(m_[i]) || !grad.same_shape(param)) {
      throw std::invalid_argument("adam: shape mismatch for parameter " + slots[i].name);
    }
    TensorT<S>& m = m_[i];
    TensorT<S>& v = v_[i];
    const std::int64_t n = param.size();
    for (std::int64_t j = 0; j < n; ++j) {
      const double g = static_cast<double>(grad[j]);
      const double mj = config_.beta1 * static_cast<double>(m[j]) + (1.0 - config_.beta1) * g;
      const double vj = config_.beta2 * static_cast<double>(v[j]) + (1.0 - config_.beta2) * g * g;
      m[j] = static_cast<S>(mj);
      v[j] = static_cast<S>(vj);
      const double update =
          config_.learning_rate * (mj / bc1) / (std::sqrt(vj / bc2) + config_.epsilon);
      param[j] = static_cast<S>(static_cast<double>(param[j]) - update);
    }
  }
}

template class Adam<float>;
template class Adam<double>;

}  // namespace torivec
