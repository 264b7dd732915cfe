#include "toonwarp/adam.hpp"

#include <cmath>
#include <string>

#include "toonwarp/error.hpp"

namespace toonwarp {

AdamState::AdamState(std::size_t n_params, double lr_, double beta1_, double beta2_, double lr_decay_,
                     double epsilon_)
    : m(n_params, 0.0),
      v(n_params, 0.0),
      beta1(beta1_),
      beta2(beta2_),
      epsilon(epsilon_),
      lr(lr_),
      lr_decay(lr_decay_) {
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "Adam betas must lie in [0, 1)");
  }
  if (!(epsilon > 0.0) || !(lr > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "Adam epsilon and learning rate must be positive");
  }
}

namespace {

template <typename T>
void step_impl(std::span<T> params, std::span<const double> grads, AdamState& s) {
  if (params.size() != grads.size() || params.size() != s.m.size() || params.size() != s.v.size()) {
    throw Error(ErrorCode::InvalidArgument, "Adam: parameter/gradient/moment sizes differ (" +
                                                std::to_string(params.size()) + " params, " +
                                                std::to_string(grads.size()) + " grads, " +
                                                std::to_string(s.m.size()) + " moments)");
  }
  ++s.step;
  const double t = static_cast<double>(s.step);
  const double bc1 = 1.0 - std::pow(s.beta1, t);
  const double bc2 = 1.0 - std::pow(s.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    s.m[i] = s.beta1 * s.m[i] + (1.0 - s.beta1) * g;
    s.v[i] = s.beta2 * s.v[i] + (1.0 - s.beta2) * g * g;
    const double m_hat = s.m[i] / bc1;
    const double v_hat = s.v[i] / bc2;
    params[i] = static_cast<T>(static_cast<double>(params[i]) - s.lr * m_hat / (std::sqrt(v_hat) + s.epsilon));
  }
}

}  // namespace

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
  step_impl(params, grads, state);
}

void adam_step(std::span<float> params, std::span<const double> grads, AdamState& state) {
  step_impl(params, grads, state);
}

}  // namespace toonwarp
