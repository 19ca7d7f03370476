#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "ctold/tensor.hpp"

namespace ctold {

struct AdamState {
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  std::uint64_t step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  AdamState() = default;
  explicit AdamState(std::span<const Tensor> params) {
    for (const auto& p : params) {
      first_moment.emplace_back(p.numel(), 0.0);
      second_moment.emplace_back(p.numel(), 0.0);
    }
  }
};

/// One bias-corrected Adam update using each parameter's accumulated grad.
/// Parameters without a grad are treated as having a zero gradient.
inline void adam_step(std::span<Tensor> params, AdamState& state,
                      double learning_rate) {
  require(state.first_moment.size() == params.size() &&
              state.second_moment.size() == params.size(),
          "adam_step: state does not match parameter count");
  for (std::size_t k = 0; k < params.size(); ++k)
    require(state.first_moment[k].size() == params[k].numel() &&
                state.second_moment[k].size() == params[k].numel() &&
                (!params[k].has_grad() || params[k].grad().size() == params[k].numel()),
            "adam_step: shape mismatch for parameter " + std::to_string(k));

  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& m = state.first_moment[k];
    auto& v = state.second_moment[k];
    auto data = params[k].mutable_data();
    auto grad = params[k].grad();
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double g = grad.empty() ? 0.0 : grad[i];
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g;
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g * g;
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      data[i] -= learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
    }
  }
}

/// Adam over several parameter groups, each with its own learning rate.
class Adam {
 public:
  struct Group {
    std::vector<Tensor> params;
    double learning_rate;
    AdamState state;
  };

  void add_group(std::vector<Tensor> params, double learning_rate) {
    AdamState state(params);
    groups_.push_back({std::move(params), learning_rate, std::move(state)});
  }

  void zero_grad() {
    for (auto& g : groups_)
      for (auto& p : g.params) p.zero_grad();
  }

  void step() {
    for (auto& g : groups_) adam_step(g.params, g.state, g.learning_rate);
  }

  const std::vector<Group>& groups() const { return groups_; }

 private:
  std::vector<Group> groups_;
};

}  // namespace ctold
