#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lacki/errors.hpp"

namespace lacki {

/// Ordered (input, observation) pairs stored row-major in two flat buffers.
template <typename Real>
class BasicDataset {
 public:
  BasicDataset() = default;
  BasicDataset(std::size_t input_dim, std::size_t output_dim)
      : input_dim_(input_dim), output_dim_(output_dim) {
    if (input_dim == 0 || output_dim == 0) {
      throw DimensionError("dataset dimensions must be positive");
    }
  }

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t output_dim() const noexcept { return output_dim_; }
  std::size_t size() const noexcept { return input_dim_ == 0 ? 0 : inputs_.size() / input_dim_; }
  bool empty() const noexcept { return inputs_.empty(); }

  void reserve(std::size_t n) {
    inputs_.reserve(n * input_dim_);
    outputs_.reserve(n * output_dim_);
  }

  void add(std::span<const Real> input, std::span<const Real> observation) {
    if (input.size() != input_dim_ || observation.size() != output_dim_) {
      throw DimensionError("sample has shape (" + std::to_string(input.size()) + ", " +
                           std::to_string(observation.size()) + "), dataset expects (" +
                           std::to_string(input_dim_) + ", " + std::to_string(output_dim_) + ")");
    }
    inputs_.insert(inputs_.end(), input.begin(), input.end());
    outputs_.insert(outputs_.end(), observation.begin(), observation.end());
  }

  void add(std::initializer_list<Real> input, std::initializer_list<Real> observation) {
    add(std::span<const Real>(input.begin(), input.size()),
        std::span<const Real>(observation.begin(), observation.size()));
  }

  std::span<const Real> input(std::size_t i) const noexcept {
    return {inputs_.data() + i * input_dim_, input_dim_};
  }
  std::span<const Real> observation(std::size_t i) const noexcept {
    return {outputs_.data() + i * output_dim_, output_dim_};
  }

  const std::vector<Real>& flat_inputs() const noexcept { return inputs_; }
  const std::vector<Real>& flat_observations() const noexcept { return outputs_; }

  friend bool operator==(const BasicDataset&, const BasicDataset&) = default;

 private:
  std::size_t input_dim_ = 0;
  std::size_t output_dim_ = 0;
  std::vector<Real> inputs_;
  std::vector<Real> outputs_;
};

using Dataset = BasicDataset<double>;

}  // namespace lacki
