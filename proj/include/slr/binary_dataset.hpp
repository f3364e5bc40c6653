#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace slr {

/// A point of {0,1}^d as one byte per coordinate.
using BitVector = std::vector<std::uint8_t>;

/// Packed state index: bit i holds coordinate x_i.
using State = std::uint64_t;

inline constexpr int kMaxPackedDim = 64;

inline State pack(const BitVector& x) {
  if (x.size() > static_cast<std::size_t>(kMaxPackedDim)) {
    throw std::invalid_argument("pack: bit-vector longer than 64");
  }
  State s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 1) throw std::invalid_argument("pack: coordinate " + std::to_string(i) + " is not 0/1");
    if (x[i]) s |= State{1} << i;
  }
  return s;
}

inline BitVector unpack(State s, int dim) {
  BitVector x(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) x[static_cast<std::size_t>(i)] = (s >> i) & 1U;
  return x;
}

inline bool bit(State s, int i) { return (s >> i) & 1U; }

/// n samples from {0,1}^d stored as packed states.
class BinaryDataset {
 public:
  explicit BinaryDataset(int dim) : dim_(dim) {
    if (dim < 1 || dim > kMaxPackedDim) {
      throw std::invalid_argument("BinaryDataset: dim must be in [1, 64]");
    }
  }

  BinaryDataset(int dim, std::vector<State> states) : BinaryDataset(dim) {
    for (State s : states) check_state(s);
    states_ = std::move(states);
  }

  int dim() const { return dim_; }
  std::size_t count() const { return states_.size(); }
  bool empty() const { return states_.empty(); }
  const std::vector<State>& states() const { return states_; }
  State state(std::size_t k) const { return states_.at(k); }
  BitVector sample(std::size_t k) const { return unpack(state(k), dim_); }

  void push_back(State s) {
    check_state(s);
    states_.push_back(s);
  }
  void push_back(const BitVector& x) {
    if (static_cast<int>(x.size()) != dim_) {
      throw std::invalid_argument("BinaryDataset: sample has length " + std::to_string(x.size()) +
                                  ", expected " + std::to_string(dim_));
    }
    states_.push_back(pack(x));
  }
  void reserve(std::size_t n) { states_.reserve(n); }

  friend bool operator==(const BinaryDataset&, const BinaryDataset&) = default;

 private:
  void check_state(State s) const {
    if (dim_ < kMaxPackedDim && (s >> dim_) != 0) {
      throw std::invalid_argument("BinaryDataset: state has bits beyond dim");
    }
  }

  int dim_;
  std::vector<State> states_;
};

}  // namespace slr
