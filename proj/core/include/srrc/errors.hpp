#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace srrc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// rk_delta(A) == 0: the data cannot be distinguished from noise at threshold delta.
class RankZeroError : public Error {
public:
    explicit RankZeroError(double delta)
        : Error("numerical rank is zero at delta=" + std::to_string(delta)), delta_(delta) {}
    double delta() const noexcept { return delta_; }

private:
    double delta_;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class OutOfRange : public Error {
public:
    using Error::Error;
};

class NumericDecompositionError : public Error {
public:
    using Error::Error;
};

/// A Kronecker feature vector would exceed the configured entry budget.
class FeatureBudgetExceeded : public Error {
public:
    using Error::Error;
};

/// The randomized compression grouping merged monomials that are not permutations
/// of each other, or failed to partition the feature indices.
class GroupingDegenerate : public Error {
public:
    using Error::Error;
};

class NumericBlowup : public Error {
public:
    NumericBlowup(std::size_t step, double value)
        : Error("forecast diverged at step " + std::to_string(step) +
                " (value " + std::to_string(value) + ")"),
          step_(step) {}
    /// 1-based rollout step at which the guard fired.
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class StepUnderflow : public Error {
public:
    StepUnderflow(double t, double h)
        : Error("integrator step underflow at t=" + std::to_string(t) +
                " (h=" + std::to_string(h) + ")") {}
};

/// An observed channel is identically zero, so its exposure normalizer vanishes.
class DegenerateChannel : public Error {
public:
    explicit DegenerateChannel(std::size_t channel)
        : Error("observed channel " + std::to_string(channel + 1) + " is identically zero"),
          channel_(channel) {}
    /// 0-based channel index.
    std::size_t channel() const noexcept { return channel_; }

private:
    std::size_t channel_;
};

class IoError : public Error {
public:
    using Error::Error;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

class UnsupportedVersion : public SchemaError {
public:
    using SchemaError::SchemaError;
};

}  // namespace srrc
