#pragma once

#include <stdexcept>
#include <string>

namespace pls {

/// Input that violates a precondition (dimensions, file syntax, bad flags).
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that cannot proceed for numerical reasons.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class RankDeficientError : public NumericalError {
public:
  RankDeficientError() : NumericalError("rank deficient to zero") {}
};

class ZeroSeedError : public NumericalError {
public:
  ZeroSeedError() : NumericalError("zero seed: X^T y vanishes, Krylov space undefined") {}
};

class DegenerateMeasureError : public NumericalError {
public:
  DegenerateMeasureError() : NumericalError("degenerate measure: all masses zero") {}
};

class IllConditionedMomentsError : public NumericalError {
public:
  explicit IllConditionedMomentsError(int k, double cond)
      : NumericalError("ill-conditioned moments: Hankel system at k = " + std::to_string(k) +
                       " has condition estimate " + std::to_string(cond)),
        k(k), condition(cond) {}
  int k;
  double condition;
};

class CombinatorialCapError : public NumericalError {
public:
  CombinatorialCapError(std::size_t needed, std::size_t cap)
      : NumericalError("combinatorial cap: subset enumeration needs " + std::to_string(needed) +
                       " subsets, cap is " + std::to_string(cap)) {}
};

}  // namespace pls
