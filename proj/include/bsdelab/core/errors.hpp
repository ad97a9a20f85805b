#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bsdelab {

// Generator or coefficient function returned a non-finite value or threw.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, std::string point)
      : std::runtime_error(what + " at " + point), point_(std::move(point)) {}
  const std::string& point() const { return point_; }

 private:
  std::string point_;
};

class RegressionError : public std::runtime_error {
 public:
  RegressionError(const std::string& what, double condition)
      : std::runtime_error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

class PicardError : public std::runtime_error {
 public:
  PicardError(const std::string& what, std::vector<double> residuals)
      : std::runtime_error(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residual_history() const { return residuals_; }

 private:
  std::vector<double> residuals_;
};

class RefinementError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bsdelab
