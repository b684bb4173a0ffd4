/**
 * @file qt_program.hpp
 * @brief The concave program solved at fixed quadratic-transform auxiliaries.
 *
 * Variables are the powers normalized by P_max, the common-rate shares and
 * either one rate variable per assigned device (optimization) or a single
 * min-slack variable (feasibility). Every rate constraint has the form
 *   constant + a^T z + log2(1 + 2 y sqrt(g z_s) - y^2 (1 + w^T z)) >= 0
 * with gains pre-scaled by P_max / noise and y by the noise amplitude.
 */
#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rsma/barrier.hpp"
#include "rsma/power_allocator.hpp"

namespace rsma::qt {

enum class Phase { kOptimize, kFeasibility };

/// Index of each quantity in the decision vector, -1 when absent.
struct Layout {
  int common = -1;
  std::vector<int> user;
  std::vector<int> device;  // -1 for unassigned devices
  std::vector<int> share;   // R_{u,c}; -1 outside the RS set
  std::vector<int> rate;    // R_m; -1 for unassigned devices or in phase I
  int slack = -1;           // phase-I min slack
  std::vector<int> powers;
  int dim = 0;

  Layout(const AllocationProblem& prob, Phase phase);
};

using Sparse = std::vector<std::pair<int, double>>;

struct LogTerm {
  int signal = -1;
  double gain = 0.0;
  double y = 0.0;
  Sparse interference;
};

struct Constraint {
  double constant = 0.0;
  Sparse linear;
  bool has_log = false;
  LogTerm log;
};

enum class Family { kBound, kUserRate, kCommonRate, kDeviceRate, kDeviceDomain };

class Program final : public barrier::ConcaveProgram {
 public:
  Program(const AllocationProblem& prob, const AuxVariables& aux, Phase phase);

  [[nodiscard]] int dim() const override { return layout_.dim; }
  [[nodiscard]] int n_constraints() const override {
    return static_cast<int>(constraints_.size());
  }
  [[nodiscard]] const Eigen::VectorXd& objective() const override { return objective_; }
  [[nodiscard]] const Layout& layout() const { return layout_; }

  /// F of a log term; NaN when the signal power is not positive.
  static double f_value(const LogTerm& t, const Eigen::VectorXd& z);
  /// log2(1 + F), accurate for tiny F; NaN outside the domain.
  static double log_term(const LogTerm& t, const Eigen::VectorXd& z);

  bool constraint_values(const Eigen::VectorXd& z, Eigen::VectorXd& values) const override;
  void accumulate_barrier(const Eigen::VectorXd& z, const Eigen::VectorXd& values,
                          Eigen::VectorXd& grad, Eigen::MatrixXd& hess) const override;

  [[nodiscard]] const std::vector<int>& family(Family f) const {
    return families_[static_cast<int>(f)];
  }
  [[nodiscard]] const Constraint& constraint(int i) const { return constraints_[i]; }

 private:
  void add(Constraint c, Family f);

  Layout layout_;
  Eigen::VectorXd objective_;
  std::vector<Constraint> constraints_;
  std::vector<int> families_[5];
};

Eigen::VectorXd pack(const Allocation& alloc, const Layout& lay, double p_max);
Allocation unpack(const Eigen::VectorXd& z, const Layout& lay, double p_max);

}  // namespace rsma::qt
