#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "gsquid/circuit.hpp"

namespace gsquid::detail {

// Linear network of Kirchhoff rows plus one quantization row per loop.
// Unknowns are the branch currents followed, when gates exist, by the common
// island voltage V₀. The loop rows take the flux term F directly as their
// right-hand side.
class NetworkSystem {
 public:
  explicit NetworkSystem(const DeviceConfig& config);

  Eigen::VectorXd solve(double i_in, std::span<const double> v_gate,
                        std::span<const double> loop_rhs) const;

  double kirchhoff_residual(const Eigen::VectorXd& x, double i_in,
                            std::span<const double> v_gate) const;

  bool has_island_voltage() const { return has_v0_; }

 private:
  Eigen::VectorXd rhs(double i_in, std::span<const double> v_gate,
                      std::span<const double> loop_rhs) const;

  DeviceConfig config_;
  std::vector<int> kcl_nodes_;
  std::size_t loop_count_ = 0;
  bool has_v0_ = false;
  Eigen::MatrixXd a_;
  Eigen::FullPivLU<Eigen::MatrixXd> lu_;
};

}  // namespace gsquid::detail
