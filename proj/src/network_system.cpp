#include "network_system.hpp"

#include <cmath>
#include <string>

#include "gsquid/errors.hpp"

namespace gsquid::detail {

namespace {

Eigen::Index rank_of(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(1e-10);
  return lu.rank();
}

}  // namespace

NetworkSystem::NetworkSystem(const DeviceConfig& config) : config_(config) {
  const auto loops = resolved_loops(config_);
  loop_count_ = loops.size();
  has_v0_ = !config_.gates.empty();
  const int nodes = config_.node_count();
  for (int n = 0; n < nodes; ++n) {
    // Without a gate the output node row is the sum of the others.
    if (!has_v0_ && n == config_.output_node) continue;
    kcl_nodes_.push_back(n);
  }

  const auto nb = static_cast<Eigen::Index>(config_.branches.size());
  const Eigen::Index cols = nb + (has_v0_ ? 1 : 0);
  const auto nk = static_cast<Eigen::Index>(kcl_nodes_.size());
  const Eigen::Index rows = nk + static_cast<Eigen::Index>(loop_count_);
  a_ = Eigen::MatrixXd::Zero(rows, cols);

  for (Eigen::Index r = 0; r < nk; ++r) {
    const int node = kcl_nodes_[static_cast<std::size_t>(r)];
    for (Eigen::Index b = 0; b < nb; ++b) {
      const auto& br = config_.branches[static_cast<std::size_t>(b)];
      if (br.from_node == node) a_(r, b) += 1.0;
      if (br.to_node == node) a_(r, b) -= 1.0;
    }
    if (has_v0_) {
      for (const auto& g : config_.gates) {
        if (g.node == node) a_(r, nb) += 1.0 / g.r_gate;
      }
      if (node == config_.output_node) a_(r, nb) += 1.0 / config_.gates.front().r_out;
    }
  }
  for (std::size_t l = 0; l < loop_count_; ++l) {
    const auto r = nk + static_cast<Eigen::Index>(l);
    for (int id : loops[l].branches) {
      const auto b = static_cast<Eigen::Index>(std::abs(id) - 1);
      a_(r, b) += (id > 0 ? 1.0 : -1.0) * config_.branches[static_cast<std::size_t>(b)].inductance;
    }
  }

  // Scale each row to unit max norm so the rank test is unit independent.
  Eigen::MatrixXd scaled = a_;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double n = scaled.row(r).cwiseAbs().maxCoeff();
    if (n > 0.0) scaled.row(r) /= n;
  }

  const Eigen::Index full = rank_of(scaled);
  if (rows != cols || full < cols) {
    const Eigen::MatrixXd kcl = scaled.topRows(nk);
    const Eigen::MatrixXd quant = scaled.bottomRows(rows - nk).leftCols(nb);
    const std::string shape = std::to_string(rows) + " equations for " + std::to_string(cols) +
                              " unknowns, rank " + std::to_string(full);
    if (rank_of(kcl) < nk) {
      throw SingularSystemError("kirchhoff current laws", shape);
    }
    if (rank_of(quant) < rows - nk) {
      throw SingularSystemError("quantization equations", shape);
    }
    throw SingularSystemError("kirchhoff current laws + quantization equations", shape);
  }
  lu_.compute(a_);
}

Eigen::VectorXd NetworkSystem::rhs(double i_in, std::span<const double> v_gate,
                                   std::span<const double> loop_rhs) const {
  const auto nk = static_cast<Eigen::Index>(kcl_nodes_.size());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(a_.rows());
  for (Eigen::Index r = 0; r < nk; ++r) {
    const int node = kcl_nodes_[static_cast<std::size_t>(r)];
    if (node == config_.input_node) b(r) += i_in;
    for (std::size_t g = 0; g < config_.gates.size(); ++g) {
      const double v = g < v_gate.size() ? v_gate[g] : 0.0;
      if (config_.gates[g].node == node) b(r) += v / config_.gates[g].r_gate;
    }
  }
  for (std::size_t l = 0; l < loop_count_; ++l) {
    b(nk + static_cast<Eigen::Index>(l)) = l < loop_rhs.size() ? loop_rhs[l] : 0.0;
  }
  return b;
}

Eigen::VectorXd NetworkSystem::solve(double i_in, std::span<const double> v_gate,
                                     std::span<const double> loop_rhs) const {
  return lu_.solve(rhs(i_in, v_gate, loop_rhs));
}

double NetworkSystem::kirchhoff_residual(const Eigen::VectorXd& x, double i_in,
                                         std::span<const double> v_gate) const {
  const auto nk = static_cast<Eigen::Index>(kcl_nodes_.size());
  const std::vector<double> no_loops;
  const Eigen::VectorXd r = (a_ * x - rhs(i_in, v_gate, no_loops)).head(nk);
  return nk == 0 ? 0.0 : r.cwiseAbs().maxCoeff();
}

}  // namespace gsquid::detail
