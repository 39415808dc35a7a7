#include "hybridplan/command.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hybridplan
{

double damping_factor(double mu, double epsilon, double lambda_max)
{
  if (mu < 0.0) {
    throw std::invalid_argument("manipulability must be nonnegative");
  }
  if (mu >= epsilon) {
    return 0.0;
  }
  const double r = mu / epsilon;
  return (1.0 - r * r) * lambda_max;
}

Eigen::VectorXd dls_velocity(const Eigen::MatrixXd& J, const Eigen::VectorXd& v, double lambda)
{
  if (J.rows() != v.size()) {
    throw std::invalid_argument("task velocity dimension does not match the Jacobian");
  }
  const Eigen::MatrixXd gram =
      J * J.transpose() + lambda * Eigen::MatrixXd::Identity(J.rows(), J.rows());
  if (lambda <= 0.0) {
    // Undamped: require full row rank.
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    if (!lu.isInvertible()) {
      throw std::domain_error("rank-deficient Jacobian with zero damping");
    }
    return J.transpose() * lu.solve(v);
  }
  return J.transpose() * gram.ldlt().solve(v);
}

namespace
{

struct BoxBounds
{
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  std::vector<std::string> lo_source;
  std::vector<std::string> hi_source;
};

BoxBounds intersect_constraints(const JointConfig& q, const Eigen::VectorXd& qd_prev,
                                const RobotModel& model, double dt)
{
  const int n = model.joint_count();
  BoxBounds box;
  box.lo.resize(n);
  box.hi.resize(n);
  box.lo_source.resize(static_cast<std::size_t>(n));
  box.hi_source.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Bounds that are re-derived downstream through inverse arithmetic
    // (position integration, velocity differences) get a relative hair of
    // inward margin so the recomputed inequalities hold exactly despite
    // round-off. The velocity bound needs no arithmetic and stays exact.
    constexpr double kInward = 1.0 - 1e-12;
    const double acc = model.acceleration_limits()(i);
    const double vel = model.velocity_limits()(i);
    const double acc_lo = qd_prev(i) - acc * dt * kInward;
    const double acc_hi = qd_prev(i) + acc * dt * kInward;

    // Position bounds with braking headroom: the commanded velocity must
    // leave enough distance to stop at the acceleration limit before the
    // joint limit. This is strictly tighter than the plain one-step bound
    // (q_lim - q)/dt and keeps the interval intersection non-empty along any
    // command sequence (the one-step bound alone can paint a fast joint into
    // a corner it cannot brake out of).
    const auto brake = [&](double margin) {
      if (margin <= 0.0) {
        return 0.0;
      }
      return -acc * dt + std::sqrt(acc * acc * dt * dt + 2.0 * acc * margin * kInward);
    };
    const double pos_hi = brake(model.q_max()(i) - q(i));
    const double pos_lo = -brake(q(i) - model.q_min()(i));

    double lo = pos_lo;
    std::string lo_src = "position";
    if (-vel > lo) {
      lo = -vel;
      lo_src = "velocity";
    }
    if (acc_lo > lo) {
      lo = acc_lo;
      lo_src = "acceleration";
    }
    double hi = pos_hi;
    std::string hi_src = "position";
    if (vel < hi) {
      hi = vel;
      hi_src = "velocity";
    }
    if (acc_hi < hi) {
      hi = acc_hi;
      hi_src = "acceleration";
    }
    if (lo > hi) {
      if (lo - hi > 1e-9) {
        throw std::logic_error("empty joint-velocity interval; state invariants broken");
      }
      lo = hi = 0.5 * (lo + hi);  // margins pinched a degenerate interval
    }
    box.lo(i) = lo;
    box.hi(i) = hi;
    box.lo_source[static_cast<std::size_t>(i)] = lo_src;
    box.hi_source[static_cast<std::size_t>(i)] = hi_src;
  }
  return box;
}

/// Min-norm solve of H x = b for symmetric PSD H. Eigenvalues below a
/// relative threshold are treated as zero, so a singular H (e.g. J'J of a
/// redundant Jacobian with no damping) yields the pseudo-inverse solution
/// instead of amplified null-space noise.
Eigen::VectorXd solve_psd(const Eigen::MatrixXd& H, const Eigen::VectorXd& b)
{
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double tol = 1e-10 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
  for (int i = 0; i < ev.size(); ++i) {
    if (ev(i) > tol) {
      inv(i) = 1.0 / ev(i);
    }
  }
  return eig.eigenvectors() * (inv.asDiagonal() * (eig.eigenvectors().transpose() * b));
}

/// Primal active-set method for min 1/2 x'Hx - b'x over a box, warm-started
/// from a feasible point. Steps towards the equality-constrained minimizer
/// stop at the first blocking bound, so the objective decreases
/// monotonically and the iteration terminates.
Eigen::VectorXd active_set_box_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& b,
                                  const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                  const Eigen::VectorXd& x0)
{
  const int n = static_cast<int>(b.size());
  Eigen::VectorXd x(n);
  // Activity: 0 free, -1 at lower bound, +1 at upper bound.
  std::vector<int> state(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    x(i) = std::clamp(x0(i), lo(i), hi(i));
    if (x(i) == lo(i)) {
      state[static_cast<std::size_t>(i)] = -1;
    } else if (x(i) == hi(i)) {
      state[static_cast<std::size_t>(i)] = 1;
    }
  }

  const double scale = 1.0 + b.lpNorm<Eigen::Infinity>();
  constexpr double kTol = 1e-10;

  for (int iter = 0; iter < 200 * (n + 1); ++iter) {
    std::vector<int> free_idx;
    for (int i = 0; i < n; ++i) {
      if (state[static_cast<std::size_t>(i)] == 0) {
        free_idx.push_back(i);
      }
    }

    if (!free_idx.empty()) {
      const int nf = static_cast<int>(free_idx.size());
      Eigen::MatrixXd hff(nf, nf);
      Eigen::VectorXd rhs(nf);
      for (int r = 0; r < nf; ++r) {
        const int ir = free_idx[static_cast<std::size_t>(r)];
        rhs(r) = b(ir);
        for (int c = 0; c < nf; ++c) {
          hff(r, c) = H(ir, free_idx[static_cast<std::size_t>(c)]);
        }
        for (int i = 0; i < n; ++i) {
          if (state[static_cast<std::size_t>(i)] != 0) {
            rhs(r) -= H(ir, i) * x(i);
          }
        }
      }
      const Eigen::VectorXd xf = solve_psd(hff, rhs);

      // Largest feasible fraction of the step towards the subproblem
      // minimizer; ties break to the lowest joint index.
      double alpha = 1.0;
      int blocker = -1;
      int block_side = 0;
      for (int r = 0; r < nf; ++r) {
        const int i = free_idx[static_cast<std::size_t>(r)];
        const double d = xf(r) - x(i);
        if (d > kTol * scale && x(i) + d > hi(i)) {
          const double a = (hi(i) - x(i)) / d;
          if (a < alpha) {
            alpha = a;
            blocker = i;
            block_side = 1;
          }
        } else if (d < -kTol * scale && x(i) + d < lo(i)) {
          const double a = (lo(i) - x(i)) / d;
          if (a < alpha) {
            alpha = a;
            blocker = i;
            block_side = -1;
          }
        }
      }
      for (int r = 0; r < nf; ++r) {
        const int i = free_idx[static_cast<std::size_t>(r)];
        x(i) = std::clamp(x(i) + alpha * (xf(r) - x(i)), lo(i), hi(i));
      }
      if (blocker >= 0) {
        x(blocker) = block_side > 0 ? hi(blocker) : lo(blocker);
        state[static_cast<std::size_t>(blocker)] = block_side;
        continue;
      }
    }

    // Full step taken: check the KKT multipliers of the working set and
    // release the worst offender.
    const Eigen::VectorXd grad = H * x - b;
    int worst = -1;
    double worst_violation = kTol * scale;
    for (int i = 0; i < n; ++i) {
      const int s = state[static_cast<std::size_t>(i)];
      if (s == -1 && -grad(i) > worst_violation) {
        worst_violation = -grad(i);
        worst = i;
      } else if (s == 1 && grad(i) > worst_violation) {
        worst_violation = grad(i);
        worst = i;
      }
    }
    if (worst < 0) {
      return x;
    }
    state[static_cast<std::size_t>(worst)] = 0;
  }
  throw std::logic_error("box QP failed to converge");
}

}  // namespace

CommandResult qp_velocity(const Eigen::MatrixXd& J, const Eigen::VectorXd& v,
                          const JointConfig& q, const Eigen::VectorXd& qd_prev,
                          const RobotModel& model, const CommandParams& params, double mu,
                          const Eigen::VectorXd& qd0)
{
  const int n = model.joint_count();
  if (J.cols() != n || q.size() != n || qd_prev.size() != n) {
    throw std::invalid_argument("dimension mismatch in qp_velocity");
  }
  const double lambda = damping_factor(mu, params.epsilon, params.lambda_max);
  const BoxBounds box = intersect_constraints(q, qd_prev, model, params.dt);

  Eigen::MatrixXd H = J.transpose() * J + lambda * Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd b = J.transpose() * v;

  const bool use_null = params.alpha_null > 0.0 && qd0.size() == n;
  if (use_null) {
    // Orthogonal projector onto the Jacobian null space, with singular
    // values below 1e-8 truncated.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < sv.size(); ++i) {
      if (sv(i) > 1e-8) {
        P -= svd.matrixV().col(i) * svd.matrixV().col(i).transpose();
      }
    }
    H += params.alpha_null * P;
    b += params.alpha_null * (P * qd0);
  }

  CommandResult result;
  result.qd = active_set_box_qp(H, b, box.lo, box.hi, qd_prev);
  result.lambda_used = lambda;
  result.dls_active = lambda > 0.0;
  for (int i = 0; i < n; ++i) {
    if (result.qd(i) == box.lo(i)) {
      result.constraints_active.push_back(
          "joint" + std::to_string(i) + ":" + box.lo_source[static_cast<std::size_t>(i)] + "_lower");
    } else if (result.qd(i) == box.hi(i)) {
      result.constraints_active.push_back(
          "joint" + std::to_string(i) + ":" + box.hi_source[static_cast<std::size_t>(i)] + "_upper");
    }
  }
  return result;
}

int select_mode(double min_distance, double d_max)
{
  if (min_distance < 0.0) {
    throw std::invalid_argument("distance must be nonnegative");
  }
  return min_distance < d_max ? 1 : 0;
}

Eigen::VectorXd compose_command(int nu, const Eigen::VectorXd& qd_global,
                                const Eigen::VectorXd& qd_local)
{
  if (qd_global.size() != qd_local.size()) {
    throw std::invalid_argument("dimension mismatch in compose_command");
  }
  return (1 - nu) * qd_global + nu * qd_local;
}

}  // namespace hybridplan
