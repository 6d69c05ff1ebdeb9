#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nctefa/error.hpp"
#include "nctefa/graph.hpp"
#include "nctefa/matrix_exp.hpp"
#include "nctefa/metric.hpp"

namespace nctefa {

/// Input coupling B (n x m, 0/1 entries). Column j drives the nodes marked in it.
class ControlInput {
 public:
  explicit ControlInput(Eigen::MatrixXd b) : b_(std::move(b)) {
    if (!b_.unaryExpr([](double x) { return x == 0.0 || x == 1.0; }).all()) {
      throw ContractError("control input entries must be 0 or 1");
    }
  }

  /// B = I: every node receives its own input.
  static ControlInput identity(Eigen::Index n) { return ControlInput(Eigen::MatrixXd::Identity(n, n)); }

  const Eigen::MatrixXd& matrix() const noexcept { return b_; }
  Eigen::Index nodes() const noexcept { return b_.rows(); }
  Eigen::Index inputs() const noexcept { return b_.cols(); }

 private:
  Eigen::MatrixXd b_;
};

/// Integration window [0, end] sampled every `step`.
struct Horizon {
  double end = 1.0;
  double step = 0.001;

  void validate() const {
    if (!(end > 0.0) || !std::isfinite(end)) throw ContractError("horizon T must be > 0");
    if (!(step > 0.0) || !std::isfinite(step)) throw ContractError("horizon step must be > 0");
    if (step > end) throw ContractError("horizon step must not exceed T");
  }

  /// Number of full steps; when T/step is not (nearly) integral the grid ends
  /// with one shorter step of length `remainder()`.
  long full_steps() const {
    const double ratio = end / step;
    const double nearest = std::round(ratio);
    if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio)) return static_cast<long>(nearest);
    return static_cast<long>(std::floor(ratio));
  }

  double remainder() const {
    const double ratio = end / step;
    const double nearest = std::round(ratio);
    if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio)) return 0.0;
    return end - static_cast<double>(full_steps()) * step;
  }
};

enum class GramianMethod { spectral, trapezoid, lyapunov };

inline std::string_view to_string(GramianMethod m) {
  switch (m) {
    case GramianMethod::spectral: return "spectral";
    case GramianMethod::trapezoid: return "trapezoid";
    case GramianMethod::lyapunov: return "lyapunov";
  }
  return "?";
}

struct Gramian {
  Eigen::MatrixXd w;
  GramianMethod method;
};

struct TrapezoidOptions {
  /// Subtract the h^2/12 (f'(T) - f'(0)) Euler-Maclaurin term. The derivative of
  /// the integrand is exact, so this only removes the O(h^2) quadrature bias.
  bool endpoint_correction = true;
};

namespace detail {

inline void require_symmetric(const Eigen::MatrixXd& a, const char* who) {
  if (a.rows() != a.cols()) throw ContractError(std::string(who) + ": matrix is not square");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ContractError(std::string(who) + ": system matrix is not symmetric");
  }
}

/// -lambda_min(A): the exponential growth rate of e^{-A tau}.
inline double growth_rate(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
  return std::max(0.0, -eig.eigenvalues()[0]);
}

[[noreturn]] inline void throw_overflow(const Eigen::MatrixXd& a, double horizon, const char* who) {
  const double rate = growth_rate(a);
  throw NumericOverflowError(std::string(who) + ": Gramian is not finite (growth e^{2*T*" +
                                 std::to_string(rate) + "} with T = " + std::to_string(horizon) + ")",
                             std::nullopt, rate);
}

/// Integral of e^{-2 lambda tau} over [0, T].
inline double phi(double lambda, double horizon) {
  if (lambda == 0.0) return horizon;
  return -std::expm1(-2.0 * lambda * horizon) / (2.0 * lambda);
}

}  // namespace detail

/// Closed-form finite-horizon Gramian for symmetric A and B = I:
/// W = Q diag(phi(lambda_i)) Q^T with phi(l) = (1 - e^{-2 l T}) / (2 l), phi(0) = T.
///
/// Isolated nodes (zero rows) are split off before the eigendecomposition and
/// get W_vv = T exactly.
inline Gramian gramian_spectral(const Eigen::MatrixXd& a, const Horizon& h) {
  detail::require_symmetric(a, "gramian_spectral");
  h.validate();
  const Eigen::Index n = a.rows();
  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (a.row(i).cwiseAbs().maxCoeff() != 0.0) active.push_back(i);
  }
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) w(i, i) = h.end;
  if (!active.empty()) {
    const auto m = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd sub(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) sub(i, j) = a(active[i], active[j]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sub);
    if (eig.info() != Eigen::Success) throw NumericError("gramian_spectral: eigensolver failed");
    const Eigen::VectorXd phis =
        eig.eigenvalues().unaryExpr([&](double l) { return detail::phi(l, h.end); });
    const Eigen::MatrixXd& q = eig.eigenvectors();
    Eigen::MatrixXd ws = q * phis.asDiagonal() * q.transpose();
    ws = 0.5 * (ws + ws.transpose()).eval();
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) w(active[i], active[j]) = ws(i, j);
    }
  }
  if (!w.allFinite()) detail::throw_overflow(a, h.end, "gramian_spectral");
  return {std::move(w), GramianMethod::spectral};
}

/// Trapezoid-rule quadrature of the integral over [0, T] of
/// e^{-A tau} B B^T e^{-A^T tau} on the grid {0, step, 2 step, ..., T}.
///
/// One propagator E = exp(-A step) is formed and the grid is walked with
/// M_{k+1} = E M_k, M_0 = B, so each node of the grid costs one product and
/// one symmetric rank update.
inline Gramian gramian_trapezoid(const Eigen::MatrixXd& a, const ControlInput& b, const Horizon& h,
                                 const TrapezoidOptions& opts = {}) {
  detail::require_symmetric(a, "gramian_trapezoid");
  h.validate();
  const Eigen::Index n = a.rows();
  if (b.nodes() != n) throw ContractError("gramian_trapezoid: B has the wrong number of rows");

  const long steps = h.full_steps();
  const double dt = h.step;
  const double tail = h.remainder();
  const Eigen::MatrixXd prop = matrix_exp(-a * dt);

  auto outer = [](const Eigen::MatrixXd& m) -> Eigen::MatrixXd { return m * m.transpose(); };
  // d/dtau of M M^T where M(tau) = e^{-A tau} B.
  auto slope = [&](const Eigen::MatrixXd& f) -> Eigen::MatrixXd {
    return -(a * f + f * a.transpose());
  };

  Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd m = b.matrix();
  const Eigen::MatrixXd f_start = outer(m);
  lower.selfadjointView<Eigen::Lower>().rankUpdate(m, 0.5 * dt);
  for (long k = 1; k <= steps; ++k) {
    m = prop * m;
    lower.selfadjointView<Eigen::Lower>().rankUpdate(m, k == steps ? 0.5 * dt : dt);
  }
  Eigen::MatrixXd w = lower.selfadjointView<Eigen::Lower>();
  const Eigen::MatrixXd f_grid_end = outer(m);
  if (opts.endpoint_correction) {
    w -= (dt * dt / 12.0) * (slope(f_grid_end) - slope(f_start));
  }
  if (tail > 0.0) {
    const Eigen::MatrixXd m_end = matrix_exp(-a * tail) * m;
    const Eigen::MatrixXd f_end = outer(m_end);
    w += 0.5 * tail * (f_grid_end + f_end);
    if (opts.endpoint_correction) {
      w -= (tail * tail / 12.0) * (slope(f_end) - slope(f_grid_end));
    }
  }
  w = 0.5 * (w + w.transpose()).eval();
  if (!w.allFinite()) detail::throw_overflow(a, h.end, "gramian_trapezoid");
  return {std::move(w), GramianMethod::trapezoid};
}

/// Largest system size accepted by the dense Kronecker Lyapunov solve.
inline constexpr Eigen::Index kMaxLyapunovNodes = 64;

/// Infinite-horizon Gramian: solves A W + W A^T = B B^T through the
/// vectorized system (I (x) A + A (x) I) vec(W) = vec(B B^T).
/// Requires every eigenvalue of A to have positive real part.
inline Gramian gramian_lyapunov(const Eigen::MatrixXd& a, const ControlInput& b) {
  if (a.rows() != a.cols()) throw ContractError("gramian_lyapunov: matrix is not square");
  const Eigen::Index n = a.rows();
  if (b.nodes() != n) throw ContractError("gramian_lyapunov: B has the wrong number of rows");
  if (n > kMaxLyapunovNodes) {
    throw ContractError("gramian_lyapunov: n = " + std::to_string(n) + " exceeds the dense limit of " +
                        std::to_string(kMaxLyapunovNodes));
  }
  if (n == 0) return {Eigen::MatrixXd(0, 0), GramianMethod::lyapunov};

  Eigen::EigenSolver<Eigen::MatrixXd> eig(a, false);
  if (eig.info() != Eigen::Success) throw NumericError("gramian_lyapunov: eigensolver failed");
  if (eig.eigenvalues().real().minCoeff() <= 0.0) {
    throw ContractError(
        "gramian_lyapunov: infinite-horizon Gramian diverges (A has an eigenvalue with "
        "non-positive real part)");
  }

  const Eigen::Index nn = n * n;
  Eigen::MatrixXd kron = Eigen::MatrixXd::Zero(nn, nn);
  for (Eigen::Index j = 0; j < n; ++j) {
    // I (x) A: block (j, j) is A.
    kron.block(j * n, j * n, n, n) += a;
    // A (x) I: block (i, j) is a(i, j) I.
    for (Eigen::Index i = 0; i < n; ++i) {
      if (a(i, j) != 0.0) kron.block(i * n, j * n, n, n).diagonal().array() += a(i, j);
    }
  }
  const Eigen::MatrixXd rhs = b.matrix() * b.matrix().transpose();
  const Eigen::Map<const Eigen::VectorXd> rhs_vec(rhs.data(), nn);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(kron);
  Eigen::VectorXd x = lu.solve(rhs_vec);
  if (!x.allFinite() || (kron * x - rhs_vec).norm() > 1e-8 * std::max(1.0, rhs_vec.norm())) {
    throw NumericError("gramian_lyapunov: Kronecker system is singular");
  }
  Eigen::MatrixXd w = Eigen::Map<Eigen::MatrixXd>(x.data(), n, n);
  w = 0.5 * (w + w.transpose()).eval();
  return {std::move(w), GramianMethod::lyapunov};
}

inline MetricVector average_controllability(const Gramian& g) {
  const Eigen::VectorXd diag = g.w.diagonal();
  if (!diag.allFinite()) throw NumericError("average_controllability: non-finite Gramian diagonal");
  return MetricVector(MetricKind::average_controllability, diag);
}

struct ControllabilityOptions {
  GramianMethod method = GramianMethod::spectral;
  /// Divide A by (1 + lambda_max) before integrating.
  bool rescale_spectral = false;
  TrapezoidOptions trapezoid{};
};

/// adjacency -> Gramian (B = I) -> diagonal.
inline MetricVector average_controllability_for_graph(const Graph& g, const Horizon& h,
                                                      const ControllabilityOptions& opts = {}) {
  Eigen::MatrixXd a = adjacency(g);
  if (opts.rescale_spectral && g.edge_count() > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
    a /= 1.0 + eig.eigenvalues().maxCoeff();
  }
  try {
    switch (opts.method) {
      case GramianMethod::spectral:
        return average_controllability(gramian_spectral(a, h));
      case GramianMethod::trapezoid:
        return average_controllability(
            gramian_trapezoid(a, ControlInput::identity(g.n()), h, opts.trapezoid));
      case GramianMethod::lyapunov:
        break;
    }
  } catch (const NumericOverflowError& e) {
    throw NumericOverflowError("graph " + std::to_string(g.id()) + ": " + e.what(), g.id(),
                               e.spectral_bound());
  }
  throw ContractError("average controllability needs a finite-horizon method (spectral or trapezoid)");
}

}  // namespace nctefa
