#include "enaqt/lindblad.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "enaqt/errors.hpp"

namespace enaqt {

namespace {

using cd = std::complex<double>;

constexpr double kHermitianTol = 1e-10;
constexpr double kTraceTol = 1e-10;
constexpr double kPsdTol = -1e-8;
constexpr double kResidualTol = 1e-10;
constexpr double kDegeneracyTol = 1e-8;
constexpr double kRcondFloor = 1e-14;
constexpr double kPivotRatioFloor = 1e-13;

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// Adds rate * D[L] to `superop`.
void add_dissipator(ComplexMatrix& superop, const ComplexMatrix& jump, double rate) {
  if (rate == 0.0) return;
  const Eigen::Index n = jump.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  const ComplexMatrix ldl = jump.adjoint() * jump;
  superop += rate * (kron(jump.conjugate(), jump) - 0.5 * kron(id, ldl) -
                     0.5 * kron(ldl.transpose(), id));
}

// Solves generator * x = 0 with the row of diagonal coordinate `replaced`
// overwritten by the trace constraint.
Eigen::VectorXd constrained_solve(const Eigen::MatrixXd& generator, const HermitianBasis& basis,
                                  int replaced) {
  Eigen::MatrixXd a = generator;
  a.row(replaced).setZero();
  for (int k = 0; k < basis.n_sites(); ++k) a(replaced, basis.diag(k)) = 1.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  // The condition estimate alone can miss exactly zero rows.
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  if (!(pivots.minCoeff() > kPivotRatioFloor * pivots.maxCoeff()) || !(lu.rcond() > kRcondFloor)) {
    throw DegenerateSteadyState("steady state: generator nullspace is not one-dimensional");
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(basis.dim());
  rhs(replaced) = 1.0;
  return lu.solve(rhs);
}

}  // namespace

void NoiseProfile::validate(int n_sites) const {
  if (gammas.size() != static_cast<std::size_t>(n_sites)) {
    throw InvalidArgument("NoiseProfile: gammas has length " + std::to_string(gammas.size()) +
                          ", chain has " + std::to_string(n_sites) + " sites");
  }
  for (double g : gammas) {
    if (!std::isfinite(g) || g < 0.0) throw InvalidArgument("NoiseProfile: dephasing rates must be finite and >= 0");
  }
  if (!std::isfinite(gamma_l) || gamma_l < 0.0) throw InvalidArgument("NoiseProfile: gamma_l must be finite and >= 0");
}

NoiseProfile NoiseProfile::uniform(int n_sites, double gamma, double gamma_l) {
  return NoiseProfile{std::vector<double>(n_sites, gamma), gamma_l};
}

void DensityMatrix::validate() const {
  if (rho.rows() != rho.cols() || rho.rows() == 0) throw NumericalError("DensityMatrix: not a square matrix");
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (!(herm <= kHermitianTol)) throw NumericalError("DensityMatrix: not Hermitian (deviation " + std::to_string(herm) + ")");
  const double trace_err = std::abs(rho.trace() - cd(1.0, 0.0));
  if (!(trace_err <= kTraceTol)) throw NumericalError("DensityMatrix: trace differs from 1 by " + std::to_string(trace_err));
  const ComplexMatrix sym = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(sym, Eigen::EigenvaluesOnly);
  const double min_eig = eig.eigenvalues().minCoeff();
  if (!(min_eig >= kPsdTol)) throw NumericalError("DensityMatrix: minimum eigenvalue " + std::to_string(min_eig) + " below tolerance");
}

Liouvillian build_liouvillian(const ComplexMatrix& h, const NoiseProfile& noise) {
  if (h.rows() != h.cols() || h.rows() == 0) throw InvalidArgument("build_liouvillian: Hamiltonian must be square");
  const auto n = static_cast<int>(h.rows());
  noise.validate(n);
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);

  Liouvillian out;
  out.n_sites = n;
  out.superop = cd(0.0, -1.0) * (kron(id, h) - kron(h.transpose(), id));
  for (int k = 0; k < n; ++k) {
    ComplexMatrix proj = ComplexMatrix::Zero(n, n);
    proj(k, k) = 1.0;
    add_dissipator(out.superop, proj, noise.gammas[k]);
  }
  ComplexMatrix trap = ComplexMatrix::Zero(n, n);
  trap(0, n - 1) = 1.0;
  add_dissipator(out.superop, trap, noise.gamma_l);
  return out;
}

ComplexMatrix vec_to_matrix(const Eigen::VectorXcd& v, int n_sites) {
  return Eigen::Map<const ComplexMatrix>(v.data(), n_sites, n_sites);
}

Eigen::VectorXcd matrix_to_vec(const ComplexMatrix& m) {
  return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

DensityMatrix steady_state(const Liouvillian& liouvillian) {
  const int n = liouvillian.n_sites;
  if (n < 1 || liouvillian.superop.rows() != n * n || liouvillian.superop.cols() != n * n) {
    throw InvalidArgument("steady_state: superoperator shape does not match n_sites");
  }
  const HermitianBasis basis(n);
  const Eigen::MatrixXd generator = basis.real_generator(liouvillian);

  const Eigen::VectorXd x = constrained_solve(generator, basis, basis.diag(0));
  if (n > 1) {
    const Eigen::VectorXd y = constrained_solve(generator, basis, basis.diag(n - 1));
    const double disagreement = (x - y).cwiseAbs().maxCoeff();
    if (!(disagreement <= kDegeneracyTol)) {
      throw DegenerateSteadyState("steady state: solutions with different constraint rows disagree by " +
                                  std::to_string(disagreement));
    }
  }
  if (!x.allFinite()) throw NumericalError("steady state: non-finite solution");

  DensityMatrix out{basis.from_real(x)};
  const double residual = (liouvillian.superop * matrix_to_vec(out.rho)).norm();
  const double scale = liouvillian.superop.norm();
  if (!(residual <= kResidualTol * scale)) {
    throw NumericalError("steady state: residual " + std::to_string(residual) + " exceeds tolerance");
  }
  out.validate();
  return out;
}

double flux(const DensityMatrix& rho, double gamma_l) {
  const int n = rho.n_sites();
  return gamma_l * rho.rho(n - 1, n - 1).real();
}

HermitianBasis::HermitianBasis(int n_sites)
    : n_(n_sites), n_pairs_(n_sites * (n_sites - 1) / 2), row_offset_(n_sites, 0) {
  if (n_sites < 1) throw InvalidArgument("HermitianBasis: n_sites must be positive");
  int offset = 0;
  for (int m = 0; m < n_; ++m) {
    row_offset_[m] = offset - (m + 1);
    offset += n_ - m - 1;
  }
}

int HermitianBasis::pair(int m, int n) const { return row_offset_[m] + n; }

Eigen::VectorXd HermitianBasis::to_real(const ComplexMatrix& rho) const {
  Eigen::VectorXd x(dim());
  for (int k = 0; k < n_; ++k) x(diag(k)) = rho(k, k).real();
  for (int m = 0; m < n_; ++m) {
    for (int n = m + 1; n < n_; ++n) {
      x(re(m, n)) = rho(m, n).real();
      x(im(m, n)) = rho(m, n).imag();
    }
  }
  return x;
}

ComplexMatrix HermitianBasis::from_real(const Eigen::VectorXd& x) const {
  ComplexMatrix rho(n_, n_);
  for (int k = 0; k < n_; ++k) rho(k, k) = x(diag(k));
  for (int m = 0; m < n_; ++m) {
    for (int n = m + 1; n < n_; ++n) {
      rho(m, n) = cd(x(re(m, n)), x(im(m, n)));
      rho(n, m) = std::conj(rho(m, n));
    }
  }
  return rho;
}

Eigen::MatrixXd HermitianBasis::real_generator(const Liouvillian& liouvillian) const {
  const ComplexMatrix& l = liouvillian.superop;
  const auto idx = [this](int i, int j) { return i + j * n_; };
  Eigen::MatrixXd out(dim(), dim());

  // Column k holds the coordinates of L applied to basis element k.
  const auto store = [&](int col, const Eigen::VectorXcd& image) {
    for (int k = 0; k < n_; ++k) out(diag(k), col) = image(idx(k, k)).real();
    for (int m = 0; m < n_; ++m) {
      for (int n = m + 1; n < n_; ++n) {
        out(re(m, n), col) = image(idx(m, n)).real();
        out(im(m, n), col) = image(idx(m, n)).imag();
      }
    }
  };
  for (int k = 0; k < n_; ++k) store(diag(k), l.col(idx(k, k)));
  const cd i_unit(0.0, 1.0);
  for (int m = 0; m < n_; ++m) {
    for (int n = m + 1; n < n_; ++n) {
      store(re(m, n), l.col(idx(m, n)) + l.col(idx(n, m)));
      store(im(m, n), i_unit * (l.col(idx(m, n)) - l.col(idx(n, m))));
    }
  }
  return out;
}

TransportSystem::TransportSystem(const ComplexMatrix& h, double gamma_l)
    : basis_(static_cast<int>(h.rows())), gamma_l_(gamma_l) {
  const auto n = static_cast<int>(h.rows());
  base_ = basis_.real_generator(build_liouvillian(h, NoiseProfile{std::vector<double>(n, 0.0), gamma_l}));
}

TransportSystem::TransportSystem(const ChainSpec& spec, double gamma_l)
    : TransportSystem(hamiltonian(spec), gamma_l) {}

TransportSystem::Solution TransportSystem::solve(std::span<const double> gammas) const {
  const int n = n_sites();
  if (gammas.size() != static_cast<std::size_t>(n)) {
    throw InvalidArgument("TransportSystem: expected " + std::to_string(n) + " dephasing rates");
  }
  for (double g : gammas) {
    if (!std::isfinite(g) || g < 0.0) throw InvalidArgument("TransportSystem: dephasing rates must be finite and >= 0");
  }

  Eigen::MatrixXd a = base_;
  for (int m = 0; m < n; ++m) {
    for (int k = m + 1; k < n; ++k) {
      const double decay = -0.5 * (gammas[m] + gammas[k]);
      a(basis_.re(m, k), basis_.re(m, k)) += decay;
      a(basis_.im(m, k), basis_.im(m, k)) += decay;
    }
  }
  const Eigen::VectorXd constraint_row = a.row(basis_.diag(0));
  a.row(basis_.diag(0)).setZero();
  for (int k = 0; k < n; ++k) a(basis_.diag(0), basis_.diag(k)) = 1.0;

  // Rank check from the pivots of U: O(dim) instead of a condition estimate,
  // which would cost a sizeable fraction of the factorization here.
  Solution out{Eigen::PartialPivLU<Eigen::MatrixXd>(a), {}, 0.0};
  const auto pivots = out.lu.matrixLU().diagonal().cwiseAbs();
  if (!(pivots.minCoeff() > kPivotRatioFloor * pivots.maxCoeff())) {
    throw DegenerateSteadyState("TransportSystem: generator nullspace is not one-dimensional");
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(basis_.dim());
  rhs(basis_.diag(0)) = 1.0;
  out.x = out.lu.solve(rhs);

  // Residual of the unconstrained generator: the replaced row is restored.
  Eigen::VectorXd residual = a * out.x;
  residual(basis_.diag(0)) = constraint_row.dot(out.x);
  const double scale = a.norm();
  if (!out.x.allFinite() || !(residual.norm() <= kResidualTol * scale)) {
    throw NumericalError("TransportSystem: steady-state residual exceeds tolerance");
  }
  out.flux = gamma_l_ * out.x(basis_.diag(n - 1));
  return out;
}

DensityMatrix TransportSystem::density(const Solution& solution) const {
  return DensityMatrix{basis_.from_real(solution.x)};
}

}  // namespace enaqt
