#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "enaqt/model.hpp"

namespace enaqt {

/// Site-local dephasing rates Gamma_n and the trapping-renewal rate gamma_l
/// of the jump sqrt(gamma_l)|1><N|.
struct NoiseProfile {
  std::vector<double> gammas;
  double gamma_l = 0.1;

  void validate(int n_sites) const;
  static NoiseProfile uniform(int n_sites, double gamma, double gamma_l);
};

/// Steady-state density matrix. `validate` enforces Hermiticity and unit
/// trace to 1e-10 and a minimum eigenvalue of at least -1e-8.
struct DensityMatrix {
  ComplexMatrix rho;

  int n_sites() const { return static_cast<int>(rho.rows()); }
  void validate() const;
};

/// Lindblad generator acting on column-stacked density matrices:
/// vec(rho)[i + j*N] = rho(i, j), so vec(A X B) = (B^T kron A) vec(X).
struct Liouvillian {
  ComplexMatrix superop;
  int n_sites = 0;
};

/// rho' = -i[H,rho] + sum_n Gamma_n D[|n><n|](rho) + gamma_l D[|1><N|](rho),
/// D[L](rho) = L rho L^dag - {L^dag L, rho}/2.
Liouvillian build_liouvillian(const ComplexMatrix& h, const NoiseProfile& noise);

/// Unique trace-one null vector of the generator. Solves the dense system with
/// the rho_11 row replaced by the trace constraint, then repeats with the
/// rho_NN row replaced; disagreement beyond 1e-8 (or a rank-deficient
/// factorization) raises DegenerateSteadyState.
DensityMatrix steady_state(const Liouvillian& liouvillian);

/// eta = gamma_l * Re(rho_NN).
double flux(const DensityMatrix& rho, double gamma_l);

ComplexMatrix vec_to_matrix(const Eigen::VectorXcd& v, int n_sites);
Eigen::VectorXcd matrix_to_vec(const ComplexMatrix& m);

/// Real coordinates of an N x N Hermitian matrix: the N diagonal entries,
/// then Re(rho_mn) and Im(rho_mn) for m < n in row-major pair order.
class HermitianBasis {
public:
  explicit HermitianBasis(int n_sites);

  int n_sites() const { return n_; }
  int dim() const { return n_ * n_; }
  int diag(int k) const { return k; }
  int re(int m, int n) const { return n_ + pair(m, n); }
  int im(int m, int n) const { return n_ + n_pairs_ + pair(m, n); }

  Eigen::VectorXd to_real(const ComplexMatrix& rho) const;
  ComplexMatrix from_real(const Eigen::VectorXd& x) const;

  /// Real matrix of a Hermiticity-preserving superoperator in these coordinates.
  Eigen::MatrixXd real_generator(const Liouvillian& liouvillian) const;

private:
  int pair(int m, int n) const;

  int n_;
  int n_pairs_;
  std::vector<int> row_offset_;
};

/// Cached steady-state problem for a fixed Hamiltonian and gamma_l, with the
/// dephasing rates as the only free parameters. Dephasing is diagonal in the
/// real coordinates, so each solve only patches the cached generator's
/// diagonal before factorizing.
class TransportSystem {
public:
  TransportSystem(const ComplexMatrix& h, double gamma_l);
  explicit TransportSystem(const ChainSpec& spec, double gamma_l);

  struct Solution {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;  // of the trace-constrained system
    Eigen::VectorXd x;                        // real coordinates of rho
    double flux = 0.0;
  };

  int n_sites() const { return basis_.n_sites(); }
  double gamma_l() const { return gamma_l_; }
  const HermitianBasis& basis() const { return basis_; }

  /// Throws InvalidArgument on a bad rate vector, DegenerateSteadyState on a
  /// rank-deficient system, NumericalError when the residual check fails.
  Solution solve(std::span<const double> gammas) const;
  double flux(std::span<const double> gammas) const { return solve(gammas).flux; }
  DensityMatrix density(const Solution& solution) const;

private:
  HermitianBasis basis_;
  double gamma_l_;
  Eigen::MatrixXd base_;  // real generator with all Gamma_n = 0
};

}  // namespace enaqt
