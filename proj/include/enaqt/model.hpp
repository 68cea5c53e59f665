#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

namespace enaqt {

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Tight-binding chain: on-site energies plus power-law tunneling
/// J_{|n-m|} = j_max / |n-m|^alpha between every pair of sites.
struct ChainSpec {
  int n_sites = 0;
  std::vector<double> energies;
  double alpha = 1.0;
  double j_max = 0.1;

  /// Throws InvalidArgument when the invariants do not hold.
  void validate() const;
};

/// Linear ramp descending from `offset`: energies[n] = offset - n * delta.
ChainSpec build_ramp(int n_sites, double delta, double offset = 0.0,
                     double alpha = 1.0, double j_max = 0.1);

/// I.i.d. U[0,1) on-site energies drawn from the stream identified by `seed`.
std::vector<double> sample_disorder(int n_sites, std::uint64_t seed);

ChainSpec build_disordered(int n_sites, std::uint64_t seed, double alpha = 1.0,
                           double j_max = 0.1);

/// Seed for realization `index` of an ensemble run under `master_seed`.
/// Depends only on the pair, so realizations may be generated in any order.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

RealMatrix tunneling_matrix(const ChainSpec& spec);
ComplexMatrix hamiltonian(const ChainSpec& spec);

void to_json(nlohmann::json& j, const ChainSpec& spec);
void from_json(const nlohmann::json& j, ChainSpec& spec);

}  // namespace enaqt
