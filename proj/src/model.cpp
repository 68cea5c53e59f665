#include "enaqt/model.hpp"

#include <cmath>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "enaqt/errors.hpp"

namespace enaqt {

namespace {

// SplitMix64 finalizer; a bijective mix of a 64-bit counter.
std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Top 53 bits of one engine draw, scaled into [0,1). Avoids
// std::uniform_real_distribution, whose output is implementation-defined.
double unit_double(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace

void ChainSpec::validate() const {
  if (n_sites < 1) throw InvalidArgument("ChainSpec: n_sites must be positive");
  if (energies.size() != static_cast<std::size_t>(n_sites)) {
    throw InvalidArgument("ChainSpec: energies has length " + std::to_string(energies.size()) +
                          ", expected " + std::to_string(n_sites));
  }
  for (double e : energies) {
    if (!std::isfinite(e)) throw InvalidArgument("ChainSpec: non-finite energy");
  }
  if (!std::isfinite(alpha) || alpha < 0.0) throw InvalidArgument("ChainSpec: alpha must be finite and >= 0");
  if (!std::isfinite(j_max) || j_max <= 0.0) throw InvalidArgument("ChainSpec: j_max must be finite and > 0");
}

ChainSpec build_ramp(int n_sites, double delta, double offset, double alpha, double j_max) {
  if (n_sites < 2) throw InvalidArgument("build_ramp: n_sites must be >= 2");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidArgument("build_ramp: delta must be > 0");
  ChainSpec spec;
  spec.n_sites = n_sites;
  spec.alpha = alpha;
  spec.j_max = j_max;
  spec.energies.resize(n_sites);
  for (int n = 0; n < n_sites; ++n) spec.energies[n] = offset - n * delta;
  spec.validate();
  return spec;
}

std::vector<double> sample_disorder(int n_sites, std::uint64_t seed) {
  if (n_sites < 2) throw InvalidArgument("sample_disorder: n_sites must be >= 2");
  std::mt19937_64 engine(seed);
  std::vector<double> energies(n_sites);
  for (double& e : energies) e = unit_double(engine);
  return energies;
}

ChainSpec build_disordered(int n_sites, std::uint64_t seed, double alpha, double j_max) {
  ChainSpec spec;
  spec.n_sites = n_sites;
  spec.energies = sample_disorder(n_sites, seed);
  spec.alpha = alpha;
  spec.j_max = j_max;
  spec.validate();
  return spec;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(~index));
}

RealMatrix tunneling_matrix(const ChainSpec& spec) {
  spec.validate();
  const int n = spec.n_sites;
  RealMatrix j = RealMatrix::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const double value = spec.j_max / std::pow(static_cast<double>(b - a), spec.alpha);
      j(a, b) = value;
      j(b, a) = value;
    }
  }
  return j;
}

ComplexMatrix hamiltonian(const ChainSpec& spec) {
  ComplexMatrix h = tunneling_matrix(spec).cast<std::complex<double>>();
  for (int n = 0; n < spec.n_sites; ++n) h(n, n) = spec.energies[n];
  return h;
}

void to_json(nlohmann::json& j, const ChainSpec& spec) {
  j = nlohmann::json{{"n_sites", spec.n_sites},
                     {"energies", spec.energies},
                     {"alpha", spec.alpha},
                     {"j_max", spec.j_max}};
}

void from_json(const nlohmann::json& j, ChainSpec& spec) {
  for (const auto& [key, value] : j.items()) {
    if (key != "n_sites" && key != "energies" && key != "alpha" && key != "j_max") {
      throw InvalidArgument("ChainSpec: unknown key '" + key + "'");
    }
  }
  spec.n_sites = j.at("n_sites").get<int>();
  spec.energies = j.at("energies").get<std::vector<double>>();
  spec.alpha = j.at("alpha").get<double>();
  spec.j_max = j.at("j_max").get<double>();
  spec.validate();
}

}  // namespace enaqt
