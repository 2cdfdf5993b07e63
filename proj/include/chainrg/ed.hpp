#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "chainrg/model.hpp"

namespace chainrg {

class EdLimitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Fixed-particle-number block of the chain Hamiltonian in the occupation
// basis (bit x of a state = occupation of site x, fermionic order by site).
struct SectorBlock {
  int N = 0;
  std::vector<std::uint32_t> states;
  Eigen::MatrixXd H;
};

struct ManyBodyOperator {
  int L = 0;
  double lambda = 0.0;
  double h = 0.0;  // coefficient of -sum_x n_x
  Potential v;
  std::vector<SectorBlock> sectors;  // N = 0..L

  std::size_t dimension() const { return std::size_t(1) << L; }
  // Full 2^L matrix; only meant for small L (checks of block structure).
  Eigen::MatrixXd dense() const;
};

// H = -sum_x [ (a+_{x+1} a-_x + a+_x a-_{x+1})/2 + h n_x ] - lambda sum_{x,y} v(x-y) n_x n_y
// on a ring with periodic fermionic boundary conditions, h = -1 + r. The
// pair sum runs over ordered pairs, including x = y. Refuses L > 14 or a
// potential range that wraps around the ring.
ManyBodyOperator build_hamiltonian(int L, double lambda, double r, const Potential& v);

struct SpectralData {
  int L = 0;
  double beta = 0.0;
  double lambda = 0.0;
  double r = 0.0;
  std::vector<Eigen::VectorXd> energies;  // per N, ascending
  std::vector<Eigen::MatrixXd> vectors;   // per N, columns are eigenvectors
  std::vector<std::vector<std::uint32_t>> states;
  double ground_energy = 0.0;
  double log_reduced_partition = 0.0;  // log Tr e^{-beta (H - ground_energy)}

  // Lehmann blocks <m|a-_x|n>, m in sector N, n in N+1, filled on demand.
  mutable std::map<int, std::vector<Eigen::MatrixXd>> annihilator_blocks;
  const std::vector<Eigen::MatrixXd>& blocks(int x) const;
};

// Dense diagonalization of every sector. Full spectra are refused beyond
// L = 12 (sector dimension 924).
SpectralData diagonalize(const ManyBodyOperator& H, double beta);

// Lowest energy of sector N, dense eigenvalues only; accepts L <= 14.
double sector_ground_energy(const ManyBodyOperator& H, int N);

// Time-ordered thermal correlator <T a-_{(tau,x)} a+_{(0,0)}> from the Lehmann
// sum, tau reduced into (-beta, beta] by antiperiodicity; tau = 0 gives the
// average of the one-sided limits.
double thermal_two_point(int x, double tau, const SpectralData& sd);

// Shat(k0, k) = -int_0^beta dtau sum_x e^{-i(k0 tau + k x)} S(tau, x), with the
// tau integral done analytically per Lehmann term.
cplx schwinger_momentum(Momentum kk, const SpectralData& sd);

// Thermal <a+_0 a-_x>.
double density_matrix(int x, const SpectralData& sd);

// Thermal occupation <a+_k a-_k>.
double occupation(double k, const SpectralData& sd);

struct PhaseRow {
  double r = 0.0;
  double lambda = 0.0;
  double ground_density = 0.0;  // mean N/L over degenerate lowest sectors
  double thermal_density = 0.0;
  double charge_gap = 0.0;      // cheapest particle addition or removal
  std::vector<double> occupation;  // thermal n(k) on the lattice momenta
};

// Scan of ground-state and thermal observables; L <= 12.
std::vector<PhaseRow> phase_diagnostics(int L, double beta, const std::vector<double>& rs,
                                        const std::vector<double>& lambdas, const Potential& v);

// Spectral cache: 8-byte little-endian header length, a JSON header, then
// float64 little-endian arrays: for N = 0..L the energies followed by the
// eigenvectors column by column. The JSON header lists the sector dimensions.
void save_spectral(const SpectralData& sd, const std::string& path);
SpectralData load_spectral(const std::string& path);

}  // namespace chainrg
