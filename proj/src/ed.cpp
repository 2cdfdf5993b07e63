#include "chainrg/ed.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace chainrg {

namespace {

constexpr int kMaxSites = 14;
constexpr int kMaxFullSpectrum = 12;

int parity_below(std::uint32_t s, int site) {
  return std::popcount(s & ((std::uint32_t(1) << site) - 1)) & 1;
}

// a-_j on s: returns false if site j is empty.
bool annihilate(std::uint32_t& s, int j, int& sign) {
  if (!(s >> j & 1)) return false;
  if (parity_below(s, j)) sign = -sign;
  s ^= std::uint32_t(1) << j;
  return true;
}

bool create(std::uint32_t& s, int i, int& sign) {
  if (s >> i & 1) return false;
  if (parity_below(s, i)) sign = -sign;
  s |= std::uint32_t(1) << i;
  return true;
}

std::vector<std::vector<std::uint32_t>> sector_states(int L) {
  std::vector<std::vector<std::uint32_t>> out(L + 1);
  for (std::uint32_t s = 0; s < (std::uint32_t(1) << L); ++s) out[std::popcount(s)].push_back(s);
  return out;
}

std::vector<int> index_map(int L, const std::vector<std::vector<std::uint32_t>>& states) {
  std::vector<int> idx(std::size_t(1) << L, -1);
  for (const auto& sec : states)
    for (std::size_t i = 0; i < sec.size(); ++i) idx[sec[i]] = static_cast<int>(i);
  return idx;
}

void check_sites(int L, const Potential& v) {
  if (L < 3) throw EdLimitError("need at least 3 sites");
  if (L > kMaxSites) throw EdLimitError("exact diagonalization is limited to L <= 14");
  if (2 * v.range() + 1 > L) throw EdLimitError("potential range wraps around the ring");
}

// Matrix of a-_x from sector N + 1 to sector N in the occupation basis.
Eigen::MatrixXd annihilator(int x, const std::vector<std::uint32_t>& from, const std::vector<int>& idx,
                            std::size_t rows) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(from.size()));
  for (std::size_t c = 0; c < from.size(); ++c) {
    std::uint32_t s = from[c];
    int sign = 1;
    if (annihilate(s, x, sign)) A(idx[s], static_cast<Eigen::Index>(c)) = sign;
  }
  return A;
}

double reduce_tau(double& tau, double beta) {
  double sign = 1.0;
  while (tau > beta) {
    tau -= beta;
    sign = -sign;
  }
  while (tau <= -beta) {
    tau += beta;
    sign = -sign;
  }
  return sign;
}

void write_le(std::ofstream& f, const double* p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t u;
    std::memcpy(&u, p + i, 8);
    if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
    f.write(reinterpret_cast<const char*>(&u), 8);
  }
}

void read_le(std::ifstream& f, double* p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t u;
    f.read(reinterpret_cast<char*>(&u), 8);
    if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
    std::memcpy(p + i, &u, 8);
  }
}

}  // namespace

Eigen::MatrixXd ManyBodyOperator::dense() const {
  const auto n = static_cast<Eigen::Index>(dimension());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (const auto& sec : sectors)
    for (std::size_t i = 0; i < sec.states.size(); ++i)
      for (std::size_t j = 0; j < sec.states.size(); ++j) M(sec.states[i], sec.states[j]) = sec.H(i, j);
  return M;
}

ManyBodyOperator build_hamiltonian(int L, double lambda, double r, const Potential& v) {
  check_sites(L, v);
  ManyBodyOperator op;
  op.L = L;
  op.lambda = lambda;
  op.h = -1.0 + r;
  op.v = v;
  const auto states = sector_states(L);
  const auto idx = index_map(L, states);
  for (int N = 0; N <= L; ++N) {
    SectorBlock b;
    b.N = N;
    b.states = states[N];
    const auto d = static_cast<Eigen::Index>(b.states.size());
    b.H = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index c = 0; c < d; ++c) {
      const std::uint32_t s = b.states[c];
      double diag = -op.h * N;
      for (int x = 0; x < L; ++x) {
        if (!(s >> x & 1)) continue;
        for (int dd = -v.range(); dd <= v.range(); ++dd) {
          const int y = ((x + dd) % L + L) % L;
          if (s >> y & 1) diag -= lambda * v(dd);
        }
      }
      b.H(c, c) += diag;
      for (int x = 0; x < L; ++x) {
        const int y = (x + 1) % L;
        // a+_y a-_x and a+_x a-_y, each with amplitude -1/2.
        for (auto [i, j] : {std::pair{y, x}, std::pair{x, y}}) {
          std::uint32_t t = s;
          int sign = 1;
          if (annihilate(t, j, sign) && create(t, i, sign)) b.H(idx[t], c) += -0.5 * sign;
        }
      }
    }
    op.sectors.push_back(std::move(b));
  }
  return op;
}

SpectralData diagonalize(const ManyBodyOperator& H, double beta) {
  if (H.L > kMaxFullSpectrum) throw EdLimitError("full spectra are limited to L <= 12");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  SpectralData sd;
  sd.L = H.L;
  sd.beta = beta;
  sd.lambda = H.lambda;
  sd.r = H.h + 1.0;
  sd.ground_energy = std::numeric_limits<double>::infinity();
  for (const auto& sec : H.sectors) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sec.H);
    sd.energies.push_back(es.eigenvalues());
    sd.vectors.push_back(es.eigenvectors());
    sd.states.push_back(sec.states);
    sd.ground_energy = std::min(sd.ground_energy, es.eigenvalues()(0));
  }
  double z = 0.0;
  for (const auto& e : sd.energies)
    for (Eigen::Index i = 0; i < e.size(); ++i) z += std::exp(-beta * (e(i) - sd.ground_energy));
  sd.log_reduced_partition = std::log(z);
  return sd;
}

double sector_ground_energy(const ManyBodyOperator& H, int N) {
  if (N < 0 || N > H.L) throw std::invalid_argument("particle number out of range");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H.sectors[N].H, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

const std::vector<Eigen::MatrixXd>& SpectralData::blocks(int x) const {
  x = ((x % L) + L) % L;
  auto it = annihilator_blocks.find(x);
  if (it != annihilator_blocks.end()) return it->second;
  const auto idx = index_map(L, states);
  std::vector<Eigen::MatrixXd> out;
  for (int N = 0; N < L; ++N) {
    const Eigen::MatrixXd A = annihilator(x, states[N + 1], idx, states[N].size());
    out.push_back(vectors[N].transpose() * A * vectors[N + 1]);
  }
  return annihilator_blocks.emplace(x, std::move(out)).first->second;
}

namespace {

// One-sided Lehmann sum: tau in [0, beta) approached from above when
// from_above, tau in (-beta, 0] approached from below otherwise.
double lehmann_time(int x, double tau, bool from_above, const SpectralData& sd) {
  const auto& cx = sd.blocks(x);
  const auto& c0 = sd.blocks(0);
  const double beta = sd.beta, e0 = sd.ground_energy, lz = sd.log_reduced_partition;
  double s = 0.0;
  for (int N = 0; N < sd.L; ++N) {
    const auto& em = sd.energies[N];
    const auto& en = sd.energies[N + 1];
    for (Eigen::Index n = 0; n < en.size(); ++n)
      for (Eigen::Index m = 0; m < em.size(); ++m) {
        const double cc = cx[N](m, n) * c0[N](m, n);
        if (cc == 0.0) continue;
        if (from_above)
          s += std::exp(-(beta - tau) * (em(m) - e0) - tau * (en(n) - e0) - lz) * cc;
        else
          s -= std::exp(-(beta + tau) * (en(n) - e0) + tau * (em(m) - e0) - lz) * cc;
      }
  }
  return s;
}

}  // namespace

double thermal_two_point(int x, double tau, const SpectralData& sd) {
  const double sign = reduce_tau(tau, sd.beta);
  if (tau == 0.0) return sign * 0.5 * (lehmann_time(x, 0.0, true, sd) + lehmann_time(x, 0.0, false, sd));
  return sign * lehmann_time(x, tau, tau > 0.0, sd);
}

cplx schwinger_momentum(Momentum kk, const SpectralData& sd) {
  const int L = sd.L;
  const auto& c0 = sd.blocks(0);
  const double beta = sd.beta, e0 = sd.ground_energy, lz = sd.log_reduced_partition;
  cplx s = 0.0;
  for (int N = 0; N < L; ++N) {
    Eigen::MatrixXcd ck = Eigen::MatrixXcd::Zero(c0[N].rows(), c0[N].cols());
    for (int x = 0; x < L; ++x) ck += std::polar(1.0, -kk.k * x) * sd.blocks(x)[N].cast<cplx>();
    const auto& em = sd.energies[N];
    const auto& en = sd.energies[N + 1];
    for (Eigen::Index n = 0; n < en.size(); ++n)
      for (Eigen::Index m = 0; m < em.size(); ++m) {
        if (c0[N](m, n) == 0.0) continue;
        const double w = std::exp(-beta * (em(m) - e0) - lz) + std::exp(-beta * (en(n) - e0) - lz);
        s += w * ck(m, n) * c0[N](m, n) / cplx(em(m) - en(n), -kk.k0);
      }
  }
  return s;
}

double density_matrix(int x, const SpectralData& sd) {
  const int L = sd.L;
  x = ((x % L) + L) % L;
  const auto idx = index_map(L, sd.states);
  double s = 0.0;
  for (int N = 1; N <= L; ++N) {
    const auto& st = sd.states[N];
    const auto d = static_cast<Eigen::Index>(st.size());
    // Sparse a+_0 a-_x applied to every eigenvector of the sector.
    Eigen::MatrixXd op = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index c = 0; c < d; ++c) {
      std::uint32_t t = st[c];
      int sign = 1;
      if (annihilate(t, x, sign) && create(t, 0, sign)) op(idx[t], c) = sign;
    }
    const Eigen::MatrixXd& V = sd.vectors[N];
    const Eigen::VectorXd diag = (V.transpose() * op * V).diagonal();
    for (Eigen::Index i = 0; i < d; ++i)
      s += std::exp(-sd.beta * (sd.energies[N](i) - sd.ground_energy) - sd.log_reduced_partition) * diag(i);
  }
  return s;
}

double occupation(double k, const SpectralData& sd) {
  double s = 0.0;
  for (int d = 0; d < sd.L; ++d) s += std::cos(k * d) * density_matrix(d, sd);
  return s;
}

std::vector<PhaseRow> phase_diagnostics(int L, double beta, const std::vector<double>& rs,
                                        const std::vector<double>& lambdas, const Potential& v) {
  if (L > kMaxFullSpectrum) throw EdLimitError("phase diagnostics are limited to L <= 12");
  std::vector<PhaseRow> rows;
  for (double lam : lambdas)
    for (double r : rs) {
      const auto sd = diagonalize(build_hamiltonian(L, lam, r, v), beta);
      PhaseRow row;
      row.r = r;
      row.lambda = lam;
      std::vector<double> e0(L + 1);
      for (int N = 0; N <= L; ++N) e0[N] = sd.energies[N](0);
      int nstar = 0, ties = 0;
      double nsum = 0.0;
      for (int N = 0; N <= L; ++N)
        if (e0[N] - sd.ground_energy < 1e-9) {
          if (ties++ == 0) nstar = N;
          nsum += N;
        }
      row.ground_density = nsum / ties / L;
      double gap = std::numeric_limits<double>::infinity();
      if (nstar + 1 <= L) gap = std::min(gap, e0[nstar + 1] - e0[nstar]);
      if (nstar - 1 >= 0) gap = std::min(gap, e0[nstar - 1] - e0[nstar]);
      row.charge_gap = gap;
      double nbar = 0.0;
      for (int N = 0; N <= L; ++N)
        for (Eigen::Index i = 0; i < sd.energies[N].size(); ++i)
          nbar += N * std::exp(-beta * (sd.energies[N](i) - sd.ground_energy) - sd.log_reduced_partition);
      row.thermal_density = nbar / L;
      for (double k : momentum_grid(L)) row.occupation.push_back(occupation(k, sd));
      rows.push_back(std::move(row));
    }
  return rows;
}

void save_spectral(const SpectralData& sd, const std::string& path) {
  nlohmann::ordered_json hdr;
  hdr["schema"] = "chainrg.ed_spectrum/1";
  hdr["L"] = sd.L;
  hdr["beta"] = sd.beta;
  hdr["lambda"] = sd.lambda;
  hdr["r"] = sd.r;
  std::vector<long long> dims;
  for (const auto& e : sd.energies) dims.push_back(e.size());
  hdr["sector_dimensions"] = dims;
  hdr["layout"] = "per sector N = 0..L: energies, then eigenvectors column-major; float64 little-endian";
  const std::string text = hdr.dump();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  std::uint64_t len = text.size();
  unsigned char lb[8];
  for (int i = 0; i < 8; ++i) lb[i] = static_cast<unsigned char>(len >> (8 * i));
  f.write(reinterpret_cast<const char*>(lb), 8);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (std::size_t N = 0; N < sd.energies.size(); ++N) {
    write_le(f, sd.energies[N].data(), static_cast<std::size_t>(sd.energies[N].size()));
    write_le(f, sd.vectors[N].data(), static_cast<std::size_t>(sd.vectors[N].size()));
  }
  if (!f) throw std::runtime_error("write failed for " + path);
}

SpectralData load_spectral(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  unsigned char lb[8];
  f.read(reinterpret_cast<char*>(lb), 8);
  std::uint64_t len = 0;
  for (int i = 0; i < 8; ++i) len |= std::uint64_t(lb[i]) << (8 * i);
  if (!f || len > (1u << 20)) throw std::runtime_error("bad spectral cache header in " + path);
  std::string text(len, '\0');
  f.read(text.data(), static_cast<std::streamsize>(len));
  const auto hdr = nlohmann::json::parse(text);
  if (hdr.at("schema") != "chainrg.ed_spectrum/1") throw std::runtime_error("unknown spectral cache schema");
  SpectralData sd;
  sd.L = hdr.at("L");
  sd.beta = hdr.at("beta");
  sd.lambda = hdr.at("lambda");
  sd.r = hdr.at("r");
  const auto states = sector_states(sd.L);
  const auto dims = hdr.at("sector_dimensions").get<std::vector<long long>>();
  if (dims.size() != states.size()) throw std::runtime_error("sector count mismatch in " + path);
  sd.ground_energy = std::numeric_limits<double>::infinity();
  for (std::size_t N = 0; N < dims.size(); ++N) {
    if (dims[N] != static_cast<long long>(states[N].size())) throw std::runtime_error("sector size mismatch");
    Eigen::VectorXd e(dims[N]);
    Eigen::MatrixXd V(dims[N], dims[N]);
    read_le(f, e.data(), static_cast<std::size_t>(e.size()));
    read_le(f, V.data(), static_cast<std::size_t>(V.size()));
    sd.ground_energy = std::min(sd.ground_energy, e(0));
    sd.energies.push_back(std::move(e));
    sd.vectors.push_back(std::move(V));
  }
  if (!f) throw std::runtime_error("truncated spectral cache " + path);
  sd.states = states;
  double z = 0.0;
  for (const auto& e : sd.energies)
    for (Eigen::Index i = 0; i < e.size(); ++i) z += std::exp(-sd.beta * (e(i) - sd.ground_energy));
  sd.log_reduced_partition = std::log(z);
  return sd;
}

}  // namespace chainrg
