#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "chainrg/scale.hpp"

namespace chainrg {

// One Grassmann field psi^{sign}_{(x0, x)} belonging to a cluster.
struct Field {
  double x0 = 0.0;
  int x = 0;
  int sign = -1;  // -1 for psi^-, +1 for psi^+
  int cluster = 0;
};

// Covariance <psi^-_x psi^+_y> = g(x - y) as a function of (x0 - y0, x - y).
using Covariance = std::function<double(double, int)>;

// Expectation of the ordered product of fields. The fields are first brought
// to the order psi^-_1 psi^+_1 psi^-_2 psi^+_2 ... (minus fields and plus
// fields each keeping their relative order), collecting the permutation sign;
// the result is that sign times det[g(x_i - y_j)]. Unbalanced input gives 0.
double wick_moment(const std::vector<Field>& fields, const Covariance& g);

// Same quantity as an explicit signed sum over all pairings (test oracle).
double wick_moment_permutations(const std::vector<Field>& fields, const Covariance& g);

// Clusters are read from Field::cluster (0-based, consecutive); each cluster
// must hold an even number of fields.
double truncated_expectation_cumulant(const std::vector<Field>& fields, const Covariance& g);
double connected_contractions(const std::vector<Field>& fields, const Covariance& g);

struct TruncationSweep {
  long configurations = 0;
  double max_difference = 0.0;
  double max_magnitude = 0.0;
};

// Every cluster-size composition (even sizes, total <= max_fields, at most
// max_clusters clusters) and every +/- pattern, with random points.
TruncationSweep exhaustive_truncation_check(int max_clusters, int max_fields, const Covariance& g,
                                            std::uint64_t seed);

// Gram factors of a regime-1 single-scale propagator on a fixed torus:
// g(x - y) = <A_x, B_y> with A_x(k) = e^{-ik.x} sqrt(f) sqrt|D| / conj(D) and
// B_y(k) = e^{-ik.y} sqrt(f) / sqrt|D|, inner product (1/(beta L)) sum conj(A) B.
class GramFactors {
 public:
  GramFactors(int h, const ScaleContext& ctx, double size_factor = 32.0);

  Eigen::VectorXcd a(double x0, int x) const;
  Eigen::VectorXcd b(double y0, int y) const;
  // Torus sum for g at a separation, computed without the factorization.
  double propagator(double x0, int x) const;
  // |A_x| = |B_y| = sqrt((1/(beta L)) sum f/|D|) for every point.
  double norm() const { return norm_; }
  int h() const { return h_; }
  double time_scale() const { return time_scale_; }
  double length_scale() const { return length_scale_; }

 private:
  int h_;
  double norm_ = 0.0;
  double time_scale_ = 1.0;
  double length_scale_ = 1.0;
  std::vector<double> k0_, k_;
  std::vector<cplx> ghat_, wa_, wb_;
  double inv_volume_ = 1.0;
};

struct GramReport {
  int instances = 0;
  int violations = 0;
  double max_det_over_bound = 0.0;
  double max_inner_product_error = 0.0;  // relative to the norm product
  double norm_product = 0.0;             // |A| |B|
};

// Random instances: up to max_pairs psi^- / psi^+ pairs spread over up to
// three clusters with random unit vectors u_c, matrix
// G_ij = (u_{c_i} . u_{c_j}) g(x_i - y_j), checked against prod |A||B|.
GramReport gram_check(const GramFactors& gf, int instances, std::uint64_t seed, int max_pairs = 4);

}  // namespace chainrg
