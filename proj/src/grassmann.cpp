#include "chainrg/grassmann.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace chainrg {

namespace {

struct Split {
  std::vector<const Field*> minus, plus;
  double sign = 1.0;
};

// Sign of moving the fields into the order m1 p1 m2 p2 ...
Split split_fields(const std::vector<Field>& fields) {
  Split s;
  for (const auto& f : fields) (f.sign < 0 ? s.minus : s.plus).push_back(&f);
  if (s.minus.size() != s.plus.size()) return s;
  std::vector<int> target(fields.size());
  int im = 0, ip = 0;
  for (std::size_t j = 0; j < fields.size(); ++j) target[j] = fields[j].sign < 0 ? 2 * im++ : 2 * ip++ + 1;
  int inversions = 0;
  for (std::size_t i = 0; i < target.size(); ++i)
    for (std::size_t j = i + 1; j < target.size(); ++j) inversions += target[i] > target[j];
  s.sign = (inversions % 2) ? -1.0 : 1.0;
  return s;
}

double cov(const Field& m, const Field& p, const Covariance& g) { return g(m.x0 - p.x0, m.x - p.x); }

int permutation_parity(const std::vector<int>& p) {
  int inv = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) inv += p[i] > p[j];
  return inv % 2;
}

int cluster_count(const std::vector<Field>& fields) {
  int n = 0;
  for (const auto& f : fields) n = std::max(n, f.cluster + 1);
  return n;
}

void validate_clusters(const std::vector<Field>& fields) {
  const int n = cluster_count(fields);
  if (n > 4 || fields.size() > 10) throw std::invalid_argument("truncated expectation limited to 4 clusters and 10 fields");
  std::vector<int> deg(n, 0);
  for (const auto& f : fields) {
    if (f.cluster < 0) throw std::invalid_argument("negative cluster index");
    ++deg[f.cluster];
  }
  for (int d : deg)
    if (d == 0 || d % 2) throw std::invalid_argument("clusters must be nonempty with an even number of fields");
}

// All set partitions of {0..n-1} as block labels.
void set_partitions(int n, std::vector<int>& labels, int next, int blocks,
                    const std::function<void(const std::vector<int>&, int)>& visit) {
  if (next == n) {
    visit(labels, blocks);
    return;
  }
  for (int b = 0; b <= blocks; ++b) {
    labels[next] = b;
    set_partitions(n, labels, next + 1, std::max(blocks, b + 1), visit);
  }
}

}  // namespace

double wick_moment(const std::vector<Field>& fields, const Covariance& g) {
  const Split s = split_fields(fields);
  if (s.minus.size() != s.plus.size()) return 0.0;
  const int n = static_cast<int>(s.minus.size());
  if (n == 0) return 1.0;
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cov(*s.minus[i], *s.plus[j], g);
  return s.sign * m.determinant();
}

double wick_moment_permutations(const std::vector<Field>& fields, const Covariance& g) {
  const Split s = split_fields(fields);
  if (s.minus.size() != s.plus.size()) return 0.0;
  const int n = static_cast<int>(s.minus.size());
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  double total = 0.0;
  do {
    double term = permutation_parity(p) ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i) term *= cov(*s.minus[i], *s.plus[p[i]], g);
    total += term;
  } while (std::next_permutation(p.begin(), p.end()));
  return s.sign * total;
}

double truncated_expectation_cumulant(const std::vector<Field>& fields, const Covariance& g) {
  validate_clusters(fields);
  const int n = cluster_count(fields);
  std::vector<int> labels(n, 0);
  double total = 0.0;
  set_partitions(n, labels, 0, 0, [&](const std::vector<int>& lab, int blocks) {
    double coef = (blocks % 2 == 1) ? 1.0 : -1.0;  // (-1)^{blocks-1}
    for (int j = 2; j < blocks; ++j) coef *= j;     // (blocks-1)!
    double prod = 1.0;
    for (int b = 0; b < blocks && prod != 0.0; ++b) {
      std::vector<Field> sub;
      for (const auto& f : fields)
        if (lab[f.cluster] == b) sub.push_back(f);
      prod *= wick_moment(sub, g);
    }
    total += coef * prod;
  });
  return total;
}

double connected_contractions(const std::vector<Field>& fields, const Covariance& g) {
  validate_clusters(fields);
  const Split s = split_fields(fields);
  if (s.minus.size() != s.plus.size()) return 0.0;
  const int n = static_cast<int>(s.minus.size());
  const int nc = cluster_count(fields);
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  double total = 0.0;
  do {
    // Union-find over clusters joined by the lines of this pairing.
    std::vector<int> parent(nc);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
      while (parent[a] != a) a = parent[a] = parent[parent[a]];
      return a;
    };
    int components = nc;
    for (int i = 0; i < n; ++i) {
      const int a = find(s.minus[i]->cluster), b = find(s.plus[p[i]]->cluster);
      if (a != b) {
        parent[a] = b;
        --components;
      }
    }
    if (components != 1) continue;
    double term = permutation_parity(p) ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i) term *= cov(*s.minus[i], *s.plus[p[i]], g);
    total += term;
  } while (std::next_permutation(p.begin(), p.end()));
  return s.sign * total;
}

TruncationSweep exhaustive_truncation_check(int max_clusters, int max_fields, const Covariance& g,
                                            std::uint64_t seed) {
  TruncationSweep out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> t(-2.0, 2.0);
  std::uniform_int_distribution<int> x(-3, 3);
  std::vector<int> sizes;
  std::function<void(int)> compose = [&](int remaining) {
    if (!sizes.empty()) {
      const int total = std::accumulate(sizes.begin(), sizes.end(), 0);
      for (long pattern = 0; pattern < (1L << total); ++pattern) {
        std::vector<Field> fields;
        int bit = 0;
        for (std::size_t c = 0; c < sizes.size(); ++c)
          for (int j = 0; j < sizes[c]; ++j, ++bit)
            fields.push_back({t(rng), x(rng), (pattern >> bit) & 1 ? 1 : -1, static_cast<int>(c)});
        const double a = truncated_expectation_cumulant(fields, g);
        const double b = connected_contractions(fields, g);
        out.max_difference = std::max(out.max_difference, std::fabs(a - b));
        out.max_magnitude = std::max(out.max_magnitude, std::fabs(a));
        ++out.configurations;
      }
    }
    if (static_cast<int>(sizes.size()) == max_clusters) return;
    for (int s = 2; s <= remaining; s += 2) {
      sizes.push_back(s);
      compose(remaining - s);
      sizes.pop_back();
    }
  };
  compose(max_fields);
  return out;
}

GramFactors::GramFactors(int h, const ScaleContext& ctx, double size_factor) : h_(h) {
  const TorusSize ts = torus_for_r1(h, ctx, size_factor);
  const auto mom = sample_momentum(
      ts.beta, ts.n0, ts.n1, [&](Momentum kk) { return single_scale_momentum(h, kk, ctx); },
      [&](double k) { return chi_leq(h, {0.0, k}, ctx) > 0.0; });
  inv_volume_ = 1.0 / (ts.beta * ts.n1);
  double sum = 0.0;
  for (std::size_t c = 0; c < mom.cols.size(); ++c)
    for (int n = 0; n < mom.n0; ++n) {
      const Momentum kk{mom.k0(n), mom.k(mom.cols[c])};
      const double f = chi_leq(h, kk, ctx) - chi_leq(h - 1, kk, ctx);
      if (f == 0.0) continue;
      const cplx d = inverse_propagator_r1(h - 1, kk, ctx);
      const double ad = std::abs(d);
      k0_.push_back(kk.k0);
      k_.push_back(kk.k);
      ghat_.push_back(f / d);
      wa_.push_back(std::sqrt(f) * std::sqrt(ad) / std::conj(d));
      wb_.push_back(std::sqrt(f) / std::sqrt(ad));
      sum += f / ad;
    }
  norm_ = std::sqrt(sum * inv_volume_);
  const double gh = std::pow(ctx.gamma, h);
  time_scale_ = 1.0 / (gh * ctx.a0());
  length_scale_ = 1.0 / std::sqrt(gh * ctx.a0());
}

Eigen::VectorXcd GramFactors::a(double x0, int x) const {
  Eigen::VectorXcd v(k0_.size());
  const double s = std::sqrt(inv_volume_);
  for (std::size_t j = 0; j < k0_.size(); ++j) v[j] = s * std::polar(1.0, -(k0_[j] * x0 + k_[j] * x)) * wa_[j];
  return v;
}

Eigen::VectorXcd GramFactors::b(double y0, int y) const {
  Eigen::VectorXcd v(k0_.size());
  const double s = std::sqrt(inv_volume_);
  for (std::size_t j = 0; j < k0_.size(); ++j) v[j] = s * std::polar(1.0, -(k0_[j] * y0 + k_[j] * y)) * wb_[j];
  return v;
}

double GramFactors::propagator(double x0, int x) const {
  cplx s = 0.0;
  for (std::size_t j = 0; j < k0_.size(); ++j) s += std::polar(1.0, k0_[j] * x0 + k_[j] * x) * ghat_[j];
  return (s * inv_volume_).real();
}

GramReport gram_check(const GramFactors& gf, int instances, std::uint64_t seed, int max_pairs) {
  GramReport rep;
  rep.norm_product = gf.norm() * gf.norm();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> npairs(1, max_pairs), nclus(1, 3);
  std::uniform_real_distribution<double> t(-3.0 * gf.time_scale(), 3.0 * gf.time_scale());
  std::uniform_real_distribution<double> x(-3.0 * gf.length_scale(), 3.0 * gf.length_scale());
  std::normal_distribution<double> gauss;
  for (int it = 0; it < instances; ++it) {
    const int n = npairs(rng), s = nclus(rng);
    std::uniform_int_distribution<int> pick(0, s - 1);
    std::vector<Eigen::VectorXd> u(s);
    for (auto& v : u) {
      v = Eigen::VectorXd(s);
      for (int j = 0; j < s; ++j) v[j] = gauss(rng);
      v.normalize();
    }
    struct Pt {
      double t;
      int x;
      int c;
    };
    std::vector<Pt> xs(n), ys(n);
    for (auto& p : xs) p = {t(rng), static_cast<int>(std::lround(x(rng))), pick(rng)};
    for (auto& p : ys) p = {t(rng), static_cast<int>(std::lround(x(rng))), pick(rng)};
    std::vector<Eigen::VectorXcd> A, B;
    for (const auto& p : xs) A.push_back(gf.a(p.t, p.x));
    for (const auto& p : ys) B.push_back(gf.b(p.t, p.x));
    Eigen::MatrixXd G(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const cplx ip = A[i].dot(B[j]);
        const double direct = gf.propagator(xs[i].t - ys[j].t, xs[i].x - ys[j].x);
        rep.max_inner_product_error =
            std::max(rep.max_inner_product_error, std::abs(ip - direct) / rep.norm_product);
        G(i, j) = u[xs[i].c].dot(u[ys[j].c]) * ip.real();
      }
    const double bound = std::pow(rep.norm_product, n);
    const double ratio = std::fabs(G.determinant()) / bound;
    rep.max_det_over_bound = std::max(rep.max_det_over_bound, ratio);
    if (ratio > 1.0 + 1e-12) ++rep.violations;
    ++rep.instances;
  }
  return rep;
}

}  // namespace chainrg
