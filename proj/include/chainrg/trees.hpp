#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace chainrg {

using Rational = boost::rational<long long>;

enum class EndpointClass {
  Local,   // regime 1: a monomial of the initial potential
  R,       // regime 2: renormalized remainder handed over at the crossover
  Lambda,  // regime 2: running quartic coupling
  NuDelta  // regime 2: running quadratic couplings
};

enum class TreeRegime { One, Two };

// Vertex of a scale-labelled tree. Every edge raises the scale by exactly one,
// so trivial vertices (one child) are explicit. Endpoints carry |I_v| fields;
// p is the half-size |P_v|/2 of the external field set (for endpoints
// P_v = I_v). External sets are balanced in +/- so the half-size determines
// both sign counts.
struct TreeNode {
  int scale = 0;
  int parent = -1;  // -1 for v0, whose parent is the root
  std::vector<int> children;
  bool endpoint = false;
  int fields = 0;
  EndpointClass cls = EndpointClass::Local;
  int p = 0;
};

struct GNTree {
  int root_scale = 0;
  std::vector<TreeNode> nodes;  // nodes[0] is v0, on scale root_scale + 1

  int endpoint_count() const;
  int parent_scale(int v) const { return nodes[v].parent < 0 ? root_scale : nodes[nodes[v].parent].scale; }
  // Number of endpoints following v and |I_v|.
  int endpoints_below(int v) const;
  int fields_below(int v) const;
  int external_size() const { return 2 * nodes[0].p; }
  std::vector<int> non_endpoints() const;
  std::vector<int> endpoints() const;
};

class TreeLimitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// All ordered tree shapes with n endpoints, root on h_root, non-endpoint
// vertices on scales <= top_vertex_scale (endpoints one scale above their
// parent). Fields and external sets are left empty. Refuses n > 5 or more
// than 9 scale levels.
std::vector<GNTree> enumerate_trees(int h_root, int n, int top_vertex_scale = 0);

// Independent count of the same set by a recursion on (scale, endpoints).
long long count_trees(int h_root, int n, int top_vertex_scale = 0);

// Distinct planar shapes left after contracting trivial vertices.
long long count_topologies(const std::vector<GNTree>& trees);

// Every labelling of the endpoints. Regime 1: class Local with a size from
// sizes. Regime 2: Lambda (4 fields), NuDelta (2 fields), and R with a size
// from sizes when the endpoint hangs from the vertex on hstar.
std::vector<GNTree> label_endpoints(const GNTree& shape, const std::vector<int>& sizes,
                                    TreeRegime regime = TreeRegime::One, int hstar = 0);

// External-set assignments: a vertex with s children whose children carry
// half-sizes summing to A may keep 1 <= p <= A - (s - 1) (at least one line
// per anchored-tree edge, |P_v| >= 2).
void for_each_assignment(const GNTree& labelled, const std::function<void(const GNTree&)>& visit);
GNTree sample_assignment(const GNTree& labelled, std::mt19937_64& rng);

// Structural validation; returns the violated invariant or an empty string.
std::string validate_tree(const GNTree& t);

struct IdentityReport {
  bool ok = true;
  std::vector<std::string> failures;
};

// Telescoping identities over non-endpoint vertices and the scale-exponent
// identities, all in exact integer/rational arithmetic; also the equality of
// the raw regime-1 bound exponent with its collected form.
IdentityReport check_identities(const GNTree& t);

// Renormalized scaling dimension: regime 1 |P|/4 - 3/2 + z1, regime 2
// |P|/2 - 2 + z2; z_applied = false drops the z gain.
Rational vertex_dimension(TreeRegime regime, int p_size, bool z_applied = true);

struct BoundReport {
  Rational gamma_exponent_raw;
  Rational gamma_exponent_collected;
  Rational vf_exponent_raw;        // regime 2 only
  Rational vf_exponent_collected;  // l/2 - 1 in regime 2
  Rational crossover_power;         // regime 2: power of gamma^{h*}/vF^2 left over
  Rational min_dimension;
  double raw_value = 0.0;
  double collected_value = 0.0;
};

// Full scale-factor product (exponents of gamma and vF) of a tree bound in both the vertex-by-vertex
// form and the collected form. Regime 2 needs the crossover scale hstar (the
// R endpoints hang from it) and vF.
BoundReport bound_product(const GNTree& t, TreeRegime regime, double gamma, int hstar = 0, double vF = 1.0);

// Exponent margin of the short-memory estimate with 0 < eta < 1: a gain
// gamma^{hbar/2} on the highest non-endpoint scale hbar turns into
// gamma^{h(1-eta)/2} at the root. Returns RHS - LHS exponent (>= 0 holds).
Rational short_memory_margin(const GNTree& t, Rational eta);

// (gamma^{h*}/vF^2)^{(l-2)/4}: regime-1 over regime-2 L1 bound at h*.
double crossover_consistency(int l, double r, double gamma);

nlohmann::ordered_json tree_to_json(const GNTree& t);

}  // namespace chainrg
