#include "chainrg/trees.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "chainrg/model.hpp"
#include "chainrg/scale.hpp"

namespace chainrg {

namespace {

constexpr int kMaxEndpoints = 5;
constexpr int kMaxDepth = 8;

void check_limits(int h_root, int n, int top) {
  if (n < 1) throw std::invalid_argument("a tree needs at least one endpoint");
  if (n > kMaxEndpoints) throw TreeLimitError("at most 5 endpoints are enumerated");
  if (top - h_root > kMaxDepth || top - h_root < 1)
    throw TreeLimitError("scale depth must lie in [1, 8]");
}

// Nested shape used during enumeration, flattened in pre-order afterwards.
struct Shape {
  bool endpoint = false;
  std::vector<Shape> kids;
};

std::vector<Shape> subtrees(int scale, int n, int top);

// Ordered child sequences of a vertex on scale, carrying n endpoints.
std::vector<std::vector<Shape>> sequences(int scale, int n, int top) {
  if (n == 0) return {{}};
  std::vector<std::vector<Shape>> out;
  for (int m = 1; m <= n; ++m) {
    std::vector<Shape> heads;
    if (m == 1) heads.push_back(Shape{true, {}});
    if (scale + 1 <= top)
      for (auto& s : subtrees(scale + 1, m, top)) heads.push_back(std::move(s));
    if (heads.empty()) continue;
    const auto tails = sequences(scale, n - m, top);
    for (const auto& hd : heads)
      for (const auto& tl : tails) {
        std::vector<Shape> seq{hd};
        seq.insert(seq.end(), tl.begin(), tl.end());
        out.push_back(std::move(seq));
      }
  }
  return out;
}

std::vector<Shape> subtrees(int scale, int n, int top) {
  std::vector<Shape> out;
  for (auto& seq : sequences(scale, n, top)) out.push_back(Shape{false, std::move(seq)});
  return out;
}

int flatten(const Shape& s, int scale, int parent, GNTree& t) {
  const int id = static_cast<int>(t.nodes.size());
  TreeNode node;
  node.scale = scale;
  node.parent = parent;
  node.endpoint = s.endpoint;
  t.nodes.push_back(node);
  for (const auto& k : s.kids) {
    const int c = flatten(k, scale + 1, id, t);
    t.nodes[id].children.push_back(c);
  }
  return id;
}

Rational z1(int p_size) {
  switch (p_size) {
    case 2: return Rational(3, 2);
    case 4: return Rational(1);
    case 6: return Rational(2);
    default: return Rational(0);
  }
}

Rational z2(int p_size) {
  switch (p_size) {
    case 2: return Rational(2);
    case 4: return Rational(1);
    default: return Rational(0);
  }
}

int children_p(const GNTree& t, int v) {
  int a = 0;
  for (int c : t.nodes[v].children) a += t.nodes[c].p;
  return a;
}

// Upper bound on the half-size kept at a non-endpoint vertex.
int max_kept(const GNTree& t, int v) {
  return children_p(t, v) - (static_cast<int>(t.nodes[v].children.size()) - 1);
}

void assign_from(GNTree& t, const std::vector<int>& order, std::size_t k,
                 const std::function<void(const GNTree&)>& visit) {
  if (k == order.size()) {
    visit(t);
    return;
  }
  const int v = order[k];
  const int hi = max_kept(t, v);
  for (int p = 1; p <= hi; ++p) {
    t.nodes[v].p = p;
    assign_from(t, order, k + 1, visit);
  }
  t.nodes[v].p = 0;
}

std::string topology_key(const GNTree& t, int v) {
  // Skip trivial chains.
  while (!t.nodes[v].endpoint && t.nodes[v].children.size() == 1) v = t.nodes[v].children[0];
  if (t.nodes[v].endpoint) return "e";
  std::string s = "(";
  for (int c : t.nodes[v].children) s += topology_key(t, c);
  return s + ")";
}

std::string to_string(const Rational& q) {
  return std::to_string(q.numerator()) + (q.denominator() == 1 ? "" : "/" + std::to_string(q.denominator()));
}

}  // namespace

int GNTree::endpoint_count() const {
  int n = 0;
  for (const auto& v : nodes) n += v.endpoint;
  return n;
}

int GNTree::endpoints_below(int v) const {
  if (nodes[v].endpoint) return 1;
  int n = 0;
  for (int c : nodes[v].children) n += endpoints_below(c);
  return n;
}

int GNTree::fields_below(int v) const {
  if (nodes[v].endpoint) return nodes[v].fields;
  int n = 0;
  for (int c : nodes[v].children) n += fields_below(c);
  return n;
}

std::vector<int> GNTree::non_endpoints() const {
  std::vector<int> out;
  for (int v = 0; v < static_cast<int>(nodes.size()); ++v)
    if (!nodes[v].endpoint) out.push_back(v);
  return out;
}

std::vector<int> GNTree::endpoints() const {
  std::vector<int> out;
  for (int v = 0; v < static_cast<int>(nodes.size()); ++v)
    if (nodes[v].endpoint) out.push_back(v);
  return out;
}

std::vector<GNTree> enumerate_trees(int h_root, int n, int top_vertex_scale) {
  check_limits(h_root, n, top_vertex_scale);
  std::vector<GNTree> out;
  if (n == 1) {
    GNTree t;
    t.root_scale = h_root;
    flatten(Shape{true, {}}, h_root + 1, -1, t);
    out.push_back(std::move(t));
  }
  for (const auto& s : subtrees(h_root + 1, n, top_vertex_scale)) {
    GNTree t;
    t.root_scale = h_root;
    flatten(s, h_root + 1, -1, t);
    out.push_back(std::move(t));
  }
  return out;
}

long long count_trees(int h_root, int n, int top_vertex_scale) {
  check_limits(h_root, n, top_vertex_scale);
  const int depth = top_vertex_scale - h_root;
  // vert[d][m]: vertices d levels below the top carrying m endpoints;
  // seq[d][m]: possibly empty child sequences of such a vertex.
  std::vector<std::vector<long long>> vert(depth + 1, std::vector<long long>(n + 1, 0));
  auto seq = vert;
  for (int d = 0; d <= depth; ++d) {
    seq[d][0] = 1;
    for (int m = 1; m <= n; ++m) {
      long long s = 0;
      for (int first = 1; first <= m; ++first) {
        long long e = first == 1 ? 1 : 0;
        if (d > 0) e += vert[d - 1][first];
        s += e * seq[d][m - first];
      }
      seq[d][m] = s;
      vert[d][m] = s;
    }
  }
  return vert[depth - 1][n] + (n == 1 ? 1 : 0);
}

long long count_topologies(const std::vector<GNTree>& trees) {
  std::set<std::string> keys;
  for (const auto& t : trees) keys.insert(topology_key(t, 0));
  return static_cast<long long>(keys.size());
}

std::vector<GNTree> label_endpoints(const GNTree& shape, const std::vector<int>& sizes, TreeRegime regime,
                                    int hstar) {
  for (int s : sizes)
    if (s < 2 || s % 2) throw std::invalid_argument("endpoint field counts must be even and >= 2");
  const auto eps = shape.endpoints();
  std::vector<GNTree> out{shape};
  for (int e : eps) {
    std::vector<std::pair<EndpointClass, int>> opts;
    if (regime == TreeRegime::One) {
      for (int s : sizes) opts.emplace_back(EndpointClass::Local, s);
    } else {
      opts.emplace_back(EndpointClass::Lambda, 4);
      opts.emplace_back(EndpointClass::NuDelta, 2);
      if (shape.parent_scale(e) == hstar)
        for (int s : sizes) opts.emplace_back(EndpointClass::R, s);
    }
    std::vector<GNTree> next;
    for (const auto& t : out)
      for (const auto& [cls, s] : opts) {
        GNTree u = t;
        u.nodes[e].cls = cls;
        u.nodes[e].fields = s;
        u.nodes[e].p = s / 2;
        next.push_back(std::move(u));
      }
    out = std::move(next);
  }
  return out;
}

void for_each_assignment(const GNTree& labelled, const std::function<void(const GNTree&)>& visit) {
  GNTree t = labelled;
  auto order = t.non_endpoints();
  std::reverse(order.begin(), order.end());  // children before parents
  assign_from(t, order, 0, visit);
}

GNTree sample_assignment(const GNTree& labelled, std::mt19937_64& rng) {
  GNTree t = labelled;
  auto order = t.non_endpoints();
  std::reverse(order.begin(), order.end());
  for (int v : order) {
    // Draw the contracted half-size on each child, reject unless at least
    // s_v - 1 lines and one kept pair survive.
    const int a = children_p(t, v);
    const int s = static_cast<int>(t.nodes[v].children.size());
    std::uniform_int_distribution<int> draw(0, a);
    for (;;) {
      const int contracted = draw(rng);
      if (contracted >= s - 1 && a - contracted >= 1) {
        t.nodes[v].p = a - contracted;
        break;
      }
    }
  }
  return t;
}

std::string validate_tree(const GNTree& t) {
  if (t.nodes.empty()) return "tree has no vertices";
  if (t.nodes[0].parent != -1) return "first vertex must hang from the root";
  if (t.nodes[0].scale != t.root_scale + 1) return "first vertex must sit one scale above the root";
  for (int v = 0; v < static_cast<int>(t.nodes.size()); ++v) {
    const auto& nd = t.nodes[v];
    const std::string at = " at vertex " + std::to_string(v);
    if (v > 0) {
      if (nd.parent < 0 || nd.parent >= static_cast<int>(t.nodes.size())) return "dangling parent" + at;
      const auto& sib = t.nodes[nd.parent].children;
      if (std::find(sib.begin(), sib.end(), v) == sib.end()) return "parent does not list child" + at;
      if (nd.scale != t.nodes[nd.parent].scale + 1) return "scale labels must increase by one leafward" + at;
    }
    if (nd.endpoint) {
      if (!nd.children.empty()) return "endpoint with children" + at;
      if (nd.fields < 2 || nd.fields % 2) return "endpoint field count must be even and >= 2" + at;
      if (2 * nd.p != nd.fields) return "endpoint must have P_v = I_v" + at;
    } else {
      if (nd.children.empty()) return "non-endpoint vertex without children" + at;
      if (nd.p < 1) return "|P_v| must be at least 2" + at;
      if (nd.p > children_p(t, v)) return "P_v must lie inside the union of the children's P" + at;
      if (nd.p > max_kept(t, v)) return "too few contracted lines to connect the children" + at;
    }
  }
  return {};
}

IdentityReport check_identities(const GNTree& t) {
  IdentityReport rep;
  if (auto err = validate_tree(t); !err.empty()) throw std::invalid_argument("malformed tree: " + err);
  auto expect = [&rep](const char* name, const Rational& lhs, const Rational& rhs) {
    if (lhs != rhs) {
      rep.ok = false;
      rep.failures.push_back(std::string(name) + ": " + to_string(lhs) + " != " + to_string(rhs));
    }
  };
  const long long h = t.root_scale;
  const long long n = t.endpoint_count();
  const long long l = t.external_size();
  const long long iv0 = t.fields_below(0);
  long long sum_p = 0, sum_s = 0, sum_hp = 0, sum_hs = 0, rhs_hp = 0, rhs_hs = 0, sum_hn = 0, sum_hi = 0;
  Rational raw, collected = Rational(h) * (Rational(3, 2) - Rational(l, 4));
  for (int v : t.non_endpoints()) {
    const auto& nd = t.nodes[v];
    const long long pv = 2 * nd.p, sv = static_cast<long long>(nd.children.size());
    const long long kids = 2 * children_p(t, v);
    const long long hv = nd.scale, dh = hv - t.parent_scale(v);
    const long long iv = t.fields_below(v), nv = t.endpoints_below(v);
    sum_p += kids - pv;
    sum_s += sv - 1;
    sum_hp += (hv - h) * (kids - pv);
    sum_hs += (hv - h) * (sv - 1);
    rhs_hp += dh * (iv - pv);
    rhs_hs += dh * (nv - 1);
    sum_hn += dh * nv;
    sum_hi += dh * iv;
    raw += Rational(hv) * (Rational(kids, 4) - Rational(pv, 4) - Rational(3, 2) * Rational(sv - 1));
    raw -= Rational(dh) * z1(static_cast<int>(pv));
    collected -= Rational(dh) * vertex_dimension(TreeRegime::One, static_cast<int>(pv));
  }
  long long ep_h = 0, ep_hi = 0;
  for (int e : t.endpoints()) {
    const long long hp = t.parent_scale(e);
    const int sz = t.nodes[e].fields;
    ep_h += hp;
    ep_hi += hp * sz;
    if (sz == 2) {
      raw += Rational(3 * hp, 2);
      collected += Rational(hp, 2);
    } else if (sz <= 6) {
      raw += Rational(hp * (sz - 2), 2);
      collected += Rational(hp * (3 * sz - 10), 4);
    } else {
      collected += Rational(hp) * (Rational(sz, 4) - Rational(3, 2));
    }
  }
  expect("sum (sum_i |P_vi| - |P_v|) = |I_v0| - |P_v0|", Rational(sum_p), Rational(iv0 - l));
  expect("sum (s_v - 1) = n - 1", Rational(sum_s), Rational(n - 1));
  expect("sum (h_v - h)(sum_i |P_vi| - |P_v|) = sum (h_v - h_v')(|I_v| - |P_v|)", Rational(sum_hp),
         Rational(rhs_hp));
  expect("sum (h_v - h)(s_v - 1) = sum (h_v - h_v')(n(v) - 1)", Rational(sum_hs), Rational(rhs_hs));
  expect("h n + sum (h_v - h_v') n(v) = sum_ep h_v'", Rational(h * n + sum_hn), Rational(ep_h));
  expect("h |I_v0| + sum (h_v - h_v') |I_v| = sum_ep h_v' |I_v|", Rational(h * iv0 + sum_hi), Rational(ep_hi));
  expect("raw exponent = collected exponent", raw, collected);
  return rep;
}

Rational vertex_dimension(TreeRegime regime, int p_size, bool z_applied) {
  if (p_size < 2 || p_size % 2) throw std::invalid_argument("|P_v| must be even and >= 2");
  if (regime == TreeRegime::One)
    return Rational(p_size, 4) - Rational(3, 2) + (z_applied ? z1(p_size) : Rational(0));
  return Rational(p_size, 2) - Rational(2) + (z_applied ? z2(p_size) : Rational(0));
}

BoundReport bound_product(const GNTree& t, TreeRegime regime, double gamma, int hstar, double vF) {
  if (auto err = validate_tree(t); !err.empty()) throw std::invalid_argument("malformed tree: " + err);
  if (regime == TreeRegime::Two && !(vF > 0.0)) throw std::invalid_argument("regime 2 needs vF > 0");
  BoundReport rep;
  const long long h = t.root_scale;
  const long long l = t.external_size();
  rep.min_dimension = Rational(1000);
  Rational decay;
  for (int v : t.non_endpoints()) {
    const auto& nd = t.nodes[v];
    const long long pv = 2 * nd.p, sv = static_cast<long long>(nd.children.size());
    const long long kids = 2 * children_p(t, v);
    const long long hv = nd.scale, dh = hv - t.parent_scale(v);
    const Rational dim = vertex_dimension(regime, static_cast<int>(pv));
    rep.min_dimension = std::min(rep.min_dimension, dim);
    decay -= Rational(dh) * dim;
    if (regime == TreeRegime::One) {
      rep.gamma_exponent_raw += Rational(hv) * (Rational(kids - pv, 4) - Rational(3 * (sv - 1), 2));
      rep.gamma_exponent_raw -= Rational(dh) * z1(static_cast<int>(pv));
    } else {
      rep.gamma_exponent_raw += Rational(hv) * (Rational(kids - pv, 2) - Rational(2 * (sv - 1)));
      rep.gamma_exponent_raw -= Rational(dh) * z2(static_cast<int>(pv));
      rep.vf_exponent_raw -= Rational(kids - pv, 2) - Rational(sv - 1);
    }
  }
  if (regime == TreeRegime::One) {
    rep.gamma_exponent_collected = Rational(h) * (Rational(3, 2) - Rational(l, 4)) + decay;
    for (int e : t.endpoints()) {
      const long long hp = t.parent_scale(e);
      const int sz = t.nodes[e].fields;
      if (sz == 2) {
        rep.gamma_exponent_raw += Rational(3 * hp, 2);
        rep.gamma_exponent_collected += Rational(hp, 2);
      } else if (sz <= 6) {
        rep.gamma_exponent_raw += Rational(hp * (sz - 2), 2);
        rep.gamma_exponent_collected += Rational(hp * (3 * sz - 10), 4);
      } else {
        rep.gamma_exponent_collected += Rational(hp) * (Rational(sz, 4) - Rational(3, 2));
      }
    }
    rep.raw_value = std::pow(gamma, boost::rational_cast<double>(rep.gamma_exponent_raw));
    rep.collected_value = std::pow(gamma, boost::rational_cast<double>(rep.gamma_exponent_collected));
    return rep;
  }
  // Regime 2: R endpoints carry gamma^{h*(3/2 - |I|/4)}, Lambda endpoints vF,
  // NuDelta endpoints gamma^{h_v'}. Each endpoint also contributes
  // vF^{-1 + |I|/2} once R endpoints trade gamma^{h*(|I|/4 - 1/2)} for the
  // matching vF power.
  rep.gamma_exponent_collected = Rational(h) * (Rational(2) - Rational(l, 2)) + decay;
  rep.vf_exponent_collected = Rational(l, 2) - 1;
  Rational vf_true = rep.vf_exponent_raw;
  for (int e : t.endpoints()) {
    const auto& nd = t.nodes[e];
    const long long hp = t.parent_scale(e);
    rep.vf_exponent_raw += Rational(nd.fields, 2) - 1;
    switch (nd.cls) {
      case EndpointClass::R:
        if (hp != hstar) throw std::invalid_argument("R endpoints must hang from the crossover scale");
        rep.gamma_exponent_raw += Rational(hstar) * (Rational(3, 2) - Rational(nd.fields, 4));
        rep.crossover_power += Rational(nd.fields, 4) - Rational(1, 2);
        break;
      case EndpointClass::Lambda:
        if (nd.fields != 4) throw std::invalid_argument("Lambda endpoints carry four fields");
        vf_true += 1;
        break;
      case EndpointClass::NuDelta:
        if (nd.fields != 2) throw std::invalid_argument("NuDelta endpoints carry two fields");
        rep.gamma_exponent_raw += Rational(hp);
        break;
      case EndpointClass::Local:
        throw std::invalid_argument("regime-2 trees need R, Lambda or NuDelta endpoints");
    }
  }
  rep.gamma_exponent_collected += Rational(hstar) * rep.crossover_power;
  rep.raw_value = std::pow(gamma, boost::rational_cast<double>(rep.gamma_exponent_raw)) *
                  std::pow(vF, boost::rational_cast<double>(vf_true));
  rep.collected_value = std::pow(gamma, boost::rational_cast<double>(rep.gamma_exponent_collected)) *
                        std::pow(vF, boost::rational_cast<double>(rep.vf_exponent_collected - 2 * rep.crossover_power));
  return rep;
}

Rational short_memory_margin(const GNTree& t, Rational eta) {
  if (!(eta > Rational(0) && eta < Rational(1))) throw std::invalid_argument("eta must lie in (0, 1)");
  Rational decay;
  int hbar = t.root_scale;
  for (int v : t.non_endpoints()) {
    const long long dh = t.nodes[v].scale - t.parent_scale(v);
    decay += Rational(dh) * vertex_dimension(TreeRegime::One, 2 * t.nodes[v].p);
    hbar = std::max(hbar, t.nodes[v].scale);
  }
  const Rational lhs = -decay + Rational(hbar, 2);
  const Rational rhs = -eta * decay + Rational(t.root_scale) * (Rational(1) - eta) / Rational(2);
  return rhs - lhs;
}

double crossover_consistency(int l, double r, double gamma) {
  if (l < 2 || l % 2) throw std::invalid_argument("l must be even and >= 2");
  if (!(r > 0.0 && r <= 0.5)) throw std::invalid_argument("r must lie in (0, 1/2]");
  const int hs = crossover_scale(r, gamma);
  const double vF = fermi_data(r).vF;
  const double regime1 = std::pow(gamma, hs * (1.5 - l / 4.0));
  const double regime2 = std::pow(gamma, hs * (2.0 - l / 2.0)) * std::pow(vF, l / 2.0 - 1.0);
  return regime1 / regime2;
}

nlohmann::ordered_json tree_to_json(const GNTree& t) {
  static const char* cls_name[] = {"local", "R", "lambda", "nu_delta"};
  nlohmann::ordered_json j;
  j["root_scale"] = t.root_scale;
  j["endpoints"] = t.endpoint_count();
  auto& vs = j["vertices"] = nlohmann::ordered_json::array();
  for (const auto& nd : t.nodes) {
    nlohmann::ordered_json v;
    v["scale"] = nd.scale;
    v["parent"] = nd.parent;
    v["children"] = nd.children;
    v["endpoint"] = nd.endpoint;
    if (nd.endpoint) {
      v["fields"] = nd.fields;
      v["class"] = cls_name[static_cast<int>(nd.cls)];
    }
    v["P"] = 2 * nd.p;
    vs.push_back(v);
  }
  return j;
}

}  // namespace chainrg
