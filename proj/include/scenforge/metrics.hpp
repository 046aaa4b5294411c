#pragma once

// Scenario scoring: difficulty (task counts along required quest chains),
// structural variety (NetSimile signatures + Canberra distance), content
// variety (interface/vulnerability count vectors), and a small PCA for
// scatter export.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "scenforge/errors.hpp"
#include "scenforge/graph.hpp"
#include "scenforge/scenario.hpp"

namespace scenforge {

class EmptyGraph : public Error {
public:
  EmptyGraph() : Error("empty graph", kExitValidation) {}
};

class LengthMismatch : public Error {
public:
  LengthMismatch() : Error("signature length mismatch", kExitValidation) {}
};

class DegenerateData : public Error {
public:
  DegenerateData() : Error("total variance is zero", kExitValidation) {}
};

class UnknownStyle : public Error {
public:
  explicit UnknownStyle(const std::string& name)
      : Error("style '" + name + "' is not in the repertoire", kExitValidation) {}
};

// --------------------------------------------------------------------------
// NetSimile
// --------------------------------------------------------------------------

// 7 structural features per node, each summarized by 5 moments
// (mean, median, population stddev, skewness, kurtosis) = 35 dimensions.
using NetSimileSignature = std::array<double, 35>;

namespace metrics_detail {

inline std::array<double, 5> moments(std::vector<double> xs) {
  std::array<double, 5> out{0, 0, 0, 0, 0};
  if (xs.empty()) return out;
  double n = static_cast<double>(xs.size());
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= n;
  std::sort(xs.begin(), xs.end());
  double median = xs.size() % 2 ? xs[xs.size() / 2]
                                : 0.5 * (xs[xs.size() / 2 - 1] + xs[xs.size() / 2]);
  double m2 = 0, m3 = 0, m4 = 0;
  for (double x : xs) {
    double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  double sd = std::sqrt(m2);
  out[0] = mean;
  out[1] = median;
  out[2] = sd;
  out[3] = m2 > 0 ? m3 / (sd * sd * sd) : 0.0; // constant feature -> 0
  out[4] = m2 > 0 ? m4 / (m2 * m2) : 0.0;
  return out;
}

} // namespace metrics_detail

// Signature over a plain adjacency structure (indices 0..n-1).
inline NetSimileSignature netsimile_signature(
    const std::vector<std::set<int>>& adj) {
  std::size_t n = adj.size();
  if (n == 0) throw EmptyGraph();

  std::vector<double> degree(n), clustering(n), nbr_degree(n), nbr_clustering(n),
      ego_edges(n), ego_out(n), ego_nbrs(n);

  for (std::size_t i = 0; i < n; ++i) {
    double d = static_cast<double>(adj[i].size());
    degree[i] = d;
    // triangles through i
    long tri = 0;
    for (int a : adj[i])
      for (int b : adj[i])
        if (a < b && adj[static_cast<std::size_t>(a)].count(b)) ++tri;
    clustering[i] = d >= 2 ? 2.0 * static_cast<double>(tri) / (d * (d - 1)) : 0.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (adj[i].empty()) {
      nbr_degree[i] = 0;
      nbr_clustering[i] = 0;
    } else {
      double sd = 0, sc = 0;
      for (int a : adj[i]) {
        sd += degree[static_cast<std::size_t>(a)];
        sc += clustering[static_cast<std::size_t>(a)];
      }
      nbr_degree[i] = sd / static_cast<double>(adj[i].size());
      nbr_clustering[i] = sc / static_cast<double>(adj[i].size());
    }
    // egonet = node + neighbors
    std::set<int> ego = adj[i];
    ego.insert(static_cast<int>(i));
    long internal = 0;
    long outgoing = 0;
    std::set<int> outside;
    for (int a : ego)
      for (int b : adj[static_cast<std::size_t>(a)]) {
        if (ego.count(b)) {
          if (a < b) ++internal;
        } else {
          ++outgoing;
          outside.insert(b);
        }
      }
    ego_edges[i] = static_cast<double>(internal);
    ego_out[i] = static_cast<double>(outgoing);
    ego_nbrs[i] = static_cast<double>(outside.size());
  }

  NetSimileSignature sig{};
  std::size_t k = 0;
  for (const auto* feature : {&degree, &clustering, &nbr_degree, &nbr_clustering,
                              &ego_edges, &ego_out, &ego_nbrs}) {
    auto m = metrics_detail::moments(*feature);
    for (double v : m) sig[k++] = v;
  }
  return sig;
}

inline std::vector<std::set<int>> adjacency_of(const Graph& g) {
  std::map<std::string, int> index;
  for (const auto& n : g.nodes()) index[n.id] = static_cast<int>(index.size());
  std::vector<std::set<int>> adj(g.nodes().size());
  for (const auto& [a, b] : g.edges()) {
    adj[static_cast<std::size_t>(index[a])].insert(index[b]);
    adj[static_cast<std::size_t>(index[b])].insert(index[a]);
  }
  return adj;
}

inline NetSimileSignature netsimile_signature(const Graph& g) {
  return netsimile_signature(adjacency_of(g));
}

// Canberra distance with 0/0 terms treated as 0.
inline double netsimile_distance(const NetSimileSignature& a,
                                 const NetSimileSignature& b) {
  double total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double denom = std::fabs(a[i]) + std::fabs(b[i]);
    if (denom > 0) total += std::fabs(a[i] - b[i]) / denom;
  }
  return total;
}

// --------------------------------------------------------------------------
// Content signatures
// --------------------------------------------------------------------------

struct ContentSignature {
  std::vector<std::string> labels; // "style/product" and "style/vulnerability"
  std::vector<long> counts;
  bool operator==(const ContentSignature&) const = default;
};

// Index order is fixed by repertoire declaration order: per style, its
// interface products then its vulnerabilities.
inline ContentSignature content_signature(
    const NetworkEnvironment& env, const std::vector<ArchStyleSpec>& repertoire) {
  ContentSignature sig;
  std::map<std::string, std::size_t> index;
  for (const auto& style : repertoire) {
    for (const auto& i : style.interfaces) {
      index[style.name + "/" + i.name] = sig.labels.size();
      sig.labels.push_back(style.name + "/" + i.name);
    }
    for (const auto& v : style.vulnerabilities) {
      index[style.name + "/" + v.name] = sig.labels.size();
      sig.labels.push_back(style.name + "/" + v.name);
    }
  }
  sig.counts.assign(sig.labels.size(), 0);

  for (const auto& [sid, sub] : env.subsystems) {
    bool known = false;
    for (const auto& style : repertoire)
      if (style.name == sub.style_name) known = true;
    if (!known) throw UnknownStyle(sub.style_name);
    for (const auto& i : sub.interfaces) {
      auto it = index.find(sub.style_name + "/" + i.product);
      if (it != index.end()) sig.counts[it->second] += 1;
    }
    for (const auto& v : sub.vulnerabilities) {
      auto it = index.find(sub.style_name + "/" + v.vuln_name);
      if (it != index.end()) sig.counts[it->second] += 1;
    }
  }
  return sig;
}

// --------------------------------------------------------------------------
// Difficulty
// --------------------------------------------------------------------------

namespace metrics_detail {

// Deterministic fewest-locks path from the start subsystem; locks already in
// `opened` cost nothing to cross.
inline std::vector<std::string> locks_on_path(const HighLevelStoryline& h,
                                              const std::string& target,
                                              const std::set<std::string>& opened) {
  const auto& g = h.graph;
  std::map<std::string, long> dist;
  std::map<std::string, std::string> parent;
  std::set<std::pair<long, std::string>> frontier;
  dist[h.start_subsystem] = 0;
  frontier.insert({0, h.start_subsystem});
  while (!frontier.empty()) {
    auto [d, cur] = *frontier.begin();
    frontier.erase(frontier.begin());
    if (d != dist[cur]) continue;
    if (cur == target) break;
    for (const auto& nb : g.neighbors(cur)) {
      NodeKind k = g.kind_of(nb);
      long step;
      if (k == NodeKind::Connector || k == NodeKind::Subsystem) step = 0;
      else if (k == NodeKind::Lock) step = opened.count(nb) ? 0 : 1;
      else continue;
      long nd = d + step;
      auto it = dist.find(nb);
      if (it == dist.end() || nd < it->second) {
        dist[nb] = nd;
        parent[nb] = cur;
        frontier.insert({nd, nb});
      }
    }
  }
  std::vector<std::string> locks;
  if (!dist.count(target)) return locks; // unreachable: no locks to report
  std::string cur = target;
  while (cur != h.start_subsystem) {
    if (h.graph.kind_of(cur) == NodeKind::Lock) locks.push_back(cur);
    cur = parent.at(cur);
  }
  return locks;
}

} // namespace metrics_detail

// Number of distinct tasks a player must complete for all objectives: the
// union of all objective quest chains plus the chains of every key whose
// lock guards the access path to a needed objective or needed key.
inline long difficulty(const Scenario& scenario) {
  const auto& h = scenario.high_level;
  if (scenario.quests.empty() && h.objectives.empty()) return 0;

  std::set<std::string> needed_subs;
  for (const auto& o : h.objectives) needed_subs.insert(o.subsystem);
  std::set<std::string> needed_locks;

  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& s : std::set<std::string>(needed_subs)) {
      for (const auto& lock :
           metrics_detail::locks_on_path(h, s, needed_locks)) {
        if (!needed_locks.insert(lock).second) continue;
        grew = true;
        const auto* key = h.key_of_lock(lock);
        detail::require(key != nullptr, "every lock has a key");
        needed_subs.insert(key->subsystem);
      }
    }
  }

  std::set<std::string> required_tasks;
  for (const auto& o : h.objectives) {
    const auto* q = scenario.quest_for_target(o.id);
    detail::require(q != nullptr, "objective quest exists");
    for (const auto& id : q->chain) required_tasks.insert(id);
  }
  for (const auto& lock : needed_locks) {
    const auto* key = h.key_of_lock(lock);
    const auto* q = scenario.quest_for_target(key->id);
    detail::require(q != nullptr, "key quest exists");
    for (const auto& id : q->chain) required_tasks.insert(id);
  }
  return static_cast<long>(required_tasks.size());
}

// --------------------------------------------------------------------------
// PCA (top two components)
// --------------------------------------------------------------------------

struct Pca2Result {
  std::vector<std::array<double, 2>> coordinates;
  std::array<double, 2> explained_variance{0, 0}; // fractions of total
};

namespace metrics_detail {

inline std::vector<double> matvec(const std::vector<std::vector<double>>& m,
                                  const std::vector<double>& v) {
  std::vector<double> out(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  return out;
}

inline double norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Dominant eigenpair by power iteration with a deterministic start vector.
inline std::pair<double, std::vector<double>> dominant_eig(
    const std::vector<std::vector<double>>& m) {
  std::size_t d = m.size();
  std::vector<double> v(d);
  for (std::size_t i = 0; i < d; ++i)
    v[i] = 1.0 + 1e-3 * static_cast<double>(i % 7);
  double nv = norm(v);
  for (auto& x : v) x /= nv;
  double lambda = 0;
  for (int iter = 0; iter < 200000; ++iter) {
    auto w = matvec(m, v);
    double nw = norm(w);
    if (nw < 1e-300) return {0.0, v};
    for (auto& x : w) x /= nw;
    double delta = 0;
    for (std::size_t i = 0; i < d; ++i) delta += std::fabs(w[i] - v[i]);
    double delta_flip = 0;
    for (std::size_t i = 0; i < d; ++i) delta_flip += std::fabs(w[i] + v[i]);
    v = w;
    if (std::min(delta, delta_flip) < 1e-14) break;
  }
  auto mv = matvec(m, v);
  for (std::size_t i = 0; i < d; ++i) lambda += v[i] * mv[i];
  return {lambda, v};
}

// Sign convention: the first component that is clearly nonzero is made
// positive. Keyed to the first such index rather than the largest magnitude,
// which can tie across implementations.
inline void fix_sign(std::vector<double>& v) {
  double max_abs = 0;
  for (double x : v) max_abs = std::max(max_abs, std::fabs(x));
  if (max_abs == 0) return;
  for (double x : v) {
    if (std::fabs(x) <= 1e-6 * max_abs) continue;
    if (x < 0)
      for (auto& y : v) y = -y;
    return;
  }
}

} // namespace metrics_detail

inline Pca2Result pca2(const std::vector<std::vector<double>>& rows) {
  if (rows.size() < 3) throw ConfigError("pca2 needs at least 3 rows");
  std::size_t d = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != d) throw LengthMismatch();

  std::vector<std::vector<double>> centered = rows;
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0;
    for (const auto& r : rows) mean += r[j];
    mean /= static_cast<double>(rows.size());
    for (auto& r : centered) r[j] -= mean;
  }

  std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
  for (const auto& r : centered)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) cov[i][j] += r[i] * r[j];
  double n = static_cast<double>(rows.size());
  double trace = 0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) cov[i][j] /= n;
    trace += cov[i][i];
  }
  if (trace <= 0) throw DegenerateData();

  auto [l1, v1] = metrics_detail::dominant_eig(cov);
  metrics_detail::fix_sign(v1);
  auto deflated = cov;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) deflated[i][j] -= l1 * v1[i] * v1[j];
  auto [l2, v2] = metrics_detail::dominant_eig(deflated);
  metrics_detail::fix_sign(v2);

  Pca2Result res;
  res.explained_variance = {std::max(0.0, l1) / trace, std::max(0.0, l2) / trace};
  for (const auto& r : centered) {
    double x = 0, y = 0;
    for (std::size_t j = 0; j < d; ++j) {
      x += r[j] * v1[j];
      y += r[j] * v2[j];
    }
    res.coordinates.push_back({x, y});
  }
  return res;
}

} // namespace scenforge
