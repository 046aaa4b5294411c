#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "scenforge/errors.hpp"

namespace scenforge {

enum class NodeKind {
  Connector,
  Subsystem,
  Component,
  Interface,
  Vulnerability,
  Lock,
  Key,
  Start,
  Objective,
  EntryMarker,
};

inline const char* node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Connector: return "connector";
    case NodeKind::Subsystem: return "subsystem";
    case NodeKind::Component: return "component";
    case NodeKind::Interface: return "interface";
    case NodeKind::Vulnerability: return "vulnerability";
    case NodeKind::Lock: return "lock";
    case NodeKind::Key: return "key";
    case NodeKind::Start: return "start";
    case NodeKind::Objective: return "objective";
    case NodeKind::EntryMarker: return "entry";
  }
  return "?";
}

// Small undirected graph with string node ids and typed nodes. Iteration
// order is deterministic everywhere: nodes keep insertion order, edges are
// kept as a sorted set of normalized pairs.
class Graph {
public:
  struct Node {
    std::string id;
    NodeKind kind;
    bool operator==(const Node&) const = default;
  };

  using Edge = std::pair<std::string, std::string>;

  static Edge make_edge(std::string a, std::string b) {
    if (b < a) std::swap(a, b);
    return {std::move(a), std::move(b)};
  }

  void add_node(const std::string& id, NodeKind kind) {
    detail::require(!has_node(id), "graph node ids are unique");
    index_[id] = nodes_.size();
    nodes_.push_back({id, kind});
  }

  bool has_node(const std::string& id) const { return index_.count(id) > 0; }

  NodeKind kind_of(const std::string& id) const {
    auto it = index_.find(id);
    detail::require(it != index_.end(), "node exists");
    return nodes_[it->second].kind;
  }

  void add_edge(const std::string& a, const std::string& b) {
    detail::require(has_node(a) && has_node(b), "edge endpoints exist");
    detail::require(a != b, "no self loops");
    edges_.insert(make_edge(a, b));
  }

  bool has_edge(const std::string& a, const std::string& b) const {
    return edges_.count(make_edge(a, b)) > 0;
  }

  void remove_edge(const std::string& a, const std::string& b) {
    edges_.erase(make_edge(a, b));
  }

  void remove_node(const std::string& id) {
    auto it = index_.find(id);
    if (it == index_.end()) return;
    nodes_.erase(nodes_.begin() + static_cast<std::ptrdiff_t>(it->second));
    index_.clear();
    for (std::size_t i = 0; i < nodes_.size(); ++i) index_[nodes_[i].id] = i;
    for (auto e = edges_.begin(); e != edges_.end();) {
      if (e->first == id || e->second == id) e = edges_.erase(e);
      else ++e;
    }
  }

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::set<Edge>& edges() const { return edges_; }

  std::vector<std::string> neighbors(const std::string& id) const {
    std::vector<std::string> out;
    for (const auto& [a, b] : edges_) {
      if (a == id) out.push_back(b);
      else if (b == id) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::size_t degree(const std::string& id) const {
    std::size_t d = 0;
    for (const auto& [a, b] : edges_)
      if (a == id || b == id) ++d;
    return d;
  }

  std::vector<std::string> node_ids(NodeKind kind) const {
    std::vector<std::string> out;
    for (const auto& n : nodes_)
      if (n.kind == kind) out.push_back(n.id);
    return out;
  }

  // Connected components as sorted node-id sets, ordered by smallest member.
  std::vector<std::set<std::string>> connected_components() const {
    std::map<std::string, std::string> parent;
    for (const auto& n : nodes_) parent[n.id] = n.id;
    auto find = [&](std::string x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& [a, b] : edges_) {
      auto ra = find(a), rb = find(b);
      if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
    }
    std::map<std::string, std::set<std::string>> groups;
    for (const auto& n : nodes_) groups[find(n.id)].insert(n.id);
    std::vector<std::set<std::string>> out;
    for (auto& [root, members] : groups) out.push_back(std::move(members));
    return out;
  }

  bool connected() const {
    return nodes_.empty() || connected_components().size() == 1;
  }

  bool operator==(const Graph&) const = default;

private:
  std::vector<Node> nodes_;
  std::map<std::string, std::size_t> index_;
  std::set<Edge> edges_;
};

} // namespace scenforge
