#pragma once

// Graph/DOT rendering, the hypervisor-agnostic deployment manifest, and CSV
// writers for the metric exports.

#include <array>
#include <cstdio>
#include <string>
#include <vector>

#include "scenforge/errors.hpp"
#include "scenforge/metrics.hpp"
#include "scenforge/scenario.hpp"

namespace scenforge {

class UnknownLayer : public Error {
public:
  explicit UnknownLayer(const std::string& layer)
      : Error("unknown export layer '" + layer + "'", kExitUsage) {}
};

namespace export_detail {

inline const char* dot_shape(NodeKind k) {
  switch (k) {
    case NodeKind::Connector: return "box";
    case NodeKind::Subsystem: return "ellipse";
    case NodeKind::Component: return "oval";
    case NodeKind::Interface: return "note";
    case NodeKind::Vulnerability: return "triangle";
    case NodeKind::Lock: return "diamond";
    case NodeKind::Key: return "house";
    case NodeKind::Start: return "doublecircle";
    case NodeKind::Objective: return "octagon";
    case NodeKind::EntryMarker: return "plaintext";
  }
  return "oval";
}

inline std::string dot_of_graph(const Graph& g, const std::string& name) {
  std::string out = "graph \"" + name + "\" {\n";
  for (const auto& n : g.nodes())
    out += "  \"" + n.id + "\" [shape=" + dot_shape(n.kind) + "];\n";
  for (const auto& [a, b] : g.edges())
    out += "  \"" + a + "\" -- \"" + b + "\";\n";
  out += "}\n";
  return out;
}

inline std::string fmt(double v) {
  char buf[40];
  snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

} // namespace export_detail

// Layer syntax: "topology", "highlevel", "subsystem:<id>", "lowlevel:<id>".
inline std::string export_dot(const Scenario& s, const std::string& layer) {
  using export_detail::dot_of_graph;
  if (layer == "topology")
    return dot_of_graph(s.environment.topology.graph, "topology");
  if (layer == "highlevel") return dot_of_graph(s.high_level.graph, "highlevel");
  auto colon = layer.find(':');
  if (colon != std::string::npos) {
    std::string kind = layer.substr(0, colon);
    std::string id = layer.substr(colon + 1);
    if (kind == "subsystem") {
      auto it = s.environment.subsystems.find(id);
      if (it == s.environment.subsystems.end()) throw UnknownLayer(layer);
      return dot_of_graph(it->second.graph, "subsystem_" + id);
    }
    if (kind == "lowlevel") {
      auto it = s.low_level.find(id);
      if (it == s.low_level.end()) throw UnknownLayer(layer);
      return dot_of_graph(it->second.graph, "lowlevel_" + id);
    }
  }
  throw UnknownLayer(layer);
}

// --------------------------------------------------------------------------
// Deployment manifest
// --------------------------------------------------------------------------

namespace export_detail {

inline std::string key_token_kind(const Scenario& s, const KeyInfo& key) {
  const auto* quest = s.quest_for_target(key.id);
  if (!quest) return "ssh-key";
  const auto* terminal = s.find_task(quest->chain.back());
  if (!terminal) return "ssh-key";
  for (const auto& tok : terminal->prereq.tokens) {
    if (tok.rfind("RootAccess", 0) == 0) return "credentials";
    if (tok.rfind("InformationLeak", 0) == 0) return "access-token";
  }
  return "ssh-key";
}

} // namespace export_detail

// One machine record per component and connector, plus key, flag, and
// firewall directives. Locks are realized purely as firewall rules.
inline std::string export_manifest(const Scenario& s) {
  std::string out = "manifest-version 1\n";
  out += "scenario-seed " + std::to_string(s.provenance.seed) + "\n\n";

  for (const auto& [sid, sub] : s.environment.subsystems) {
    for (const auto& c : sub.components) {
      out += "machine " + c.id + " subsystem " + sid + " role " + c.role;
      if (c.entrypoint) out += " entrypoint";
      out += "\n";
      for (const auto& i : sub.interfaces)
        if (i.owner == c.id) out += "  service " + i.product + "\n";
      for (const auto& v : sub.vulnerabilities)
        if (v.interface_id.rfind(c.id + ":", 0) == 0)
          out += "  vulnerability " + v.vuln_name + " on " +
                 v.interface_id.substr(c.id.size() + 1) + "\n";
    }
  }
  for (const auto& [cid, det] : s.environment.connectors) {
    out += "machine " + cid + " connector profile " + det.profile + " os " +
           det.os + "\n";
    for (const auto& svc : det.services) out += "  service " + svc.name + "\n";
    for (const auto& v : det.vulnerabilities)
      out += "  vulnerability " + v.name + " on " + v.service + "\n";
  }
  out += "\n";

  for (const auto& key : s.high_level.keys) {
    const auto* quest = s.quest_for_target(key.id);
    std::string host = quest ? quest->culminating_component : "";
    out += "key " + key.capability + " kind " +
           export_detail::key_token_kind(s, key) + " host " + host +
           " subsystem " + key.subsystem + "\n";
  }
  for (const auto& obj : s.high_level.objectives) {
    const auto* quest = s.quest_for_target(obj.id);
    std::string host = quest ? quest->culminating_component : "";
    out += "flag " + obj.capability + " host " + host + " subsystem " +
           obj.subsystem + "\n";
  }
  out += "\n";

  for (const auto& lock : s.high_level.locks) {
    const auto* key = s.high_level.key_of_lock(lock.id);
    detail::require(key != nullptr, "every lock has a key");
    out += "lock " + lock.id + " connector " + lock.connector + "\n";
    for (const auto& far : lock.redirected)
      out += "  firewall deny " + lock.connector + " -- " + far +
             " unless-key " + key->capability + "\n";
  }
  if (!s.high_level.locks.empty()) out += "\n";

  // Routing policy shared by all connectors.
  bool wrote_rule = false;
  if (!s.environment.connectors.empty()) {
    const auto& det = s.environment.connectors.begin()->second;
    for (const auto& r : det.firewall_rules) {
      if (r.allow) {
        out += "allow-routing " + r.style_a + " " + r.style_b + "\n";
        wrote_rule = true;
      }
    }
  }
  out += "default-deny\n";
  (void)wrote_rule;
  return out;
}

// --------------------------------------------------------------------------
// CSV exports
// --------------------------------------------------------------------------

inline std::string signatures_csv(
    const std::vector<std::string>& ids,
    const std::vector<NetSimileSignature>& signatures) {
  std::string out = "id";
  static const char* features[] = {"degree",   "clustering", "nbr_degree",
                                   "nbr_clust", "ego_edges", "ego_out",
                                   "ego_nbrs"};
  static const char* stats[] = {"mean", "median", "std", "skew", "kurt"};
  for (const auto* f : features)
    for (const auto* st : stats) out += std::string(",") + f + "_" + st;
  out += "\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out += ids[i];
    for (double v : signatures[i]) out += "," + export_detail::fmt(v);
    out += "\n";
  }
  return out;
}

inline std::string distance_matrix_csv(
    const std::vector<std::string>& ids,
    const std::vector<NetSimileSignature>& signatures) {
  std::string out = "id";
  for (const auto& id : ids) out += "," + id;
  out += "\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out += ids[i];
    for (std::size_t j = 0; j < ids.size(); ++j)
      out += "," + export_detail::fmt(
                       netsimile_distance(signatures[i], signatures[j]));
    out += "\n";
  }
  return out;
}

inline std::string content_csv(const std::vector<std::string>& ids,
                               const std::vector<ContentSignature>& sigs) {
  detail::require(!sigs.empty(), "at least one signature");
  std::string out = "id";
  for (const auto& label : sigs.front().labels) out += "," + label;
  out += "\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out += ids[i];
    for (long c : sigs[i].counts) out += "," + std::to_string(c);
    out += "\n";
  }
  return out;
}

inline std::string pca_csv(const std::vector<std::string>& ids,
                           const Pca2Result& pca) {
  std::string out = "id,pc1,pc2\n";
  for (std::size_t i = 0; i < ids.size(); ++i)
    out += ids[i] + "," + export_detail::fmt(pca.coordinates[i][0]) + "," +
           export_detail::fmt(pca.coordinates[i][1]) + "\n";
  out += "explained_variance," + export_detail::fmt(pca.explained_variance[0]) +
         "," + export_detail::fmt(pca.explained_variance[1]) + "\n";
  return out;
}

} // namespace scenforge
