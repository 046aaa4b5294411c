#pragma once

// Security-informed execution environment assembly: topology graph,
// per-subsystem graphs carrying interfaces/vulnerabilities/capabilities,
// and detailed connector instantiation from a router catalog.

#include <map>
#include <string>
#include <vector>

#include "scenforge/capability.hpp"
#include "scenforge/errors.hpp"
#include "scenforge/graph.hpp"
#include "scenforge/modelfind.hpp"
#include "scenforge/rng.hpp"
#include "scenforge/specdsl.hpp"

namespace scenforge {

struct TopologyGraph {
  Graph graph; // Connector and Subsystem nodes
  std::map<std::string, std::string> subsystem_style;

  std::vector<std::string> connectors() const {
    return graph.node_ids(NodeKind::Connector);
  }
  std::vector<std::string> subsystems() const {
    return graph.node_ids(NodeKind::Subsystem);
  }
  bool operator==(const TopologyGraph&) const = default;
};

struct ComponentNode {
  std::string id;
  std::string role;
  bool entrypoint = false;
  bool operator==(const ComponentNode&) const = default;
};

struct InterfaceNode {
  std::string id; // "<component>:<product>"
  std::string owner;
  std::string product;
  CapabilitySet interaction_req; // scoped, includes Reachable_<owner>
  bool operator==(const InterfaceNode&) const = default;
};

struct VulnerabilityNode {
  std::string id; // "<interface>:<vulnerability>"
  std::string interface_id;
  std::string vuln_name;
  CapabilitySet exploit_req;  // scoped to the owning component
  CapabilitySet exploit_gain; // scoped to the owning component
  bool operator==(const VulnerabilityNode&) const = default;
};

struct SubsystemGraph {
  std::string subsystem_id;
  std::string style_name;
  Graph graph; // components, interfaces, vulnerabilities; L_C, L_I, L_V
  std::vector<ComponentNode> components;
  std::vector<InterfaceNode> interfaces;
  std::vector<VulnerabilityNode> vulnerabilities;

  const ComponentNode* find_component(const std::string& id) const {
    for (const auto& c : components)
      if (c.id == id) return &c;
    return nullptr;
  }
  const InterfaceNode* find_interface(const std::string& id) const {
    for (const auto& i : interfaces)
      if (i.id == id) return &i;
    return nullptr;
  }
  std::vector<std::string> entrypoint_components() const {
    std::vector<std::string> out;
    for (const auto& c : components)
      if (c.entrypoint) out.push_back(c.id);
    return out;
  }
  bool operator==(const SubsystemGraph&) const = default;
};

// --------------------------------------------------------------------------
// Router catalog
// --------------------------------------------------------------------------

struct RouterService {
  std::string name;
  CapabilitySet interaction_req;
  bool operator==(const RouterService&) const = default;
};

struct RouterVulnerability {
  std::string name;
  std::string service;
  CapabilitySet exploit_req;
  CapabilitySet exploit_gain;
  bool operator==(const RouterVulnerability&) const = default;
};

struct RouterProfile {
  std::string name;
  std::string os;
  std::vector<RouterService> services;
  std::vector<RouterVulnerability> vulnerabilities;
  bool operator==(const RouterProfile&) const = default;
};

struct ConnectorCatalog {
  std::vector<RouterProfile> profiles;
  bool operator==(const ConnectorCatalog&) const = default;

  // Router profiles modeled on long-patched appliance CVE families; they are
  // deliberately dated so generated environments never describe live attack
  // surface.
  static ConnectorCatalog builtin() {
    ConnectorCatalog cat;
    {
      RouterProfile p;
      p.name = "EdgeRouterLite";
      p.os = "EdgeOS_1_9";
      p.services = {{"Telnet", {}}, {"SNMPv2", {}}};
      p.vulnerabilities = {
          {"TelnetDefaultCreds", "Telnet", {}, {{{"RootAccess"}}}},
          {"SNMPCommunityLeak", "SNMPv2", {}, {{{"InformationLeak"}}}}};
      cat.profiles.push_back(std::move(p));
    }
    {
      RouterProfile p;
      p.name = "Isr1841";
      p.os = "IOS_12_4";
      p.services = {{"WebUI", {}}, {"TelnetMgmt", {}}};
      p.vulnerabilities = {
          {"HttpAuthBypass", "WebUI", {}, {{{"RootAccess"}}}},
          {"TelnetWeakCreds", "TelnetMgmt", {}, {{{"InitialAccess"}}}}};
      cat.profiles.push_back(std::move(p));
    }
    {
      RouterProfile p;
      p.name = "Wnr2000";
      p.os = "NetgearFw_1_2_0";
      p.services = {{"UPnP", {}}};
      p.vulnerabilities = {
          {"UPnPStackOverflow", "UPnP", {}, {{{"RootAccess"}}}}};
      cat.profiles.push_back(std::move(p));
    }
    return cat;
  }
};

// Same line grammar as .style files, with Router starting each profile.
inline ConnectorCatalog parse_catalog(const std::string& text) {
  using namespace dsl_detail;
  auto lines = split_lines(text);
  if (lines.empty() || lines.front().words[0] != "Router")
    throw SyntaxError(lines.empty() ? 0 : lines.front().number,
                      "catalog must begin with Router");
  ConnectorCatalog cat;
  RouterProfile* current = nullptr;
  std::vector<std::pair<std::string, std::size_t>> service_refs;
  for (const auto& line : lines) {
    const auto& w = line.words;
    if (w[0] == "Router") {
      if (w.size() != 2) throw SyntaxError(line.number, "expected: Router Name");
      for (const auto& p : cat.profiles)
        if (p.name == w[1]) throw DuplicateDeclaration(line.number, w[1]);
      RouterProfile p;
      p.name = expect_identifier(w[1], line.number);
      p.os = p.name;
      cat.profiles.push_back(std::move(p));
      current = &cat.profiles.back();
    } else if (w[0] == "OS") {
      if (w.size() != 2) throw SyntaxError(line.number, "expected: OS Name");
      current->os = w[1];
    } else if (w[0] == "Service") {
      if (w.size() != 3)
        throw SyntaxError(line.number, "expected: Service Name Caps");
      RouterService s;
      s.name = expect_identifier(w[1], line.number);
      s.interaction_req = parse_capability_set(w[2], line.number);
      current->services.push_back(std::move(s));
    } else if (w[0] == "Vulnerability") {
      if (w.size() != 5)
        throw SyntaxError(line.number,
                          "expected: Vulnerability Name Service ReqCaps GainCaps");
      RouterVulnerability v;
      v.name = expect_identifier(w[1], line.number);
      v.service = expect_identifier(w[2], line.number);
      v.exploit_req = parse_capability_set(w[3], line.number);
      v.exploit_gain = parse_capability_set(w[4], line.number);
      current->vulnerabilities.push_back(std::move(v));
      service_refs.emplace_back(current->name + "/" + w[2], line.number);
    } else {
      throw SyntaxError(line.number, "unknown keyword '" + w[0] + "'");
    }
  }
  for (const auto& [key, line_no] : service_refs) {
    auto slash = key.find('/');
    const std::string profile = key.substr(0, slash);
    const std::string service = key.substr(slash + 1);
    for (const auto& p : cat.profiles) {
      if (p.name != profile) continue;
      bool found = false;
      for (const auto& s : p.services)
        if (s.name == service) found = true;
      if (!found) throw UnknownReference(line_no, service, "service");
    }
  }
  return cat;
}

struct FirewallRule {
  std::string style_a;
  std::string style_b;
  bool allow = false;
  bool operator==(const FirewallRule&) const = default;
};

struct ConnectorDetail {
  std::string connector_id;
  std::string profile;
  std::string os;
  std::vector<RouterService> services;
  std::vector<RouterVulnerability> vulnerabilities;
  std::vector<FirewallRule> firewall_rules; // allow list, then default deny
  bool operator==(const ConnectorDetail&) const = default;
};

struct NetworkEnvironment {
  TopologyGraph topology;
  std::map<std::string, SubsystemGraph> subsystems;
  std::map<std::string, ConnectorDetail> connectors;
  struct Provenance {
    std::size_t topology_index = 0;
    std::map<std::string, std::size_t> subsystem_indices;
    std::uint64_t seed = 0;
    bool operator==(const Provenance&) const = default;
  } provenance;
  bool operator==(const NetworkEnvironment&) const = default;
};

// --------------------------------------------------------------------------
// Builders
// --------------------------------------------------------------------------

inline TopologyGraph build_topology_graph(const TopologyModel& model) {
  TopologyGraph out;
  for (const auto& c : model.connectors) out.graph.add_node(c, NodeKind::Connector);
  for (const auto& s : model.subsystems) out.graph.add_node(s, NodeKind::Subsystem);
  for (const auto& [a, b] : model.links) out.graph.add_edge(a, b);
  for (const auto& s : model.subsystems)
    out.graph.add_edge(s, model.subsystem_router.at(s));
  out.subsystem_style = model.subsystem_style;
  return out;
}

// Materializes interface and vulnerability nodes per component. Capability
// tokens from the style are scoped to the owning component instance here;
// every interface additionally requires that its component is reachable.
// Deterministic for a fixed (model, style, component_base); the rng is part
// of the construction interface but no step of it draws randomness today.
template <typename RngT>
SubsystemGraph build_subsystem_graph(const SubsystemModel& model,
                                     const ArchStyleSpec& style, RngT& rng,
                                     const std::string& subsystem_id = "s0",
                                     std::size_t component_base = 0) {
  (void)rng;
  SubsystemGraph out;
  out.subsystem_id = subsystem_id;
  out.style_name = style.name;

  std::map<std::string, std::string> local_to_global;
  std::size_t n = component_base;
  for (const auto& [local_id, role] : model.components) {
    ComponentNode c;
    c.id = "Component" + std::to_string(n++);
    c.role = role;
    c.entrypoint = style.is_entrypoint_role(role);
    local_to_global[local_id] = c.id;
    out.graph.add_node(c.id, NodeKind::Component);
    out.components.push_back(std::move(c));
  }

  // L_C: undirected interaction edges between components.
  for (const auto& [a, b] : model.interaction_edges) {
    const auto& ga = local_to_global.at(a);
    const auto& gb = local_to_global.at(b);
    if (!out.graph.has_edge(ga, gb)) out.graph.add_edge(ga, gb);
  }

  // Interface nodes per (component, chosen product), then vulnerability
  // nodes per matching style vulnerability.
  for (const auto& [local_id, role] : model.components) {
    const auto& comp = local_to_global.at(local_id);
    for (const auto* feature : style.features_of_role(role)) {
      auto it = model.interface_choice.find({local_id, feature->name});
      detail::require(it != model.interface_choice.end() && !it->second.empty(),
                      "model passed check_subsystem");
      for (const auto& product : it->second) {
        const auto* decl = style.find_interface(product);
        detail::require(decl != nullptr, "interface product declared");
        InterfaceNode node;
        node.id = comp + ":" + product;
        node.owner = comp;
        node.product = product;
        for (const auto& tok : decl->interaction_req.tokens)
          node.interaction_req.insert(scoped_token(tok, comp));
        node.interaction_req.insert(scoped_token("Reachable", comp));
        out.graph.add_node(node.id, NodeKind::Interface);
        out.graph.add_edge(node.id, comp);

        for (const auto& v : style.vulnerabilities) {
          if (v.interface_name != product) continue;
          VulnerabilityNode vn;
          vn.id = node.id + ":" + v.name;
          vn.interface_id = node.id;
          vn.vuln_name = v.name;
          for (const auto& tok : v.exploit_req.tokens)
            vn.exploit_req.insert(scoped_token(tok, comp));
          for (const auto& tok : v.exploit_gain.tokens)
            vn.exploit_gain.insert(scoped_token(tok, comp));
          out.graph.add_node(vn.id, NodeKind::Vulnerability);
          out.graph.add_edge(vn.id, node.id);
          out.vulnerabilities.push_back(std::move(vn));
        }
        out.interfaces.push_back(std::move(node));
      }
    }
  }
  return out;
}

template <typename RngT>
std::map<std::string, ConnectorDetail> instantiate_connectors(
    const TopologyModel& model, const ConnectorCatalog& catalog, RngT& rng) {
  if (catalog.profiles.empty()) throw ConfigError("empty connector catalog");
  std::vector<FirewallRule> rules;
  for (const auto& [a, b] : model.routing_policy) rules.push_back({a, b, true});
  rules.push_back({"*", "*", false}); // default deny

  std::map<std::string, ConnectorDetail> out;
  for (const auto& cid : model.connectors) {
    const auto& profile =
        catalog.profiles[rng.uniform(catalog.profiles.size())];
    ConnectorDetail d;
    d.connector_id = cid;
    d.profile = profile.name;
    d.os = profile.os;
    d.services = profile.services;
    d.vulnerabilities = profile.vulnerabilities;
    d.firewall_rules = rules;
    out.emplace(cid, std::move(d));
  }
  return out;
}

template <typename RngT>
NetworkEnvironment assemble_environment(
    const TopologyModel& topo_model,
    const std::vector<std::pair<std::string, const SubsystemModel*>>&
        subsystem_models, // (subsystem id, model), one per subsystem
    const std::map<std::string, ArchStyleSpec>& styles,
    const ConnectorCatalog& catalog, RngT& rng) {
  NetworkEnvironment env;
  env.topology = build_topology_graph(topo_model);
  std::size_t component_base = 0;
  for (const auto& [sid, model] : subsystem_models) {
    const auto& style = styles.at(topo_model.subsystem_style.at(sid));
    auto g = build_subsystem_graph(*model, style, rng, sid, component_base);
    component_base += g.components.size();
    env.subsystems.emplace(sid, std::move(g));
  }
  env.connectors = instantiate_connectors(topo_model, catalog, rng);
  return env;
}

// Single graph for the structural-variety metric: the topology graph plus
// all subsystem graphs, with each subsystem node linked to its subsystem's
// entrypoint component(s).
inline Graph merge_full_graph(const NetworkEnvironment& env) {
  Graph merged = env.topology.graph;
  for (const auto& node : env.topology.graph.nodes()) {
    if (node.kind != NodeKind::Subsystem) continue;
    auto it = env.subsystems.find(node.id);
    detail::require(it != env.subsystems.end(), "subsystem graph exists");
    const auto& sub = it->second;
    for (const auto& n : sub.graph.nodes()) merged.add_node(n.id, n.kind);
    for (const auto& [a, b] : sub.graph.edges()) merged.add_edge(a, b);
    for (const auto& entry : sub.entrypoint_components())
      merged.add_edge(node.id, entry);
  }
  return merged;
}

} // namespace scenforge
