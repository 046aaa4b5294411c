#pragma once

// Canonical scenario serialization: a single self-describing JSON document
// with fixed key order, so structurally equal scenarios serialize to
// identical bytes.

#include <string>
#include <vector>

#include <json.hpp>

#include "scenforge/errors.hpp"
#include "scenforge/scenario.hpp"
#include "scenforge/sim_config.hpp"

namespace scenforge {

namespace ser_detail {

using json = nlohmann::ordered_json;

inline const json& field(const json& j, const char* key,
                         const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path + "." + key, "missing field");
  return *it;
}

inline std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected a string");
  return j.get<std::string>();
}

inline double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  return j.get<double>();
}

inline std::uint64_t as_u64(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !j.is_number_integer())
    throw SchemaError(path, "expected an integer");
  return j.get<std::uint64_t>();
}

inline bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw SchemaError(path, "expected a boolean");
  return j.get<bool>();
}

inline const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  return j;
}

// ---- graph ----

inline json graph_to_json(const Graph& g) {
  json nodes = json::array();
  for (const auto& n : g.nodes())
    nodes.push_back({{"id", n.id}, {"kind", node_kind_name(n.kind)}});
  json edges = json::array();
  for (const auto& [a, b] : g.edges()) edges.push_back({a, b});
  return {{"nodes", nodes}, {"edges", edges}};
}

inline NodeKind kind_from_name(const std::string& name,
                               const std::string& path) {
  for (NodeKind k : {NodeKind::Connector, NodeKind::Subsystem,
                     NodeKind::Component, NodeKind::Interface,
                     NodeKind::Vulnerability, NodeKind::Lock, NodeKind::Key,
                     NodeKind::Start, NodeKind::Objective,
                     NodeKind::EntryMarker})
    if (name == node_kind_name(k)) return k;
  throw SchemaError(path, "unknown node kind '" + name + "'");
}

inline Graph graph_from_json(const json& j, const std::string& path) {
  Graph g;
  for (const auto& n : as_array(field(j, "nodes", path), path + ".nodes"))
    g.add_node(as_string(field(n, "id", path + ".nodes"), path),
               kind_from_name(as_string(field(n, "kind", path + ".nodes"), path),
                              path + ".nodes"));
  for (const auto& e : as_array(field(j, "edges", path), path + ".edges")) {
    const auto& arr = as_array(e, path + ".edges");
    if (arr.size() != 2) throw SchemaError(path + ".edges", "edge is not a pair");
    std::string a = as_string(arr[0], path), b = as_string(arr[1], path);
    if (!g.has_node(a) || !g.has_node(b))
      throw SchemaError(path + ".edges", "edge endpoint missing: " + a + "," + b);
    g.add_edge(a, b);
  }
  return g;
}

// ---- capability sets ----

inline json caps_to_json(const CapabilitySet& c) {
  json out = json::array();
  for (const auto& t : c.tokens) out.push_back(t);
  return out;
}

inline CapabilitySet caps_from_json(const json& j, const std::string& path) {
  CapabilitySet out;
  for (const auto& t : as_array(j, path)) out.insert(as_string(t, path));
  return out;
}

inline json string_map_to_json(const std::map<std::string, std::string>& m) {
  json out = json::object();
  for (const auto& [k, v] : m) out[k] = v;
  return out;
}

} // namespace ser_detail

// --------------------------------------------------------------------------
// serialize
// --------------------------------------------------------------------------

inline std::string serialize(const Scenario& s) {
  using ser_detail::caps_to_json;
  using ser_detail::graph_to_json;
  using ser_detail::json;
  using ser_detail::string_map_to_json;

  json root;
  root["schema_version"] = s.schema_version;

  {
    json p;
    p["topology_digest"] = s.provenance.topology_digest;
    p["style_digests"] = string_map_to_json(s.provenance.style_digests);
    p["topology_index"] = s.provenance.topology_index;
    json subs = json::object();
    for (const auto& [k, v] : s.provenance.subsystem_indices) subs[k] = v;
    p["subsystem_indices"] = subs;
    p["seed"] = s.provenance.seed;
    root["provenance"] = p;
  }

  {
    json env;
    env["topology"] = {
        {"graph", graph_to_json(s.environment.topology.graph)},
        {"subsystem_style",
         string_map_to_json(s.environment.topology.subsystem_style)}};
    json subsystems = json::object();
    for (const auto& [sid, sub] : s.environment.subsystems) {
      json sj;
      sj["style"] = sub.style_name;
      sj["graph"] = graph_to_json(sub.graph);
      json comps = json::array();
      for (const auto& c : sub.components)
        comps.push_back(
            {{"id", c.id}, {"role", c.role}, {"entrypoint", c.entrypoint}});
      sj["components"] = comps;
      json ifaces = json::array();
      for (const auto& i : sub.interfaces)
        ifaces.push_back({{"id", i.id},
                          {"owner", i.owner},
                          {"product", i.product},
                          {"interaction_req", caps_to_json(i.interaction_req)}});
      sj["interfaces"] = ifaces;
      json vulns = json::array();
      for (const auto& v : sub.vulnerabilities)
        vulns.push_back({{"id", v.id},
                         {"interface", v.interface_id},
                         {"name", v.vuln_name},
                         {"exploit_req", caps_to_json(v.exploit_req)},
                         {"exploit_gain", caps_to_json(v.exploit_gain)}});
      sj["vulnerabilities"] = vulns;
      subsystems[sid] = sj;
    }
    env["subsystems"] = subsystems;
    json connectors = json::object();
    for (const auto& [cid, det] : s.environment.connectors) {
      json cj;
      cj["profile"] = det.profile;
      cj["os"] = det.os;
      json services = json::array();
      for (const auto& svc : det.services)
        services.push_back(
            {{"name", svc.name},
             {"interaction_req", caps_to_json(svc.interaction_req)}});
      cj["services"] = services;
      json vulns = json::array();
      for (const auto& v : det.vulnerabilities)
        vulns.push_back({{"name", v.name},
                         {"service", v.service},
                         {"exploit_req", caps_to_json(v.exploit_req)},
                         {"exploit_gain", caps_to_json(v.exploit_gain)}});
      cj["vulnerabilities"] = vulns;
      json rules = json::array();
      for (const auto& r : det.firewall_rules)
        rules.push_back({{"a", r.style_a}, {"b", r.style_b}, {"allow", r.allow}});
      cj["firewall_rules"] = rules;
      connectors[cid] = cj;
    }
    env["connectors"] = connectors;
    env["provenance"] = {{"topology_index", s.environment.provenance.topology_index},
                         {"subsystem_indices", [&] {
                            json m = json::object();
                            for (const auto& [k, v] :
                                 s.environment.provenance.subsystem_indices)
                              m[k] = v;
                            return m;
                          }()},
                         {"seed", s.environment.provenance.seed}};
    root["environment"] = env;
  }

  {
    json hl;
    hl["graph"] = graph_to_json(s.high_level.graph);
    hl["subsystem_style"] = string_map_to_json(s.high_level.subsystem_style);
    json locks = json::array();
    for (const auto& l : s.high_level.locks) {
      json lj = {{"id", l.id}, {"connector", l.connector}};
      json red = json::array();
      for (const auto& r : l.redirected) red.push_back(r);
      lj["redirected"] = red;
      locks.push_back(lj);
    }
    hl["locks"] = locks;
    json keys = json::array();
    for (const auto& k : s.high_level.keys)
      keys.push_back({{"id", k.id},
                      {"lock", k.lock_id},
                      {"subsystem", k.subsystem},
                      {"capability", k.capability}});
    hl["keys"] = keys;
    hl["start_subsystem"] = s.high_level.start_subsystem;
    json objectives = json::array();
    for (const auto& o : s.high_level.objectives)
      objectives.push_back({{"id", o.id},
                            {"subsystem", o.subsystem},
                            {"capability", o.capability}});
    hl["objectives"] = objectives;
    root["high_level"] = hl;
  }

  auto task_to_json = [](const Task& t) {
    json tj;
    tj["id"] = t.id;
    tj["prereq"] = caps_to_json(t.prereq);
    json actions = json::array();
    for (const auto& a : t.actions)
      actions.push_back({{"verb", action_verb_name(a.verb)}, {"target", a.target}});
    tj["actions"] = actions;
    tj["reward"] = caps_to_json(t.reward);
    tj["base_cost"] = t.base_cost;
    tj["success_prob"] = t.success_prob;
    tj["subsystem"] = t.subsystem;
    return tj;
  };
  auto quest_to_json = [](const Quest& q) {
    json qj;
    qj["id"] = q.id;
    qj["kind"] = q.kind == Quest::Kind::Key ? "key" : "objective";
    qj["reward_capability"] = q.reward_capability;
    json chain = json::array();
    for (const auto& id : q.chain) chain.push_back(id);
    qj["chain"] = chain;
    qj["target"] = q.target;
    qj["subsystem"] = q.subsystem;
    qj["component"] = q.culminating_component;
    return qj;
  };

  {
    json ll = json::object();
    for (const auto& [sid, lls] : s.low_level) {
      json lj;
      lj["graph"] = graph_to_json(lls.graph);
      json tasks = json::array();
      for (const auto& t : lls.tasks) tasks.push_back(task_to_json(t));
      lj["tasks"] = tasks;
      json quests = json::array();
      for (const auto& q : lls.quests) quests.push_back(quest_to_json(q));
      lj["quests"] = quests;
      ll[sid] = lj;
    }
    root["low_level"] = ll;
  }

  {
    json tasks = json::array();
    for (const auto& t : s.tasks) tasks.push_back(task_to_json(t));
    root["tasks"] = tasks;
    json quests = json::array();
    for (const auto& q : s.quests) quests.push_back(quest_to_json(q));
    root["quests"] = quests;
  }

  {
    json cj;
    cj["mode"] = s.config.mode == SimMode::HighLevel ? "high" : "detailed";
    json overrides = json::object();
    for (const auto& [k, v] : s.config.success_prob_overrides) overrides[k] = v;
    cj["success_prob_overrides"] = overrides;
    cj["default_quest_success_prob"] = s.config.default_quest_success_prob;
    cj["monitor_false_negative_prob"] = s.config.monitor_false_negative_prob;
    json costs = json::object();
    for (const auto& [k, v] : s.config.action_costs) costs[k] = v;
    cj["action_costs"] = costs;
    cj["red_budget"] = s.config.red_budget;
    cj["blue_budget"] = s.config.blue_budget;
    cj["seed"] = s.config.seed;
    root["config"] = cj;
  }

  return root.dump(2) + "\n";
}

// --------------------------------------------------------------------------
// deserialize
// --------------------------------------------------------------------------

inline Scenario deserialize(const std::string& bytes) {
  using namespace ser_detail;
  json root = json::parse(bytes, nullptr, /*allow_exceptions=*/false);
  if (root.is_discarded()) throw SchemaError("$", "not valid JSON");

  Scenario s;
  s.schema_version = as_string(field(root, "schema_version", "$"), "$.schema_version");
  if (s.schema_version != "1")
    throw SchemaError("$.schema_version",
                      "unsupported version '" + s.schema_version + "'");

  {
    const auto& p = field(root, "provenance", "$");
    s.provenance.topology_digest =
        as_string(field(p, "topology_digest", "$.provenance"), "$.provenance");
    for (const auto& [k, v] :
         field(p, "style_digests", "$.provenance").items())
      s.provenance.style_digests[k] = as_string(v, "$.provenance.style_digests");
    s.provenance.topology_index = static_cast<std::size_t>(
        as_u64(field(p, "topology_index", "$.provenance"), "$.provenance"));
    for (const auto& [k, v] :
         field(p, "subsystem_indices", "$.provenance").items())
      s.provenance.subsystem_indices[k] = static_cast<std::size_t>(
          as_u64(v, "$.provenance.subsystem_indices"));
    s.provenance.seed = as_u64(field(p, "seed", "$.provenance"), "$.provenance");
  }

  {
    const auto& env = field(root, "environment", "$");
    const auto& topo = field(env, "topology", "$.environment");
    s.environment.topology.graph = graph_from_json(
        field(topo, "graph", "$.environment.topology"), "$.environment.topology");
    for (const auto& [k, v] :
         field(topo, "subsystem_style", "$.environment.topology").items())
      s.environment.topology.subsystem_style[k] =
          as_string(v, "$.environment.topology.subsystem_style");

    for (const auto& [sid, sj] :
         field(env, "subsystems", "$.environment").items()) {
      const std::string path = "$.environment.subsystems." + sid;
      SubsystemGraph sub;
      sub.subsystem_id = sid;
      sub.style_name = as_string(field(sj, "style", path), path);
      sub.graph = graph_from_json(field(sj, "graph", path), path);
      for (const auto& c : as_array(field(sj, "components", path), path)) {
        ComponentNode node;
        node.id = as_string(field(c, "id", path), path);
        node.role = as_string(field(c, "role", path), path);
        node.entrypoint = as_bool(field(c, "entrypoint", path), path);
        sub.components.push_back(std::move(node));
      }
      for (const auto& i : as_array(field(sj, "interfaces", path), path)) {
        InterfaceNode node;
        node.id = as_string(field(i, "id", path), path);
        node.owner = as_string(field(i, "owner", path), path);
        node.product = as_string(field(i, "product", path), path);
        node.interaction_req =
            caps_from_json(field(i, "interaction_req", path), path);
        sub.interfaces.push_back(std::move(node));
      }
      for (const auto& v : as_array(field(sj, "vulnerabilities", path), path)) {
        VulnerabilityNode node;
        node.id = as_string(field(v, "id", path), path);
        node.interface_id = as_string(field(v, "interface", path), path);
        node.vuln_name = as_string(field(v, "name", path), path);
        node.exploit_req = caps_from_json(field(v, "exploit_req", path), path);
        node.exploit_gain = caps_from_json(field(v, "exploit_gain", path), path);
        sub.vulnerabilities.push_back(std::move(node));
      }
      s.environment.subsystems.emplace(sid, std::move(sub));
    }

    for (const auto& [cid, cj] :
         field(env, "connectors", "$.environment").items()) {
      const std::string path = "$.environment.connectors." + cid;
      ConnectorDetail det;
      det.connector_id = cid;
      det.profile = as_string(field(cj, "profile", path), path);
      det.os = as_string(field(cj, "os", path), path);
      for (const auto& svc : as_array(field(cj, "services", path), path)) {
        RouterService service;
        service.name = as_string(field(svc, "name", path), path);
        service.interaction_req =
            caps_from_json(field(svc, "interaction_req", path), path);
        det.services.push_back(std::move(service));
      }
      for (const auto& v : as_array(field(cj, "vulnerabilities", path), path)) {
        RouterVulnerability vuln;
        vuln.name = as_string(field(v, "name", path), path);
        vuln.service = as_string(field(v, "service", path), path);
        vuln.exploit_req = caps_from_json(field(v, "exploit_req", path), path);
        vuln.exploit_gain = caps_from_json(field(v, "exploit_gain", path), path);
        det.vulnerabilities.push_back(std::move(vuln));
      }
      for (const auto& r : as_array(field(cj, "firewall_rules", path), path)) {
        FirewallRule rule;
        rule.style_a = as_string(field(r, "a", path), path);
        rule.style_b = as_string(field(r, "b", path), path);
        rule.allow = as_bool(field(r, "allow", path), path);
        det.firewall_rules.push_back(std::move(rule));
      }
      s.environment.connectors.emplace(cid, std::move(det));
    }

    const auto& ep = field(env, "provenance", "$.environment");
    s.environment.provenance.topology_index = static_cast<std::size_t>(
        as_u64(field(ep, "topology_index", "$.environment.provenance"),
               "$.environment.provenance"));
    for (const auto& [k, v] :
         field(ep, "subsystem_indices", "$.environment.provenance").items())
      s.environment.provenance.subsystem_indices[k] =
          static_cast<std::size_t>(as_u64(v, "$.environment.provenance"));
    s.environment.provenance.seed =
        as_u64(field(ep, "seed", "$.environment.provenance"),
               "$.environment.provenance");
  }

  {
    const auto& hl = field(root, "high_level", "$");
    s.high_level.graph =
        graph_from_json(field(hl, "graph", "$.high_level"), "$.high_level");
    for (const auto& [k, v] :
         field(hl, "subsystem_style", "$.high_level").items())
      s.high_level.subsystem_style[k] = as_string(v, "$.high_level");
    for (const auto& l : as_array(field(hl, "locks", "$.high_level"),
                                  "$.high_level.locks")) {
      LockInfo lock;
      lock.id = as_string(field(l, "id", "$.high_level.locks"), "$.high_level");
      lock.connector =
          as_string(field(l, "connector", "$.high_level.locks"), "$.high_level");
      for (const auto& r : as_array(field(l, "redirected", "$.high_level.locks"),
                                    "$.high_level.locks"))
        lock.redirected.push_back(as_string(r, "$.high_level.locks"));
      s.high_level.locks.push_back(std::move(lock));
    }
    for (const auto& k :
         as_array(field(hl, "keys", "$.high_level"), "$.high_level.keys")) {
      KeyInfo key;
      key.id = as_string(field(k, "id", "$.high_level.keys"), "$.high_level");
      key.lock_id = as_string(field(k, "lock", "$.high_level.keys"), "$.high_level");
      key.subsystem =
          as_string(field(k, "subsystem", "$.high_level.keys"), "$.high_level");
      key.capability =
          as_string(field(k, "capability", "$.high_level.keys"), "$.high_level");
      s.high_level.keys.push_back(std::move(key));
    }
    s.high_level.start_subsystem =
        as_string(field(hl, "start_subsystem", "$.high_level"), "$.high_level");
    for (const auto& o : as_array(field(hl, "objectives", "$.high_level"),
                                  "$.high_level.objectives")) {
      ObjectiveInfo obj;
      obj.id = as_string(field(o, "id", "$.high_level.objectives"), "$.high_level");
      obj.subsystem = as_string(field(o, "subsystem", "$.high_level.objectives"),
                                "$.high_level");
      obj.capability = as_string(field(o, "capability", "$.high_level.objectives"),
                                 "$.high_level");
      s.high_level.objectives.push_back(std::move(obj));
    }
  }

  auto task_from_json = [](const json& tj, const std::string& path) {
    Task t;
    t.id = as_string(field(tj, "id", path), path);
    t.prereq = caps_from_json(field(tj, "prereq", path), path);
    for (const auto& a : as_array(field(tj, "actions", path), path)) {
      ActionSpec spec;
      std::string verb = as_string(field(a, "verb", path), path);
      bool known = false;
      for (ActionVerb v : {ActionVerb::Scan, ActionVerb::Pivot, ActionVerb::Exploit,
                           ActionVerb::Interact, ActionVerb::Collect,
                           ActionVerb::Complete})
        if (verb == action_verb_name(v)) {
          spec.verb = v;
          known = true;
        }
      if (!known) throw SchemaError(path + ".actions", "unknown verb " + verb);
      spec.target = as_string(field(a, "target", path), path);
      t.actions.push_back(std::move(spec));
    }
    t.reward = caps_from_json(field(tj, "reward", path), path);
    t.base_cost = as_double(field(tj, "base_cost", path), path);
    t.success_prob = as_double(field(tj, "success_prob", path), path);
    t.subsystem = as_string(field(tj, "subsystem", path), path);
    return t;
  };
  auto quest_from_json = [](const json& qj, const std::string& path) {
    Quest q;
    q.id = as_string(field(qj, "id", path), path);
    std::string kind = as_string(field(qj, "kind", path), path);
    if (kind == "key") q.kind = Quest::Kind::Key;
    else if (kind == "objective") q.kind = Quest::Kind::Objective;
    else throw SchemaError(path + ".kind", "unknown quest kind " + kind);
    q.reward_capability = as_string(field(qj, "reward_capability", path), path);
    for (const auto& id : as_array(field(qj, "chain", path), path))
      q.chain.push_back(as_string(id, path));
    q.target = as_string(field(qj, "target", path), path);
    q.subsystem = as_string(field(qj, "subsystem", path), path);
    q.culminating_component = as_string(field(qj, "component", path), path);
    return q;
  };

  for (const auto& [sid, lj] : field(root, "low_level", "$").items()) {
    const std::string path = "$.low_level." + sid;
    LowLevelStoryline ll;
    ll.subsystem_id = sid;
    ll.graph = graph_from_json(field(lj, "graph", path), path);
    for (const auto& t : as_array(field(lj, "tasks", path), path))
      ll.tasks.push_back(task_from_json(t, path + ".tasks"));
    for (const auto& q : as_array(field(lj, "quests", path), path))
      ll.quests.push_back(quest_from_json(q, path + ".quests"));
    s.low_level.emplace(sid, std::move(ll));
  }

  for (const auto& t : as_array(field(root, "tasks", "$"), "$.tasks"))
    s.tasks.push_back(task_from_json(t, "$.tasks"));
  for (const auto& q : as_array(field(root, "quests", "$"), "$.quests"))
    s.quests.push_back(quest_from_json(q, "$.quests"));

  {
    const auto& cj = field(root, "config", "$");
    std::string mode = as_string(field(cj, "mode", "$.config"), "$.config.mode");
    if (mode == "high") s.config.mode = SimMode::HighLevel;
    else if (mode == "detailed") s.config.mode = SimMode::Detailed;
    else throw SchemaError("$.config.mode", "unknown mode " + mode);
    for (const auto& [k, v] :
         field(cj, "success_prob_overrides", "$.config").items())
      s.config.success_prob_overrides[k] = as_double(v, "$.config");
    s.config.default_quest_success_prob = as_double(
        field(cj, "default_quest_success_prob", "$.config"), "$.config");
    s.config.monitor_false_negative_prob = as_double(
        field(cj, "monitor_false_negative_prob", "$.config"), "$.config");
    for (const auto& [k, v] : field(cj, "action_costs", "$.config").items())
      s.config.action_costs[k] = as_double(v, "$.config");
    s.config.red_budget = as_double(field(cj, "red_budget", "$.config"), "$.config");
    s.config.blue_budget =
        as_double(field(cj, "blue_budget", "$.config"), "$.config");
    s.config.seed = as_u64(field(cj, "seed", "$.config"), "$.config");
  }

  // Cross-reference validation: every quest chain entry resolves to a task.
  for (const auto& q : s.quests)
    for (const auto& id : q.chain)
      if (!s.find_task(id))
        throw SchemaError("$.quests", "chain task '" + id + "' not in task table");
  for (const auto& k : s.high_level.keys)
    if (!s.quest_for_target(k.id))
      throw SchemaError("$.high_level.keys", "key without quest: " + k.id);
  for (const auto& o : s.high_level.objectives)
    if (!s.quest_for_target(o.id))
      throw SchemaError("$.high_level.objectives",
                        "objective without quest: " + o.id);
  return s;
}

} // namespace scenforge
