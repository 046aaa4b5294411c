#include "catch_amalgamated.hpp"

#include "fixtures.hpp"
#include "scenforge/specdsl.hpp"

using namespace scenforge;

TEST_CASE("parse_topology accepts the collapsed-core example") {
  auto spec = parse_topology(fixtures::read_spec("collapsedcore.topo"));
  CHECK(spec.network_kind == NetworkKind::CollapsedCore);
  REQUIRE(spec.subsystems.size() == 3);
  CHECK(spec.subsystems[0].style == "ClientServer");
  CHECK(spec.subsystems[0].count == 1);
  CHECK(spec.subsystems[1].style == "Microservices");
  CHECK(spec.subsystems[2].style == "OAuth");
  REQUIRE(spec.constraints.size() == 3);
  CHECK(spec.constraints[0].kind == ConstraintDecl::Kind::Requires);
  CHECK(spec.constraints[0].args == std::vector<std::string>{"OAuth", "Microservices"});
  CHECK(spec.constraints[1].args == std::vector<std::string>{"OAuth", "ClientServer"});
  CHECK(spec.constraints[2].kind == ConstraintDecl::Kind::AllowRouting);
  CHECK(spec.constraints[2].args ==
        std::vector<std::string>{"Microservices", "ClientServer"});
}

TEST_CASE("parse_topology minimal flat network") {
  auto spec = parse_topology("Topology FlatNet\nSubsystem ClientServer:1");
  CHECK(spec.network_kind == NetworkKind::FlatNet);
  REQUIRE(spec.subsystems.size() == 1);
  CHECK(spec.constraints.empty());
}

TEST_CASE("parse_topology rejects undeclared constraint arguments") {
  CHECK_THROWS_AS(parse_topology("Topology CollapsedCore\nConstraint requires A B"),
                  UnknownReference);
  try {
    parse_topology("Topology CollapsedCore\nConstraint requires A B");
  } catch (const UnknownReference& e) {
    CHECK(e.name() == "A"); // first offending argument
    CHECK(e.line() == 2);
  }
}

TEST_CASE("parse_topology error taxonomy") {
  CHECK_THROWS_AS(parse_topology(""), SyntaxError);
  CHECK_THROWS_AS(parse_topology("Subsystem A:1"), SyntaxError);
  CHECK_THROWS_AS(parse_topology("Topology MeshNet"), SyntaxError);
  CHECK_THROWS_AS(parse_topology("Topology FlatNet\nFrobnicate X"), SyntaxError);
  CHECK_THROWS_AS(parse_topology("Topology FlatNet\nSubsystem A:0"), SyntaxError);
  CHECK_THROWS_AS(
      parse_topology("Topology FlatNet\nSubsystem A:1\nSubsystem A:2"),
      DuplicateDeclaration);
}

TEST_CASE("custom constraints are carried as raw text") {
  auto spec = parse_topology(
      "Topology CollapsedCore\nSubsystem A:1\nConstraint comes_before A A");
  REQUIRE(spec.constraints.size() == 1);
  CHECK(spec.constraints[0].kind == ConstraintDecl::Kind::Custom);
  CHECK(spec.constraints[0].raw_text == "comes_before A A");
}

TEST_CASE("parse_archstyle accepts the small client/server example") {
  auto spec = parse_archstyle(fixtures::read_spec("clientserver_small.style"));
  CHECK(spec.name == "ClientServerSmall");
  REQUIRE(spec.roles.size() == 2);
  CHECK(spec.roles[0].name == "WebServer");
  CHECK(spec.roles[0].count == 1);
  CHECK(spec.roles[1].count == 2);

  const auto* runas = spec.find_feature("RunAs");
  REQUIRE(runas != nullptr);
  CHECK(runas->owning_roles == std::vector<std::string>{"WebServer", "WebClient"});

  const auto* sudo = spec.find_interface("Sudo");
  REQUIRE(sudo != nullptr);
  CHECK(sudo->interaction_req.tokens == std::set<std::string>{"InitialAccess"});

  REQUIRE(spec.vulnerabilities.size() == 2);
  CHECK(spec.vulnerabilities[1].name == "SudoPwn");
  CHECK(spec.vulnerabilities[1].interface_name == "Sudo");
  CHECK(spec.vulnerabilities[1].exploit_req.tokens ==
        std::set<std::string>{"InitialAccess"});
  CHECK(spec.vulnerabilities[1].exploit_gain.tokens ==
        std::set<std::string>{"RootAccess"});
  CHECK(spec.entrypoints == std::vector<std::string>{"WebServer"});
}

TEST_CASE("capability token 0 is the empty set") {
  auto spec = parse_archstyle(
      "ArchStyle X\nRole R:1\nFeature F:R\nInterface I:F 0\nEntrypoint R");
  REQUIRE(spec.interfaces.size() == 1);
  CHECK(spec.interfaces[0].interaction_req.empty());
}

TEST_CASE("parse_archstyle rejects dangling interface references") {
  std::string text = fixtures::read_spec("clientserver_small.style") +
                     "Vulnerability Z Ghost 0 0\n";
  CHECK_THROWS_AS(parse_archstyle(text), UnknownReference);
  try {
    parse_archstyle(text);
  } catch (const UnknownReference& e) {
    CHECK(e.name() == "Ghost");
  }
}

TEST_CASE("parse_archstyle duplicate declarations") {
  CHECK_THROWS_AS(
      parse_archstyle("ArchStyle X\nRole R:1\nRole R:2\nFeature F:R\n"
                      "Interface I:F 0\nEntrypoint R"),
      DuplicateDeclaration);
  CHECK_THROWS_AS(
      parse_archstyle("ArchStyle X\nRole R:1\nFeature F:R\nFeature F:R\n"
                      "Interface I:F 0\nEntrypoint R"),
      DuplicateDeclaration);
  CHECK_THROWS_AS(
      parse_archstyle("ArchStyle X\nRole R:1\nFeature F:R\nInterface I:F 0\n"
                      "Interface I:F 0\nEntrypoint R"),
      DuplicateDeclaration);
}

TEST_CASE("comments and blank lines never affect the AST") {
  std::string plain = fixtures::read_spec("collapsedcore.topo");
  std::string noisy = "// header comment\n\n" + plain + "\n  // trailing\n\n";
  CHECK(parse_topology(plain) == parse_topology(noisy));
}

TEST_CASE("pretty-print round trips to a structurally equal AST") {
  for (const char* name : {"clientserver.style", "oauth.style",
                           "microservices.style", "clientserver_small.style"}) {
    auto spec = parse_archstyle(fixtures::read_spec(name));
    CHECK(parse_archstyle(pretty_print(spec)) == spec);
  }
  for (const char* name : {"collapsedcore.topo", "flatnet.topo", "fivesub.topo"}) {
    auto spec = parse_topology(fixtures::read_spec(name));
    CHECK(parse_topology(pretty_print(spec)) == spec);
  }
}

TEST_CASE("parsing is deterministic") {
  std::string text = fixtures::read_spec("oauth.style");
  CHECK(parse_archstyle(text) == parse_archstyle(text));
}

TEST_CASE("validate_repertoire") {
  auto topo = parse_topology(fixtures::read_spec("collapsedcore.topo"));
  std::map<std::string, ArchStyleSpec> styles;
  for (const char* name :
       {"clientserver.style", "oauth.style", "microservices.style"}) {
    auto s = parse_archstyle(fixtures::read_spec(name));
    styles.emplace(s.name, std::move(s));
  }
  CHECK(validate_repertoire(topo, styles).empty());

  auto missing = styles;
  missing.erase("OAuth");
  auto diags = validate_repertoire(topo, missing);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].code == Diagnostic::Code::MissingStyle);
  CHECK(diags[0].subject == "OAuth");

  TopologySpec empty;
  empty.network_kind = NetworkKind::CollapsedCore;
  CHECK(validate_repertoire(empty, {}).empty());
}

TEST_CASE("style_diagnostics flags structural deficits") {
  auto no_feature = parse_archstyle(
      "ArchStyle X\nRole R:1\nRole Lonely:1\nFeature F:R\nInterface I:F 0\n"
      "Map R R SomeToSome\nEntrypoint R");
  auto diags = style_diagnostics(no_feature);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].code == Diagnostic::Code::RoleWithoutFeature);

  auto no_iface = parse_archstyle(
      "ArchStyle X\nRole R:1\nFeature F:R\nFeature G:R\nInterface I:F 0\n"
      "Entrypoint R");
  bool found = false;
  for (const auto& d : style_diagnostics(no_iface))
    if (d.code == Diagnostic::Code::FeatureWithoutInterface) found = true;
  CHECK(found);

  auto no_entry = parse_archstyle(
      "ArchStyle X\nRole R:1\nFeature F:R\nInterface I:F 0");
  found = false;
  for (const auto& d : style_diagnostics(no_entry))
    if (d.code == Diagnostic::Code::NoEntrypoint) found = true;
  CHECK(found);
}
