// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "actorforge/dsl/ast.hpp"
#include "actorforge/token.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace actorforge::dsl {

struct InstanceDecl {
  std::string name;
  std::string actor;
  uint256 balance;  // initial native balance, wei
  SourceSpan span;
};

struct PortRef {
  std::string instance;
  std::string port;
  SourceSpan span;

  std::string str() const { return instance + "." + port; }
};

/// Point-to-point buffer from an output port to an input port.
struct ConnectionDecl {
  PortRef from;
  PortRef to;
  std::optional<std::size_t> capacity;
  SourceSpan span;
};

/// Tokens placed on an input port's buffer before the first firing.
struct FeedDecl {
  PortRef target;
  std::vector<TokenValue> tokens;
  SourceSpan span;
};

struct NetworkDecl {
  std::string name;
  std::vector<std::string> imports;
  std::vector<InstanceDecl> instances;
  std::vector<ConnectionDecl> connections;
  std::vector<FeedDecl> feeds;
  std::vector<std::string> victims;
  std::map<std::string, ActorDecl> actors;  // resolved, keyed by actor name
  SourceSpan span;

  const InstanceDecl* find_instance(std::string_view name) const;
};

/// Loads the actor behind an `import "path"` line.
using ActorLoader = std::function<ActorDecl(const std::string& import_path, const SourceSpan& at)>;

/// Parses a `.network` file and validates it against the imported actors.
/// Throws ParseError on syntax errors and ConnectError on dangling ports,
/// direction or type mismatches, and fan-in / fan-out.
NetworkDecl parse_network(std::string_view source, const std::string& file, const ActorLoader& loader);

/// Reads `path`; imports resolve relative to its directory.
NetworkDecl load_network(const std::filesystem::path& path);

}  // namespace actorforge::dsl
