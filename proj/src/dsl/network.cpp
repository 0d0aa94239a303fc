// SPDX-License-Identifier: Apache-2.0
#include "actorforge/dsl/network.hpp"

#include "actorforge/dsl/frontend.hpp"
#include "actorforge/lexer.hpp"

#include <array>
#include <set>

namespace actorforge::dsl {

namespace {

constexpr std::array<std::string_view, 14> kNetworkKeywords = {
    "network", "import", "instance", "balance", "connect", "capacity", "feed",
    "victim",  "end",    "msg",      "true",    "false",   "ether",    "wei"};

class NetworkParser {
 public:
  NetworkParser(std::vector<Token> tokens, std::string file) : ts_(std::move(tokens), std::move(file)) {}

  NetworkDecl run() {
    NetworkDecl n;
    n.span = ts_.expect_keyword("network").span;
    n.name = ts_.expect_kind(TokenKind::Identifier, "network name").text;
    while (!ts_.at_keyword("end")) {
      if (ts_.accept_keyword("import")) {
        n.imports.push_back(ts_.expect_kind(TokenKind::String, "quoted path").text);
        import_spans_.push_back(ts_.previous().span);
      } else if (ts_.at_keyword("instance")) {
        InstanceDecl inst;
        inst.span = ts_.advance().span;
        inst.name = ts_.expect_kind(TokenKind::Identifier, "instance name").text;
        ts_.expect_symbol(":");
        inst.actor = ts_.expect_kind(TokenKind::Identifier, "actor name").text;
        if (ts_.accept_keyword("balance")) inst.balance = parse_amount();
        n.instances.push_back(std::move(inst));
      } else if (ts_.at_keyword("connect")) {
        ConnectionDecl c;
        c.span = ts_.advance().span;
        c.from = parse_port_ref();
        ts_.expect_symbol("->");
        c.to = parse_port_ref();
        if (ts_.accept_keyword("capacity")) {
          const Token& t = ts_.expect_kind(TokenKind::Number, "capacity");
          auto v = parse_decimal(t.text);
          if (!v || *v == 0 || *v > 1'000'000) ts_.fail(t.span, "capacity must be in 1..1000000");
          c.capacity = static_cast<std::size_t>(*v);
        }
        n.connections.push_back(std::move(c));
      } else if (ts_.at_keyword("feed")) {
        FeedDecl f;
        f.span = ts_.advance().span;
        f.target = parse_port_ref();
        do {
          f.tokens.push_back(parse_token());
        } while (ts_.accept_symbol(","));
        n.feeds.push_back(std::move(f));
      } else if (ts_.accept_keyword("victim")) {
        n.victims.push_back(ts_.expect_kind(TokenKind::Identifier, "instance name").text);
        victim_spans_.push_back(ts_.previous().span);
      } else {
        ts_.fail();
      }
    }
    ts_.advance();
    if (!ts_.at_end()) ts_.fail(ts_.here(), "unexpected input after 'end' of network");
    return n;
  }

  std::vector<SourceSpan> import_spans_;
  std::vector<SourceSpan> victim_spans_;

 private:
  PortRef parse_port_ref() {
    PortRef r;
    const Token& inst = ts_.expect_kind(TokenKind::Identifier, "instance name");
    r.span = inst.span;
    r.instance = inst.text;
    ts_.expect_symbol(".");
    r.port = ts_.expect_kind(TokenKind::Identifier, "port name").text;
    return r;
  }

  uint256 parse_amount() {
    const Token& t = ts_.expect_kind(TokenKind::Number, "amount");
    if (ts_.accept_keyword("ether")) {
      if (auto v = parse_ether(t.text)) return *v;
      ts_.fail(t.span, "ether amount '" + t.text + "' is not exact in wei");
    }
    ts_.accept_keyword("wei");
    if (auto v = parse_decimal(t.text)) return *v;
    ts_.fail(t.span, "amount '" + t.text + "' must be a whole number of wei");
  }

  Address parse_address() {
    const Token& t = ts_.expect_kind(TokenKind::HexNumber, "address literal");
    if (auto a = Address::parse(t.text)) return *a;
    ts_.fail(t.span, "address literal '" + t.text + "' exceeds 20 bytes");
  }

  TokenValue parse_token() {
    if (ts_.accept_keyword("msg")) {
      ts_.expect_symbol("(");
      MsgToken m;
      m.sender = parse_address();
      ts_.expect_symbol(",");
      m.value = parse_amount();
      ts_.expect_symbol(")");
      return m;
    }
    if (ts_.accept_keyword("true")) return true;
    if (ts_.accept_keyword("false")) return false;
    if (ts_.at_kind(TokenKind::HexNumber, "address literal")) return parse_address();
    if (ts_.at_kind(TokenKind::Number, "number")) return parse_amount();
    ts_.fail();
  }

  TokenStream ts_;
};

Type token_type_of(const TokenValue& t) {
  switch (t.index()) {
    case 0: return Type::Uint;
    case 1: return Type::Bool;
    case 2: return Type::Address;
    default: return Type::Msg;
  }
}

class NetworkValidator {
 public:
  explicit NetworkValidator(NetworkDecl& n) : n_(n) {}

  std::vector<Diagnostic> run(const std::vector<SourceSpan>& victim_spans) {
    std::set<std::string> names;
    for (const auto& inst : n_.instances) {
      if (!names.insert(inst.name).second) error(inst.span, "duplicate instance '" + inst.name + "'");
      if (!n_.actors.count(inst.actor)) error(inst.span, "unknown actor '" + inst.actor + "'");
    }
    std::set<std::string> used_outputs, used_inputs;
    for (const auto& c : n_.connections) {
      const PortDecl* from = port(c.from);
      const PortDecl* to = port(c.to);
      if (from && from->direction != Direction::Output) {
        error(c.from.span, "'" + c.from.str() + "' is an input port and cannot start a connection");
        from = nullptr;
      }
      if (to && to->direction != Direction::Input) {
        error(c.to.span, "'" + c.to.str() + "' is an output port and cannot end a connection");
        to = nullptr;
      }
      if (from && !used_outputs.insert(c.from.str()).second) {
        error(c.from.span, "output '" + c.from.str() + "' is already connected (buffers are point-to-point)");
      }
      if (to && !used_inputs.insert(c.to.str()).second) {
        error(c.to.span, "input '" + c.to.str() + "' already has an incoming buffer (no fan-in)");
      }
      if (from && to && from->token_type != to->token_type) {
        error(c.span, "token type mismatch: " + c.from.str() + " carries " + std::string(to_string(from->token_type)) +
                          ", " + c.to.str() + " expects " + std::string(to_string(to->token_type)));
      }
    }
    for (const auto& f : n_.feeds) {
      const PortDecl* p = port(f.target);
      if (!p) continue;
      if (p->direction != Direction::Input) {
        error(f.target.span, "can only feed input ports, '" + f.target.str() + "' is an output");
        continue;
      }
      for (const auto& tok : f.tokens) {
        if (token_type_of(tok) != p->token_type) {
          error(f.span, "feed token " + describe(tok) + " does not match port type " +
                            std::string(to_string(p->token_type)));
        }
      }
    }
    for (std::size_t i = 0; i < n_.victims.size(); ++i) {
      if (!n_.find_instance(n_.victims[i])) {
        error(victim_spans[i], "victim '" + n_.victims[i] + "' is not an instance");
      }
    }
    return std::move(diags_);
  }

 private:
  void error(const SourceSpan& span, std::string message) {
    diags_.push_back(Diagnostic{span, Severity::Error, "ConnectError", std::move(message)});
  }

  const PortDecl* port(const PortRef& r) {
    const InstanceDecl* inst = n_.find_instance(r.instance);
    if (!inst) {
      error(r.span, "dangling port '" + r.str() + "': no instance '" + r.instance + "'");
      return nullptr;
    }
    auto it = n_.actors.find(inst->actor);
    if (it == n_.actors.end()) return nullptr;
    const PortDecl* p = it->second.find_port(r.port);
    if (!p) error(r.span, "dangling port '" + r.str() + "': actor " + inst->actor + " has no such port");
    return p;
  }

  NetworkDecl& n_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

const InstanceDecl* NetworkDecl::find_instance(std::string_view name) const {
  for (const auto& i : instances) {
    if (i.name == name) return &i;
  }
  return nullptr;
}

NetworkDecl parse_network(std::string_view source, const std::string& file, const ActorLoader& loader) {
  NetworkParser parser(lex(source, file, kNetworkKeywords), file);
  NetworkDecl n = parser.run();
  for (std::size_t i = 0; i < n.imports.size(); ++i) {
    ActorDecl a = loader(n.imports[i], parser.import_spans_[i]);
    if (n.actors.count(a.name)) {
      throw ConnectError(parser.import_spans_[i], "actor '" + a.name + "' imported twice");
    }
    std::string name = a.name;
    n.actors.emplace(std::move(name), std::move(a));
  }
  auto diags = NetworkValidator(n).run(parser.victim_spans_);
  if (!diags.empty()) throw ConnectError(std::move(diags));
  return n;
}

NetworkDecl load_network(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  const auto dir = path.parent_path();
  return parse_network(text, path.string(), [&](const std::string& import_path, const SourceSpan& at) {
    const auto full = dir / import_path;
    if (!std::filesystem::exists(full)) throw ConnectError(at, "cannot find imported actor '" + import_path + "'");
    return load_actor(full);
  });
}

}  // namespace actorforge::dsl
