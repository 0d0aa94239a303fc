// SPDX-License-Identifier: Apache-2.0
#include "actorforge/dsl/frontend.hpp"
#include "actorforge/dsl/network.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

using namespace actorforge;
using namespace actorforge::dsl;

namespace {

const std::filesystem::path kFixtures = FIXTURE_DIR;

std::string fixture_text(const std::string& name) { return read_text_file(kFixtures / name); }

std::vector<Diagnostic> resolve_errors(std::string_view src) {
  ActorDecl d = parse_actor_source(src, "t.actor");
  return resolve_in_place(d);
}

std::string first_code(std::string_view src) {
  auto diags = resolve_errors(src);
  return diags.empty() ? "" : diags.front().code;
}

const char* const kActorFixtures[] = {"dao.actor",   "dao_update_first.actor", "attacker.actor",
                                      "copy.actor",  "alt.actor",              "cyclic.actor",
                                      "empty.actor", "ambiguous_emit.actor"};

}  // namespace

TEST(Tokenize, Examples) {
  auto toks = tokenize("actor Dao");
  ASSERT_EQ(toks.size(), 2u);
  EXPECT_EQ(toks[0].kind, TokenKind::Keyword);
  EXPECT_EQ(toks[0].text, "actor");
  EXPECT_EQ(toks[1].kind, TokenKind::Identifier);
  EXPECT_EQ(toks[1].text, "Dao");
  EXPECT_TRUE(tokenize("").empty());
  try {
    tokenize("1_000 @");
    FAIL();
  } catch (const LexError& e) {
    EXPECT_EQ(e.first().span.column, 7);
  }
}

TEST(ParseActor, DaoFixtureShape) {
  ActorDecl d = parse_actor_source(fixture_text("dao.actor"), "dao.actor");
  EXPECT_EQ(d.name, "Dao");
  EXPECT_EQ(d.actions.size(), 2u);
  EXPECT_EQ(d.state_vars.size(), 1u);
  EXPECT_EQ(d.inputs.size(), 1u);
  EXPECT_EQ(d.outputs.size(), 1u);
  EXPECT_EQ(d.state_vars[0].var_type, Type::Map);
  EXPECT_EQ(d.actions[1].guards.size(), 2u);
  EXPECT_EQ(d.span.file, "dao.actor");
  EXPECT_EQ(d.actions[0].span.line, 9);
}

TEST(ParseActor, EmptyActor) {
  ActorDecl d = parse_actor_source("actor Empty end");
  EXPECT_TRUE(d.inputs.empty());
  EXPECT_TRUE(d.outputs.empty());
  EXPECT_TRUE(d.actions.empty());
}

TEST(ParseActor, EtherLiteralsAreExactWei) {
  ActorDecl d = parse_actor_source(
      "actor A in p : uint out q : uint action a consume p emit q(1 ether, 0.5 ether, 7 wei, 1_000) end end");
  const auto& vals = std::get<Emit>(d.actions[0].body[0]).values;
  ASSERT_EQ(vals.size(), 4u);
  EXPECT_EQ(std::get<IntLit>(vals[0].node).value, wei_per_ether());
  EXPECT_EQ(std::get<IntLit>(vals[1].node).value, wei_per_ether() / 2);
  EXPECT_EQ(std::get<IntLit>(vals[2].node).value, 7);
  EXPECT_EQ(std::get<IntLit>(vals[3].node).value, 1000);
  EXPECT_THROW(parse_actor_source("actor A state x : uint = 1.5 end"), ParseError);
}

TEST(ParseActor, SyntaxErrorListsExpectedTokens) {
  try {
    parse_actor_source(fixture_text("bad_syntax.actor"), "bad_syntax.actor");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    const auto& d = e.first();
    EXPECT_EQ(d.code, "ParseError");
    EXPECT_EQ(d.span.line, 6);
    EXPECT_NE(d.message.find("expected"), std::string::npos) << d.message;
    EXPECT_NE(d.message.find("port name"), std::string::npos) << d.message;
  }
}

TEST(ParseActor, PrecedenceAndAssociativity) {
  ActorDecl d = parse_actor_source("actor A state x : uint = 1 + 2 * 3 - 4 end");
  EXPECT_EQ(unparse(*d.state_vars[0].initializer), "1 + 2 * 3 - 4");
  const auto& top = std::get<Binary>(d.state_vars[0].initializer->node);
  EXPECT_EQ(top.op, BinaryOp::Sub);
  ActorDecl g = parse_actor_source("actor A state b : bool = not true or false and true end");
  const auto& orr = std::get<Binary>(g.state_vars[0].initializer->node);
  EXPECT_EQ(orr.op, BinaryOp::Or);
  EXPECT_TRUE(std::holds_alternative<Unary>(orr.lhs->node));
  EXPECT_THROW(parse_actor_source("actor A state b : bool = 1 < 2 < 3 end"), ParseError);
}

TEST(Resolve, FixturesAreClean) {
  for (const char* f : kActorFixtures) {
    ActorDecl d = parse_actor_source(fixture_text(f), f);
    auto diags = resolve_in_place(d);
    EXPECT_TRUE(diags.empty()) << f << ": " << (diags.empty() ? "" : render(diags[0]));
  }
}

TEST(Resolve, UnboundGuardIsAcceptedByParseRejectedByResolve) {
  ActorDecl d = parse_actor_source(fixture_text("unbound_guard.actor"), "unbound_guard.actor");
  auto diags = resolve_in_place(d);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].code, "NameError");
  EXPECT_EQ(diags[0].span.line, 8);
  EXPECT_EQ(diags[0].span.column, 11);
  EXPECT_THROW(resolve(parse_actor_source(fixture_text("unbound_guard.actor"))), ResolveError);
}

TEST(Resolve, GuardComparisonTypedBool) {
  ActorDecl d = parse_actor_source(
      "actor A in r : msg state balances : map(address -> uint) state amount : uint "
      "action a consume r guard balances[sender] >= amount end end");
  ASSERT_TRUE(resolve_in_place(d).empty());
  const Expr& g = d.actions[0].guards[0];
  EXPECT_EQ(g.type, Type::Bool);
  const auto& cmp = std::get<Binary>(g.node);
  EXPECT_EQ(std::get<Index>(cmp.lhs->node).binding, Binding::State);
  EXPECT_EQ(cmp.lhs->type, Type::Uint);
  EXPECT_EQ(std::get<NameRef>(cmp.rhs->node).binding, Binding::State);
}

TEST(Resolve, DirectionErrors) {
  // body reading a port
  EXPECT_EQ(first_code("actor A in p : uint out q : uint action a consume p [x] emit q(p) end end"),
            "DirectionError");
  // emitting on an input port
  EXPECT_EQ(first_code("actor A in p : uint action a consume p [x] emit p(x) end end"), "DirectionError");
  // consuming an output port
  EXPECT_EQ(first_code("actor A out q : uint action a consume q end end"), "DirectionError");
  // assigning a port
  EXPECT_EQ(first_code("actor A in p : uint action a consume p [x] do p := x end end"), "DirectionError");
}

TEST(Resolve, TypeAndNameErrors) {
  EXPECT_EQ(first_code("actor A state x : uint state b : bool action a do x := x + b end end"), "TypeError");
  EXPECT_EQ(first_code("actor A state x : uint action a guard x end end"), "TypeError");
  EXPECT_EQ(first_code("actor A state x : uint action a do y := 1 end end"), "NameError");
  EXPECT_EQ(first_code("actor A state x : uint state x : bool end"), "NameError");
  EXPECT_EQ(first_code("actor A state m : map(address -> uint) action a do m := 1 end end"), "TypeError");
  EXPECT_EQ(first_code("actor A state x : uint = x end"), "TypeError");  // not a constant
  // a local is not visible to guards
  EXPECT_EQ(first_code("actor A state x : uint action a guard t > 0 let t := 1 end end"), "NameError");
}

TEST(Resolve, ResolutionSoundnessOnFixtures) {
  for (const char* f : kActorFixtures) {
    ActorDecl d = resolve(parse_actor_source(fixture_text(f), f));
    auto check = [&](const Expr& root) {
      visit_exprs(root, [&](const Expr& e) {
        EXPECT_TRUE(e.type.has_value()) << f << ": untyped " << unparse(e);
        if (auto* n = std::get_if<NameRef>(&e.node)) EXPECT_NE(n->binding, Binding::Unresolved) << f;
        if (auto* i = std::get_if<Index>(&e.node)) EXPECT_NE(i->binding, Binding::Unresolved) << f;
      });
    };
    for (const auto& a : d.actions) {
      for (const auto& g : a.guards) check(g);
      for (const auto& st : a.body) {
        if (auto* s = std::get_if<Assign>(&st)) {
          check(s->value);
          if (s->key) check(*s->key);
        } else if (auto* l = std::get_if<Let>(&st)) {
          check(l->value);
        } else {
          for (const auto& v : std::get<Emit>(st).values) check(v);
        }
      }
    }
  }
}

TEST(RoundTrip, Fixtures) {
  for (const char* f : kActorFixtures) {
    ActorDecl a = parse_actor_source(fixture_text(f), f);
    std::string text = unparse(a);
    ActorDecl b = parse_actor_source(text, f);
    EXPECT_TRUE(structurally_equal(a, b)) << f << "\n" << text;
    EXPECT_EQ(unparse(b), text) << f;
  }
}

TEST(Determinism, SameBytesSameAst) {
  for (const char* f : kActorFixtures) {
    EXPECT_EQ(parse_actor_source(fixture_text(f), f), parse_actor_source(fixture_text(f), f));
  }
}

namespace {

// Random actor ASTs over the full surface syntax. Names avoid keywords by
// construction (v0, p0, a0, ...).
class ActorGen {
 public:
  explicit ActorGen(std::uint64_t seed) : rng_(seed) {}

  ActorDecl actor() {
    ActorDecl d;
    d.name = "G" + std::to_string(pick(1000));
    Type port_types[] = {Type::Uint, Type::Address, Type::Bool, Type::Msg};
    for (std::size_t i = 0, n = pick(3); i < n; ++i) {
      d.inputs.push_back(PortDecl{"p" + std::to_string(i), Direction::Input, port_types[pick(4)], {}});
    }
    for (std::size_t i = 0, n = pick(3); i < n; ++i) {
      d.outputs.push_back(PortDecl{"q" + std::to_string(i), Direction::Output, port_types[pick(4)], {}});
    }
    Type state_types[] = {Type::Uint, Type::Address, Type::Bool, Type::Map};
    for (std::size_t i = 0, n = pick(4); i < n; ++i) {
      StateVarDecl s{"v" + std::to_string(i), state_types[pick(4)], std::nullopt, {}};
      if (s.var_type != Type::Map && pick(2)) s.initializer = expr(2);
      d.state_vars.push_back(std::move(s));
    }
    for (std::size_t i = 0, n = pick(4); i < n; ++i) d.actions.push_back(action(i, d));
    if (!d.actions.empty() && pick(3) == 0) {
      FsmDecl f;
      f.initial = "s0";
      for (std::size_t i = 0; i < d.actions.size(); ++i) {
        f.transitions.push_back(Transition{"s" + std::to_string(i), d.actions[i].name,
                                           "s" + std::to_string((i + 1) % d.actions.size()), {}});
      }
      d.schedule = f;
    }
    return d;
  }

 private:
  std::size_t pick(std::size_t n) { return n ? std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_) : 0; }

  ActionDecl action(std::size_t idx, const ActorDecl& d) {
    ActionDecl a;
    a.name = "a" + std::to_string(idx);
    for (const auto& p : d.inputs) {
      if (pick(2)) continue;
      Consume c;
      c.port = p.name;
      switch (pick(4)) {
        case 0:
          break;
        case 1:
          c.patterns = {"x" + std::to_string(pick(9))};
          if (pick(2)) c.patterns.push_back("y" + std::to_string(pick(9)));
          c.counts = {c.patterns.size()};
          break;
        case 2:
          c.counts = {2 + pick(5)};
          break;
        default:
          c.counts = {1 + pick(3), 1 + pick(3), 1 + pick(3)};
          break;
      }
      a.consumes.push_back(std::move(c));
    }
    for (std::size_t i = 0, n = pick(3); i < n; ++i) a.guards.push_back(expr(3));
    for (std::size_t i = 0, n = pick(4); i < n; ++i) {
      switch (pick(3)) {
        case 0: {
          Assign s{"v" + std::to_string(pick(4)), std::nullopt, expr(3), {}};
          if (pick(2)) s.key = expr(2);
          a.body.push_back(std::move(s));
          break;
        }
        case 1:
          a.body.push_back(Let{"t" + std::to_string(i), expr(3), {}, std::nullopt});
          break;
        default: {
          Emit e{"q" + std::to_string(pick(3)), {}, {}};
          for (std::size_t k = 0, m = 1 + pick(3); k < m; ++k) e.values.push_back(expr(2));
          a.body.push_back(std::move(e));
        }
      }
    }
    return a;
  }

  Expr expr(int depth) {
    Expr e;
    std::size_t choice = depth <= 0 ? pick(5) : pick(8);
    switch (choice) {
      case 0: {
        IntLit lit;
        if (pick(2)) {
          lit.ether = true;
          lit.value = wei_per_ether() * pick(10) + (pick(2) ? wei_per_ether() / 4 : 0);
        } else {
          lit.value = uint256(pick(1'000'000));
        }
        e.node = lit;
        break;
      }
      case 1:
        e.node = BoolLit{pick(2) == 1};
        break;
      case 2:
        e.node = AddrLit{Address::from_index(pick(100000))};
        break;
      case 3:
      case 4:
        e.node = NameRef{"v" + std::to_string(pick(5)), Binding::Unresolved};
        break;
      case 5:
        e.node = Index{"v" + std::to_string(pick(5)), expr(depth - 1), Binding::Unresolved};
        break;
      case 6:
        e.node = Unary{UnaryOp::Not, expr(depth - 1)};
        break;
      default: {
        BinaryOp ops[] = {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div, BinaryOp::Mod,
                          BinaryOp::Eq,  BinaryOp::Ne,  BinaryOp::Lt,  BinaryOp::Le,  BinaryOp::Gt,
                          BinaryOp::Ge,  BinaryOp::And, BinaryOp::Or};
        e.node = Binary{ops[pick(13)], expr(depth - 1), expr(depth - 1)};
      }
    }
    return e;
  }

  std::mt19937_64 rng_;
};

}  // namespace

TEST(RoundTrip, GeneratedActors) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    ActorDecl original = ActorGen(seed).actor();
    std::string text = unparse(original);
    ActorDecl reparsed;
    try {
      reparsed = parse_actor_source(text, "gen.actor");
    } catch (const DiagnosticError& e) {
      FAIL() << "seed " << seed << ": " << render(e.first()) << "\n" << text;
    }
    ASSERT_TRUE(structurally_equal(original, reparsed)) << "seed " << seed << "\n" << text;
  }
}

TEST(Totality, MutatedSourcesOnlyRaiseDiagnostics) {
  std::mt19937_64 rng(11);
  const std::string alphabet = "actor end in out (){}[],:;=+-*/%<>!@#\"'\n 0123456789xyz_";
  for (const char* f : kActorFixtures) {
    const std::string base = fixture_text(f);
    for (int round = 0; round < 60; ++round) {
      std::string s = base;
      for (int k = 0, n = 1 + static_cast<int>(rng() % 4); k < n && !s.empty(); ++k) {
        std::size_t pos = rng() % s.size();
        switch (rng() % 3) {
          case 0:
            s.erase(pos, 1 + rng() % 6);
            break;
          case 1:
            s.insert(pos, 1, alphabet[rng() % alphabet.size()]);
            break;
          default:
            s[pos] = alphabet[rng() % alphabet.size()];
        }
      }
      try {
        ActorDecl d = parse_actor_source(s, f);
        resolve_in_place(d);
      } catch (const DiagnosticError& e) {
        EXPECT_FALSE(e.diagnostics().empty());
        EXPECT_GE(e.first().span.line, 1);
        EXPECT_GE(e.first().span.column, 1);
      }
    }
  }
}

TEST(Network, DaoAttackerFixture) {
  NetworkDecl n = load_network(kFixtures / "dao_attacker.network");
  EXPECT_EQ(n.name, "DaoAttack");
  EXPECT_EQ(n.instances.size(), 2u);
  EXPECT_EQ(n.connections.size(), 2u);
  EXPECT_EQ(n.instances[1].balance, wei_per_ether());
  ASSERT_EQ(n.feeds.size(), 1u);
  ASSERT_EQ(n.feeds[0].tokens.size(), 2u);
  EXPECT_EQ(std::get<MsgToken>(n.feeds[0].tokens[0]).value, 3 * wei_per_ether());
  EXPECT_EQ(n.victims, std::vector<std::string>{"dao"});
  EXPECT_TRUE(n.actors.count("Dao"));
  EXPECT_TRUE(n.actors.count("Attacker"));
}

namespace {

NetworkDecl net_from(const std::string& body) {
  auto loader = [](const std::string& path, const SourceSpan&) {
    return resolve(parse_actor_source(read_text_file(kFixtures / path), path));
  };
  return parse_network("network N\n import \"copy.actor\"\n import \"dao.actor\"\n" + body + "end\n", "n.network",
                       loader);
}

std::string connect_error(const std::string& body) {
  try {
    net_from(body);
  } catch (const ConnectError& e) {
    return e.first().message;
  }
  return "";
}

}  // namespace

TEST(Network, SingleActorWithoutConnectionsIsValid) {
  NetworkDecl n = net_from(" instance c : Copy\n");
  EXPECT_EQ(n.instances.size(), 1u);
  EXPECT_TRUE(n.connections.empty());
}

TEST(Network, ConnectErrors) {
  // fan-out: one output to two inputs
  EXPECT_NE(connect_error(" instance a : Copy\n instance b : Copy\n instance c : Copy\n"
                          " connect a.dst -> b.src\n connect a.dst -> c.src\n"),
            "");
  // fan-in
  EXPECT_NE(connect_error(" instance a : Copy\n instance b : Copy\n instance c : Copy\n"
                          " connect a.dst -> c.src\n connect b.dst -> c.src\n"),
            "");
  // dangling port
  EXPECT_NE(connect_error(" instance a : Copy\n instance b : Copy\n connect a.nope -> b.src\n"), "");
  // dangling instance
  EXPECT_NE(connect_error(" instance a : Copy\n connect a.dst -> z.src\n"), "");
  // direction
  EXPECT_NE(connect_error(" instance a : Copy\n instance b : Copy\n connect a.src -> b.dst\n"), "");
  // token type mismatch: uint output into msg input
  EXPECT_NE(connect_error(" instance a : Copy\n instance d : Dao\n connect a.dst -> d.requests\n"), "");
  // feed type mismatch and unknown victim
  EXPECT_NE(connect_error(" instance a : Copy\n feed a.src true\n"), "");
  EXPECT_NE(connect_error(" instance a : Copy\n victim b\n"), "");
  EXPECT_EQ(connect_error(" instance a : Copy\n instance b : Copy\n connect a.dst -> b.src capacity 2\n"
                          " feed a.src 1, 2, 3\n"),
            "");
}
