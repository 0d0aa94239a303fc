// SPDX-License-Identifier: Apache-2.0
#include "actorforge/analysis/analyzer.hpp"
#include "actorforge/codegen/codegen.hpp"
#include "actorforge/dsl/frontend.hpp"
#include "actorforge/seq/frontend.hpp"
#include "actorforge/seq/scenario.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

using namespace actorforge;
using namespace actorforge::analysis;

namespace {

const std::filesystem::path kFixtures = FIXTURE_DIR;
const std::filesystem::path kGolden = GOLDEN_DIR;

seq::ContractDef contract_from(const std::string& text, const std::string& name = "Dao") {
  auto unit = seq::parse_contracts(text, name + ".sol.txt");
  return *unit.find(name);
}

seq::ContractDef fixture_contract(const std::string& file) { return *seq::load_contracts(kFixtures / file).find("Dao"); }

std::string golden() { return dsl::read_text_file(kGolden / "dao_generated.sol.txt"); }

std::string replace_once(std::string text, const std::string& from, const std::string& to) {
  auto at = text.find(from);
  if (at == std::string::npos) throw std::runtime_error("mutation anchor not found: " + from);
  return text.replace(at, from.size(), to);
}

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
  for (auto at = text.find(from); at != std::string::npos; at = text.find(from, at + to.size())) {
    text.replace(at, from.size(), to);
  }
  return text;
}

std::size_t count_rule(const VerifyResult& r, const std::string& rule) {
  return std::count_if(r.findings.begin(), r.findings.end(), [&](const Finding& f) { return f.rule_id == rule; });
}

dsl::ActorDecl dao_actor() { return dsl::load_actor(kFixtures / "dao.actor"); }

const char* kPartialLock = R"(
contract Dao {
  mapping(address => uint) balances;
  bool busy;

  function deposit() public payable {
    balances[msg.sender] = balances[msg.sender] + msg.value;
  }

  function withdraw() public {
    require(!busy);
    busy = true;
    send(msg.sender, balances[msg.sender]);
    balances[msg.sender] = 0;
    busy = false;
  }
}
)";

}  // namespace

TEST(Naive, VulnerableWithdrawHasOneError) {
  auto f = check_effects_after_interaction(fixture_contract("dao_vulnerable.sol.txt"));
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].rule_id, "CEI001");
  EXPECT_EQ(f[0].function, "withdraw");
  EXPECT_EQ(f[0].severity, Severity::Error);
  EXPECT_EQ(f[0].statement_index, 2u);  // require, send, write
  EXPECT_EQ(f[0].span.line, 16);
  EXPECT_EQ(render(f[0]).rfind(f[0].span.file + ":16:5: CEI001 error: ", 0), 0u);
  EXPECT_EQ(to_json(f[0])["rule"], "CEI001");
}

TEST(Naive, ReorderedFixIsClean) {
  EXPECT_TRUE(check_effects_after_interaction(fixture_contract("dao_fixed.sol.txt")).empty());
}

TEST(Naive, LockReleaseInGeneratedContractIsTheOneFalsePositive) {
  auto f = check_effects_after_interaction(contract_from(golden()));
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].function, "withdraw");
  EXPECT_EQ(f[0].severity, Severity::Error);
  EXPECT_NE(f[0].message.find("__locked"), std::string::npos);
}

TEST(Naive, BranchesAreWalkedSeparately) {
  auto def = contract_from(R"(
interface I { function ping() external; }
contract Dao {
  uint x;
  I other;
  function a() public {
    if (x > 0) { send(msg.sender, 1); } else { x = 1; }
  }
  function b() public {
    if (x > 0) { send(msg.sender, 1); } else { x = 1; }
    x = 2;
  }
  function c() public {
    other.ping();
    if (x > 0) { x = 3; } else { uint t = x; }
  }
  function d() public {
    uint t = other.ping();
    x = t;
  }
}
)");
  auto f = check_effects_after_interaction(def);
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f[0].function, "b");
  EXPECT_EQ(f[0].statement_index, 3u);  // if, send, x = 1, x = 2
  EXPECT_EQ(f[1].function, "c");
  EXPECT_EQ(f[1].statement_index, 2u);
  EXPECT_EQ(f[2].function, "d");
}

TEST(MutexAware, GeneratedContractIsSuppressed) {
  auto f = check_with_mutex_awareness(contract_from(golden()));
  EXPECT_EQ(count_errors(f), 0u);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].severity, Severity::Info);
  EXPECT_EQ(f[0].classification, FindingClass::SuppressedByMutex);
}

TEST(MutexAware, VulnerableMatchesNaive) {
  auto def = fixture_contract("dao_vulnerable.sol.txt");
  EXPECT_EQ(check_with_mutex_awareness(def), check_effects_after_interaction(def));
}

TEST(MutexAware, LockIsFoundByShapeNotName) {
  auto def = contract_from(replace_all(golden(), "__locked", "gate"));
  ASSERT_TRUE(lock_of(def, *def.find_function("withdraw")));
  EXPECT_EQ(*lock_of(def, *def.find_function("withdraw")), "gate");
  EXPECT_EQ(count_errors(check_with_mutex_awareness(def)), 0u);
}

TEST(MutexAware, PartialLockKeepsTheError) {
  auto def = contract_from(kPartialLock);
  EXPECT_TRUE(lock_of(def, *def.find_function("withdraw")));
  EXPECT_FALSE(lock_of(def, *def.find_function("deposit")));
  auto f = check_with_mutex_awareness(def);
  EXPECT_EQ(count_errors(f), 2u);  // the balance write and the lock release
  EXPECT_EQ(f, check_effects_after_interaction(def));
}

TEST(MutexAware, DifferentLocksDoNotSuppress) {
  std::string text = replace_all(golden(), "__locked", "gate");
  text = replace_once(text, "  bool gate;", "  bool gate;\n  bool other;");
  // deposit takes a different lock
  text = replace_once(text, "require(!gate, \"re-entrant call\");\n    gate = true;",
                      "require(!other, \"re-entrant call\");\n    other = true;");
  text = replace_once(text, "gate = false;", "other = false;");
  auto def = contract_from(text);
  EXPECT_EQ(lock_of(def, *def.find_function("deposit")), "other");
  EXPECT_EQ(count_errors(check_with_mutex_awareness(def)), 1u);
}

TEST(MutexAware, NonBoolFlagIsNotALock) {
  auto def = contract_from(R"(
contract Dao {
  uint n;
  uint busy;
  function f() public {
    require(!(busy == 1));
    busy = 1;
    send(msg.sender, 1);
    n = 1;
    busy = 0;
  }
}
)");
  EXPECT_FALSE(lock_of(def, def.functions[0]));
  EXPECT_EQ(count_errors(check_with_mutex_awareness(def)), 2u);
}

TEST(Verify, GeneratedDaoPasses) {
  auto r = verify_generated(dao_actor(), contract_from(golden()));
  EXPECT_TRUE(r.pass());
  for (const auto& f : r.findings) ADD_FAILURE() << render(f);
}

TEST(Verify, ReleaseMovedBeforeSendViolatesLockPlacement) {
  std::string text = replace_once(golden(), "    send(msg.sender, __pre_0);\n    __locked = false;\n",
                                  "    __locked = false;\n    send(msg.sender, __pre_0);\n");
  auto r = verify_generated(dao_actor(), contract_from(text));
  EXPECT_FALSE(r.pass());
  EXPECT_GE(count_rule(r, "VG-d"), 1u);
}

TEST(Verify, DeletedGuardIsReported) {
  std::string text = replace_once(golden(), "    require(balances[msg.sender] > 0);\n", "");
  auto r = verify_generated(dao_actor(), contract_from(text));
  EXPECT_EQ(count_rule(r, "VG-b"), 1u);
}

TEST(Verify, GuardAfterTheWriteIsReported) {
  std::string text = replace_once(golden(), "    require(balances[msg.sender] > 0);\n", "");
  text = replace_once(text, "    balances[msg.sender] = 0;\n",
                      "    balances[msg.sender] = 0;\n    require(balances[msg.sender] > 0);\n");
  EXPECT_EQ(count_rule(verify_generated(dao_actor(), contract_from(text)), "VG-b"), 1u);
}

TEST(Verify, RemovedLockFailsAndExposesInteractionOrder) {
  std::string text = replace_all(golden(), "    require(!__locked, \"re-entrant call\");\n", "");
  text = replace_all(text, "    __locked = true;\n", "");
  text = replace_all(text, "    __locked = false;\n", "");
  text = replace_once(text, "    uint __pre_0 = balances[msg.sender];\n    balances[msg.sender] = 0;\n    send(msg.sender, __pre_0);\n",
                      "    uint __pre_0 = balances[msg.sender];\n    send(msg.sender, __pre_0);\n    balances[msg.sender] = 0;\n");
  auto r = verify_generated(dao_actor(), contract_from(text));
  EXPECT_EQ(count_rule(r, "VG-d"), 2u);
  EXPECT_EQ(count_rule(r, "VG-c"), 1u);
}

TEST(Verify, PublicFunctionSetMustMatchActions) {
  std::string extra = replace_once(golden(), "  function withdraw()", "  function skim() public {\n  }\n\n  function withdraw()");
  EXPECT_EQ(count_rule(verify_generated(dao_actor(), contract_from(extra)), "VG-a"), 1u);
  std::string internal = replace_once(golden(), "function withdraw() public", "function withdraw() internal");
  EXPECT_EQ(count_rule(verify_generated(dao_actor(), contract_from(internal)), "VG-a"), 1u);
}

namespace {

// Hand-rolled contract generator. Keeps its own record of every statement's
// pre-order index and kind so the expected findings are known without the
// analyzer.
struct Gen {
  std::mt19937_64 rng;
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
};

struct GenFunction {
  std::string name;
  std::string text;
  std::optional<std::string> lock;
  bool mutating = false;
  std::vector<std::size_t> expected;  // statement indices the naive rule must report
};

struct GenState {
  std::size_t index = 0;
  bool mutating = false;
  std::vector<std::size_t> expected;
};

// returns whether an interaction may have happened by the end of the block
bool gen_block(Gen& g, GenState& st, std::string& out, bool seen, int depth, int len) {
  for (int i = 0; i < len; ++i) {
    const std::size_t idx = st.index++;
    switch (g.pick(depth > 0 ? 6 : 7)) {
      case 0:
        out += "x = x + 1; ";
        st.mutating = true;
        if (seen) st.expected.push_back(idx);
        break;
      case 1:
        out += "m[msg.sender] = 2; ";
        st.mutating = true;
        if (seen) st.expected.push_back(idx);
        break;
      case 2:
        out += "send(msg.sender, 1); ";
        st.mutating = true;
        seen = true;
        break;
      case 3:
        out += "other.ping(); ";
        st.mutating = true;
        seen = true;
        break;
      case 4:
        out += "require(x < 9); ";
        break;
      case 5:
        out += "uint t" + std::to_string(idx) + " = x; ";
        break;
      default: {
        out += "if (x > 1) { ";
        const bool a = gen_block(g, st, out, seen, depth + 1, g.pick(3));
        out += "} else { ";
        const bool b = gen_block(g, st, out, seen, depth + 1, g.pick(3));
        out += "} ";
        seen = a || b;
      }
    }
  }
  return seen;
}

GenFunction gen_function(Gen& g, const std::string& name, bool fallback) {
  GenFunction f;
  f.name = name;
  GenState st;
  std::string body;
  bool seen = false;
  const int lock = g.pick(4);  // 0: none, 1: L, 2: M, 3: L acquired but never released
  if (lock) {
    const std::string var = lock == 2 ? "M" : "L";
    body += "require(!" + var + "); " + var + " = true; ";
    st.index = 2;
    st.mutating = true;
    if (lock != 3) f.lock = var;
  }
  seen = gen_block(g, st, body, seen, 0, 1 + g.pick(5));
  if (lock && lock != 3) {
    const std::string var = *f.lock;
    body += var + " = false; ";
    if (seen) st.expected.push_back(st.index);
    ++st.index;
  }
  f.text = fallback ? "  fallback() external payable { " + body + "}\n"
                    : "  function " + name + "() public payable { " + body + "}\n";
  f.mutating = st.mutating;
  f.expected = st.expected;
  return f;
}

struct GenContract {
  std::string text;
  std::vector<GenFunction> functions;  // analysis order
};

GenContract gen_contract(Gen& g) {
  GenContract c;
  const int n = 1 + g.pick(4);
  for (int i = 0; i < n; ++i) c.functions.push_back(gen_function(g, "f" + std::to_string(i), false));
  if (g.pick(2)) c.functions.push_back(gen_function(g, "fallback", true));
  c.text = "interface I { function ping() external; }\ncontract R {\n  uint x;\n  mapping(address => uint) m;\n"
           "  bool L;\n  bool M;\n  I other;\n";
  for (const auto& f : c.functions) c.text += f.text;
  c.text += "}\n";
  return c;
}

}  // namespace

TEST(Properties, RandomContractsMatchTheHandOracle) {
  Gen g{std::mt19937_64(424242)};
  std::size_t suppressed_cases = 0, kept_cases = 0;
  for (int round = 0; round < 300; ++round) {
    const GenContract gc = gen_contract(g);
    const seq::ContractDef def = contract_from(gc.text, "R");

    std::vector<std::pair<std::string, std::size_t>> expected;
    for (const auto& f : gc.functions) {
      for (auto i : f.expected) expected.emplace_back(f.name, i);
    }
    const auto naive = check_effects_after_interaction(def);
    std::vector<std::pair<std::string, std::size_t>> got;
    for (const auto& f : naive) got.emplace_back(f.function, f.statement_index);
    ASSERT_EQ(got, expected) << gc.text;

    // suppression happens iff every mutating entry point holds one common lock
    std::optional<std::string> common;
    bool shared = true;
    for (const auto& f : gc.functions) {
      if (!f.mutating) continue;
      if (!f.lock || (common && *common != *f.lock)) shared = false;
      if (f.lock) common = f.lock;
    }
    const auto aware = check_with_mutex_awareness(def);
    ASSERT_EQ(aware.size(), naive.size());
    ASSERT_EQ(count_errors(aware), shared ? 0u : naive.size()) << gc.text;
    if (!naive.empty()) ++(shared ? suppressed_cases : kept_cases);

    // monotone and deterministic
    ASSERT_LE(count_errors(aware), count_errors(naive));
    ASSERT_EQ(check_with_mutex_awareness(def), aware);
    ASSERT_EQ(check_effects_after_interaction(def), naive);
  }
  EXPECT_GT(suppressed_cases, 5u);
  EXPECT_GT(kept_cases, 50u);
}

namespace {

struct Variant {
  std::string name;
  seq::SourceUnit unit;
};

std::vector<Variant> dao_variants() {
  std::vector<Variant> v;
  v.push_back({"vulnerable", seq::load_contracts(kFixtures / "dao_vulnerable.sol.txt")});
  v.push_back({"fixed", seq::load_contracts(kFixtures / "dao_fixed.sol.txt")});
  v.push_back({"generated", seq::parse_contracts(golden(), "generated.sol.txt")});
  v.push_back({"partial-lock", seq::parse_contracts(kPartialLock, "partial.sol.txt")});
  v.push_back({"branchy", seq::parse_contracts(R"(
contract Dao {
  mapping(address => uint) balances;
  function deposit() public payable { balances[msg.sender] = balances[msg.sender] + msg.value; }
  function withdraw() public {
    if (balances[msg.sender] > 0) { send(msg.sender, balances[msg.sender]); }
    balances[msg.sender] = 0;
  }
}
)",
                                                "branchy.sol.txt")});
  v.push_back({"late-release", seq::parse_contracts(R"(
contract Dao {
  mapping(address => uint) balances;
  bool busy;
  function deposit() public payable { balances[msg.sender] = balances[msg.sender] + msg.value; }
  function withdraw() public {
    require(!busy);
    busy = true;
    send(msg.sender, balances[msg.sender]);
    busy = false;
    balances[msg.sender] = 0;
  }
}
)",
                                                     "late.sol.txt")});
  return v;
}

}  // namespace

TEST(Linkage, DrainedContractsAreFlaggedAndCleanOnesAreSafe) {
  const seq::Scenario s = seq::load_scenario(kFixtures / "dao_attack.scenario");
  std::size_t drained = 0, clean = 0;
  for (const auto& v : dao_variants()) {
    const auto& def = *v.unit.find("Dao");
    const uint256 loss = seq::run_scenario(s, {v.unit}).victim_loss;
    const auto naive_errors = count_errors(check_effects_after_interaction(def));
    const auto aware_errors = count_errors(check_with_mutex_awareness(def));
    if (loss > 0) {
      ++drained;
      EXPECT_GE(naive_errors, 1u) << v.name;
    }
    if (aware_errors == 0) {
      ++clean;
      EXPECT_EQ(loss, 0) << v.name;
    }
  }
  EXPECT_EQ(drained, 2u);  // vulnerable and branchy
  EXPECT_EQ(clean, 2u);    // fixed and generated
}
