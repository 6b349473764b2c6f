#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "qmcgs/harness.hpp"

using namespace qmcgs;

TEST_SUITE("harness") {
  TEST_CASE("config text") {
    RunConfig c;
    apply_config_text(c, "# comment\nbudget = 500\n beta=3.5 \nmethods = mcgs, sa\n\nfresh_gates = false\n");
    CHECK(c.budget == 500);
    CHECK(c.beta == 3.5);
    CHECK(c.methods == "mcgs, sa");
    CHECK_FALSE(c.fresh_gates);
    CHECK_THROWS_AS(apply_config_text(c, "no_such_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(apply_config_text(c, "budget = lots\n"), ConfigError);
    CHECK_THROWS_AS(apply_config_text(c, "budget 5\n"), ConfigError);
  }

  TEST_CASE("validation") {
    RunConfig c;
    CHECK_NOTHROW(validate(c));
    c.method = "magic";
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = RunConfig{};
    c.budget = 0;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = RunConfig{};
    c.length_hint = "oracle";
    CHECK_THROWS_AS(validate(c), ConfigError);
  }

  TEST_CASE("index and name lists") {
    CHECK(parse_index_list("1-3,7") == std::vector<std::size_t>{1, 2, 3, 7});
    CHECK(parse_index_list("5") == std::vector<std::size_t>{5});
    CHECK_THROWS(parse_index_list("3-1"));
    CHECK_THROWS(parse_index_list("a"));
    CHECK(parse_name_list("mcgs, ga") == std::vector<std::string>{"mcgs", "ga"});
  }

  TEST_CASE("bench rows: methods x lengths x repeats") {
    RunConfig c = default_run_config("bench-samples");
    c.lengths = "1-2";
    c.methods = "mcgs,random,ga";
    c.repeats = 2;
    c.budget = 2000;
    const auto rows = run_bench(c, false);
    CHECK(rows.size() == 3 * 2 * 2);
    for (const auto& r : rows) {
      CHECK(r.certified_length == r.length);
      if (r.method == "mcgs") {
        REQUIRE(r.audit);
        CHECK(r.audit->ok());
      }
    }
    std::ostringstream csv;
    write_bench_csv(csv, rows);
    CHECK(csv.str().rfind("#schema=", 0) == 0);
  }

  TEST_CASE("cellular automaton sweep edge rules") {
    RunConfig c = default_run_config("ca-sweep");
    c.rules = "0,1,255";
    const auto rows = run_ca_sweep(c);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].rejected);
    REQUIRE(rows[1].report.success);
    CHECK(rows[1].report.result_length == 0);
    REQUIRE(rows[2].report.success);
    CHECK(*rows[2].report.result_length <= 3);
  }

  TEST_CASE("classical evolution matches the string oracle") {
    for (int rule : {30, 90, 110, 184}) {
      const auto rows = ca_evolution(rule, 64, 32, "center", 0);
      std::string first(64, '0');
      first[32] = '1';
      const auto ref = oracle::ca_rows(rule, first, 32);
      REQUIRE(rows.size() == ref.size());
      for (std::size_t t = 0; t < rows.size(); ++t) {
        std::string s;
        for (auto v : rows[t]) s += static_cast<char>('0' + v);
        CHECK(s == ref[t]);
      }
    }
    CHECK_THROWS(ca_evolution(30, 64, 4, "sideways", 0));
  }
}

TEST_CASE("pruning drops idle gates and keeps the support" * doctest::test_suite("harness")) {
  const CaStatePrepTask task(255);
  const GateInstance x1 = make_gate("X", {1}, 3);
  Circuit c(3);
  c.append(make_gate("H", {0}, 3));
  c.append(x1);
  c.append(make_gate("H", {1}, 3));
  c.append(x1);
  c.append(make_gate("H", {2}, 3));
  CHECK(task.loss(c) == 0.0);
  prune_circuit(task, c, 0.0);
  CHECK(c.length() == 3);
  CHECK(task.loss(c) == 0.0);
}
