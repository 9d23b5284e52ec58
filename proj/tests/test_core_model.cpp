#include "doctest.h"

#include "bilateral/engine.hpp"
#include "bilateral/errors.hpp"
#include "support.hpp"

using namespace bilateral;
using namespace testing;

TEST_SUITE("core_model") {
  TEST_CASE("Example 1 initial holdings conserve the column-sum supply") {
    const Economy e = cobb_douglas_economy(kExample1Betas, kExample1Holdings);
    CHECK(e.agent_count() == 5);
    CHECK(e.goods_count() == 10);
    CHECK(e.total_supply()[0] == 139.0);
    CHECK(e.total_supply()[1] == 76 + 40 + 57 + 65 + 70);
    const auto c = check_conservation(e, e.total_supply());
    CHECK(c.ok);
    CHECK(c.max_residual == 0.0);
  }

  TEST_CASE("two identical agents with unit holdings") {
    const Economy e = cobb_douglas_economy({{0.3, 0.3}, {0.3, 0.3}}, {{1, 1}, {1, 1}});
    CHECK(e.total_supply() == GoodsVector{2, 2});
    CHECK(check_conservation(e, GoodsVector{2, 2}).ok);
  }

  TEST_CASE("a supply drift beyond the tolerance is reported, not corrected") {
    Economy e = cobb_douglas_economy({{0.3, 0.3}, {0.3, 0.3}}, {{1, 1}, {1, 1}});
    const GoodsVector s = e.total_supply();
    e.agent(0).holdings[1] += 1e-6;
    const auto c = check_conservation(e, s);
    CHECK_FALSE(c.ok);
    CHECK(c.max_residual == doctest::Approx(1e-6).epsilon(1e-6));
    CHECK(e.agent(0).holdings[1] == 1.0 + 1e-6);
    CHECK_THROWS_AS(check_conservation(e, GoodsVector{2, 2, 2}), StructuralError);
  }

  TEST_CASE("conservation holds after every trade of a seeded Example 1 run") {
    const Economy e = cobb_douglas_economy(kExample1Betas, kExample1Holdings);
    const GoodsVector s = e.total_supply();
    AlgorithmParams p;
    p.seed = 7;
    RunOptions opts;
    std::size_t checked = 0, failures = 0;
    opts.on_trade = [&](const Economy& now, const TradeRecord&) {
      ++checked;
      if (!check_conservation(now, s).ok) ++failures;
      for (const auto& a : now.agents())
        for (double q : a.holdings)
          if (!(q > 0.0)) ++failures;
    };
    const RunResult r = run(e, p, opts);
    CHECK(checked == r.trades.size());
    CHECK(checked > 0);
    CHECK(failures == 0);
  }

  TEST_CASE("economy construction rejects malformed rosters") {
    CHECK_THROWS_AS(Economy({}), StructuralError);
    CHECK_THROWS_AS(cobb_douglas_economy({{0.3, 0.3}, {0.3, 0.3, 0.3}}, {{1, 1}, {1, 1, 1}}), StructuralError);
    CHECK_THROWS_AS(cobb_douglas_economy({{0.3, 0.3}, {0.3, 0.3}}, {{1, -1}, {1, 1}}, false), StructuralError);
    CHECK_THROWS_AS(cobb_douglas_economy({{0.3, 0.3}, {0.3, 0.3}}, {{1, 0}, {1, 1}}, true), StructuralError);
    CHECK_THROWS_AS(cobb_douglas_economy({{0.3, 0.3}, {0.3, 0.3}}, {{1, 0}, {1, 0}}, false), StructuralError);
  }

  TEST_CASE("agent ids follow roster order") {
    std::vector<AgentState> agents{cd_agent({0.3, 0.3}, {1, 2}), cd_agent({0.3, 0.3}, {2, 1})};
    agents[0].id = 9;
    agents[1].id = 4;
    const Economy e(std::move(agents));
    CHECK(e.agent(0).id == 0);
    CHECK(e.agent(1).id == 1);
    const Matrix h = e.holdings();
    CHECK(h(0, 1) == 2.0);
    CHECK(h(1, 0) == 2.0);
  }

  TEST_CASE("algorithm parameters are validated") {
    AlgorithmParams p;
    CHECK_NOTHROW(p.validate());
    p.lambda = 1.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p = {};
    p.eps_p = 0.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p = {};
    p.max_iters = 0;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p = {};
    p.delta0 = Matrix(2, 1, -1.0);
    CHECK_THROWS_AS(p.validate(), DomainError);
  }
}
