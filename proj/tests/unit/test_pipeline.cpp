#include <gtest/gtest.h>

#include "../support/properties.hpp"

using namespace mpst;

namespace {

struct Golden {
  const char* protocol;
  const char* golden;
  PipelineOptions options;
  int exit_code;
};

PipelineOptions run_mode(TypingModeKind mode) {
  PipelineOptions o;
  o.run = true;
  o.mode = mode;
  return o;
}

}  // namespace

class GoldenReport : public testing::TestWithParam<Golden> {};

TEST_P(GoldenReport, MatchesFile) {
  const Golden& g = GetParam();
  PipelineResult r = props::run_protocol(g.protocol, g.options);
  EXPECT_EQ(render_text(r, std::string("protocols/") + g.protocol), props::read_file(std::string("tests/golden/") + g.golden));
  EXPECT_EQ(r.exit_code(), g.exit_code);
}

INSTANTIATE_TEST_SUITE_P(
    Protocols, GoldenReport,
    testing::Values(Golden{"buyer_seller.gp", "buyer_seller.out", {}, 0},
                    Golden{"buyer_seller_title_int.gp", "buyer_seller_title_int.out", {}, 1},
                    Golden{"buyer_seller_zero_quote.gp", "buyer_seller_zero_quote.out", {}, 1},
                    Golden{"race.gp", "race.out", {}, 1},
                    Golden{"unknown_variable.gp", "unknown_variable.out", {}, 1},
                    Golden{"stranded_sender.gp", "stranded_sender.out", {}, 1},
                    Golden{"guessing_game.gp", "guessing_game_run.out", run_mode(TypingModeKind::Multiparty), 0},
                    Golden{"ping_pong.gp", "ping_pong_binary_run.out", run_mode(TypingModeKind::Binary), 0}),
    [](const testing::TestParamInfo<Golden>& info) {
      std::string name = info.param.golden;
      name = name.substr(0, name.find('.'));
      return name;
    });

TEST(Pipeline, ParseErrorStopsEverything) {
  PipelineResult r = run_pipeline("A -> B : k(x:int)[x>0]\nend");
  EXPECT_FALSE(r.file.has_value());
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0].stage, "parse");
  EXPECT_EQ(r.exit_code(), 1);
  EXPECT_EQ(render_text(r, "x.gp"), "x.gp:2:1: expected ';', found 'end'\n");
}

TEST(Pipeline, StopsAfterGlobalFailureUnlessKeepGoing) {
  PipelineResult r = props::run_protocol("race.gp");
  EXPECT_FALSE(r.projected);
  PipelineOptions o;
  o.keep_going = true;
  r = props::run_protocol("race.gp", o);
  EXPECT_TRUE(r.projected);
  EXPECT_EQ(r.exit_code(), 1);
}

TEST(Pipeline, NoAssertionsAcceptsZeroQuote) {
  PipelineOptions o;
  o.no_assertions = true;
  PipelineResult r = props::run_protocol("buyer_seller_zero_quote.gp", o);
  EXPECT_TRUE(r.verified()) << render_text(r, "zero_quote");
  for (const auto& p : r.projections) EXPECT_EQ(p.type, local::erase_assertions(p.type));
}

TEST(Pipeline, NoRunWithoutVerification) {
  PipelineOptions o;
  o.run = true;
  EXPECT_FALSE(props::run_protocol("buyer_seller_zero_quote.gp", o).trace.has_value());
  o.force = true;
  o.monitor = true;
  PipelineResult r = props::run_protocol("buyer_seller_zero_quote.gp", o);
  EXPECT_FALSE(r.trace.has_value());
  ASSERT_FALSE(r.errors.empty());
  EXPECT_EQ(r.errors.back().kind, ErrorKind::MonitorViolation);
}

TEST(Pipeline, EmptySystem) {
  PipelineOptions o;
  o.run = true;
  PipelineResult r = run_pipeline("end", o);
  EXPECT_TRUE(r.verified());
  ASSERT_TRUE(r.trace.has_value());
  EXPECT_TRUE(r.trace->events.empty());
}

TEST(Pipeline, BudgetSurfacesAsError) {
  PipelineOptions o;
  o.solver.budget = 1;
  PipelineResult r = props::run_protocol("guessing_game.gp", o);
  EXPECT_FALSE(r.verified());
  bool exhausted = false;
  for (const auto& e : r.errors) exhausted |= e.kind == ErrorKind::ResourceExhausted;
  EXPECT_TRUE(exhausted) << render_text(r, "guessing_game.gp");
}

TEST(Pipeline, BuyerSellerWithinTime) {
  double ms = props::millis([] { EXPECT_TRUE(props::run_protocol("buyer_seller.gp").verified()); });
  EXPECT_LT(ms, 2000);
}
