#include <catch2/catch_amalgamated.hpp>

#include "mrfv/step_control.hpp"

using namespace mrfv;

TEST_CASE("safety factor penalizes Newton and linear work") {
  const ControlOptions opt;
  CHECK_THAT(safety_factor(opt, 1, 2), Catch::Matchers::WithinRel(0.9, 1e-14));
  CHECK_THAT(safety_factor(opt, 0, 60), Catch::Matchers::WithinRel(0.61, 1e-14));
  // more work, smaller factor
  CHECK(safety_factor(opt, 20, 0) < safety_factor(opt, 5, 0));
}

TEST_CASE("acceptance and growth") {
  ControlOptions opt;
  opt.eta_rk = 1e-4;

  SECTION("slightly under target grows gently") {
    const StepProposal p = propose_step(opt, 1.0, 0.9e-4, 1, 2);
    CHECK(p.accept);
    CHECK_THAT(p.dt_next, Catch::Matchers::WithinRel(0.9240210864723069, 1e-12));
  }

  SECTION("big error rejects to nu_k dt/2") {
    const StepProposal p = propose_step(opt, 1.0, 16e-4, 1, 2);
    CHECK_FALSE(p.accept);
    CHECK_THAT(p.dt_next, Catch::Matchers::WithinRel(0.45, 1e-12));
  }

  SECTION("growth is capped at alpha") {
    const StepProposal p = propose_step(opt, 1.0, 1e-12, 0, 0);
    CHECK(p.accept);
    CHECK_THAT(p.dt_next, Catch::Matchers::WithinRel(1.5, 1e-14));
  }

  SECTION("a rejection always shrinks") {
    for (double err : {1.1e-4, 2e-4, 1e-2, 1e2}) {
      const StepProposal p = propose_step(opt, 1.0, err, 0, 0);
      CHECK_FALSE(p.accept);
      CHECK(p.dt_next < 1.0);
    }
  }

  SECTION("zero error is safe") {
    const StepProposal p = propose_step(opt, 1.0, 0.0, 0, 0);
    CHECK(p.accept);
    CHECK_THAT(p.dt_next, Catch::Matchers::WithinRel(1.5, 1e-14));
  }
}

TEST_CASE("constant-step ramp") {
  ControlOptions opt;
  // fresh start: alpha nu dt
  CHECK_THAT(constant_mode_next(opt, 1e-8, 1e-5, 1, 2),
             Catch::Matchers::WithinRel(1.5 * 0.9 * 1e-8, 1e-13));
  // saturates at the target
  CHECK_THAT(constant_mode_next(opt, 0.99e-5, 1e-5, 1, 2),
             Catch::Matchers::WithinRel(1e-5, 1e-13));
}
