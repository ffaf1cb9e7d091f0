#include <cmath>
#include <cstdio>
#include <vector>

#include "doctest.h"
#include "sectar/envs.hpp"
#include "support/oracles.hpp"

using namespace sectar;

namespace {

WaypointTask agent_task(std::vector<std::array<double, 2>> goals, double radius = 0.1) {
  WaypointTask t;
  t.goals = std::move(goals);
  t.goal_block.assign(t.goals.size(), -1);
  t.reach_radius = radius;
  return t;
}

WaypointTask far_task() {
  // goals nowhere near the default starts
  return agent_task({{0.9, 0.9}, {-0.9, 0.9}, {0.9, -0.9}});
}

Action random_action(const EnvSpec& spec, Rng& rng) {
  if (spec.discrete()) return Action::discrete(rng.uniform_int(spec.num_actions));
  std::vector<double> v;
  for (int i = 0; i < spec.action_dim; ++i) v.push_back(rng.uniform(-5.0, 5.0));
  return Action::continuous(std::move(v));
}

}  // namespace

TEST_SUITE("envs") {

TEST_CASE("nav2d moves a fixed distance in each cardinal direction") {
  Env env(EnvKind::nav2d, far_task());
  env.reset();
  CHECK(env.step(Action::discrete(1)).state == std::vector<double>{0.0, 0.05});
  env.reset();
  CHECK(env.step(Action::discrete(0)).state == std::vector<double>{0.05, 0.0});
  env.reset();
  CHECK(env.step(Action::discrete(2)).state == std::vector<double>{-0.05, 0.0});
  env.reset();
  CHECK(env.step(Action::discrete(3)).state == std::vector<double>{0.0, -0.05});
}

TEST_CASE("nav2d clips to the arena and rejects bad actions") {
  Env env(EnvKind::nav2d, far_task());
  env.reset_to({1.0, 0.3});
  StepResult r = env.step(Action::discrete(0));
  CHECK(r.state[0] == 1.0);
  CHECK(r.state[1] == 0.3);
  CHECK_THROWS(env.step(Action::discrete(4)));
  CHECK_THROWS(env.step(Action::discrete(-1)));
}

TEST_CASE("wheeled hand-evaluated euler step") {
  EnvParams p;
  p.dt = 0.1;
  Env env(EnvKind::wheeled, far_task(), p);
  env.reset();
  StepResult r = env.step(Action::continuous({1.0, 1.0}));
  // v = r(wl+wr)/2 = 0.1, omega = 0, heading stays 0
  CHECK(r.state[0] == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(r.state[1] == 0.0);
  CHECK(r.state[2] == 0.0);
  CHECK(r.state[3] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(r.state[4] == 0.0);
}

TEST_CASE("wheeled turns in place with opposite wheels") {
  Env env(EnvKind::wheeled, far_task());
  env.reset();
  StepResult r = env.step(Action::continuous({-1.0, 1.0}));
  // omega = r(wr-wl)/b = 0.1*2/0.2 = 1, dt = 0.05
  CHECK(r.state[0] == 0.0);
  CHECK(r.state[1] == 0.0);
  CHECK(r.state[2] == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(r.state[3] == 0.0);
  CHECK(r.state[4] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("wheeled heading wraps into (-pi, pi]") {
  Env env(EnvKind::wheeled, far_task());
  env.reset_to({0.0, 0.0, 3.14, 0.0, 0.0});
  StepResult r = env.step(Action::continuous({-5.0, 5.0}));
  // omega = 5, dt 0.05 -> heading 3.39 wraps negative
  CHECK(r.state[2] == doctest::Approx(3.39 - 2.0 * 3.14159265358979323846).epsilon(1e-12));
  CHECK(r.state[2] <= 3.14159265358979323846);
  CHECK(r.state[2] > -3.14159265358979323846);
}

TEST_CASE("wheeled clamps wheel velocities and rejects non-finite ones") {
  Env a(EnvKind::wheeled, far_task());
  Env b(EnvKind::wheeled, far_task());
  a.reset();
  b.reset();
  StepResult ra = a.step(Action::continuous({50.0, 50.0}));
  StepResult rb = b.step(Action::continuous({5.0, 5.0}));
  CHECK(ra.state == rb.state);
  CHECK_THROWS(a.step(Action::continuous({std::nan(""), 0.0})));
  CHECK_THROWS(a.step(Action::continuous({0.0})));
}

TEST_CASE("reset to a state round-trips and validates") {
  Env env(EnvKind::nav2d, far_task());
  std::vector<double> s = {0.25, -0.75};
  CHECK(env.reset_to(s) == s);
  CHECK(env.state() == s);
  CHECK_THROWS(env.reset_to({0.0}));
  CHECK_THROWS(env.reset_to({2.0, 0.0}));
  CHECK_THROWS(env.reset_to({std::nan(""), 0.0}));

  Rng rng(600);
  Env blocks(EnvKind::blocks, random_task(EnvKind::blocks, 4, 0.1, rng));
  // held block not at the agent position
  std::vector<double> bad = {0.0, 0.0, 0.5, 0.5, -0.5, 0.5, -0.5, -0.5, 0.5, -0.5, 1.0};
  CHECK_THROWS(blocks.reset_to(bad));
  std::vector<double> good = bad;
  good[4] = 0.0;
  good[5] = 0.0;
  CHECK(blocks.reset_to(good) == good);
}

TEST_CASE("waypoint rule pays on every third goal") {
  WaypointTask t = agent_task({{0.0, 0.05}, {0.0, 0.15}, {0.0, 0.25}});
  t.reach_radius = 0.03;
  Env env(EnvKind::nav2d, t);
  env.reset();
  double total = 0.0;
  StepResult r = env.step(Action::discrete(1));  // lands on goal 1
  total += r.reward;
  CHECK(r.reward == 0.0);
  CHECK(env.progress().index == 1);
  r = env.step(Action::discrete(1));
  total += r.reward;
  CHECK(env.progress().index == 1);  // between goals
  r = env.step(Action::discrete(1));
  total += r.reward;
  CHECK(r.reward == 0.0);  // goal 2 pays nothing
  CHECK(env.progress().index == 2);
  r = env.step(Action::discrete(1));
  total += r.reward;
  r = env.step(Action::discrete(1));
  total += r.reward;
  CHECK(r.reward == 1.0);  // goal 3 pays
  CHECK(r.done);
  CHECK(total == 1.0);
}

TEST_CASE("teleport oracle over six goals collects reward 2") {
  Rng rng(601);
  WaypointTask t = random_task(EnvKind::nav2d, 6, 0.1, rng);
  Env env(EnvKind::nav2d, t);
  env.reset();
  TaskProgress prog;
  double total = 0.0;
  std::vector<double> state(2);
  for (int i = 0; i < 6; ++i) {
    state[0] = t.goals[static_cast<std::size_t>(i)][0];
    state[1] = t.goals[static_cast<std::size_t>(i)][1];
    total += step_progress(t, prog, state);
  }
  CHECK(total == 2.0);
  CHECK(prog.index == 6);
}

TEST_CASE("one state can complete a run of stacked goals") {
  WaypointTask t = agent_task({{0.0, 0.0}, {0.01, 0.0}, {0.0, 0.01}, {0.9, 0.9}});
  TaskProgress prog;
  double r = step_progress(t, prog, {0.0, 0.0});
  CHECK(prog.index == 3);
  CHECK(r == 1.0);
  // index never moves backwards afterwards
  double r2 = step_progress(t, prog, {-0.9, -0.9});
  CHECK(r2 == 0.0);
  CHECK(prog.index == 3);
}

TEST_CASE("eval on predicted straight-line states through three goals pays 1") {
  WaypointTask t = agent_task({{0.2, 0.0}, {0.4, 0.0}, {0.6, 0.0}});
  std::vector<std::vector<double>> states;
  for (int i = 1; i <= 14; ++i) states.push_back({0.05 * i, 0.0});
  CHECK(eval_reward_on_states(t, TaskProgress{}, states) == 1.0);
  CHECK(eval_reward_on_states(t, TaskProgress{}, {}) == 0.0);
}

TEST_CASE("blocks pickup beyond reach is a no-op") {
  Rng rng(602);
  Env env(EnvKind::blocks, random_task(EnvKind::blocks, 4, 0.1, rng));
  std::vector<double> start = env.reset();
  StepResult r = env.step(Action::discrete(4));
  CHECK(r.state == start);
  CHECK(r.state[10] == -1.0);
}

TEST_CASE("blocks pickup grabs the nearest block, drop leaves it in place") {
  Rng rng(603);
  Env env(EnvKind::blocks, random_task(EnvKind::blocks, 4, 0.1, rng));
  // put the agent within reach of block 2 at (-0.5, -0.5)
  std::vector<double> s = {-0.45, -0.5, 0.5, 0.5, -0.5, 0.5, -0.5, -0.5, 0.5, -0.5, -1.0};
  env.reset_to(s);
  StepResult r = env.step(Action::discrete(4));
  CHECK(r.state[10] == 2.0);
  CHECK(r.state[6] == -0.45);  // block snapped to the agent
  CHECK(r.state[7] == -0.5);

  // carrying: the block tracks the agent
  r = env.step(Action::discrete(1));
  CHECK(r.state[1] == doctest::Approx(-0.45).epsilon(1e-15));
  CHECK(r.state[6] == r.state[0]);
  CHECK(r.state[7] == r.state[1]);

  // drop, then walk away; the block stays put
  r = env.step(Action::discrete(5));
  CHECK(r.state[10] == -1.0);
  double bx = r.state[6], by = r.state[7];
  r = env.step(Action::discrete(0));
  CHECK(r.state[6] == bx);
  CHECK(r.state[7] == by);
}

TEST_CASE("blocks pickup prefers the lowest index on ties") {
  Rng rng(604);
  Env env(EnvKind::blocks, random_task(EnvKind::blocks, 4, 0.1, rng));
  // blocks 1 and 3 equidistant from the agent
  std::vector<double> s = {0.0, 0.0, 0.9, 0.9, 0.05, 0.0, 0.9, -0.9, -0.05, 0.0, -1.0};
  env.reset_to(s);
  StepResult r = env.step(Action::discrete(4));
  CHECK(r.state[10] == 1.0);
}

TEST_CASE("blocks held coupling holds under random action sequences") {
  Rng rng(605);
  for (int ep = 0; ep < 20; ++ep) {
    WaypointTask t = random_task(EnvKind::blocks, 4, 0.1, rng);
    Env env(EnvKind::blocks, t);
    env.reset();
    for (int i = 0; i < 200; ++i) {
      StepResult r = env.step(Action::discrete(rng.uniform_int(6)));
      int held = static_cast<int>(r.state[10]);
      if (held >= 0) {
        CHECK(r.state[static_cast<std::size_t>(2 + 2 * held)] == r.state[0]);
        CHECK(r.state[static_cast<std::size_t>(3 + 2 * held)] == r.state[1]);
      }
      CHECK(r.state[10] >= -1.0);
      CHECK(r.state[10] <= 3.0);
    }
  }
}

TEST_CASE("blocks goals track block positions, not the agent") {
  WaypointTask t;
  t.goals = {{0.3, 0.0}, {0.9, 0.9}, {-0.9, 0.9}, {0.9, -0.9}};
  t.goal_block = {0, 1, 2, 3};
  t.reach_radius = 0.1;
  Env env(EnvKind::blocks, t);
  // agent walking through goal 0 without the block does nothing
  env.reset_to({0.25, 0.0, -0.9, -0.9, 0.5, 0.5, -0.5, 0.5, -0.5, -0.5, -1.0});
  StepResult r = env.step(Action::discrete(0));
  CHECK(env.progress().index == 0);
  // but carrying block 0 there advances the task
  env.reset_to({0.25, 0.0, 0.25, 0.0, 0.5, 0.5, -0.5, 0.5, -0.5, -0.5, 0.0});
  r = env.step(Action::discrete(0));
  CHECK(env.progress().index == 1);
  CHECK(r.reward == 0.0);
}

TEST_CASE("episode reward is capped and the index is monotone") {
  Rng rng(606);
  EnvKind kinds[3] = {EnvKind::nav2d, EnvKind::wheeled, EnvKind::blocks};
  for (EnvKind kind : kinds) {
    for (int ep = 0; ep < 10; ++ep) {
      WaypointTask t = random_task(kind, 6, 0.25, rng);
      Env env(kind, t);
      env.reset();
      double total = 0.0;
      int last_index = 0;
      for (int i = 0; i < 150; ++i) {
        StepResult r = env.step(random_action(env.spec(), rng));
        total += r.reward;
        CHECK(env.progress().index >= last_index);
        last_index = env.progress().index;
      }
      CHECK(total <= std::floor(t.size() / 3.0));
    }
  }
}

TEST_CASE("replayed bookkeeping matches env-emitted rewards over 100 episodes") {
  Rng rng(607);
  EnvKind kinds[3] = {EnvKind::nav2d, EnvKind::wheeled, EnvKind::blocks};
  for (EnvKind kind : kinds) {
    for (int ep = 0; ep < 100; ++ep) {
      WaypointTask t = random_task(kind, 6, 0.3, rng);
      Env env(kind, t);
      env.reset();
      double total = 0.0;
      std::vector<std::vector<double>> visited;
      for (int i = 0; i < 60; ++i) {
        StepResult r = env.step(random_action(env.spec(), rng));
        total += r.reward;
        visited.push_back(r.state);
      }
      CHECK(eval_reward_on_states(t, TaskProgress{}, visited) == total);
    }
  }
}

TEST_CASE("meta-episode restore keeps waypoint progress") {
  WaypointTask t = agent_task({{0.0, 0.05}, {0.0, 0.1}, {0.0, 0.15}}, 0.04);
  Env env(EnvKind::nav2d, t);
  env.reset();
  env.step(Action::discrete(1));
  CHECK(env.progress().index == 1);
  std::vector<double> s = env.state();
  TaskProgress p = env.progress();

  Env env2(EnvKind::nav2d, t);
  env2.restore(s, p);
  CHECK(env2.progress().index == 1);
  StepResult r = env2.step(Action::discrete(1));
  CHECK(env2.progress().index == 2);
  CHECK(r.reward == 0.0);
  // reset_to clears progress instead
  env2.reset_to(s);
  CHECK(env2.progress().index == 0);
}

TEST_CASE("random tasks are seed-deterministic") {
  Rng a(608), b(608);
  WaypointTask ta = random_task(EnvKind::nav2d, 6, 0.1, a);
  WaypointTask tb = random_task(EnvKind::nav2d, 6, 0.1, b);
  REQUIRE(ta.size() == tb.size());
  for (int i = 0; i < ta.size(); ++i) {
    CHECK(ta.goals[static_cast<std::size_t>(i)] == tb.goals[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("goals files round-trip for agent and block tasks") {
  Rng rng(609);
  WaypointTask t = random_task(EnvKind::nav2d, 6, 0.1, rng);
  save_goals(t, "goals_nav.txt");
  WaypointTask t2 = load_goals("goals_nav.txt", EnvKind::nav2d, 0.1);
  REQUIRE(t2.size() == t.size());
  for (int i = 0; i < t.size(); ++i) {
    CHECK(t2.goals[static_cast<std::size_t>(i)] == t.goals[static_cast<std::size_t>(i)]);
    CHECK(t2.goal_block[static_cast<std::size_t>(i)] == -1);
  }
  std::remove("goals_nav.txt");

  WaypointTask bt = random_task(EnvKind::blocks, 4, 0.1, rng);
  save_goals(bt, "goals_blocks.txt");
  WaypointTask bt2 = load_goals("goals_blocks.txt", EnvKind::blocks, 0.1);
  REQUIRE(bt2.size() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(bt2.goals[static_cast<std::size_t>(i)] == bt.goals[static_cast<std::size_t>(i)]);
    CHECK(bt2.goal_block[static_cast<std::size_t>(i)] == i);
  }
  std::remove("goals_blocks.txt");

  CHECK_THROWS(load_goals("no_such_goals_file.txt", EnvKind::nav2d, 0.1));
}

TEST_CASE("env construction rejects mismatched goal tracking") {
  WaypointTask t = agent_task({{0.1, 0.1}});
  CHECK_THROWS(Env(EnvKind::blocks, t));
  WaypointTask bt;
  bt.goals = {{0.1, 0.1}};
  bt.goal_block = {0};
  CHECK_THROWS(Env(EnvKind::nav2d, bt));
}

}  // TEST_SUITE
