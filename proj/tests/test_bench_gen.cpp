#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tg/bench_gen.hpp"
#include "tg/model_io.hpp"

using namespace tg;

TEST_CASE("pursuit scenario counts match the published tables") {
  struct Row {
    int scenario, states;
    std::int64_t transitions;
  };
  // scenario 2 is known not to reproduce its published transition count
  for (Row row : {Row{1, 27, 512}, Row{5, 256, 65536}, Row{6, 1296, 38416}}) {
    Game g = pursuit_scenario(row.scenario);
    CHECK(g.state_count() == row.states);
    CHECK(transition_count(g) == row.transitions);
  }
  CHECK(pursuit_scenario(3).state_count() == 64);
  CHECK(pursuit_scenario(4).state_count() == 125);
}

TEST_CASE("all pursuit scenarios validate") {
  for (int s = 1; s <= 6; ++s) CHECK(validate(pursuit_scenario(s)).ok);
  CHECK_THROWS(pursuit_scenario(0));
  CHECK_THROWS(pursuit_scenario(7));
}

TEST_CASE("pursuit capture takes precedence over rendezvous") {
  Game g = pursuit_scenario(1);
  // position (2,2,2): team together on the pursuer's node
  int s = g.state_index("2_2_2");
  REQUIRE(s >= 0);
  CHECK(!g.is_target[static_cast<size_t>(s)]);
  CHECK(g.delta(s, 0).support[0].state == s);  // absorbing loss
  // position (2,2,0): rendezvous away from the pursuer
  int t = g.state_index("2_2_0");
  REQUIRE(t >= 0);
  CHECK(g.is_target[static_cast<size_t>(t)]);
}

TEST_CASE("pursuit moves follow the closed neighbourhood") {
  Game g = pursuit_scenario(1);
  // node 0 has the single out-edge 0->2, so its closed neighbourhood is {0,2}
  int s = g.state_index("0_1_2");
  REQUIRE(s >= 0);
  CHECK(g.available[0][static_cast<size_t>(s)].size() == 2);
  // deterministic simultaneous move: (0->2, 1->0, 2->1) lands in 2_0_1
  std::vector<int> local = {1, 0, 1};  // availability positions
  auto av0 = g.available[0][static_cast<size_t>(s)];
  CHECK(g.actions[0][static_cast<size_t>(av0[1])] == "n2");
  const auto& d = g.delta(s, g.joint_code(s, local));
  REQUIRE(d.support.size() == 1);
  CHECK(g.states[static_cast<size_t>(d.support[0].state)] == "2_0_1");
  CHECK(d.support[0].prob == Rational(1));
}

TEST_CASE("single node pursuit degenerates to capture") {
  Digraph g1{1, {}};
  Game g = gen_pursuit(g1, {0}, 0);
  CHECK(g.state_count() == 1);
  CHECK(!g.is_target[0]);
  CHECK(validate(g).ok);
}

TEST_CASE("pursuit rejects malformed graphs") {
  CHECK_THROWS(gen_pursuit(Digraph{0, {}}, {0}, 0));
  CHECK_THROWS(gen_pursuit(Digraph{2, {{0, 5}}}, {0}, 1));
  CHECK_THROWS(gen_pursuit(Digraph{2, {}}, {5}, 0));
  CHECK_THROWS(gen_pursuit(Digraph{2, {}}, {}, 0));
}

TEST_CASE("robot scenario counts match the published tables") {
  struct Row {
    int scenario, states;
    std::int64_t transitions;
  };
  for (Row row : {Row{1, 16, 2000}, Row{2, 36, 4500}, Row{3, 81, 10125},
                  Row{4, 144, 18000}}) {
    Game g = robot_scenario(row.scenario);
    CHECK(g.state_count() == row.states);
    CHECK(transition_count(g) == row.transitions);
    CHECK(validate(g).ok);
  }
  CHECK_THROWS(robot_scenario(0));
}

TEST_CASE("robot dynamics: calm moves are deterministic after the coin") {
  Game g = robot_scenario(1);  // 2x2 grid, cells 0..3, robots at 0 and 3
  int s = g.initial;
  // both robots Wait under Calm: stay put with probability 1/2, lose otherwise
  std::vector<int> local = {4, 4, 4};
  const auto& d = g.delta(s, g.joint_code(s, local));
  REQUIRE(d.support.size() == 2);
  for (const auto& e : d.support) {
    CHECK(e.prob == Rational(1, 2));
    CHECK((e.state == s || e.state == 0));
  }
}

TEST_CASE("robot dynamics: waiting in wind means being pushed") {
  Game g = robot_scenario(1);
  int s = g.initial;  // robot 1 at cell 0 = (0,0), robot 2 at cell 3 = (1,1)
  // both Wait, wind N: robot 1 pushed to (0,1)=cell 2, robot 2 clamps at (1,1)
  std::vector<int> local = {4, 4, 0};
  const auto& d = g.delta(s, g.joint_code(s, local));
  bool found = false;
  for (const auto& e : d.support)
    if (g.states[static_cast<size_t>(e.state)] == "2_3") {
      found = true;
      CHECK(e.prob == Rational(1, 2));
    }
  CHECK(found);
}

TEST_CASE("robot dynamics: fighting the wind splits the outcome") {
  Game g = robot_scenario(1);
  int s = g.initial;
  // robot 1 moves E from (0,0) against wind N; robot 2 waits (pushed, clamps)
  std::vector<int> local = {2, 4, 0};
  const auto& d = g.delta(s, g.joint_code(s, local));
  // outcomes after the coin: (E success: cell 1, cell 3) or (pushed N: cell 2, cell 3)
  Rational quarter(1, 4);
  int hits = 0;
  for (const auto& e : d.support) {
    const std::string& name = g.states[static_cast<size_t>(e.state)];
    if (name == "1_3" || name == "2_3") {
      CHECK(e.prob == quarter);
      ++hits;
    }
  }
  CHECK(hits == 2);
}

TEST_CASE("robot collisions and the canonical loss state are absorbing non-targets") {
  Game g = robot_scenario(1);
  int collide = g.state_index("2_2");
  REQUIRE(collide >= 0);
  CHECK(!g.is_target[static_cast<size_t>(collide)]);
  CHECK(g.delta(collide, 0).support[0].state == collide);
  CHECK(g.delta(0, 0).support[0].state == 0);
  CHECK(!g.is_target[0]);
}

TEST_CASE("robot generator rejects bad configurations") {
  CHECK_THROWS(gen_robot(0, 2, {{0, 0}}, {{1, 0}}));
  CHECK_THROWS(gen_robot(2, 2, {{0, 0}, {0, 0}}, {{1, 0}}));  // colliding starts
  CHECK_THROWS(gen_robot(2, 2, {{0, 0}}, {{5, 5}}));          // off-grid goal
  CHECK_THROWS(gen_robot(2, 2, {{0, 0}, {1, 1}}, {}));        // no goals
}

TEST_CASE("jamming counts match the published tables") {
  struct Row {
    int channels;
    std::vector<int> buffers;
    int states;
    std::int64_t transitions;
  };
  for (const Row& row : {Row{2, {1, 1}, 5, 135}, Row{2, {2, 2}, 10, 270},
                         Row{3, {3, 3}, 17, 1088}, Row{3, {4, 4}, 26, 1664},
                         Row{4, {5, 5}, 37, 4625}, Row{4, {6, 6}, 50, 6250}}) {
    Game g = gen_jamming(row.channels, row.buffers);
    CHECK(g.state_count() == row.states);
    CHECK(transition_count(g) == row.transitions);
    CHECK(validate(g).ok);
  }
}

TEST_CASE("jamming semantics: decrement, collision, jam, wait") {
  Game g = gen_jamming(2, {1, 1});
  int s = g.initial;  // buffers (1,1)
  CHECK(g.states[static_cast<size_t>(s)] == "1_1");
  auto succ = [&](int a1, int a2, int j) {
    const auto& d = g.delta(s, g.joint_code(s, {a1, a2, j}));
    return g.states[static_cast<size_t>(d.support[0].state)];
  };
  CHECK(succ(0, 1, 0) == "sink");   // sensor 1 jammed on channel 1
  CHECK(succ(0, 0, 2) == "sink");   // sensors collide on channel 1
  CHECK(succ(0, 1, 2) == "0_0");    // disjoint channels, idle jammer
  CHECK(succ(2, 2, 0) == "1_1");    // both wait: nothing changes
  CHECK(succ(0, 2, 1) == "0_1");    // sensor 1 clear on channel 1, sensor 2 waits
  // the drained state is the absorbing target
  int done = g.state_index("0_0");
  CHECK(g.is_target[static_cast<size_t>(done)]);
  CHECK(g.delta(done, 0).support[0].state == done);
  // empty buffer transmissions are still real attempts: jam still kills
  const auto& d = g.delta(done, g.joint_code(done, {0, 2, 0}));
  CHECK(d.support[0].state == done);  // absorbing target, transition overridden
}

TEST_CASE("clique game structure") {
  Game g = gen_clique(3, {{0, 1}, {1, 2}, {0, 2}}, 3);
  CHECK(g.state_count() == 3);
  CHECK(g.actions[0].size() == 9);  // (index, vertex) pairs
  CHECK(g.actions[2].size() == 9);  // index pairs
  CHECK(validate(g).ok);
  auto succ = [&](int a1, int a2, int ch) {
    return g.delta(0, g.joint_code(0, {a1, a2, ch})).support[0].state;
  };
  // claims (1,v0) and (2,v1); challenge (1,2): edge 0-1 exists -> win
  CHECK(succ(0, 4, 1) == 1);
  // equal challenged indices need equal vertices
  CHECK(succ(0, 1, 0) == 2);  // (1,v0) vs (1,v1) under challenge (1,1)
  CHECK(succ(0, 0, 0) == 1);  // (1,v0) vs (1,v0) under challenge (1,1)
  // a challenge not matching the claimed indices loops
  CHECK(succ(0, 4, 0) == 0);  // claims (1,·),(2,·) vs challenge (1,1)
  CHECK(succ(0, 4, 3) == 0);  // claims (1,·),(2,·) vs challenge (2,1)
  CHECK_THROWS(gen_clique(3, {{0, 0}}, 3));  // self-loop edge
  CHECK_THROWS(gen_clique(3, {}, 0));
}

TEST_CASE("builtins have the documented shapes") {
  Game door = builtin("door");
  CHECK(door.players == std::vector<std::string>{"1", "2", "O"});
  CHECK(door.state_count() == 3);
  CHECK(door.actions[0] == std::vector<std::string>{"L", "R"});

  Game memory = builtin("memory");
  CHECK(memory.state_count() == 5);
  CHECK(memory.actions[0] == std::vector<std::string>{"a", "b", "wait"});
  CHECK(memory.actions[1] == std::vector<std::string>{"a", "b"});

  Game merged = builtin("door-merged");
  CHECK(merged.player_count() == 2);
  CHECK(merged.actions[0].size() == 4);

  CHECK_THROWS(builtin("nope"));
}

TEST_CASE("memory game transitions follow the reveal-then-answer pattern") {
  Game g = builtin("memory");
  auto succ = [&](int s, int a1, int a2, int b) {
    return g.delta(s, g.joint_code(s, {a1, a2, b})).support[0].state;
  };
  // P1 waits: the opponent's letter is revealed
  CHECK(succ(0, 2, 0, 0) == 1);  // a revealed -> Sa
  CHECK(succ(0, 2, 0, 1) == 2);  // b revealed -> Sb
  // both players matching the opponent's letter wins
  CHECK(succ(0, 0, 0, 0) == 3);
  CHECK(succ(0, 1, 1, 1) == 3);
  CHECK(succ(0, 0, 1, 0) == 4);  // team mismatch loses
  CHECK(succ(0, 1, 1, 0) == 4);  // wrong guess loses
  // memory states return to the start
  CHECK(succ(1, 0, 0, 0) == 0);
  CHECK(succ(2, 1, 1, 1) == 0);
}

TEST_CASE("generators are deterministic") {
  CHECK(serialize_game(pursuit_scenario(1)) == serialize_game(pursuit_scenario(1)));
  CHECK(serialize_game(robot_scenario(2)) == serialize_game(robot_scenario(2)));
  CHECK(serialize_game(gen_jamming(3, {3, 3})) == serialize_game(gen_jamming(3, {3, 3})));
}
