#include <doctest.h>

#include "oldb/config.hpp"

using namespace oldb;

TEST_CASE("defaults from an empty file") {
  const RunConfig rc = parse_config("");
  CHECK(rc.sim.dim == 2);
  CHECK(rc.sim.points == 64);
  CHECK(rc.sim.physics.mu == 1.0);
  CHECK(rc.sim.split == 2);
  CHECK_FALSE(rc.write_snapshots);
}

TEST_CASE("sections, overrides and round trip") {
  const std::string text =
      "[grid]\npoints = 128\n"
      "[physics]\nb = 0.5\n"
      "[integrator]\ndt = 0.01\nt_end = 10\nnonlinear = false\n"
      "[initial]\nkind = oscillating\nepsilon = 0.0625\nseed = 42\n"
      "[output]\ninterval = 0.5\nlebesgue_p = 2.5\nsnapshots = true\n";
  const RunConfig rc = parse_config(text, {"physics.b=-0.25", "initial.seed=7"});
  CHECK(rc.sim.points == 128);
  CHECK(rc.sim.physics.b == -0.25);
  CHECK(rc.sim.t_end == 10);
  CHECK_FALSE(rc.sim.nonlinear);
  CHECK(rc.sim.initial.kind == InitialKind::Oscillating);
  CHECK(rc.sim.initial.epsilon == 0.0625);
  CHECK(rc.sim.initial.seed == 7);
  CHECK(rc.sim.lebesgue_p == 2.5);
  CHECK(rc.write_snapshots);

  const RunConfig back = parse_config(to_ini(rc));
  CHECK(to_ini(back) == to_ini(rc));
  CHECK(back.sim.physics.b == rc.sim.physics.b);
  CHECK(back.sim.dt == rc.sim.dt);
}

TEST_CASE("rejections") {
  CHECK_THROWS_AS(parse_config("[grid]\nsize = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[mesh]\npoints = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[grid]\npoints = many\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[grid]\npoints = 7\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[integrator]\nnonlinear = maybe\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("", {"grid.points"}), ConfigError);
  CHECK_THROWS_AS(parse_config("", {"points=32"}), ConfigError);
  CHECK_THROWS_AS(parse_config("", {"integrator.dt=0.003"}), ConfigError);  // t_end not a multiple
  CHECK_THROWS_AS(parse_config("[initial]\nkind = vortex\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[physics]\nb = 3\n"), ParameterError);
  CHECK_THROWS_AS(load_config("/nonexistent/run.ini"), ConfigError);
}
