// Microbenchmarks for the per-tick hot paths: the simulator budget is set by
// inverse/forward dynamics, IK tracking, and the reduced base model.

#include <benchmark/benchmark.h>

#include "robopainter/dynamics.hpp"
#include "robopainter/kinematics.hpp"
#include "robopainter/params.hpp"
#include "robopainter/rng.hpp"

namespace {

using namespace robopainter;

const RobotParams& params() {
  static const RobotParams p = load_robot_params(ROBOPAINTER_PARAMS_FILE);
  return p;
}

Vector6d random_q(Rng& rng) {
  Vector6d q;
  for (int i = 0; i < 6; ++i) q[i] = rng.uniform(-1.5, 1.5);
  return q;
}

void bm_fk(benchmark::State& state) {
  const ArmKinematics kin(params());
  Rng rng(7);
  const Vector6d q = random_q(rng);
  for (auto _ : state) benchmark::DoNotOptimize(kin.fk(q));
}
BENCHMARK(bm_fk);

void bm_jacobian(benchmark::State& state) {
  const ArmKinematics kin(params());
  Rng rng(7);
  const Vector6d q = random_q(rng);
  for (auto _ : state) benchmark::DoNotOptimize(kin.jacobian(q));
}
BENCHMARK(bm_jacobian);

void bm_ik_tracking(benchmark::State& state) {
  const ArmKinematics kin(params());
  Rng rng(7);
  const Vector6d q = random_q(rng);
  const Transform target = kin.fk(q);
  // seed one tracking-step away, the mission-loop case
  Vector6d seed = q;
  seed[1] += 0.002;
  seed[3] -= 0.002;
  for (auto _ : state) benchmark::DoNotOptimize(kin.ik(target, seed));
}
BENCHMARK(bm_ik_tracking);

void bm_newton_euler(benchmark::State& state) {
  const ArmDynamics dyn(params());
  Rng rng(7);
  const Vector6d q = random_q(rng), qd = random_q(rng), qdd = random_q(rng);
  for (auto _ : state) benchmark::DoNotOptimize(dyn.newton_euler(q, qd, qdd));
}
BENCHMARK(bm_newton_euler);

void bm_mass_matrix(benchmark::State& state) {
  const ArmDynamics dyn(params());
  Rng rng(7);
  const Vector6d q = random_q(rng);
  for (auto _ : state) benchmark::DoNotOptimize(dyn.mass_matrix(q));
}
BENCHMARK(bm_mass_matrix);

void bm_coriolis_matrix(benchmark::State& state) {
  const ArmDynamics dyn(params());
  Rng rng(7);
  const Vector6d q = random_q(rng), qd = random_q(rng);
  for (auto _ : state) benchmark::DoNotOptimize(dyn.coriolis_matrix(q, qd));
}
BENCHMARK(bm_coriolis_matrix);

void bm_forward_dynamics(benchmark::State& state) {
  const ArmDynamics dyn(params());
  Rng rng(7);
  const Vector6d q = random_q(rng), qd = random_q(rng), tau = random_q(rng);
  for (auto _ : state) benchmark::DoNotOptimize(dyn.forward_dynamics(q, qd, tau));
}
BENCHMARK(bm_forward_dynamics);

void bm_base_forward_reduced(benchmark::State& state) {
  const BaseDynamics dyn(params());
  Rng rng(7);
  Vector9d qb = Vector9d::Zero();
  qb[2] = 0.3;
  qb[3] = 3.0;
  qb[4] = 3.2;
  const Eigen::Vector2d u(0.4, 0.2), tau(0.5, 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(dyn.forward_reduced(qb, u, tau));
}
BENCHMARK(bm_base_forward_reduced);

}  // namespace

BENCHMARK_MAIN();
