#include "ardq/checks/selfcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "ardq/checks/oracles.hpp"
#include "ardq/episode.hpp"
#include "ardq/missions.hpp"
#include "ardq/observation.hpp"
#include "ardq/radio.hpp"
#include "ardq/rng.hpp"
#include "ardq/scenario.hpp"
#include "ardq/trainer.hpp"

namespace ardq::check {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

SuiteResult finish(std::string name, Clock::time_point t0, long failures, const std::string& first_failure,
                   const std::string& summary) {
  SuiteResult r;
  r.name = std::move(name);
  r.passed = failures == 0;
  r.seconds = seconds_since(t0);
  r.detail = failures == 0 ? summary : std::to_string(failures) + " failures; first: " + first_failure;
  return r;
}

std::string at(Coord c) { return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")"; }

// Q-table over integer "states" read from battery_frac; used to pin down
// the double-Q target without any network in the way.
class TableModel final : public QModel {
 public:
  explicit TableModel(int states) : states_(states) {}
  std::size_t param_count() const override { return static_cast<std::size_t>(states_) * kActionCount; }
  ActionValues forward(const Observation& obs, std::span<const double> params) const override {
    ActionValues q{};
    const auto s = static_cast<std::size_t>(obs.battery_frac);
    for (std::size_t a = 0; a < q.size(); ++a) q[a] = params[s * kActionCount + a];
    return q;
  }
  void accumulate_gradient(const Observation& obs, std::span<const double>, const ActionValues& dq,
                           std::span<double> grad) const override {
    const auto s = static_cast<std::size_t>(obs.battery_frac);
    for (std::size_t a = 0; a < dq.size(); ++a) grad[s * kActionCount + a] += dq[a];
  }

 private:
  int states_;
};

Observation state_obs(int s) {
  Observation o;
  o.battery_frac = s;
  return o;
}

}  // namespace

EnvironmentMap random_map(int size, double building_density, std::uint64_t seed) {
  CounterRng rng(seed);
  Grid<Cell> cells(size, Cell::Free);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double u = rng.uniform();
      Cell c = Cell::Free;
      if (u < building_density / 2)
        c = Cell::TallBuilding;
      else if (u < building_density)
        c = Cell::SmallBuilding;
      else if (u < building_density + 0.08)
        c = Cell::NoFly;
      else if (u < building_density + 0.12)
        c = Cell::Landing;
      cells[{x, y}] = c;
    }
  const Coord pad{static_cast<int>(rng.uniform_int(0, size - 1)), static_cast<int>(rng.uniform_int(0, size - 1))};
  cells[pad] = Cell::Landing;
  return EnvironmentMap(std::move(cells), 10.0, 25.0);
}

SuiteResult geometry_suite(int maps, int size, int device_cells, std::uint64_t seed) {
  const auto t0 = Clock::now();
  CounterRng rng(seed);
  long failures = 0, los_pairs = 0, fov_cells = 0;
  std::string first;
  for (int m = 0; m < maps; ++m) {
    const EnvironmentMap map = random_map(size, 0.05 + 0.4 * rng.uniform(), rng.next_u64());
    for (int d = 0; d < device_cells; ++d) {
      const Coord dev{static_cast<int>(rng.uniform_int(0, size - 1)), static_cast<int>(rng.uniform_int(0, size - 1))};
      for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
          const Coord uav{x, y};
          ++los_pairs;
          const bool got = ardq::has_los(uav, dev, map);
          if (got != oracle::has_los(map, uav, dev) && failures++ == 0)
            first = "map " + std::to_string(m) + " has_los " + at(uav) + "->" + at(dev);
        }
    }
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x) {
        std::vector<Coord> got = compute_fov({x, y}, map).covered;
        std::sort(got.begin(), got.end(), [](Coord a, Coord b) { return std::pair{a.y, a.x} < std::pair{b.y, b.x}; });
        const std::vector<Coord> want = oracle::fov(map, {x, y});
        fov_cells += static_cast<long>(want.size());
        if (got != want && failures++ == 0) first = "map " + std::to_string(m) + " fov at " + at({x, y});
      }
  }
  std::ostringstream s;
  s << maps << " maps, " << los_pairs << " LoS pairs, " << fov_cells << " visible FoV cells agree";
  return finish("geometry", t0, failures, first, s.str());
}

SuiteResult centering_suite(int cases, std::uint64_t seed) {
  const auto t0 = Clock::now();
  CounterRng rng(seed);
  long failures = 0;
  std::string first;
  for (int n = 0; n < cases; ++n) {
    const int g = static_cast<int>(rng.uniform_int(4, 24));
    const EnvironmentMap map = random_map(g, 0.3 * rng.uniform(), rng.next_u64());
    Grid<double> target(g, 0.0);
    for (double& v : target.values()) v = rng.uniform() < 0.3 ? rng.uniform(0.0, 20.0) : 0.0;
    const Coord uav{static_cast<int>(rng.uniform_int(0, g - 1)), static_cast<int>(rng.uniform_int(0, g - 1))};
    const Tensor3 layers = map_layers(map, target, uav, 20.0);
    if (!(center_map(layers, uav) == oracle::center_map(layers, uav)) && failures++ == 0)
      first = "G=" + std::to_string(g) + " uav " + at(uav);
  }
  return finish("centering", t0, failures, first, std::to_string(cases) + " maps, exact equality");
}

NetConfig small_net(CoreType core, bool attention) {
  NetConfig c;
  c.core = core;
  c.attention = attention;
  c.conv_layers = 2;
  c.kernel = 3;
  c.filters = 2;
  c.units = 3;
  c.dense_layers = 2;
  c.dense_units = 8;
  return c;
}

InputShape small_input() { return {5, 3}; }

SuiteResult gradient_suite(double tolerance, std::uint64_t seed) {
  const auto t0 = Clock::now();
  CounterRng rng(seed);
  long failures = 0;
  double worst = 0.0;
  std::string first;
  for (CoreType core : kAllCores)
    for (bool attention : {true, false}) {
      const QNetwork net(small_net(core, attention), small_input());
      bool battery_reached = false;
      for (int trial = 0; trial < 3; ++trial) {
        std::vector<double> params(net.param_count());
        for (double& p : params) p = rng.uniform(-0.6, 0.6);
        Observation obs;
        obs.local = Tensor3(5, 5, kObsChannels);
        obs.global = Tensor3(3, 3, kObsChannels);
        for (int i = 0; i < 5; ++i)
          for (int j = 0; j < 5; ++j)
            for (int c = 0; c < kObsChannels; ++c) obs.local(i, j, c) = rng.uniform();
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            for (int c = 0; c < kObsChannels; ++c) obs.global(i, j, c) = rng.uniform();
        obs.battery_frac = rng.uniform();
        ActionValues dq{};
        for (double& v : dq) v = rng.uniform(-1.0, 1.0);
        const oracle::GradientCheck g = oracle::check_gradients(net, obs, params, dq);
        const double err = std::max(g.max_rel_error, g.battery_rel_error);
        worst = std::max(worst, err);
        battery_reached = battery_reached || g.battery_numeric != 0.0;
        if (err > tolerance && failures++ == 0) {
          std::ostringstream s;
          std::string array;
          for (const ParamEntry& p : net.layout().entries())
            if (g.worst_index >= p.offset && g.worst_index < p.offset + p.size) array = p.name;
          s << core_name(core) << (attention ? "+attention" : "") << " " << array << " (flat index " << g.worst_index
            << "): analytic " << g.worst_analytic << " numeric " << g.worst_numeric << ", battery error "
            << g.battery_rel_error;
          first = s.str();
        }
      }
      if (!battery_reached && failures++ == 0)
        first = std::string(core_name(core)) + ": battery input never influences the output";
    }
  std::ostringstream s;
  s << "10 configurations, max relative error " << worst;
  return finish("gradients", t0, failures, first, s.str());
}

SuiteResult ddqn_suite() {
  const auto t0 = Clock::now();
  long failures = 0;
  std::string first;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok && failures++ == 0) first = what;
  };

  const TableModel model(2);
  // State 1 is the next state. Only actions 0 and 1 are legal there.
  std::vector<double> main(model.param_count(), 0.0), target(model.param_count(), 0.0);
  main[6 + 0] = 1.0;
  main[6 + 1] = 2.0;
  main[6 + 5] = 9.0;  // illegal, must be ignored
  target[6 + 0] = 5.0;
  target[6 + 1] = 3.0;
  ActionMask two;
  two.set(0);
  two.set(1);
  const QFunction qm = [&](const Observation& o) { return model.forward(o, main); };
  const QFunction qt = [&](const Observation& o) { return model.forward(o, target); };

  const Transition step{state_obs(0), 0, 1.0, state_obs(1), two, false};
  const Transition* batch1[] = {&step};
  expect(ddqn_targets(batch1, qm, qt, 0.9)[0] == 1.0 + 0.9 * 3.0, "double-Q target must value main's argmax");

  ActionMask all;
  all.set();
  std::fill(main.begin() + 6, main.end(), 0.0);
  main[6 + 2] = 4.0;
  std::fill(target.begin() + 6, target.end(), 10.0);
  target[6 + 2] = 2.0;
  const Transition hand{state_obs(0), 0, 1.0, state_obs(1), all, false};
  const Transition* batch2[] = {&hand};
  expect(ddqn_targets(batch2, qm, qt, 0.9)[0] == 1.0 + 0.9 * 2.0, "r=1, gamma=0.9, Q_target(s',2)=2 gives 2.8");

  const Transition end{state_obs(0), 0, -5.0, state_obs(1), all, true};
  const Transition* batch3[] = {&end};
  expect(ddqn_targets(batch3, qm, qt, 0.9)[0] == -5.0, "terminal target must be the reward");

  CounterRng rng(99);
  std::vector<double> m(50), t(50);
  for (double& v : m) v = rng.uniform(-3.0, 3.0);
  for (double& v : t) v = rng.uniform(-3.0, 3.0);
  std::vector<double> t0v = t;
  soft_update(t0v, m, 0.0);
  expect(t0v == t, "eta = 0 must leave the target unchanged");
  std::vector<double> t1v = t;
  soft_update(t1v, m, 1.0);
  expect(t1v == m, "eta = 1 must copy main");
  std::vector<double> scalar{0.0};
  const std::vector<double> one{1.0};
  soft_update(scalar, one, 0.005);
  expect(scalar[0] == 0.005, "scalar soft update 0 -> 1 with eta 0.005 must give 0.005");
  std::vector<double> tv = t;
  soft_update(tv, m, 0.005);
  double before = 0.0, after = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    before += (t[i] - m[i]) * (t[i] - m[i]);
    after += (tv[i] - m[i]) * (tv[i] - m[i]);
  }
  expect(std::abs(std::sqrt(after) - 0.995 * std::sqrt(before)) <= 1e-12 * std::sqrt(before),
         "soft update must contract by 1 - eta");
  return finish("ddqn", t0, failures, first, "double-Q split and soft-update identities hold");
}

SuiteResult fuzz_suite(int episodes, std::uint64_t seed) {
  const auto t0 = Clock::now();
  CounterRng rng(seed);
  long failures = 0, steps = 0;
  std::string first;
  auto fail = [&](int e, const std::string& what) {
    if (failures++ == 0) first = "episode " + std::to_string(e) + ": " + what;
  };

  std::vector<std::shared_ptr<const EnvironmentMap>> maps;
  for (int i = 0; i < 16; ++i) {
    MapGenSpec ms;
    ms.size = static_cast<int>(rng.uniform_int(6, 16));
    ms.landing_zones = 2;
    ms.landing_zone_size = 1 + static_cast<int>(rng.uniform_int(0, 1));
    ms.nfz_count = static_cast<int>(rng.uniform_int(0, 3));
    ms.tall_building_count = static_cast<int>(rng.uniform_int(0, 6));
    ms.small_building_count = static_cast<int>(rng.uniform_int(0, 6));
    ms.max_block_size = 3;
    ms.seed = rng.next_u64();
    maps.push_back(std::make_shared<const EnvironmentMap>(generate_map(ms)));
  }

  for (int e = 0; e < episodes && failures < 100; ++e) {
    const auto& map = maps[static_cast<std::size_t>(e) % maps.size()];
    ScenarioSpec spec;
    spec.mission = rng.uniform() < 0.5 ? MissionType::Cpp : MissionType::Dh;
    spec.movement_budget = {5, 120};
    spec.device_count = static_cast<int>(rng.uniform_int(1, 8));
    spec.rng_seed = rng.next_u64();
    SimConfig sim;
    const bool arrivals = spec.mission == MissionType::Dh && rng.uniform() < 0.25;
    sim.poisson_lambda = arrivals ? 0.3 : 0.0;
    Episode ep = Episode::from_spec(map, spec, sim);

    while (!ep.done()) {
      const UavState before = ep.uav();
      const MissionState mission_before = ep.mission();
      const ActionMask legal = ep.legal();
      if (!legal.test(static_cast<std::size_t>(Action::Hover))) fail(e, "hover not legal");
      int a;
      if (legal.test(static_cast<std::size_t>(Action::Land)) && rng.uniform() < 0.03) {
        a = static_cast<int>(Action::Land);
      } else {
        do a = static_cast<int>(rng.uniform_int(0, kActionCount - 1));
        while (!legal.test(static_cast<std::size_t>(a)));
      }

      if (spec.mission == MissionType::Dh) {
        CounterRng plan_rng = rng.split(static_cast<std::uint64_t>(steps));
        const HarvestPlan plan = schedule_and_collect(before, mission_before.devices, *map, sim.channel, plan_rng);
        if (static_cast<int>(plan.scheduled.size()) != sim.channel.comm_slots_per_mission_slot)
          fail(e, "plan does not cover every communication slot");
        for (int d : plan.scheduled)
          if (d < -1 || d >= static_cast<int>(mission_before.devices.size())) fail(e, "slot serves an unknown device");
        for (std::size_t k = 0; k < plan.collected.size(); ++k) {
          const bool served = std::find(plan.scheduled.begin(), plan.scheduled.end(), static_cast<int>(k)) !=
                              plan.scheduled.end();
          if (plan.collected[k] < 0.0 || (!served && plan.collected[k] != 0.0) ||
              plan.collected[k] > mission_before.devices[k].remaining_data + 1e-9)
            fail(e, "collection outside the TDMA schedule");
        }
      }

      StepResult r;
      try {
        r = ep.step(action_at(a));
      } catch (const std::exception& ex) {
        fail(e, std::string("step threw: ") + ex.what());
        break;
      }
      ++steps;
      const UavState& now = ep.uav();
      if (now.battery != before.battery - 1) fail(e, "battery did not drop by exactly one");
      if (r.flags.landed != !now.operational) fail(e, "landing flag disagrees with status");
      if (r.flags.crashed != (now.battery == 0 && now.operational)) fail(e, "crash flag wrong");
      if (r.scheduled_slots > sim.channel.comm_slots_per_mission_slot) fail(e, "more served slots than slots");

      const MissionState& m = ep.mission();
      if (spec.mission == MissionType::Cpp) {
        for (std::size_t i = 0; i < m.target_layer.values().size(); ++i)
          if (m.target_layer.values()[i] > mission_before.target_layer.values()[i]) fail(e, "CPP target reappeared");
      } else {
        double collected = 0.0, remaining = 0.0;
        for (std::size_t k = 0; k < m.devices.size(); ++k) {
          const DeviceState& d = m.devices[k];
          collected += d.collected_data;
          remaining += d.remaining_data;
          if (std::abs(d.collected_data + d.remaining_data - d.initial_data) > 1e-9) fail(e, "device data not conserved");
          if (d.remaining_data < 0.0) fail(e, "negative remaining data");
          if (m.target_layer[d.position] != d.remaining_data) fail(e, "target layer out of sync with device");
          if (!arrivals && d.remaining_data > mission_before.devices[k].remaining_data) fail(e, "device data grew");
        }
        if (std::abs(collected + remaining - m.initial_total) > 1e-9) fail(e, "total data not conserved");
      }
    }

    if (ep.landed()) {
      const UavState frozen = ep.uav();
      const MissionState mission_frozen = ep.mission();
      bool threw = false;
      try {
        ep.step(Action::Hover);
      } catch (const std::logic_error&) {
        threw = true;
      }
      if (!threw) fail(e, "step after landing was accepted");
      const UavState& u = ep.uav();
      if (u.position != frozen.position || u.battery != frozen.battery || u.operational || u.airborne ||
          !(ep.mission().target_layer == mission_frozen.target_layer))
        fail(e, "state changed after landing");
    }
  }
  std::ostringstream s;
  s << episodes << " episodes, " << steps << " steps, zero violations";
  return finish("fuzz", t0, failures, first, s.str());
}

}  // namespace ardq::check
