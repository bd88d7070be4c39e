import numpy as np
import pytest

from bottlesim import (
    ROUTE_A,
    ROUTE_B,
    EstimateVector,
    HumanAgent,
    HumanParams,
    ScenarioConfig,
    TasteProfile,
    apply_mday,
    choose_route,
    fleet_optimize,
    init_simulation,
    network_travel_times,
    run_scenario,
    sample_taste,
    step_day,
    strategy_weights,
    update_estimate,
)


def small_config(**kwargs):
    defaults = dict(base_population=40, phase_lengths=(3, 3, 3, 3), seed=7)
    defaults.update(kwargs)
    return ScenarioConfig(**defaults)


class TestScenarioConfig:
    @pytest.mark.parametrize(
        "kwargs,field",
        [
            ({"cav_share": -0.1}, "cav_share"),
            ({"cav_share": 1.5}, "cav_share"),
            ({"congestion": 0.0}, "congestion"),
            ({"congestion": -1.0}, "congestion"),
            ({"strategy": "Greedy"}, "strategy"),
            ({"phase_lengths": (100, 100, 100)}, "phase_lengths"),
            ({"phase_lengths": (100, -1, 100, 100)}, "phase_lengths"),
            ({"base_population": 0}, "base_population"),
            ({"seed": -1}, "seed"),
            ({"seed": 2**64}, "seed"),
        ],
    )
    def test_named_field_rejections(self, kwargs, field):
        with pytest.raises(ValueError, match=field):
            ScenarioConfig(**kwargs)

    def test_population_scales_with_congestion(self):
        assert ScenarioConfig(congestion=0.25).total_population == 250
        assert ScenarioConfig(congestion=2.6).total_population == 2600
        assert ScenarioConfig().total_population == 1000

    def test_rounding_is_half_up(self):
        config = ScenarioConfig(base_population=10, cav_share=0.25)
        assert config.fleet_size == 3  # 2.5 rounds up
        assert ScenarioConfig(base_population=1000, congestion=0.0005).total_population == 1

    def test_derived_sizes(self):
        config = ScenarioConfig(cav_share=0.1)
        assert config.fleet_size == 100
        assert config.survivor_count == 900
        assert config.m_day == 200
        assert config.total_days == 400


class TestInitSimulation:
    def test_population_starts_at_free_flow_knowledge(self):
        state = init_simulation(ScenarioConfig(seed=4))
        assert state.n_hdv == 1000
        agent = state.agent(0)
        assert (agent.estimates.t_a_hat, agent.estimates.t_b_hat) == (5.0, 15.0)
        assert agent.last_route is None
        assert not state.fleet_active

    def test_tastes_drawn_in_index_order_route_a_first(self):
        config = small_config(seed=99)
        state = init_simulation(config)
        rng = np.random.default_rng(99)
        beta = config.human_params.taste_spread
        for i in range(config.total_population):
            expected_a = sample_taste(rng.random(), beta)
            expected_b = sample_taste(rng.random(), beta)
            agent = state.agent(i)
            assert agent.tastes.eps_a == expected_a
            assert agent.tastes.eps_b == expected_b

    def test_ids_cover_population(self):
        state = init_simulation(small_config())
        ids = [state.agent(i).id for i in range(40)]
        assert ids == list(range(40))


class TestStepDay:
    def test_day_one_matches_pinned_realization(self):
        state = init_simulation(ScenarioConfig(seed=1))
        record = step_day(state)
        assert record.q_hdv_a == 518  # binomial(1000, 0.5) at this seed and generator
        assert record.q_cav_a == record.q_cav_b == 0
        assert record.mean_cav_time is None
        assert record.t_a == pytest.approx(5.0 * (1.0 + (518 / 500.0) ** 2))

    def test_day_two_matches_pinned_realization(self):
        state = init_simulation(ScenarioConfig(seed=1))
        step_day(state)
        assert step_day(state).q_hdv_a == 850

    def test_greedy_limit_all_choose_faster_route(self):
        # frozen free-flow estimates plus negligible tastes: everyone picks A
        config = ScenarioConfig(
            base_population=200,
            phase_lengths=(2, 0, 0, 0),
            human_params=HumanParams(learning_rate=0.0, explore_rate=0.0, taste_spread=1e-9),
            seed=3,
        )
        log = run_scenario(config)
        assert log.records[1].q_hdv_a == 200

    def test_stepping_past_the_last_day_raises(self):
        config = ScenarioConfig(base_population=10, phase_lengths=(1, 0, 0, 0))
        state = init_simulation(config)
        step_day(state)
        with pytest.raises(RuntimeError, match="complete"):
            step_day(state)


class TestApplyMday:
    def test_share_zero_changes_nothing(self):
        state = init_simulation(small_config(cav_share=0.0))
        apply_mday(state)
        assert state.n_hdv == 40
        assert not state.fleet_active

    def test_highest_indices_removed_survivors_untouched(self):
        config = ScenarioConfig(cav_share=0.1, seed=5)
        state = init_simulation(config)
        for _ in range(3):
            step_day(state)
        before = [state.agent(i) for i in range(900)]
        apply_mday(state)
        assert state.n_hdv == 900
        assert state.fleet_active
        for i, snapshot in enumerate(before):
            assert state.agent(i) == snapshot

    def test_double_invocation_rejected(self):
        state = init_simulation(small_config(cav_share=0.5))
        apply_mday(state)
        with pytest.raises(RuntimeError, match="already"):
            apply_mday(state)

    def test_full_share_leaves_no_humans(self):
        config = ScenarioConfig(
            base_population=50, cav_share=1.0, strategy="Social", phase_lengths=(2, 2, 2, 2), seed=11
        )
        log = run_scenario(config)
        for record in log.records[4:]:
            assert record.q_hdv_a == record.q_hdv_b == 0
            assert record.mean_hdv_time is None
            assert record.mean_cav_time is not None
        # the survivor set is empty from the start, so perceived means never exist
        assert all(record.mean_perceived_hdv_time is None for record in log.records)


class TestRunScenario:
    def test_share_zero_never_creates_a_fleet(self):
        log = run_scenario(small_config(cav_share=0.0))
        assert len(log.records) == 12
        assert all(r.q_cav_a + r.q_cav_b == 0 for r in log.records)

    def test_phase_integrity_and_conservation(self):
        config = small_config(cav_share=0.3, strategy="Social")
        log = run_scenario(config)
        m_day = config.m_day
        for record in log.records:
            total = record.q_hdv_a + record.q_hdv_b + record.q_cav_a + record.q_cav_b
            assert total == config.total_population
            fleet = record.q_cav_a + record.q_cav_b
            assert fleet == (0 if record.day <= m_day else config.fleet_size)

    def test_identical_configs_identical_logs(self):
        config = small_config(cav_share=0.2, strategy="Malicious", seed=123)
        assert run_scenario(config) == run_scenario(config)

    def test_records_are_consecutive_days_from_one(self):
        log = run_scenario(small_config())
        assert [r.day for r in log.records] == list(range(1, 13))

    def test_survivor_perceived_mean_ignores_future_fleet_members(self):
        # four drivers, two become fleet: perceived means use ids 0 and 1 only
        config = ScenarioConfig(base_population=4, cav_share=0.5, phase_lengths=(1, 0, 0, 0), seed=2)
        state = init_simulation(config)
        record = step_day(state)
        t = {ROUTE_A: record.t_a, ROUTE_B: record.t_b}
        perceived = []
        for i in range(2):
            agent = state.agent(i)
            taken = agent.last_route
            eps = agent.tastes.eps_a if taken == ROUTE_A else agent.tastes.eps_b
            perceived.append(t[taken] + eps)
        assert record.mean_perceived_hdv_time == pytest.approx(sum(perceived) / 2)


class TestScalarReconstruction:
    """The vectorized engine must replay the per-driver reference model exactly."""

    def test_engine_matches_scalar_ops_and_documented_draw_order(self):
        config = ScenarioConfig(
            base_population=40,
            cav_share=0.25,
            strategy="Social",
            phase_lengths=(2, 2, 2, 2),
            seed=31,
        )
        total = config.total_population
        params = config.human_params
        state = init_simulation(config)

        rng = np.random.default_rng(config.seed)
        tastes = []
        for _ in range(total):
            eps_a = sample_taste(rng.random(), params.taste_spread)
            eps_b = sample_taste(rng.random(), params.taste_spread)
            tastes.append((eps_a, eps_b))
        estimates = {
            i: (config.network.route_a.free_flow_time, config.network.route_b.free_flow_time)
            for i in range(total)
        }

        n_hdv = total
        fleet_on = False
        for day in range(1, config.total_days + 1):
            if day == config.m_day + 1:
                apply_mday(state)
                n_hdv = config.survivor_count
                fleet_on = config.fleet_size > 0
            # exploration coin then route coin, per driver in id order
            routes = {}
            for i in range(n_hdv):
                explore_draw = rng.random()
                route_draw = rng.random()
                if day == 1:
                    routes[i] = ROUTE_A if route_draw < 0.5 else ROUTE_B
                else:
                    agent = HumanAgent(
                        id=i,
                        tastes=TasteProfile(*tastes[i]),
                        estimates=EstimateVector(*estimates[i]),
                    )
                    routes[i] = choose_route(agent, explore_draw, route_draw, params)
            q_hdv_a = sum(1 for r in routes.values() if r == ROUTE_A)
            q_hdv_b = n_hdv - q_hdv_a
            if fleet_on:
                decision = fleet_optimize(
                    strategy_weights(config.strategy), q_hdv_a, q_hdv_b,
                    config.fleet_size, config.network,
                )
                q_cav_a, q_cav_b = decision.cav_on_a, decision.cav_on_b
            else:
                q_cav_a = q_cav_b = 0
            t_a, t_b = network_travel_times(
                config.network, q_hdv_a + q_cav_a, q_hdv_b + q_cav_b
            )
            for i in range(n_hdv):
                experienced = t_a if routes[i] == ROUTE_A else t_b
                updated = update_estimate(
                    EstimateVector(*estimates[i]), routes[i], experienced, params.learning_rate
                )
                estimates[i] = (updated.t_a_hat, updated.t_b_hat)

            record = step_day(state)
            assert (record.q_hdv_a, record.q_hdv_b) == (q_hdv_a, q_hdv_b)
            assert (record.q_cav_a, record.q_cav_b) == (q_cav_a, q_cav_b)
            assert (record.t_a, record.t_b) == (t_a, t_b)
            for i in range(n_hdv):
                agent = state.agent(i)
                assert agent.last_route == routes[i]
                assert (agent.estimates.t_a_hat, agent.estimates.t_b_hat) == estimates[i]
