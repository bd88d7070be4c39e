import numpy as np
import pytest

from bottlesim import RouteParams, TwoRouteNetwork, bpr_travel_time, network_travel_times


@pytest.fixture
def route_a():
    return RouteParams(free_flow_time=5.0, capacity=500.0, exponent=2.0)


class TestRouteParams:
    def test_rejects_nonpositive_free_flow_time(self):
        with pytest.raises(ValueError, match="free_flow_time"):
            RouteParams(free_flow_time=0.0, capacity=500.0, exponent=2.0)

    def test_rejects_nonpositive_capacity(self):
        with pytest.raises(ValueError, match="capacity"):
            RouteParams(free_flow_time=5.0, capacity=-1.0, exponent=2.0)

    def test_rejects_exponent_not_above_one(self):
        with pytest.raises(ValueError, match="exponent"):
            RouteParams(free_flow_time=5.0, capacity=500.0, exponent=1.0)

    def test_default_network(self):
        net = TwoRouteNetwork.default()
        assert net.route_a == RouteParams(5.0, 500.0, 2.0)
        assert net.route_b == RouteParams(15.0, 800.0, 2.0)


class TestBprTravelTime:
    def test_zero_flow_is_free_flow_time(self, route_a):
        assert bpr_travel_time(route_a, 0) == 5.0

    def test_flow_at_capacity_short_route(self, route_a):
        # 5 * (1 + (500/500)^2) = 10
        assert bpr_travel_time(route_a, 500) == 10.0

    def test_half_capacity_long_route(self):
        # 15 * (1 + (400/800)^2) = 15 * 1.25 = 18.75
        route_b = RouteParams(15.0, 800.0, 2.0)
        assert bpr_travel_time(route_b, 400) == 18.75

    @pytest.mark.parametrize("exponent", [1.5, 2.0, 3.0, 7.0])
    def test_capacity_doubles_free_flow_time_for_any_exponent(self, exponent):
        params = RouteParams(free_flow_time=15.0, capacity=800.0, exponent=exponent)
        assert bpr_travel_time(params, 800) == 30.0

    def test_rejects_negative_flow(self, route_a):
        with pytest.raises(ValueError, match="nonnegative"):
            bpr_travel_time(route_a, -1)

    def test_strictly_increasing(self, route_a):
        rng = np.random.default_rng(42)
        for _ in range(200):
            f1, f2 = sorted(rng.uniform(0.0, 2000.0, size=2))
            if f1 == f2:
                continue
            assert bpr_travel_time(route_a, f1) < bpr_travel_time(route_a, f2)

    def test_relative_delay_depends_only_on_saturation_and_exponent(self):
        small = RouteParams(free_flow_time=5.0, capacity=100.0, exponent=2.0)
        large = RouteParams(free_flow_time=17.0, capacity=900.0, exponent=2.0)
        for saturation in (0.0, 0.3, 1.0, 2.5):
            ratio_small = bpr_travel_time(small, saturation * small.capacity) / small.free_flow_time
            ratio_large = bpr_travel_time(large, saturation * large.capacity) / large.free_flow_time
            assert ratio_small == pytest.approx(ratio_large, rel=1e-12)

    def test_accepts_real_valued_and_array_flows(self, route_a):
        assert bpr_travel_time(route_a, 250.5) == pytest.approx(
            5.0 * (1.0 + (250.5 / 500.0) ** 2)
        )
        flows = np.array([0.0, 500.0])
        np.testing.assert_allclose(bpr_travel_time(route_a, flows), [5.0, 10.0])

    def test_evaluates_beyond_capacity(self, route_a):
        # no cap: demand above capacity just delays steeply
        assert bpr_travel_time(route_a, 1300) == 5.0 * (1.0 + 2.6**2)


class TestNetworkTravelTimes:
    def test_free_flow_pair(self):
        assert network_travel_times(TwoRouteNetwork.default(), 0, 0) == (5.0, 15.0)

    def test_even_split(self):
        t_a, t_b = network_travel_times(TwoRouteNetwork.default(), 500, 500)
        assert t_a == 10.0
        assert t_b == 20.859375  # 15 * (1 + (500/800)^2)

    def test_everything_on_a(self):
        assert network_travel_times(TwoRouteNetwork.default(), 1000, 0) == (25.0, 15.0)

    def test_propagates_negative_flow_rejection(self):
        with pytest.raises(ValueError):
            network_travel_times(TwoRouteNetwork.default(), -5, 10)
