"""Drone-route representation shared by all solvers.

A route is an ordered tour from a satellite through hotspot or community
nodes and back.  Duration includes the return leg and must fit the
drone's flying range; visit times are arrival times at each stop
(return leg excluded).  Delivery routes may carry per-scenario delivery
plans keyed by scenario id.
"""

from __future__ import annotations

from dataclasses import dataclass, field

HOTSPOT = "hotspot"
DELIVERY = "delivery"


class RouteError(ValueError):
    pass


class RangeExceeded(RouteError):
    pass


class UnreachableStop(RouteError):
    pass


class DuplicateStop(RouteError):
    pass


@dataclass(frozen=True)
class Route:
    kind: str
    satellite: int
    stops: tuple[int, ...]
    pi: float
    visit_times: tuple[float, ...]
    deliveries: dict = field(default_factory=dict, compare=False)

    @property
    def key(self):
        return (self.satellite, self.kind, self.stops)

    def covers(self, node) -> bool:
        return node in self.stops

    def arrival(self, node) -> float:
        return self.visit_times[self.stops.index(node)]


def _leg_times(stops, s, kind, reach):
    if kind == HOTSPOT:
        from_sat, between = reach.tt_sat_hot, reach.tt_hot_hot
    else:
        from_sat, between = reach.tt_sat_com, reach.tt_com_com
    legs = []
    prev = None
    for node in stops:
        legs.append(from_sat[s, node] if prev is None else between[prev, node])
        prev = node
    if prev is not None:
        legs.append(from_sat[s, prev])
    return legs


def evaluate_route(stops, s, kind, inst, reach) -> Route:
    """Build a validated Route: distinct reachable stops, roundtrip within range."""
    if kind not in (HOTSPOT, DELIVERY):
        raise RouteError(f"unknown route kind {kind!r}")
    stops = tuple(int(v) for v in stops)
    if len(set(stops)) != len(stops):
        raise DuplicateStop(f"repeated stop in {stops}")
    allowed = reach.b_s[s] if kind == HOTSPOT else reach.c_s[s]
    for node in stops:
        if node not in allowed:
            raise UnreachableStop(f"{kind} node {node} not reachable from satellite {s}")
    legs = _leg_times(stops, s, kind, reach)
    pi = float(sum(legs))
    w = inst.drone.w_h if kind == HOTSPOT else inst.drone.w_d
    if pi > w + 1e-9:
        raise RangeExceeded(f"route time {pi:.6g} exceeds range {w:.6g}")
    times = []
    t = 0.0
    for leg in legs[: len(stops)]:
        t += leg
        times.append(float(t))
    return Route(kind=kind, satellite=s, stops=stops, pi=pi, visit_times=tuple(times))


def allocate_deliveries(route: Route, demand, l_max, f_d) -> dict[int, float]:
    """Greedy split of one drone load over the route's communities.

    Fills communities in descending unit-shortfall cost, ties by lowest
    community id, each capped at its demand, total capped at l_max.
    """
    if route.kind != DELIVERY:
        raise RouteError("allocation applies to delivery routes")
    order = sorted(route.stops, key=lambda c: (-float(f_d[c]), c))
    left = float(l_max)
    out = {}
    for c in order:
        give = min(left, max(0.0, float(demand[c])))
        if give > 0:
            out[c] = give
            left -= give
        if left <= 0:
            break
    return out


def verbatim_quantities(route: Route, demand) -> dict[int, float]:
    """First-stage handoff rule: every on-route community gets its full demand."""
    return {c: float(demand[c]) for c in route.stops}


class RoutePool:
    """Deduplicated per-(satellite, kind) route lists with stable ids."""

    def __init__(self):
        self._routes: dict[tuple[int, str], list[Route]] = {}
        self._seen: dict[tuple, int] = {}

    def add(self, route: Route) -> tuple[int, bool]:
        """Returns (index within its list, whether it was new)."""
        if route.key in self._seen:
            return self._seen[route.key], False
        lst = self._routes.setdefault((route.satellite, route.kind), [])
        lst.append(route)
        self._seen[route.key] = len(lst) - 1
        return len(lst) - 1, True

    def __contains__(self, route: Route) -> bool:
        return route.key in self._seen

    def routes(self, s, kind) -> list[Route]:
        return self._routes.get((s, kind), [])

    def all_routes(self):
        for (s, kind), lst in sorted(self._routes.items()):
            for i, r in enumerate(lst):
                yield s, kind, i, r

    def size(self) -> int:
        return sum(len(v) for v in self._routes.values())

    def audit(self, inst, reach) -> None:
        """Re-derive every route and assert its stored invariants."""
        for s, kind, _i, r in self.all_routes():
            ref = evaluate_route(r.stops, s, kind, inst, reach)
            assert abs(ref.pi - r.pi) <= 1e-9, (r.key, ref.pi, r.pi)
            assert all(abs(a - b) <= 1e-9 for a, b in zip(ref.visit_times, r.visit_times))
            for plan in r.deliveries.values():
                total = sum(plan.values())
                assert total <= inst.drone.l_max + 1e-9
                assert all(c in r.stops for c, q in plan.items() if q > 0)
