"""Problem data: network nodes, travel times, reachability, instance I/O,
and seeded random generation of benchmark instances.

Distances are miles, times minutes, money dollars.  Planar instances use
Euclidean distance; geodesic instances use haversine on a 3958.8-mile
Earth radius.  Speeds are miles/minute for both trucks and drones.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

EARTH_RADIUS_MILES = 3958.8
DEMAND_RANGE = (2, 15)
FD_RANGE = (10, 1000)
DEFAULT_FT = 1.0
DEFAULT_FR = 10000.0
DEFAULT_FE = 10000.0
DEFAULT_RANGE_MILES = 35.0
DEFAULT_LMAX = 25.0
N_AREAS = 10


class SchemaError(ValueError):
    """Instance JSON violates the schema; carries a JSON-pointer-style path."""

    def __init__(self, pointer, message):
        self.pointer = pointer
        super().__init__(f"{pointer}: {message}")


class InvalidCoordinate(ValueError):
    pass


class InfeasibleConfig(ValueError):
    pass


class UncoverableCommunity(ValueError):
    """Some community is outside delivery range of every satellite."""


@dataclass(frozen=True)
class Community:
    id: int
    x: float
    y: float
    demand: float
    f_t: float = DEFAULT_FT
    f_r: float = DEFAULT_FR
    f_d: float = 100.0
    q_hat: float = 0.0


@dataclass(frozen=True)
class Node:
    id: int
    x: float
    y: float


@dataclass(frozen=True)
class Fleet:
    m_t: int
    m_h: int
    m_d: int


@dataclass(frozen=True)
class DroneSpec:
    w_h: float
    w_d: float
    l_max: float
    speed: float = 1.0


@dataclass(frozen=True)
class Area:
    community_ids: tuple[int, ...]
    gamma_a: int


@dataclass(frozen=True)
class UncertaintyModel:
    gamma: int
    areas: tuple[Area, ...]

    def validate(self, n_communities, all_ids):
        if self.gamma < 0 or self.gamma > n_communities:
            raise SchemaError("/uncertainty/gamma", f"budget {self.gamma} outside [0, {n_communities}]")
        seen = set()
        for k, a in enumerate(self.areas):
            if a.gamma_a < 0 or a.gamma_a > len(a.community_ids):
                raise SchemaError(f"/uncertainty/areas/{k}/gamma_a", "budget exceeds area size")
            for cid in a.community_ids:
                if cid in seen:
                    raise SchemaError(f"/uncertainty/areas/{k}", f"community {cid} in two areas")
                if cid not in all_ids:
                    raise SchemaError(f"/uncertainty/areas/{k}", f"unknown community {cid}")
                seen.add(cid)
        if seen != all_ids:
            raise SchemaError("/uncertainty/areas", "areas do not partition the communities")


@dataclass(frozen=True)
class Instance:
    depot: Node
    satellites: tuple[Node, ...]
    hotspots: tuple[Node, ...]
    communities: tuple[Community, ...]
    fleet: Fleet
    drone: DroneSpec
    f_e: float
    coverage_radius: float
    mode: str = "planar"

    def validate(self):
        if self.mode not in ("planar", "geodesic"):
            raise SchemaError("/mode", f"unknown mode {self.mode!r}")
        if min(self.fleet.m_t, self.fleet.m_h, self.fleet.m_d) < 1:
            raise SchemaError("/fleet", "m_t, m_h, m_d must all be >= 1")
        for label, v in (("/drone/Wh", self.drone.w_h), ("/drone/Wd", self.drone.w_d),
                         ("/drone/Lmax", self.drone.l_max), ("/drone/speed", self.drone.speed),
                         ("/costs/fE", self.f_e), ("/coverage_radius", self.coverage_radius)):
            if v < 0:
                raise SchemaError(label, "must be nonnegative")
        if self.drone.speed <= 0:
            raise SchemaError("/drone/speed", "must be positive")
        for k, c in enumerate(self.communities):
            if c.demand < 0:
                raise SchemaError(f"/communities/{k}/demand", "negative demand")
            if min(c.f_t, c.f_r, c.f_d, c.q_hat) < 0:
                raise SchemaError(f"/communities/{k}", "negative cost or deviation")

    @property
    def nominal_demand(self):
        return np.array([c.demand for c in self.communities])

    @property
    def f_d(self):
        return np.array([c.f_d for c in self.communities])

    @property
    def f_t(self):
        return np.array([c.f_t for c in self.communities])

    @property
    def f_r(self):
        return np.array([c.f_r for c in self.communities])

    @property
    def q_hat(self):
        return np.array([c.q_hat for c in self.communities])


def travel_time(p, q, speed=1.0, mode="planar"):
    """Point-to-point travel time in minutes; symmetric, zero iff p == q."""
    if speed <= 0:
        raise ValueError("speed must be positive")
    px, py = p
    qx, qy = q
    if mode == "planar":
        return math.hypot(px - qx, py - qy) / speed
    if mode == "geodesic":
        for lat, lon in ((px, py), (qx, qy)):
            if not (-90.0 <= lat <= 90.0) or not (-180.0 <= lon <= 180.0):
                raise InvalidCoordinate(f"lat/lon ({lat}, {lon}) out of range")
        if (px, py) == (qx, qy):
            return 0.0
        la1, lo1, la2, lo2 = map(math.radians, (px, py, qx, qy))
        h = math.sin((la2 - la1) / 2) ** 2 + math.cos(la1) * math.cos(la2) * math.sin((lo2 - lo1) / 2) ** 2
        return 2.0 * EARTH_RADIUS_MILES * math.asin(min(1.0, math.sqrt(h))) / speed
    raise ValueError(f"unknown mode {mode!r}")


@dataclass
class Reachability:
    """Per-satellite reachable node sets, hotspot coverage matrix, travel times.

    tt_truck is indexed 0 = depot, 1.. = satellites.  b_s / c_s hold node
    indices into inst.hotspots / inst.communities.
    """

    b_s: list[list[int]]
    c_s: list[list[int]]
    g: np.ndarray                       # (|B|, |C|) binary coverage
    tt_truck: np.ndarray                # (S+1, S+1)
    tt_sat_hot: np.ndarray              # (S, B)
    tt_hot_hot: np.ndarray              # (B, B)
    tt_sat_com: np.ndarray              # (S, C)
    tt_com_com: np.ndarray              # (C, C)

    def hotspots_covering(self, c):
        return np.nonzero(self.g[:, c])[0]


def build_reachability(inst: Instance) -> Reachability:
    """Range-based node sets and coverage per the roundtrip rule 2*tau <= W."""
    inst.validate()
    mode, speed = inst.mode, inst.drone.speed
    sats = [(n.x, n.y) for n in inst.satellites]
    hots = [(n.x, n.y) for n in inst.hotspots]
    coms = [(c.x, c.y) for c in inst.communities]
    pts = [(inst.depot.x, inst.depot.y)] + sats

    def matrix(a, b):
        return np.array([[travel_time(p, q, speed, mode) for q in b] for p in a])

    tt_truck = matrix(pts, pts)
    tt_sat_hot = matrix(sats, hots) if hots else np.zeros((len(sats), 0))
    tt_hot_hot = matrix(hots, hots) if hots else np.zeros((0, 0))
    tt_sat_com = matrix(sats, coms)
    tt_com_com = matrix(coms, coms)

    b_s = [[j for j in range(len(hots)) if 2.0 * tt_sat_hot[s, j] <= inst.drone.w_h]
           for s in range(len(sats))]
    c_s = [[c for c in range(len(coms)) if 2.0 * tt_sat_com[s, c] <= inst.drone.w_d]
           for s in range(len(sats))]
    g = np.zeros((len(hots), len(coms)), dtype=int)
    for j, h in enumerate(hots):
        for c, p in enumerate(coms):
            if travel_time(h, p, 1.0, mode) <= inst.coverage_radius:
                g[j, c] = 1
    uncovered = [c for c in range(len(coms)) if not any(c in c_s[s] for s in range(len(sats)))]
    if uncovered:
        ids = [inst.communities[c].id for c in uncovered]
        raise UncoverableCommunity(f"communities {ids} outside delivery range of every satellite")
    return Reachability(b_s, c_s, g, tt_truck, tt_sat_hot, tt_hot_hot, tt_sat_com, tt_com_com)


def drones_needed(total_demand, l_max):
    """Smallest drone count whose aggregate capacity exceeds the demand sum."""
    if total_demand <= 0:
        return 1
    return max(1, int(math.floor(total_demand / l_max)) + 1)


def generate_instance(n_communities, n_satellites, n_hotspots, m_t, seed,
                      region=(0.0, 0.0, 20.0, 20.0), mode="planar",
                      coverage_radius=16.0, m_h=1, m_d=None, md_rule="min",
                      w_h=DEFAULT_RANGE_MILES, w_d=DEFAULT_RANGE_MILES,
                      l_max=DEFAULT_LMAX, speed=1.0,
                      gamma_pct=0.3, gamma_area_pct=0.5):
    """Seeded random instance following the benchmark recipe.

    Demands are uniform integers in [2, 15]; unit-shortfall costs uniform in
    [10, 1000]; deviations are 50% of nominal; the region splits into ten
    longitude bands with per-band budgets.  m_d, when not given, is the
    min (md_rule="min") or max (md_rule="max") over satellites of the
    drone count needed to exceed that satellite's reachable demand sum.
    """
    if min(n_communities, n_satellites, n_hotspots, m_t, m_h) < 1:
        raise InfeasibleConfig("all counts must be >= 1")
    if md_rule not in ("min", "max"):
        raise InfeasibleConfig(f"unknown md_rule {md_rule!r}")
    x0, y0, x1, y1 = region
    if not (x0 < x1 and y0 < y1):
        raise InfeasibleConfig("empty region box")
    rng = np.random.default_rng(seed)

    def draw(n):
        return np.column_stack([rng.uniform(x0, x1, n), rng.uniform(y0, y1, n)])

    depot_xy = draw(1)[0]
    sat_xy = draw(n_satellites)
    hot_xy = draw(n_hotspots)
    com_xy = draw(n_communities)
    # assumption: every community must be delivery-reachable from some satellite
    for c in range(n_communities):
        ok = False
        for _attempt in range(1000):
            t = min(travel_time(tuple(sat_xy[s]), tuple(com_xy[c]), speed, mode)
                    for s in range(n_satellites))
            if 2.0 * t <= w_d:
                ok = True
                break
            com_xy[c] = draw(1)[0]
        if not ok:
            raise InfeasibleConfig(f"cannot place community {c} within delivery range")

    demand = rng.integers(DEMAND_RANGE[0], DEMAND_RANGE[1] + 1, n_communities)
    f_d = rng.integers(FD_RANGE[0], FD_RANGE[1] + 1, n_communities).astype(float)
    communities = tuple(
        Community(id=c, x=float(com_xy[c, 0]), y=float(com_xy[c, 1]),
                  demand=float(demand[c]), f_t=DEFAULT_FT, f_r=DEFAULT_FR,
                  f_d=float(f_d[c]), q_hat=0.5 * float(demand[c]))
        for c in range(n_communities))

    if m_d is None:
        per_sat = []
        for s in range(n_satellites):
            tot = sum(float(demand[c]) for c in range(n_communities)
                      if 2.0 * travel_time(tuple(sat_xy[s]), tuple(com_xy[c]), speed, mode) <= w_d)
            per_sat.append(drones_needed(tot, l_max))
        m_d = min(per_sat) if md_rule == "min" else max(per_sat)

    inst = Instance(
        depot=Node(0, float(depot_xy[0]), float(depot_xy[1])),
        satellites=tuple(Node(s, float(sat_xy[s, 0]), float(sat_xy[s, 1]))
                         for s in range(n_satellites)),
        hotspots=tuple(Node(j, float(hot_xy[j, 0]), float(hot_xy[j, 1]))
                       for j in range(n_hotspots)),
        communities=communities,
        fleet=Fleet(m_t=int(m_t), m_h=int(m_h), m_d=int(m_d)),
        drone=DroneSpec(w_h=float(w_h), w_d=float(w_d), l_max=float(l_max), speed=float(speed)),
        f_e=DEFAULT_FE, coverage_radius=float(coverage_radius), mode=mode)
    unc = make_uncertainty(inst, gamma_pct, gamma_area_pct, region=region)
    inst.validate()
    return inst, unc


def make_uncertainty(inst, gamma_pct, gamma_area_pct=0.5, region=None) -> UncertaintyModel:
    """Ten equal longitude bands over the region with per-band budgets."""
    xs = [c.x for c in inst.communities]
    if region is None:
        lo, hi = min(xs), max(xs)
    else:
        lo, hi = region[0], region[2]
    width = (hi - lo) / N_AREAS or 1.0
    bands = [[] for _ in range(N_AREAS)]
    for c in inst.communities:
        k = min(N_AREAS - 1, max(0, int((c.x - lo) / width)))
        bands[k].append(c.id)
    areas = tuple(Area(tuple(ids), math.ceil(gamma_area_pct * len(ids)))
                  for ids in bands if ids)
    gamma = math.ceil(gamma_pct * len(inst.communities))
    return UncertaintyModel(gamma=gamma, areas=areas)


def tiny1():
    """Canonical desk-scale fixture (planar, unit speed)."""
    communities = (
        Community(id=0, x=5.0, y=0.0, demand=5.0, f_t=1.0, f_r=10000.0, f_d=100.0, q_hat=2.0),
        Community(id=1, x=-5.0, y=0.0, demand=5.0, f_t=1.0, f_r=10000.0, f_d=100.0, q_hat=2.0),
        Community(id=2, x=4.0, y=3.0, demand=5.0, f_t=1.0, f_r=10000.0, f_d=100.0, q_hat=2.0),
    )
    inst = Instance(
        depot=Node(0, 0.0, 0.0),
        satellites=(Node(0, 2.0, 0.0), Node(1, -2.0, 0.0)),
        hotspots=(Node(0, 4.0, 0.0), Node(1, -4.0, 0.0)),
        communities=communities,
        fleet=Fleet(m_t=2, m_h=1, m_d=1),
        drone=DroneSpec(w_h=35.0, w_d=35.0, l_max=25.0, speed=1.0),
        f_e=10000.0, coverage_radius=3.5, mode="planar")
    unc = UncertaintyModel(gamma=2, areas=(Area((0, 1, 2), 2),))
    return inst, unc


# ----------------------------------------------------------------------
# JSON schema
# ----------------------------------------------------------------------

def _need(obj, key, pointer, kind=None):
    if key not in obj:
        raise SchemaError(f"{pointer}/{key}", "missing required field")
    v = obj[key]
    if kind == "num" and (not isinstance(v, (int, float)) or isinstance(v, bool)):
        raise SchemaError(f"{pointer}/{key}", f"expected a number, got {type(v).__name__}")
    if kind == "int" and (not isinstance(v, int) or isinstance(v, bool)):
        raise SchemaError(f"{pointer}/{key}", f"expected an integer, got {type(v).__name__}")
    if kind == "list" and not isinstance(v, list):
        raise SchemaError(f"{pointer}/{key}", "expected an array")
    if kind == "obj" and not isinstance(v, dict):
        raise SchemaError(f"{pointer}/{key}", "expected an object")
    return v


def _node_from_json(item, pointer, mode):
    xk, yk = ("lat", "lon") if mode == "geodesic" else ("x", "y")
    if not isinstance(item, dict):
        raise SchemaError(pointer, "expected an object")
    nid = _need(item, "id", pointer, "int")
    x = _need(item, xk, pointer, "num")
    y = _need(item, yk, pointer, "num")
    return nid, float(x), float(y)


def instance_to_dict(inst: Instance, unc: UncertaintyModel | None = None) -> dict:
    xk, yk = ("lat", "lon") if inst.mode == "geodesic" else ("x", "y")
    doc = {
        "mode": inst.mode,
        "depot": {"id": inst.depot.id, xk: inst.depot.x, yk: inst.depot.y},
        "satellites": [{"id": n.id, xk: n.x, yk: n.y} for n in inst.satellites],
        "hotspots": [{"id": n.id, xk: n.x, yk: n.y} for n in inst.hotspots],
        "communities": [
            {"id": c.id, xk: c.x, yk: c.y, "demand": c.demand, "fT": c.f_t,
             "fR": c.f_r, "fD": c.f_d, "qhat": c.q_hat}
            for c in inst.communities],
        "fleet": {"mt": inst.fleet.m_t, "mh": inst.fleet.m_h, "md": inst.fleet.m_d},
        "drone": {"Wh": inst.drone.w_h, "Wd": inst.drone.w_d,
                  "Lmax": inst.drone.l_max, "speed": inst.drone.speed},
        "costs": {"fE": inst.f_e},
        "coverage_radius": inst.coverage_radius,
    }
    if unc is not None:
        doc["uncertainty"] = {
            "gamma": unc.gamma,
            "areas": [{"community_ids": list(a.community_ids), "gamma_a": a.gamma_a}
                      for a in unc.areas],
        }
    return doc


def instance_from_dict(doc: dict):
    if not isinstance(doc, dict):
        raise SchemaError("", "top level must be an object")
    mode = doc.get("mode", "planar")
    if mode not in ("planar", "geodesic"):
        raise SchemaError("/mode", f"unknown mode {mode!r}")
    dep = _need(doc, "depot", "", "obj")
    did, dx, dy = _node_from_json(dep, "/depot", mode)

    def nodes(key):
        arr = _need(doc, key, "", "list")
        out = []
        for k, item in enumerate(arr):
            nid, x, y = _node_from_json(item, f"/{key}/{k}", mode)
            out.append(Node(nid, x, y))
        return tuple(out)

    satellites = nodes("satellites")
    hotspots = nodes("hotspots")
    carr = _need(doc, "communities", "", "list")
    communities = []
    for k, item in enumerate(carr):
        cid, x, y = _node_from_json(item, f"/communities/{k}", mode)
        demand = _need(item, "demand", f"/communities/{k}", "num")
        if demand < 0:
            raise SchemaError(f"/communities/{k}/demand", f"negative demand at community {cid}")
        communities.append(Community(
            id=cid, x=x, y=y, demand=float(demand),
            f_t=float(item.get("fT", DEFAULT_FT)),
            f_r=float(item.get("fR", DEFAULT_FR)),
            f_d=float(item.get("fD", 100.0)),
            q_hat=float(item.get("qhat", 0.0))))
    fleet = _need(doc, "fleet", "", "obj")
    drone = _need(doc, "drone", "", "obj")
    costs = _need(doc, "costs", "", "obj")
    inst = Instance(
        depot=Node(did, dx, dy), satellites=satellites, hotspots=hotspots,
        communities=tuple(communities),
        fleet=Fleet(m_t=_need(fleet, "mt", "/fleet", "int"),
                    m_h=_need(fleet, "mh", "/fleet", "int"),
                    m_d=_need(fleet, "md", "/fleet", "int")),
        drone=DroneSpec(w_h=float(_need(drone, "Wh", "/drone", "num")),
                        w_d=float(_need(drone, "Wd", "/drone", "num")),
                        l_max=float(_need(drone, "Lmax", "/drone", "num")),
                        speed=float(drone.get("speed", 1.0))),
        f_e=float(_need(costs, "fE", "/costs", "num")),
        coverage_radius=float(_need(doc, "coverage_radius", "", "num")),
        mode=mode)
    inst.validate()
    unc = None
    if "uncertainty" in doc:
        u = _need(doc, "uncertainty", "", "obj")
        areas = []
        for k, a in enumerate(_need(u, "areas", "/uncertainty", "list")):
            ids = _need(a, "community_ids", f"/uncertainty/areas/{k}", "list")
            areas.append(Area(tuple(int(i) for i in ids),
                              _need(a, "gamma_a", f"/uncertainty/areas/{k}", "int")))
        unc = UncertaintyModel(gamma=_need(u, "gamma", "/uncertainty", "int"),
                               areas=tuple(areas))
        unc.validate(len(communities), {c.id for c in communities})
    return inst, unc


def save_instance(inst: Instance, path, unc: UncertaintyModel | None = None):
    doc = instance_to_dict(inst, unc)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_instance(path):
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError("", f"not valid JSON: {exc}") from exc
    return instance_from_dict(doc)
