"""Wrap-around hexagonal macro layout, SC/UE placement, RSRP association."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SQRT3 = np.sqrt(3.0)


class DeploymentError(RuntimeError):
    """Placement constraints could not be satisfied."""


class AssociationError(ValueError):
    """No feasible server assignment."""


@dataclass
class NetworkLayout:
    site_xy: np.ndarray           # [n_sites, 2]
    sector_site: np.ndarray       # [n_sectors] owning site index
    sector_azimuth_deg: np.ndarray  # [n_sectors] boresight azimuth
    wrap_offsets: np.ndarray      # [n_offsets, 2] translation images (origin first)
    isd_m: float
    macro_height_m: float
    wrapped: bool

    @property
    def n_sites(self) -> int:
        return self.site_xy.shape[0]

    @property
    def n_sectors(self) -> int:
        return self.sector_site.shape[0]

    @property
    def cell_radius_m(self) -> float:
        """Circumradius of the hexagonal cell around each site."""
        return self.isd_m / SQRT3


@dataclass
class UeDeployment:
    xyz: np.ndarray        # [n, 3]
    drop_sector: np.ndarray  # [n] sector whose area the UE was dropped in

    @property
    def n(self) -> int:
        return self.xyz.shape[0]


@dataclass
class ScDeployment:
    xyz: np.ndarray          # [n, 3]
    access_azimuth_deg: np.ndarray  # [n] azimuth orientation of the access antenna
    drop_sector: np.ndarray
    target_ue: np.ndarray    # [n] targeted UE (ad-hoc) or -1

    @property
    def n(self) -> int:
        return self.xyz.shape[0]


def _hex_sites(isd_m: float, n_sites: int) -> np.ndarray:
    """Site centers on a triangular lattice, filled ring by ring."""
    a1 = np.array([1.0, 0.0]) * isd_m
    a2 = np.array([0.5, SQRT3 / 2.0]) * isd_m
    cands = []
    r_max = 1
    while 1 + 3 * r_max * (r_max + 1) < n_sites:
        r_max += 1
    for n in range(-r_max, r_max + 1):
        for m in range(-r_max, r_max + 1):
            ring = (abs(n) + abs(m) + abs(n + m)) // 2
            if ring <= r_max:
                xy = n * a1 + m * a2
                ang = np.arctan2(xy[1], xy[0]) % (2 * np.pi) if ring else 0.0
                cands.append((ring, ang, xy))
    cands.sort(key=lambda t: (t[0], t[1]))
    return np.array([xy for _, _, xy in cands[:n_sites]])


def build_layout(isd_m: float, n_sites: int = 19, macro_height_m: float = 32.0) -> NetworkLayout:
    """Macro grid with 3 sectors per site; toroidal wrap for the 19-site case."""
    if isd_m <= 0:
        raise ValueError(f"isd_m must be positive, got {isd_m}")
    site_xy = _hex_sites(isd_m, n_sites)
    if n_sites == 19:
        a1 = np.array([1.0, 0.0]) * isd_m
        a2 = np.array([0.5, SQRT3 / 2.0]) * isd_m
        t1 = 3 * a1 + 2 * a2
        t2 = -2 * a1 + 5 * a2
        t3 = t1 - t2
        offsets = np.vstack([[0.0, 0.0], t1, -t1, t2, -t2, t3, -t3])
        wrapped = True
    else:
        offsets = np.zeros((1, 2))
        wrapped = False
    sector_site = np.repeat(np.arange(n_sites), 3)
    sector_azimuth = np.tile([0.0, 120.0, 240.0], n_sites)
    return NetworkLayout(
        site_xy=site_xy,
        sector_site=sector_site,
        sector_azimuth_deg=sector_azimuth.astype(float),
        wrap_offsets=offsets,
        isd_m=float(isd_m),
        macro_height_m=float(macro_height_m),
        wrapped=wrapped,
    )


def wrap_vectors(layout: NetworkLayout, tx_xy: np.ndarray, rx_xy: np.ndarray):
    """Wrap-minimal displacement tx -> rx.

    Returns (dx, dy, d2d) arrays of shape [n_tx, n_rx] using, for every pair,
    the wrap image of rx closest to tx.
    """
    tx = np.atleast_2d(tx_xy)
    rx = np.atleast_2d(rx_xy)
    best_dx = best_dy = best_d2 = None
    for off in layout.wrap_offsets:
        dx = (rx[:, 0] + off[0])[None, :] - tx[:, 0][:, None]
        dy = (rx[:, 1] + off[1])[None, :] - tx[:, 1][:, None]
        d2 = dx * dx + dy * dy
        if best_d2 is None:
            best_dx, best_dy, best_d2 = dx, dy, d2
        else:
            better = d2 < best_d2
            best_dx = np.where(better, dx, best_dx)
            best_dy = np.where(better, dy, best_dy)
            best_d2 = np.where(better, d2, best_d2)
    return best_dx, best_dy, np.sqrt(best_d2)


def wrap_distance_2d(layout: NetworkLayout, tx_xy: np.ndarray, rx_xy: np.ndarray) -> np.ndarray:
    return wrap_vectors(layout, tx_xy, rx_xy)[2]


def _in_hexagon(xy: np.ndarray, isd_m: float) -> np.ndarray:
    """Point-in-cell test for the Voronoi hexagon centered at the origin."""
    half = isd_m / 2.0
    ok = np.abs(xy[:, 0]) <= half + 1e-9
    for ang in (np.pi / 3.0, 2 * np.pi / 3.0):
        n = np.array([np.cos(ang), np.sin(ang)])
        ok &= np.abs(xy @ n) <= half + 1e-9
    return ok


def _sample_sector_area(layout, sector: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points in one 120-degree wedge of a site's hexagonal cell."""
    site = layout.site_xy[layout.sector_site[sector]]
    az = np.deg2rad(layout.sector_azimuth_deg[sector])
    radius = layout.cell_radius_m
    out = np.empty((0, 2))
    while out.shape[0] < count:
        n = max(32, 2 * (count - out.shape[0]))
        ang = az + rng.uniform(-np.pi / 3.0, np.pi / 3.0, n)
        r = radius * np.sqrt(rng.uniform(0.0, 1.0, n))
        pts = np.column_stack([r * np.cos(ang), r * np.sin(ang)])
        pts = pts[_in_hexagon(pts, layout.isd_m)]
        out = np.vstack([out, pts + site])
    return out[:count]


def drop_ues(
    layout: NetworkLayout,
    k_per_sector: int,
    rng: np.random.Generator,
    min_site_m: float = 35.0,
    ue_height_m: float = 1.5,
    max_retries: int = 2000,
) -> UeDeployment:
    """Exactly k UEs uniform per sector area, >= min_site_m from every site."""
    if k_per_sector < 1:
        raise ValueError("k_per_sector must be >= 1")
    all_xy, all_sector = [], []
    for s in range(layout.n_sectors):
        got = np.empty((0, 2))
        for _ in range(max_retries):
            need = k_per_sector - got.shape[0]
            if need == 0:
                break
            pts = _sample_sector_area(layout, s, need, rng)
            dmin = wrap_distance_2d(layout, layout.site_xy, pts).min(axis=0)
            got = np.vstack([got, pts[dmin >= min_site_m]])
        else:
            raise DeploymentError(f"could not place {k_per_sector} UEs in sector {s}")
        all_xy.append(got[:k_per_sector])
        all_sector.append(np.full(k_per_sector, s))
    xy = np.vstack(all_xy)
    xyz = np.column_stack([xy, np.full(xy.shape[0], ue_height_m)])
    return UeDeployment(xyz=xyz, drop_sector=np.concatenate(all_sector))


def deploy_scs_random(
    layout: NetworkLayout,
    l_per_sector: int,
    rng: np.random.Generator,
    min_site_m: float = 75.0,
    min_sc_m: float = 40.0,
    sc_height_m: float = 5.0,
    max_retries: int = 2000,
) -> ScDeployment:
    """SCs uniform per sector under 3GPP relay-drop separation constraints."""
    placed = []
    sectors = []
    for s in range(layout.n_sectors):
        n_in_sector = 0
        for _ in range(max_retries):
            if n_in_sector == l_per_sector:
                break
            pt = _sample_sector_area(layout, s, 1, rng)[0]
            if wrap_distance_2d(layout, layout.site_xy, pt[None, :]).min() < min_site_m:
                continue
            if placed and wrap_distance_2d(layout, np.array(placed), pt[None, :]).min() < min_sc_m:
                continue
            placed.append(pt)
            sectors.append(s)
            n_in_sector += 1
        if n_in_sector < l_per_sector:
            raise DeploymentError(
                f"could not place {l_per_sector} SCs in sector {s} "
                f"(constraints: site >= {min_site_m} m, SC >= {min_sc_m} m)"
            )
    xy = np.array(placed)
    xyz = np.column_stack([xy, np.full(xy.shape[0], sc_height_m)])
    azimuth = rng.uniform(0.0, 360.0, xy.shape[0])
    return ScDeployment(
        xyz=xyz,
        access_azimuth_deg=azimuth,
        drop_sector=np.array(sectors),
        target_ue=np.full(xy.shape[0], -1, dtype=int),
    )


def deploy_scs_adhoc(
    ues: UeDeployment,
    layout: NetworkLayout,
    d_m: float,
    rng: np.random.Generator,
    sc_height_m: float = 5.0,
) -> ScDeployment:
    """One SC per UE at 2-D distance d, offset toward the UE's closest site.

    The placement angle is uniform in (-pi/2, pi/2) around the UE-to-site
    segment; the access antenna azimuth points back at the target UE.
    """
    if d_m < 0:
        raise ValueError("d_m must be >= 0")
    ue_xy = ues.xyz[:, :2]
    dx, dy, dist = wrap_vectors(layout, ue_xy, layout.site_xy)
    nearest = np.argmin(dist, axis=1)
    rows = np.arange(ue_xy.shape[0])
    seg = np.arctan2(dy[rows, nearest], dx[rows, nearest])  # UE -> closest site
    theta = rng.uniform(-np.pi / 2.0, np.pi / 2.0, ue_xy.shape[0])
    ang = seg + theta
    sc_xy = ue_xy + d_m * np.column_stack([np.cos(ang), np.sin(ang)])
    xyz = np.column_stack([sc_xy, np.full(sc_xy.shape[0], sc_height_m)])
    azimuth = np.rad2deg(np.arctan2(ue_xy[:, 1] - sc_xy[:, 1], ue_xy[:, 0] - sc_xy[:, 0]))
    return ScDeployment(
        xyz=xyz,
        access_azimuth_deg=azimuth,
        drop_sector=ues.drop_sector.copy(),
        target_ue=rows.copy(),
    )


def associate(rsrp_dbm: np.ndarray) -> np.ndarray:
    """Argmax-RSRP server per device; ties broken by lowest server index."""
    if rsrp_dbm.ndim != 2 or rsrp_dbm.shape[0] == 0:
        raise AssociationError("empty candidate set")
    return np.argmax(rsrp_dbm, axis=0)


def associate_capped(rsrp_dbm: np.ndarray, cap: int) -> np.ndarray:
    """Argmax-RSRP association with a per-server device limit.

    Overfull servers keep their strongest devices; evicted devices fall back
    to their best remaining candidate. Needed in DA mode where a sector can
    train at most `cap` pilot sequences.
    """
    n_srv, n_dev = rsrp_dbm.shape
    if n_dev > n_srv * cap:
        raise AssociationError(f"{n_dev} devices exceed total capacity {n_srv * cap}")
    table = rsrp_dbm.astype(float, copy=True)
    serving = associate(table)
    while True:
        counts = np.bincount(serving, minlength=n_srv)
        over = np.flatnonzero(counts > cap)
        if over.size == 0:
            return serving
        for s in over:
            devs = np.flatnonzero(serving == s)
            keep_order = np.argsort(-table[s, devs], kind="stable")
            evicted = devs[keep_order[cap:]]
            table[s, evicted] = -np.inf
            serving[evicted] = np.argmax(table[:, evicted], axis=0)
            if np.isneginf(table[serving[evicted], evicted]).any():
                raise AssociationError("capacity rebalancing failed")


def export_dict(
    layout: NetworkLayout,
    ues: UeDeployment | None = None,
    scs: ScDeployment | None = None,
    ue_serving: np.ndarray | None = None,
    sc_serving: np.ndarray | None = None,
) -> dict:
    """JSON-ready snapshot of one deployment (documented in the README)."""
    out = {
        "isd_m": layout.isd_m,
        "wrapped": layout.wrapped,
        "sites": layout.site_xy.tolist(),
        "sectors": [
            {"site": int(s), "azimuth_deg": float(a)}
            for s, a in zip(layout.sector_site, layout.sector_azimuth_deg)
        ],
        "wrap_offsets": layout.wrap_offsets.tolist(),
    }
    if ues is not None:
        out["ues"] = {
            "xyz": ues.xyz.tolist(),
            "drop_sector": ues.drop_sector.tolist(),
            "serving": ue_serving.tolist() if ue_serving is not None else None,
        }
    if scs is not None:
        out["scs"] = {
            "xyz": scs.xyz.tolist(),
            "access_azimuth_deg": scs.access_azimuth_deg.tolist(),
            "target_ue": scs.target_ue.tolist(),
            "serving_sector": sc_serving.tolist() if sc_serving is not None else None,
        }
    return out
