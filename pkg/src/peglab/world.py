"""Quasi-static peg-in-hole simulator with penalty contact.

The robot is modeled as an ideally stiff position tracker: each inner
tick the peg pose moves toward the commanded pose under a per-axis speed
clamp, contact notwithstanding. The board is a half-space below z=0 with
a prismatic hole (the peg cross-section dilated by the clearance, widened
near the lip by a 45-degree chamfer). Penetration of peg sample points
into board material produces spring forces (stiffness * deepest
penetration per contact patch) plus velocity-opposing Coulomb friction;
the resulting wrench is what the simulated F/T sensor reads.

Sign convention: WorldState.contact is the wrench the environment exerts
on the peg. Observations and the controller consume the negated wrench,
i.e. the reaction the robot applies to the environment.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

import numpy as np

from .curriculum import DomainParams
from .geometry import CrossSection, PegShape, rotvec_to_matrix

SUCCESS_DISTANCE = 1.0e-3    # m, lateral alignment required for completion

OFFSET_POS_LIMIT = 50.0      # mm, rejection envelope for initial offsets
OFFSET_ROT_LIMIT = 30.0      # deg


class Status(enum.Enum):
    SUCCESS = "success"
    COLLISION = "collision"
    STUCK = "stuck"
    TIMEOUT = "timeout"
    RUNNING = "running"


@dataclass
class Pose:
    position: np.ndarray     # (3,) m
    orientation: np.ndarray  # (3,) rotation vector, rad

    def copy(self) -> "Pose":
        return Pose(self.position.copy(), self.orientation.copy())


@dataclass
class Wrench:
    force: np.ndarray   # (3,) N
    torque: np.ndarray  # (3,) N m

    @staticmethod
    def zero() -> "Wrench":
        return Wrench(np.zeros(3), np.zeros(3))

    def copy(self) -> "Wrench":
        return Wrench(self.force.copy(), self.torque.copy())


@dataclass
class HoleSpec:
    center: np.ndarray   # (3,) m, hole axis at the board top surface
    clearance: float     # m, radial gap between peg and hole cross-sections
    depth: float         # m
    chamfer: float       # m, 45-degree lead-in on the lip


@dataclass(frozen=True)
class WorldParams:
    """Fixed desk-scale geometry and tracker limits."""

    board_top: float = 0.0
    peg_length: float = 0.05
    hole_depth: float = 0.02
    chamfer: float = 0.5e-3
    v_max_lin: float = 0.05                 # m/s
    v_max_ang: float = np.pi / 4.0          # rad/s
    ring_fractions: tuple = (0.0, 0.1, 0.25, 0.5, 1.0)
    friction_vel_eps: float = 1.0e-4        # m/s, Coulomb smoothing scale


@dataclass(frozen=True)
class NormalizationConstants:
    pos: float = 0.05
    rot: float = np.pi / 6.0
    lin_vel: float = 0.05
    ang_vel: float = np.pi / 4.0
    force: float = 50.0
    torque: float = 5.0

    def scale(self) -> np.ndarray:
        return np.array([self.pos] * 3 + [self.rot] * 3
                        + [self.lin_vel] * 3 + [self.ang_vel] * 3
                        + [self.force] * 3 + [self.torque] * 3)


@dataclass
class WorldState:
    peg_pose: Pose
    peg_lin_vel: np.ndarray
    peg_ang_vel: np.ndarray
    hole: HoleSpec
    shape: PegShape
    goal: Pose
    contact: Wrench
    env_stiffness: float
    env_friction: float
    time: float
    insertion_tolerance: float
    params: WorldParams = field(default_factory=WorldParams)
    section: CrossSection = field(init=False, repr=False)
    local_points: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.section = CrossSection(self.shape)
        b = self.section.boundary
        rings = []
        for f in self.params.ring_fractions:
            zcol = np.full(len(b), f * self.params.peg_length)
            rings.append(np.column_stack([b, zcol]))
        self.local_points = np.concatenate(rings, axis=0)


def make_task(params: DomainParams, rng_seed: int = 0,
              world: WorldParams = WorldParams()) -> WorldState:
    """Realize a sampled task instance as an initial world state.

    The peg starts at the goal pose displaced by the sampled offset; if
    the offset pose would interpenetrate the board it is raised by the
    minimal vertical amount that clears all material, so episodes always
    begin contact-free. Construction is deterministic in (params, seed).
    """
    del rng_seed  # reserved; realization is fully determined by params
    clearance = params.clearance_mm * 1e-3
    tol = params.tolerance_mm * 1e-3
    if clearance <= 0:
        raise ValueError("clearance must be positive")
    if np.any(np.abs(params.offset_pos_mm) > OFFSET_POS_LIMIT):
        raise ValueError("initial position offset outside +-50 mm envelope")
    if np.any(np.abs(params.offset_rot_deg) > OFFSET_ROT_LIMIT):
        raise ValueError("initial orientation offset outside +-30 deg envelope")
    if not 0 < tol < world.hole_depth:
        raise ValueError("insertion tolerance must lie in (0, hole depth)")

    hole = HoleSpec(
        center=np.array([0.0, 0.0, world.board_top]),
        clearance=clearance,
        depth=world.hole_depth,
        chamfer=world.chamfer,
    )
    goal = Pose(
        position=np.array([0.0, 0.0, world.board_top - world.hole_depth + tol]),
        orientation=np.zeros(3),
    )
    start = Pose(
        position=goal.position + params.offset_pos_mm * 1e-3,
        orientation=goal.orientation + np.deg2rad(params.offset_rot_deg),
    )
    state = WorldState(
        peg_pose=start,
        peg_lin_vel=np.zeros(3),
        peg_ang_vel=np.zeros(3),
        hole=hole,
        shape=params.shape,
        goal=goal,
        contact=Wrench.zero(),
        env_stiffness=params.stiffness,
        env_friction=params.friction,
        time=0.0,
        insertion_tolerance=tol,
        params=world,
    )
    lift = _clearing_lift(state)
    if lift > 0.0:
        state.peg_pose.position = state.peg_pose.position + np.array([0.0, 0.0, lift])
    state.contact = compute_contact(state)
    return state


def _world_points(w: WorldState) -> np.ndarray:
    rot = rotvec_to_matrix(w.peg_pose.orientation)
    return w.peg_pose.position + w.local_points @ rot.T


def _clearing_lift(w: WorldState) -> float:
    """Minimal vertical raise that frees every penetrating sample point."""
    pts = _world_points(w)
    z = pts[:, 2]
    board = w.hole.center[2]
    z_bot = board - w.hole.depth
    rel = pts[:, :2] - w.hole.center[:2]
    d_base, _ = w.section.outside_distance(rel)
    widen = np.clip(z - (board - w.hole.chamfer), 0.0, w.hole.chamfer)
    in_footprint = d_base <= w.hole.clearance + widen
    need = np.where(in_footprint, z_bot - z, board - z)
    worst = float(need.max())
    return worst + 1e-9 if worst > 0.0 else 0.0


def compute_contact(w: WorldState) -> Wrench:
    """Penalty contact wrench on the peg about its tip center.

    Penetrations resolve either vertically (board top, hole floor) or
    laterally (hole wall), whichever is shallower. Each contact patch
    contributes stiffness * deepest penetration along its normal, applied
    at the penetration-weighted centroid, plus smoothed Coulomb friction
    opposing the sliding velocity there. Opposing-wall contacts are kept
    as separate patches so a jammed peg feels a squeeze, not a cancel.
    """
    pts = _world_points(w)
    z = pts[:, 2]
    board = w.hole.center[2]
    if z.min() >= board:
        return Wrench.zero()
    z_bot = board - w.hole.depth
    below = z < board
    pts_b = pts[below]
    zb = z[below]
    rel = pts_b[:, :2] - w.hole.center[:2]
    d_base, inward = w.section.outside_distance(rel)
    widen = np.clip(zb - (board - w.hole.chamfer), 0.0, w.hole.chamfer)
    clr = w.hole.clearance + widen
    in_footprint = d_base <= clr
    pen_v = np.where(in_footprint, z_bot - zb, board - zb)
    pen_l = np.where(zb >= z_bot, d_base - clr, -np.inf)
    use_lat = (pen_l > 0.0) & ((pen_v <= 0.0) | (pen_l < pen_v))
    use_ver = (pen_v > 0.0) & ~use_lat

    force = np.zeros(3)
    torque = np.zeros(3)

    def add_patch(normal, depth_max, weights, points):
        nonlocal force, torque
        centroid = (points * weights[:, None]).sum(axis=0) / weights.sum()
        f_n = w.env_stiffness * depth_max
        arm = centroid - w.peg_pose.position
        v_pt = w.peg_lin_vel + np.cross(w.peg_ang_vel, arm)
        v_t = v_pt - (v_pt @ normal) * normal
        speed = float(np.linalg.norm(v_t))
        f = f_n * normal
        if speed > 1e-15:
            f = f - (w.env_friction * f_n
                     * np.tanh(speed / w.params.friction_vel_eps)) * (v_t / speed)
        force += f
        torque += np.cross(arm, f)

    if use_ver.any():
        dv = pen_v[use_ver]
        add_patch(np.array([0.0, 0.0, 1.0]), float(dv.max()), dv, pts_b[use_ver])

    if use_lat.any():
        dl = pen_l[use_lat]
        nl = inward[use_lat]
        pl = pts_b[use_lat]
        resultant = (nl * dl[:, None]).sum(axis=0)
        nref = resultant if np.linalg.norm(resultant) > 1e-12 else nl[0]
        nref = nref / np.linalg.norm(nref)
        side = nl @ nref >= 0.0
        for cluster in (side, ~side):
            if not cluster.any():
                continue
            d = dl[cluster]
            nbar = (nl[cluster] * d[:, None]).sum(axis=0)
            nn = np.linalg.norm(nbar)
            if nn < 1e-12:
                continue
            normal = np.array([nbar[0] / nn, nbar[1] / nn, 0.0])
            add_patch(normal, float(d.max()), d, pl[cluster])

    return Wrench(force, torque)


def step_inner(w: WorldState, commanded: Pose, dt: float) -> WorldState:
    """Advance one inner tick toward the commanded pose.

    Motion is clamped per axis to the tracker speed limits; velocities
    are the finite difference of the realized motion and feed the
    friction model. Mutates and returns `w`.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    p = w.peg_pose
    max_lin = w.params.v_max_lin * dt
    max_rot = w.params.v_max_ang * dt
    new_pos = p.position + np.clip(commanded.position - p.position, -max_lin, max_lin)
    new_rot = p.orientation + np.clip(commanded.orientation - p.orientation,
                                      -max_rot, max_rot)
    w.peg_lin_vel = (new_pos - p.position) / dt
    w.peg_ang_vel = (new_rot - p.orientation) / dt
    w.peg_pose = Pose(new_pos, new_rot)
    w.contact = compute_contact(w)
    w.time += dt
    return w


def is_success(w: WorldState) -> bool:
    """Inside the hole within tolerance of full insertion, laterally
    aligned to better than SUCCESS_DISTANCE with the goal axis."""
    z_bot = w.hole.center[2] - w.hole.depth
    pos = w.peg_pose.position
    lat = float(np.hypot(pos[0] - w.goal.position[0], pos[1] - w.goal.position[1]))
    above = max(0.0, pos[2] - (z_bot + w.insertion_tolerance))
    below = max(0.0, z_bot - pos[2])
    dist = float(np.sqrt(lat * lat + above * above + below * below))
    return dist < SUCCESS_DISTANCE and (pos[2] - z_bot) <= w.insertion_tolerance


def check_termination(w: WorldState, f_max: float, cumulative_reward: float,
                      r_min: float, t_max: int, outer_dt: float = 0.05) -> Status:
    """Episode status, checked once per outer step (in listed priority)."""
    if is_success(w):
        return Status.SUCCESS
    if float(np.linalg.norm(w.contact.force)) > f_max:
        return Status.COLLISION
    if cumulative_reward < r_min:
        return Status.STUCK
    if int(round(w.time / outer_dt)) >= t_max:
        return Status.TIMEOUT
    return Status.RUNNING


def observe(w: WorldState, goal: Pose,
            norms: NormalizationConstants = NormalizationConstants()) -> np.ndarray:
    """18-dim observation: pose error, velocity, sensed external wrench,
    each channel scaled by its maximum and clamped to [-1, 1]."""
    scale = norms.scale()
    if not np.all(scale > 0):
        raise ValueError("normalization constants must be positive")
    raw = np.concatenate([
        goal.position - w.peg_pose.position,
        goal.orientation - w.peg_pose.orientation,
        w.peg_lin_vel,
        w.peg_ang_vel,
        -w.contact.force,
        -w.contact.torque,
    ])
    return np.clip(raw / scale, -1.0, 1.0)


def snapshot(w: WorldState) -> dict:
    """JSON-ready dict of the full state, SI units."""
    return {
        "peg_pose": {"position": w.peg_pose.position.tolist(),
                     "orientation": w.peg_pose.orientation.tolist()},
        "peg_velocity": {"linear": w.peg_lin_vel.tolist(),
                         "angular": w.peg_ang_vel.tolist()},
        "hole": {"center": w.hole.center.tolist(),
                 "clearance": w.hole.clearance,
                 "depth": w.hole.depth,
                 "chamfer": w.hole.chamfer},
        "shape": {"kind": w.shape.kind, "radius": w.shape.radius},
        "goal": {"position": w.goal.position.tolist(),
                 "orientation": w.goal.orientation.tolist()},
        "contact": {"force": w.contact.force.tolist(),
                    "torque": w.contact.torque.tolist()},
        "env_stiffness": w.env_stiffness,
        "env_friction": w.env_friction,
        "time": w.time,
        "insertion_tolerance": w.insertion_tolerance,
    }


def snapshot_json(w: WorldState) -> str:
    return json.dumps(snapshot(w), indent=2)


def from_snapshot(doc: dict, params: WorldParams = WorldParams()) -> WorldState:
    """Rebuild a world from a snapshot dict (fixed geometry from params)."""
    return WorldState(
        peg_pose=Pose(np.array(doc["peg_pose"]["position"]),
                      np.array(doc["peg_pose"]["orientation"])),
        peg_lin_vel=np.array(doc["peg_velocity"]["linear"]),
        peg_ang_vel=np.array(doc["peg_velocity"]["angular"]),
        hole=HoleSpec(np.array(doc["hole"]["center"]), doc["hole"]["clearance"],
                      doc["hole"]["depth"], doc["hole"]["chamfer"]),
        shape=PegShape(doc["shape"]["kind"], doc["shape"]["radius"]),
        goal=Pose(np.array(doc["goal"]["position"]),
                  np.array(doc["goal"]["orientation"])),
        contact=Wrench(np.array(doc["contact"]["force"]),
                       np.array(doc["contact"]["torque"])),
        env_stiffness=doc["env_stiffness"],
        env_friction=doc["env_friction"],
        time=doc["time"],
        insertion_tolerance=doc["insertion_tolerance"],
        params=params,
    )
