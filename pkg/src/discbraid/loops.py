"""Configuration-space loops and braid extraction from disc trajectories.

The loop construction for a flow g and an n-point configuration x follows
the out-isotopy-back pattern: straight lines from the base configuration z
to x on [0, 1/3], the flow orbit of x reparameterized to [1/3, 2/3], then
straight lines from g(x) back to z on [2/3, 1].  The resulting bundle of
strands closes up, so the braid read off from it is pure.

Braids are extracted by projecting all strands onto a direction and
emitting one Artin generator per adjacent transposition of the projected
order, with the sign determined by the planar orientation of the swap
(counterclockwise passes are positive).  Events are detected between
consecutive samples assuming linear motion; non-generic projections raise
a degeneracy error carrying the event time so callers can perturb the
direction and retry.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .braids import BraidWord
from .errors import DegenerateConfigurationError, InputError
from .flows import FlowSpec, flow_path

__all__ = [
    "TrajectoryBundle",
    "gg_loop",
    "extract_braid",
    "extract_braid_auto",
    "loop_braid",
    "initial_order",
    "perturb_direction",
    "winding_length",
    "signed_winding",
    "write_trajectory_csv",
    "read_trajectory_csv",
]

COINCIDENCE_THRESHOLD = 1e-9


@dataclass(frozen=True)
class TrajectoryBundle:
    """n strands sampled at shared times in [0, 1]; positions is (n, T, 2)."""

    times: np.ndarray
    positions: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        positions = np.asarray(self.positions, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "positions", positions)
        if times.ndim != 1 or np.any(np.diff(times) <= 0):
            raise InputError("sample times must be strictly increasing")
        if positions.ndim != 3 or positions.shape[1] != times.size or positions.shape[2] != 2:
            raise InputError(f"positions shaped {positions.shape} do not match times")

    @property
    def strands(self) -> int:
        return int(self.positions.shape[0])

    def is_loop(self, tol: float = 1e-12) -> bool:
        return bool(np.allclose(self.positions[:, 0], self.positions[:, -1], atol=tol))

    def min_pairwise_distance(self) -> float:
        n = self.strands
        best = math.inf
        for i in range(n):
            for j in range(i + 1, n):
                d = np.linalg.norm(self.positions[i] - self.positions[j], axis=1)
                best = min(best, float(d.min()))
        return best


def _check_distinct(points: np.ndarray, label: str):
    n = len(points)
    for i in range(n):
        for j in range(i + 1, n):
            if np.linalg.norm(points[i] - points[j]) < COINCIDENCE_THRESHOLD:
                raise InputError(f"{label} points {i} and {j} coincide")


def gg_loop(
    base,
    start,
    flow: FlowSpec,
    samples_per_segment: int | None = None,
) -> TrajectoryBundle:
    """Sample the loop: lines out from ``base``, flow orbit, lines back.

    ``samples_per_segment`` counts the subintervals per third; by default it
    scales with the flow's angular speed bound so relative windings stay
    resolved.
    """
    z = np.asarray(base, dtype=float)
    x = np.asarray(start, dtype=float)
    if z.shape != x.shape or z.ndim != 2 or z.shape[1] != 2:
        raise InputError("base and start must be matching (n, 2) arrays")
    _check_distinct(z, "base")
    _check_distinct(x, "start")
    if samples_per_segment is None:
        samples_per_segment = max(32, int(math.ceil(8.0 * flow.rotation_bound)))
    m = int(samples_per_segment)
    if m < 2:
        raise InputError("need at least 2 samples per segment")

    s = np.linspace(0.0, 1.0, m + 1)
    seg1 = z[:, None, :] + (x - z)[:, None, :] * s[None, :, None]
    orbit = flow_path(flow, x, s)  # (n, m+1, 2)
    gx = orbit[:, -1, :]
    seg3 = gx[:, None, :] + (z - gx)[:, None, :] * s[None, :, None]

    positions = np.concatenate((seg1, orbit[:, 1:, :], seg3[:, 1:, :]), axis=1)
    times = np.concatenate((s / 3.0, 1.0 / 3.0 + s[1:] / 3.0, 2.0 / 3.0 + s[1:] / 3.0))
    return TrajectoryBundle(times, positions)


def perturb_direction(direction, attempt: int):
    """Deterministic direction sequence: attempt 0 is the input, later
    attempts rotate by multiples of an irrational fraction of the turn."""
    dx, dy = float(direction[0]), float(direction[1])
    norm = math.hypot(dx, dy)
    if norm == 0:
        raise InputError("direction must be a nonzero vector")
    dx, dy = dx / norm, dy / norm
    if attempt == 0:
        return (dx, dy)
    angle = attempt * math.pi * (3.0 - math.sqrt(5.0))  # golden-angle steps
    c, s = math.cos(angle), math.sin(angle)
    return (c * dx - s * dy, s * dx + c * dy)


def extract_braid(bundle: TrajectoryBundle, direction=(1.0, 0.0)) -> BraidWord:
    """Read the braid word of the bundle along a projection direction.

    Each change of the projected strand order between consecutive samples is
    resolved into adjacent transpositions ordered by their interpolated
    crossing times.  Projection ties and ambiguous simultaneous crossings
    raise :class:`DegenerateConfigurationError` with the event time.
    """
    dx, dy = perturb_direction(direction, 0)
    pos = bundle.positions
    n, T = pos.shape[0], pos.shape[1]
    if bundle.min_pairwise_distance() < COINCIDENCE_THRESHOLD:
        raise DegenerateConfigurationError("strands pass within coincidence threshold")

    proj = pos[..., 0] * dx + pos[..., 1] * dy  # (n, T)
    perp = -pos[..., 0] * dy + pos[..., 1] * dx

    order = np.argsort(proj, axis=0, kind="stable")
    sorted_proj = np.take_along_axis(proj, order, axis=0)
    gaps = np.diff(sorted_proj, axis=0)
    tie_cols = np.nonzero(np.any(gaps == 0.0, axis=0))[0]
    if tie_cols.size:
        k = int(tie_cols[0])
        raise DegenerateConfigurationError(
            "projection tie at a sample time", time=float(bundle.times[k])
        )

    changed = np.nonzero(np.any(order[:, 1:] != order[:, :-1], axis=0))[0]
    letters: list[int] = []
    slots = list(order[:, 0])
    for k in changed:
        s0 = proj[:, k]
        s1 = proj[:, k + 1]
        events = []
        for pa in range(n):
            for pb in range(pa + 1, n):
                a, b = slots[pa], slots[pb]
                d0 = s0[a] - s0[b]
                d1 = s1[a] - s1[b]
                if d0 == 0.0 or d1 == 0.0:
                    raise DegenerateConfigurationError(
                        "projection tie at a sample time", time=float(bundle.times[k])
                    )
                if (d0 < 0) != (d1 < 0):
                    tau = d0 / (d0 - d1)
                    events.append((tau, a, b))
        events.sort()
        for e0, e1 in zip(events, events[1:]):
            if e1[0] - e0[0] < 1e-15:
                raise DegenerateConfigurationError(
                    "simultaneous crossings", time=float(bundle.times[k])
                )
        for tau, a, b in events:
            pa, pb = slots.index(a), slots.index(b)
            if abs(pa - pb) != 1:
                raise DegenerateConfigurationError(
                    "crossing between non-adjacent strands", time=float(bundle.times[k])
                )
            left_slot = min(pa, pb)
            left, right = slots[left_slot], slots[left_slot + 1]
            rel_perp = (
                perp[left, k] + (perp[left, k + 1] - perp[left, k]) * tau
                - perp[right, k] - (perp[right, k + 1] - perp[right, k]) * tau
            )
            if rel_perp == 0.0:
                raise DegenerateConfigurationError(
                    "crossing with coincident strands", time=float(bundle.times[k])
                )
            sign = 1 if rel_perp < 0 else -1
            letters.append(sign * (left_slot + 1))
            slots[left_slot], slots[left_slot + 1] = slots[left_slot + 1], slots[left_slot]
        if slots != list(order[:, k + 1]):
            raise DegenerateConfigurationError(
                "crossing resolution did not reproduce the sampled order",
                time=float(bundle.times[k]),
            )
    return BraidWord(n, tuple(letters))


def extract_braid_auto(
    bundle: TrajectoryBundle,
    direction=(1.0, 0.0),
    attempts: int = 8,
) -> BraidWord:
    """extract_braid with deterministic direction perturbation on degeneracy."""
    last: DegenerateConfigurationError | None = None
    for attempt in range(attempts):
        try:
            return extract_braid(bundle, perturb_direction(direction, attempt))
        except DegenerateConfigurationError as exc:
            last = exc
    raise last if last is not None else DegenerateConfigurationError("no attempts made")


def initial_order(bundle: TrajectoryBundle, direction=(1.0, 0.0)) -> tuple[int, ...]:
    """Bundle strand indices sorted by projection at the first sample."""
    dx, dy = perturb_direction(direction, 0)
    proj = bundle.positions[:, 0, 0] * dx + bundle.positions[:, 0, 1] * dy
    return tuple(int(i) for i in np.argsort(proj, kind="stable"))


def _permutation_word(targets: list[int], n: int) -> list[int]:
    """Positive word whose strand starting in slot p ends in slot targets[p]."""
    # final arrangement: slot q holds the strand (start slot) with target q
    final = [0] * n
    for start, target in enumerate(targets):
        final[target] = start
    current = list(range(n))
    letters = []
    for q in range(n):
        p = current.index(final[q])
        while p > q:
            letters.append(p)  # 1-based generator index p swaps slots p-1, p
            current[p - 1], current[p] = current[p], current[p - 1]
            p -= 1
    return letters


def loop_braid(
    bundle: TrajectoryBundle,
    direction=(1.0, 0.0),
    attempts: int = 8,
) -> BraidWord:
    """Pure braid of a closed bundle, with strands labelled by bundle index.

    ``extract_braid`` labels strands by their projected order; the loop braid
    is that word conjugated by a fixed positive permutation word so that
    strand i is the strand of ``positions[i-1]``.  Conjugation leaves the
    closure and (for pure words) every pairwise linking number intact.
    """
    last: DegenerateConfigurationError | None = None
    for attempt in range(attempts):
        d = perturb_direction(direction, attempt)
        try:
            word = extract_braid(bundle, d)
        except DegenerateConfigurationError as exc:
            last = exc
            continue
        order = initial_order(bundle, d)
        if order == tuple(range(bundle.strands)):
            return word
        # strand with bundle index i must start in the slot where the
        # projected order placed it
        rank = [0] * bundle.strands
        for slot, strand in enumerate(order):
            rank[strand] = slot
        u = BraidWord(bundle.strands, tuple(_permutation_word(rank, bundle.strands)))
        return BraidWord(bundle.strands, u.letters + word.letters + u.inverse().letters)
    raise last if last is not None else DegenerateConfigurationError("no attempts made")


def _relative_angle_steps(bundle: TrajectoryBundle, i: int, j: int) -> np.ndarray:
    if i == j:
        raise InputError("winding needs two distinct strands")
    rel = bundle.positions[i] - bundle.positions[j]
    dist = np.linalg.norm(rel, axis=1)
    if dist.min() < COINCIDENCE_THRESHOLD:
        raise DegenerateConfigurationError("strands coincide along the bundle")
    angles = np.arctan2(rel[:, 1], rel[:, 0])
    steps = np.diff(angles)
    return (steps + math.pi) % (2.0 * math.pi) - math.pi


def winding_length(bundle: TrajectoryBundle, i: int, j: int) -> float:
    """Total variation of the pair direction, in turns (length of l_ij / 2pi)."""
    return float(np.sum(np.abs(_relative_angle_steps(bundle, i, j))) / (2.0 * math.pi))


def signed_winding(bundle: TrajectoryBundle, i: int, j: int) -> float:
    """Net rotation of the pair direction, in turns; integral for loops."""
    return float(np.sum(_relative_angle_steps(bundle, i, j)) / (2.0 * math.pi))


def write_trajectory_csv(bundle: TrajectoryBundle) -> str:
    buf = io.StringIO()
    n, T = bundle.positions.shape[0], bundle.times.size
    buf.write(f"{n},{T}\n")
    buf.write("time,strand,x,y\n")
    for k in range(T):
        for i in range(n):
            x, y = bundle.positions[i, k]
            buf.write(f"{float(bundle.times[k])!r},{i},{float(x)!r},{float(y)!r}\n")
    return buf.getvalue()


def read_trajectory_csv(text: str) -> TrajectoryBundle:
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if len(lines) < 2:
        raise InputError("trajectory file too short")
    try:
        n, T = (int(tok) for tok in lines[0].split(","))
    except ValueError as exc:
        raise InputError(f"bad trajectory header {lines[0]!r}") from exc
    body = lines[1:]
    if body and body[0].lower().startswith("time"):
        body = body[1:]
    if len(body) != n * T:
        raise InputError(f"expected {n * T} rows, found {len(body)}")
    times = np.zeros(T)
    positions = np.zeros((n, T, 2))
    seen = np.zeros((n, T), dtype=bool)
    for row in body:
        try:
            t_str, i_str, x_str, y_str = row.split(",")
            t, i, x, y = float(t_str), int(i_str), float(x_str), float(y_str)
        except ValueError as exc:
            raise InputError(f"bad trajectory row {row!r}") from exc
        # rows arrive in time order per strand; the column is the row count
        k = int(np.count_nonzero(seen[i]))
        times[k] = t
        positions[i, k] = (x, y)
        seen[i, k] = True
    if not seen.all():
        raise InputError("trajectory rows do not cover every strand/time")
    return TrajectoryBundle(times, positions)
