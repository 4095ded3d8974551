"""
Stochastic Pauli noise, logical error rate estimation, power-law fits,
pseudothresholds and concatenation predictions.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from statistics import NormalDist

import numpy as np

from .circuit import MEASUREMENTS, PREPARATIONS, Circuit, execute
from .codes import DomainError
from .pauli import PauliOperator, multiply
from .stabilizer import DecoderTable, StabilizerCode, build_decoder, is_logical_error
from .tableau import PauliFrame

__all__ = [
    "RIGOROUS_THRESHOLD",
    "SIMULATED_THRESHOLD",
    "NoiseModel",
    "Outcome",
    "NoFitError",
    "DivergenceError",
    "sample_run",
    "CodeCapacityProtocol",
    "CircuitProtocol",
    "PointEstimate",
    "MonteCarloReport",
    "estimate_logical_rate",
    "wilson_interval",
    "fit_quadratic",
    "pseudothreshold",
    "concatenated_rate",
    "levels_needed",
    "exact_code_capacity_failure",
    "failing_pattern_counts",
    "CSV_COLUMNS",
]

# Reference values only; nothing in this package tries to reproduce them.
RIGOROUS_THRESHOLD = 2e-5
SIMULATED_THRESHOLD = 0.05

CSV_COLUMNS = ("p", "shots", "failures", "p_L", "ci_low", "ci_high")
_Z95 = NormalDist().inv_cdf(0.975)
# shots per independently seeded chunk; fixed so results do not depend on workers
CHUNK_SHOTS = 10_000


class NoFitError(ValueError):
    """Too few nonzero failure counts to fit; run more shots."""


class DivergenceError(DomainError):
    """Concatenation cannot reach the target because p is not below threshold."""


class Outcome(str, enum.Enum):
    SUCCESS = "success"
    LOGICAL_FAILURE = "logical_failure"
    ABORT = "abort"


@dataclass(frozen=True)
class NoiseModel:
    """Independent depolarizing faults per location.

    One-qubit gates and idle steps get X, Y or Z with equal probability; two-qubit
    gates one of the 15 non-identity Pauli pairs; preparations and measurements
    are flipped (X after a Z-basis preparation or before a Z measurement, Z for
    the X basis).
    """

    p_gate1: float = 0.0
    p_gate2: float = 0.0
    p_prep: float = 0.0
    p_meas: float = 0.0
    p_idle: float = 0.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} = {value} is not a probability")

    @classmethod
    def uniform(cls, p: float) -> NoiseModel:
        return cls(p, p, p, p, p)

    @property
    def is_noiseless(self) -> bool:
        return not any(asdict(self).values())

    def fault_hook(self, rng):
        def hook(op, key):
            n = op.name
            if n in PREPARATIONS:
                if rng.random() < self.p_prep:
                    return PauliOperator(1, 0, 1) if n == "PREP_X" else PauliOperator(1, 1, 0)
                return None
            if n in MEASUREMENTS:
                if rng.random() < self.p_meas:
                    return PauliOperator(1, 0, 1) if n == "MX" else PauliOperator(1, 1, 0)
                return None
            k = len(op.qubits)
            if rng.random() < (self.p_gate1 if k == 1 else self.p_gate2):
                v = int(rng.integers(1, 4 ** k))
                return PauliOperator(k, v & ((1 << k) - 1), v >> k)
            return None
        return hook

    def idle_hook(self, rng):
        def hook(q, key):
            if rng.random() < self.p_idle:
                v = int(rng.integers(1, 4))
                return PauliOperator(1, v & 1, v >> 1)
            return None
        return hook


def _ideal_correction(table: DecoderTable, residual: PauliOperator) -> PauliOperator:
    corr = table.lookup(table.code.syndrome_int(residual))[0]
    return multiply(corr, residual)


def sample_run(circuit: Circuit, code: StabilizerCode, noise: NoiseModel, rng,
               table: DecoderTable | None = None) -> Outcome:
    """One noisy execution followed by an ideal decoding of the data block.

    Errors are tracked as a Pauli frame relative to the noiseless run, which
    is exact for Clifford circuits with Pauli noise.
    """
    if not circuit.is_clifford():
        raise ValueError("noisy sampling supports Clifford circuits only")
    frame = PauliFrame(circuit.num_qubits)
    res = execute(circuit, frame, fault=noise.fault_hook(rng),
                  idle=noise.idle_hook(rng) if noise.p_idle else None)
    if res.aborted:
        return Outcome.ABORT
    table = table or build_decoder(code, 1)
    residual = _ideal_correction(table, frame.restrict(circuit.registers["data"]))
    return Outcome.LOGICAL_FAILURE if is_logical_error(code, residual) else Outcome.SUCCESS


# -- protocols -------------------------------------------------------------------------

def _masks(ops) -> np.ndarray:
    return np.array([[p.x_bits, p.z_bits] for p in ops], dtype=np.uint64).reshape(-1, 2)


class CodeCapacityProtocol:
    """Depolarizing errors with probability p on each data qubit, then perfect
    syndrome extraction and lookup-table decoding."""

    name = "code-capacity"

    def __init__(self, code: StabilizerCode, t: int = 1):
        if code.n > 63:
            raise ValueError("code-capacity sampling packs a block into 64 bits")
        self.code = code
        table = build_decoder(code, t)
        corr = table.complete()
        self._corr = _masks(corr)
        self._sx = np.array(code._synd_x, dtype=np.int64)
        self._sz = np.array(code._synd_z, dtype=np.int64)
        self._logicals = _masks(list(code.logical_x) + list(code.logical_z))

    def run(self, p: float, shots: int, rng) -> tuple[int, int]:
        """Returns ``(failures, aborts)``."""
        n = self.code.n
        r = rng.random((shots, n))
        if p == 0:
            return 0, 0
        # 0 = no error, 1 = X, 2 = Y, 3 = Z, each letter with probability p/3
        letter = np.where(r < p, np.minimum((r * 3 / p).astype(np.int64), 2) + 1, 0)
        xq = (letter == 1) | (letter == 2)
        zq = (letter == 2) | (letter == 3)
        weights = np.uint64(1) << np.arange(n, dtype=np.uint64)
        x = (xq * weights).sum(axis=1, dtype=np.uint64)
        z = (zq * weights).sum(axis=1, dtype=np.uint64)
        synd = np.bitwise_xor.reduce(np.where(xq, self._sx, 0) ^ np.where(zq, self._sz, 0), axis=1)
        rx = x ^ self._corr[synd, 0]
        rz = z ^ self._corr[synd, 1]
        anti = np.zeros(shots, dtype=bool)
        for lx, lz in self._logicals:
            anti |= ((np.bitwise_count(rx & lz) + np.bitwise_count(rz & lx)) & 1).astype(bool)
        return int(anti.sum()), 0


class CircuitProtocol:
    """A Clifford error-correction circuit run under uniform circuit noise."""

    def __init__(self, circuit: Circuit, code: StabilizerCode, name: str = "circuit"):
        if not circuit.is_clifford():
            raise ValueError("noisy sampling supports Clifford circuits only")
        self.circuit = circuit
        self.code = code
        self.name = name
        self.table = build_decoder(code, 1)

    def run(self, p: float, shots: int, rng) -> tuple[int, int]:
        noise = NoiseModel.uniform(p)
        failures = aborts = 0
        for _ in range(shots):
            out = sample_run(self.circuit, self.code, noise, rng, self.table)
            failures += out is Outcome.LOGICAL_FAILURE
            aborts += out is Outcome.ABORT
        return failures, aborts


# -- estimation ------------------------------------------------------------------------

def wilson_interval(failures: int, shots: int, z: float = _Z95) -> tuple[float, float]:
    if shots <= 0:
        raise ValueError("shots must be positive")
    if not 0 <= failures <= shots:
        raise ValueError("failures must lie in [0, shots]")
    phat = failures / shots
    denom = 1 + z * z / shots
    centre = (phat + z * z / (2 * shots)) / denom
    half = z * math.sqrt(phat * (1 - phat) / shots + z * z / (4 * shots * shots)) / denom
    lo = 0.0 if failures == 0 else max(0.0, centre - half)
    hi = 1.0 if failures == shots else min(1.0, centre + half)
    return lo, hi


@dataclass(frozen=True)
class PointEstimate:
    p: float
    shots: int
    failures: int
    p_L: float
    ci_low: float
    ci_high: float
    aborts: int = 0


@dataclass
class MonteCarloReport:
    protocol: str
    seed: int
    points: list[PointEstimate]
    fit_C: float | None = None
    fit_exponent: float | None = None
    pseudothreshold: float | None = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "seed": self.seed,
            "points": [asdict(pt) for pt in self.points],
            "fit_C": self.fit_C,
            "fit_exponent": self.fit_exponent,
            "pseudothreshold": self.pseudothreshold,
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for pt in self.points:
            w.writerow([repr(pt.p), pt.shots, pt.failures, repr(pt.p_L), repr(pt.ci_low), repr(pt.ci_high)])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [f"protocol {self.protocol}  seed {self.seed}"]
        lines.append(f"{'p':>10} {'shots':>9} {'failures':>9} {'p_L':>11} {'95% interval':>25}")
        for pt in self.points:
            lines.append(f"{pt.p:>10.4g} {pt.shots:>9d} {pt.failures:>9d} {pt.p_L:>11.4g}"
                         f"   [{pt.ci_low:.4g}, {pt.ci_high:.4g}]")
        if self.fit_exponent is not None:
            lines.append(f"fit: p_L ~ C p^a with a = {self.fit_exponent:.4f}; "
                         f"C (a fixed at 2) = {self.fit_C:.6g}; pseudothreshold 1/C = {self.pseudothreshold:.6g}")
        lines += self.notes
        return "\n".join(lines) + "\n"


def _chunks(shots: int) -> list[int]:
    full, rest = divmod(shots, CHUNK_SHOTS)
    return [CHUNK_SHOTS] * full + ([rest] if rest else [])


def _run_chunk(protocol, p: float, shots: int, seed: int, point: int, chunk: int) -> tuple[int, int]:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(point, chunk)))
    return protocol.run(p, shots, rng)


def estimate_logical_rate(protocol, p_values, shots: int, seed: int, workers: int = 1) -> MonteCarloReport:
    """Estimate the logical failure rate at each physical rate.

    Shots are split into fixed-size chunks, each with its own random stream
    keyed by (seed, point index, chunk index), so the report is identical for
    any number of workers.
    """
    if shots < 1:
        raise ValueError("shots must be at least 1")
    if workers < 1:
        raise ValueError("workers must be at least 1")
    p_values = [float(p) for p in p_values]
    for p in p_values:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p = {p} is not a probability")
    tasks = [(protocol, p, n, seed, i, c) for i, p in enumerate(p_values) for c, n in enumerate(_chunks(shots))]
    if workers == 1:
        results = [_run_chunk(*t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_chunk, *zip(*tasks)))
    totals: dict[int, list[int]] = {i: [0, 0] for i in range(len(p_values))}
    for (_, _, _, _, i, _), (f, a) in zip(tasks, results):
        totals[i][0] += f
        totals[i][1] += a
    points = []
    for i, p in enumerate(p_values):
        f, a = totals[i]
        lo, hi = wilson_interval(f, shots)
        points.append(PointEstimate(p, shots, f, f / shots, lo, hi, a))
    report = MonteCarloReport(getattr(protocol, "name", type(protocol).__name__), seed, points)
    try:
        report.fit_C, report.fit_exponent = fit_quadratic(points)
        report.pseudothreshold = pseudothreshold(points)
    except NoFitError as exc:
        report.notes.append(f"no fit: {exc}")
    return report


def _fit_data(points) -> tuple[np.ndarray, np.ndarray]:
    pairs = []
    for pt in points:
        p, pl = (pt.p, pt.p_L) if isinstance(pt, PointEstimate) else (pt[0], pt[1])
        if p > 0 and pl > 0:
            pairs.append((p, pl))
    if len(pairs) < 3:
        raise NoFitError(f"need at least 3 points with nonzero failures, have {len(pairs)}; increase shots")
    arr = np.log(np.array(pairs, dtype=float))
    return arr[:, 0], arr[:, 1]


def fit_quadratic(points) -> tuple[float, float]:
    """Returns ``(C, exponent)``.

    The exponent is the least-squares slope of log p_L against log p; C comes
    from the least-squares fit with the exponent fixed at 2.
    """
    lp, lpl = _fit_data(points)
    exponent = float(np.polyfit(lp, lpl, 1)[0])
    c = float(np.exp(np.mean(lpl - 2 * lp)))
    return c, exponent


def pseudothreshold(points) -> float:
    """Crossing of the fitted C p^2 with p, i.e. 1/C."""
    c, _ = fit_quadratic(points)
    return 1.0 / c


# -- concatenation ----------------------------------------------------------------------

def concatenated_rate(p, p_t, levels: int):
    """Logical rate after ``levels`` rounds of concatenation, p_t (p/p_t)^(2^L).

    Evaluated by the recursion p_{L+1} = p_t (p_L/p_t)^2 so that exact number
    types (e.g. Fraction) stay exact.
    """
    if p <= 0 or p_t <= 0:
        raise DomainError("p and p_t must be positive")
    if levels < 0 or int(levels) != levels:
        raise DomainError("levels must be a non-negative integer")
    rate = p
    for _ in range(int(levels)):
        rate = p_t * (rate / p_t) ** 2
    return rate


def levels_needed(p, p_t, epsilon) -> int:
    """Least L with concatenated_rate(p, p_t, L) <= epsilon."""
    if p <= 0 or p_t <= 0:
        raise DomainError("p and p_t must be positive")
    if not 0 < epsilon < 1:
        raise DomainError("epsilon must lie in (0, 1)")
    if p >= p_t:
        raise DivergenceError(
            f"p = {p} is not below p_t = {p_t}: concatenation never lowers the error rate, "
            "an unencoded system does better"
        )
    level = 0
    while concatenated_rate(p, p_t, level) > epsilon:
        level += 1
    return level


# -- exact reference -----------------------------------------------------------------------

def exact_code_capacity_failure(code: StabilizerCode, p: float, t: int = 1) -> float:
    """Exact failure probability of the code-capacity protocol, by enumerating
    all 4^n error patterns through the lookup decoder."""
    counts = failing_pattern_counts(code, t)
    n = code.n
    return float(sum(c * (p / 3) ** w * (1 - p) ** (n - w) for w, c in enumerate(counts)))


def failing_pattern_counts(code: StabilizerCode, t: int = 1) -> list[int]:
    """Number of failing Pauli patterns of each weight 0..n."""
    n = code.n
    if n > 10:
        raise ValueError("exhaustive enumeration is limited to 10 qubits")
    corr = build_decoder(code, t).complete()
    counts = [0] * (n + 1)
    for x in range(1 << n):
        for z in range(1 << n):
            e = PauliOperator(n, x, z)
            if is_logical_error(code, multiply(corr[code.syndrome_of_letters(x, z)], e)):
                counts[(x | z).bit_count()] += 1
    return counts
