"""Scenario files, deterministic batch execution and CSV output.

Scenario files are INI-style (``configparser``) with these sections::

    [scenario]     protocol, omega, trials, seed, latency
    [oracle]       tau, delta            (hidden ground truth)
    [teleport]     alpha, beta, correction_time
    [basic-qcs]    bob_time, readout_delay, quadratures
    [ramsey]       points, max_phase
    [phase-map]    alice_velocity, bob_velocity, alice_origin, bob_origin,
                   alice_proper_times, bob_proper_times

See README.md for the full key reference and CSV schemas.
"""
from __future__ import annotations

import configparser
import csv
import hashlib
import io
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from . import estimation as est
from . import protocols as pr
from . import qstate as qs
from . import spacetime as st
from .streams import DRAWS_PER_TRIAL, check_seed, trial_draws, trial_rng

PROTOCOLS = ("basic-qcs", "teleport", "ramsey", "phase-map")
CABRILLO = "cabrillo"
SQRT_HALF = float(np.sqrt(0.5))

# draw slots inside each trial's block
SLOT_SOURCE_Q1, SLOT_MEASURE_Q1, SLOT_READOUT_Q1 = 0, 1, 2
SLOT_SOURCE_Q2, SLOT_MEASURE_Q2, SLOT_READOUT_Q2 = 3, 4, 5
assert SLOT_READOUT_Q2 < DRAWS_PER_TRIAL


class ScenarioError(ValueError):
    pass


class ScenarioParseError(ScenarioError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class ScenarioValidationError(ScenarioError):
    def __init__(self, field_name: str, message: str, line: int | None = None):
        self.field = field_name
        self.line = line
        where = f" (line {line})" if line else ""
        super().__init__(f"invalid {field_name!r}{where}: {message}")


class RunError(RuntimeError):
    pass


@dataclass(frozen=True)
class Truth:
    """Oracle-only ground truth; ``delta`` is None for detection-heralded pairs."""

    tau: float
    delta: float | None


@dataclass(frozen=True)
class TeleportParams:
    alpha: complex = SQRT_HALF
    beta: complex = SQRT_HALF
    correction_time: float = 10.0


@dataclass(frozen=True)
class QCSParams:
    bob_time: float = 0.0
    readout_delay: float = 0.0
    quadratures: int = 4


@dataclass(frozen=True)
class RamseyParams:
    points: int = 17
    max_phase: float = 2 * np.pi


@dataclass(frozen=True)
class PhaseMapParams:
    alice_velocity: tuple[float, float, float] = (0.0, 0.0, 0.0)
    bob_velocity: tuple[float, float, float] = (0.0, 0.0, 0.0)
    alice_origin: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    bob_origin: tuple[float, float, float, float] = (0.0, 1.0, 0.0, 0.0)
    alice_proper_times: tuple[float, float, int] = (0.0, 1.0, 5)
    bob_proper_times: tuple[float, float, int] = (0.0, 1.0, 5)


@dataclass(frozen=True)
class PublicScenario:
    """Everything the parties are allowed to know."""

    protocol: str
    omega: float
    trials: int
    seed: int
    latency: float = 0.0
    teleport: TeleportParams = TeleportParams()
    qcs: QCSParams = QCSParams()
    ramsey: RamseyParams = RamseyParams()
    phase_map: PhaseMapParams = PhaseMapParams()


@dataclass(frozen=True)
class Scenario:
    public: PublicScenario
    truth: Truth
    defaults_applied: tuple[str, ...] = ()
    source: str = field(default="", compare=False)

    @property
    def protocol(self) -> str:
        return self.public.protocol

    def with_seed(self, seed: int) -> "Scenario":
        return replace(self, public=replace(self.public, seed=check_seed(seed)))


def gauge_shifted(scenario: Scenario, shift: float) -> Scenario:
    """(tau, delta) -> (tau + shift, delta + omega * shift)."""
    if scenario.truth.delta is None:
        raise ValueError("gauge shift needs a numeric delta")
    omega = scenario.public.omega
    truth = Truth(scenario.truth.tau + shift, scenario.truth.delta + omega * shift)
    return replace(scenario, truth=truth)


# -- loading ----------------------------------------------------------------

_SCHEMA = {
    "scenario": {"protocol", "omega", "trials", "seed", "latency"},
    "oracle": {"tau", "delta"},
    "teleport": {"alpha", "beta", "correction_time"},
    "basic-qcs": {"bob_time", "readout_delay", "quadratures"},
    "ramsey": {"points", "max_phase"},
    "phase-map": {"alice_velocity", "bob_velocity", "alice_origin", "bob_origin",
                  "alice_proper_times", "bob_proper_times"},
}
_REQUIRED = {"scenario": ("protocol", "omega", "trials", "seed"), "oracle": ("tau", "delta")}

_SECTION_RE = re.compile(r"^\s*\[([^\]]+)\]")
_KEY_RE = re.compile(r"^\s*([^=:#;\s][^=:]*?)\s*[=:]")


def _key_lines(text: str) -> dict[tuple[str, str], int]:
    lines, section = {}, None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        m = _SECTION_RE.match(raw)
        if m:
            section = m.group(1).strip()
            lines[(section, "")] = lineno
            continue
        m = _KEY_RE.match(raw)
        if m and section is not None and not raw[:1].isspace():
            lines.setdefault((section, m.group(1).strip().lower()), lineno)
    return lines


class _Reader:
    def __init__(self, parser: configparser.ConfigParser, lines):
        self.parser = parser
        self.lines = lines
        self.defaults: list[str] = []

    def line(self, section, key=""):
        return self.lines.get((section, key))

    def fail(self, section, key, message):
        raise ScenarioValidationError(key, message, self.line(section, key))

    def raw(self, section, key):
        if self.parser.has_option(section, key):
            return self.parser.get(section, key).strip()
        return None

    def get(self, section, key, convert, default=None):
        text = self.raw(section, key)
        if text is None:
            if section in _REQUIRED and key in _REQUIRED[section]:
                raise ScenarioValidationError(key, f"missing required key in [{section}]",
                                              self.line(section))
            self.defaults.append(f"{section}.{key}")
            return default
        try:
            return convert(text)
        except (ValueError, TypeError) as exc:
            self.fail(section, key, f"cannot parse {text!r} ({exc})")


def _finite(text: str) -> float:
    x = float(text)
    if not np.isfinite(x):
        raise ValueError("must be finite")
    return x


def _complex(text: str) -> complex:
    z = complex(text.replace(" ", ""))
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise ValueError("must be finite")
    return z


def _floats(n):
    def convert(text):
        parts = [p for p in re.split(r"[,\s]+", text) if p]
        if len(parts) != n:
            raise ValueError(f"expected {n} comma-separated numbers")
        return tuple(_finite(p) for p in parts)
    return convert


def _grid(text):
    start, stop, count = _floats(3)(text)
    if count != int(count) or count < 1:
        raise ValueError("grid count must be a positive integer")
    return (start, stop, int(count))


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"),
                                       empty_lines_in_values=False)
    try:
        parser.read_string(text, source=source)
    except configparser.MissingSectionHeaderError as exc:
        raise ScenarioParseError("expected a [section] header", exc.lineno) from None
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as exc:
        raise ScenarioParseError(exc.message.splitlines()[0], exc.lineno) from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ScenarioParseError(f"cannot parse {line.strip()!r}", lineno) from None
    lines = _key_lines(text)

    for section in parser.sections():
        if section not in _SCHEMA:
            raise ScenarioParseError(f"unknown section [{section}]", lines.get((section, "")))
        for key in parser.options(section):
            if key not in _SCHEMA[section]:
                raise ScenarioValidationError(key, f"unknown key in [{section}]",
                                              lines.get((section, key)))
    for section in _REQUIRED:
        if not parser.has_section(section):
            raise ScenarioValidationError(_REQUIRED[section][0], f"missing section [{section}]")

    r = _Reader(parser, lines)
    protocol = r.get("scenario", "protocol", str)
    if protocol not in PROTOCOLS:
        r.fail("scenario", "protocol", f"must be one of {', '.join(PROTOCOLS)}")
    omega = r.get("scenario", "omega", _finite)
    if omega < 0:
        r.fail("scenario", "omega", "energy gap must be non-negative")
    if protocol in ("basic-qcs", "ramsey") and omega == 0:
        r.fail("scenario", "omega", f"{protocol} needs omega > 0")
    trials = r.get("scenario", "trials", lambda t: int(t, 0))
    if trials < 1:
        r.fail("scenario", "trials", "must be at least 1")
    seed = r.get("scenario", "seed", lambda t: int(t, 0))
    try:
        check_seed(seed)
    except ValueError as exc:
        r.fail("scenario", "seed", str(exc))
    latency = r.get("scenario", "latency", _finite, 0.0)
    if latency < 0:
        r.fail("scenario", "latency", "must be non-negative")

    tau = r.get("oracle", "tau", _finite)
    delta = r.get("oracle", "delta", lambda t: None if t.lower() == CABRILLO else _finite(t))

    public = PublicScenario(protocol, omega, trials, seed, latency)
    if protocol == "teleport":
        d = TeleportParams()
        tp = TeleportParams(r.get("teleport", "alpha", _complex, d.alpha),
                            r.get("teleport", "beta", _complex, d.beta),
                            r.get("teleport", "correction_time", _finite, d.correction_time))
        norm = abs(tp.alpha) ** 2 + abs(tp.beta) ** 2
        if abs(norm - 1) > qs.NORM_TOL:
            r.fail("teleport", "beta" if r.raw("teleport", "beta") else "alpha",
                   f"|alpha|^2 + |beta|^2 = {norm!r}, must be 1")
        if tp.alpha == 0 or tp.beta == 0:
            r.fail("teleport", "alpha" if tp.alpha == 0 else "beta",
                   "both amplitudes must be nonzero for phase readout")
        public = replace(public, teleport=tp)
    elif protocol == "basic-qcs":
        d = QCSParams()
        qp = QCSParams(r.get("basic-qcs", "bob_time", _finite, d.bob_time),
                       r.get("basic-qcs", "readout_delay", _finite, d.readout_delay),
                       r.get("basic-qcs", "quadratures", lambda t: int(t, 0), d.quadratures))
        if qp.quadratures < 3:
            r.fail("basic-qcs", "quadratures", "need at least 3 delays per fringe period")
        public = replace(public, qcs=qp)
    elif protocol == "ramsey":
        d = RamseyParams()
        rp = RamseyParams(r.get("ramsey", "points", lambda t: int(t, 0), d.points),
                          r.get("ramsey", "max_phase", _finite, d.max_phase))
        if rp.points < 1:
            r.fail("ramsey", "points", "must be at least 1")
        public = replace(public, ramsey=rp)
    else:
        d = PhaseMapParams()
        pm = PhaseMapParams(
            r.get("phase-map", "alice_velocity", _floats(3), d.alice_velocity),
            r.get("phase-map", "bob_velocity", _floats(3), d.bob_velocity),
            r.get("phase-map", "alice_origin", _floats(4), d.alice_origin),
            r.get("phase-map", "bob_origin", _floats(4), d.bob_origin),
            r.get("phase-map", "alice_proper_times", _grid, d.alice_proper_times),
            r.get("phase-map", "bob_proper_times", _grid, d.bob_proper_times))
        for key in ("alice_velocity", "bob_velocity"):
            if float(np.dot(getattr(pm, key), getattr(pm, key))) >= 1:
                r.fail("phase-map", key, "speed must be below 1")
        public = replace(public, phase_map=pm)
        if delta is None:
            r.fail("oracle", "delta", "phase-map needs a numeric delta")
    return Scenario(public, Truth(tau, delta), tuple(r.defaults), source)


def load_scenario(path) -> Scenario:
    path = Path(path)
    return parse_scenario(path.read_text(), str(path))


# -- results ----------------------------------------------------------------


@dataclass
class ResultTable:
    columns: tuple[str, ...]
    rows: list[tuple]
    header: list[str] = field(default_factory=list)
    summary: dict = field(default_factory=dict)


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, complex):
        return f"{value.real:.17g}{value.imag:+.17g}j"
    return str(value)


def _scenario_header(scenario: Scenario, command: str) -> list[str]:
    p = scenario.public
    lines = [f"qcsync {__version__} {command}",
             f"scenario.protocol = {p.protocol}",
             f"scenario.omega = {fmt(p.omega)}",
             f"scenario.trials = {p.trials}",
             f"scenario.seed = {p.seed}",
             f"scenario.latency = {fmt(p.latency)}"]
    section = {"teleport": ("teleport", p.teleport), "basic-qcs": ("basic-qcs", p.qcs),
               "ramsey": ("ramsey", p.ramsey), "phase-map": ("phase-map", p.phase_map)}[p.protocol]
    for key, value in vars(section[1]).items():
        text = ", ".join(fmt(v) for v in value) if isinstance(value, tuple) else fmt(value)
        lines.append(f"{section[0]}.{key} = {text}")
    if scenario.defaults_applied:
        lines.append("defaults applied: " + ", ".join(scenario.defaults_applied))
    delta = CABRILLO if scenario.truth.delta is None else fmt(scenario.truth.delta)
    lines += ["ORACLE-ONLY ground truth below; never visible to party logic",
              f"oracle.tau = {fmt(scenario.truth.tau)}",
              f"oracle.delta = {delta}"]
    return lines


def render_records(table: ResultTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def record_bytes(table: ResultTable) -> bytes:
    """Column header and data rows only; the comment blocks are excluded."""
    return render_records(table).encode()


def render_csv(table: ResultTable) -> str:
    out = [f"# {line}\n" for line in table.header]
    out.append(render_records(table))
    out += [f"# summary.{key} = {fmt(value)}\n" for key, value in table.summary.items()]
    return "".join(out)


def emit_csv(table: ResultTable, path) -> None:
    Path(path).write_text(render_csv(table))


def load_csv(path) -> tuple[list[str], tuple[str, ...], list[list[str]]]:
    """Returns (comment lines, column names, rows of raw strings)."""
    comments, data = [], []
    for line in Path(path).read_text().splitlines():
        (comments if line.startswith("#") else data).append(line[2:] if line.startswith("# ") else line)
    rows = list(csv.reader(data))
    if not rows:
        return comments, (), []
    return comments, tuple(rows[0]), rows[1:]


# -- running ------------------------------------------------------------------


def _teleport_specs(p: PublicScenario):
    tp = p.teleport
    return (pr.TeleportSpec(tp.alpha, tp.beta, p.omega, tp.correction_time, p.latency),
            pr.TeleportSpec(tp.alpha, 1j * tp.beta, p.omega, tp.correction_time, p.latency))


def _teleport_batch(scenario: Scenario, draws: np.ndarray):
    p = scenario.public
    clocks = pr.PartyClocks.with_offset(scenario.truth.tau)
    singlet = pr.make_singlet(scenario.truth.delta)
    columns = []
    for spec, s_bell, s_read in zip(_teleport_specs(p), (SLOT_MEASURE_Q1, SLOT_MEASURE_Q2),
                                    (SLOT_READOUT_Q1, SLOT_READOUT_Q2)):
        probs, outputs = pr.teleport_branches(spec, singlet, clocks)
        bell = qs.sample_outcome(probs, draws[:, s_bell])
        bits = np.zeros(len(draws), dtype=int)
        for k, out in enumerate(outputs):
            mask = bell == k
            if np.any(mask):
                read_probs = pr.ramsey_readout_probabilities(out)
                bits[mask] = qs.sample_outcome(read_probs, draws[mask, s_read])
        columns.append((bell, bits))
    return columns


def _teleport_trial(scenario: Scenario, trial: int):
    p = scenario.public
    clocks = pr.PartyClocks.with_offset(scenario.truth.tau)
    rng = trial_rng(p.seed, trial)
    result = []
    for spec in _teleport_specs(p):
        if scenario.truth.delta is None:
            singlet = pr.cabrillo_singlet(rng)
        else:
            qs.next_u64(rng)  # source slot unused for a fixed phase error
            singlet = pr.make_singlet(scenario.truth.delta)
        out, record = pr.run_teleportation_qcs(spec, singlet, clocks, rng)
        result.append((int(record.bell_outcome), pr.ramsey_readout(out, rng)))
    return result


def _teleport_table(scenario: Scenario, engine: str) -> ResultTable:
    p = scenario.public
    M = p.trials
    if engine == "batch":
        (b1, r1), (b2, r2) = _teleport_batch(scenario, trial_draws(p.seed, 0, M))
    else:
        res = [_teleport_trial(scenario, i) for i in range(M)]
        b1, r1 = (np.array([r[0][j] for r in res]) for j in (0, 1))
        b2, r2 = (np.array([r[1][j] for r in res]) for j in (0, 1))
    t_A = p.teleport.correction_time
    rows = [(i, pr.BELL_LABELS[b1[i]], pr.BELL_LABELS[b2[i]], int(r1[i]), int(r2[i]), t_A)
            for i in range(M)]
    table = ResultTable(TELEPORT_COLUMNS, rows)
    table.summary = teleport_summary(p, rows)
    return table


TELEPORT_COLUMNS = ("trial", "bell_outcome_q1", "bell_outcome_q2",
                    "readout_bit_q1", "readout_bit_q2", "t_A")
QCS_COLUMNS = ("trial", "bob_outcome", "alice_bit", "t_B", "t_A")
RAMSEY_COLUMNS = ("point", "omega_T", "T", "trials", "n_excited", "freq_excited", "p_theory")
PHASE_MAP_COLUMNS = ("i", "j", "s_alice", "s_bob", "x1_t", "x1_x", "x1_y", "x1_z",
                     "x2_t", "x2_x", "x2_y", "x2_z", "phi", "phi_wrapped", "timelike")


def _summary_from_estimate(p: PublicScenario, estimate: est.PhaseEstimate) -> dict:
    summary = {"phi_hat": estimate.phi_hat, "stderr": estimate.stderr}
    if p.omega > 0:
        oc = est.offset_class_from_phase(estimate, p.omega, assumed_delta=0.0)
        summary["tau_hat_if_delta_zero"] = oc.tau_hat
        summary["tau_period"] = oc.period
    summary["delta_hat_if_synchronized"] = est.delta_from_phase(estimate, p.omega, 0.0)
    return summary


def _summary_from_samples(p: PublicScenario, samples) -> dict:
    try:
        estimate = est.estimate_phase(samples)
    except ValueError as exc:
        return {"estimate_unavailable": str(exc)}
    return _summary_from_estimate(p, estimate)


def teleport_summary(p: PublicScenario, rows) -> dict:
    """Party-side estimate from teleportation rows (strings or parsed values)."""
    bell1 = np.array([pr.Bell.parse(r[1]) for r in rows], dtype=int)
    bell2 = np.array([pr.Bell.parse(r[2]) for r in rows], dtype=int)
    bits1 = np.array([int(r[3]) for r in rows])
    bits2 = np.array([int(r[4]) for r in rows])
    samples = est.teleport_fringe_samples(p.teleport.alpha, p.teleport.beta,
                                          bell1, bits1, bell2, bits2)
    return _summary_from_samples(p, samples)


def qcs_delays(p: PublicScenario, trials: np.ndarray) -> np.ndarray:
    """Alice's readout delay schedule: equally spaced fringe phases by trial."""
    q = p.qcs
    step = 2 * np.pi / q.quadratures / p.omega
    return q.readout_delay + (trials % q.quadratures) * step


def _qcs_table(scenario: Scenario, engine: str) -> ResultTable:
    p = scenario.public
    M = p.trials
    trials = np.arange(M)
    delays = qcs_delays(p, trials)
    t_B = p.qcs.bob_time
    clocks = pr.PartyClocks.with_offset(scenario.truth.tau)
    if engine == "batch":
        draws = trial_draws(p.seed, 0, M)
        singlet = pr.make_singlet(scenario.truth.delta)
        bob = np.zeros(M, dtype=int)
        alice = np.zeros(M, dtype=int)
        for d in np.unique(delays):
            sel = delays == d
            probs, cond = pr.basic_qcs_branches(singlet, clocks, p.omega, t_B,
                                                pr.alice_basic_readout_time(t_B, d))
            bob[sel] = qs.sample_outcome(probs, draws[sel, SLOT_MEASURE_Q1])
            for k in (0, 1):
                sub = sel & (bob == k)
                if np.any(sub):
                    alice[sub] = qs.sample_outcome(cond[k], draws[sub, SLOT_READOUT_Q1])
    else:
        bob, alice = np.zeros(M, dtype=int), np.zeros(M, dtype=int)
        for i in trials:
            rng = trial_rng(p.seed, int(i))
            if scenario.truth.delta is None:
                singlet = pr.cabrillo_singlet(rng)
            else:
                qs.next_u64(rng)
                singlet = pr.make_singlet(scenario.truth.delta)
            rec = pr.run_basic_qcs(singlet, clocks, p.omega, t_B, float(delays[i]), rng)
            bob[i], alice[i] = rec.bob_outcome, rec.alice_bit
    rows = [(int(i), pr.CLOCK_LABELS[bob[i]], int(alice[i]), t_B,
             pr.alice_basic_readout_time(t_B, float(delays[i]))) for i in trials]
    table = ResultTable(QCS_COLUMNS, rows)
    table.summary = qcs_summary(p, rows)
    return table


def qcs_summary(p: PublicScenario, rows) -> dict:
    bob = np.array([pr.CLOCK_LABELS.index(r[1]) for r in rows])
    alice = np.array([int(r[2]) for r in rows])
    delays = np.array([float(r[4]) - float(r[3]) for r in rows])
    samples = est.qcs_fringe_samples(p.omega, delays, alice != bob)
    return _summary_from_samples(p, samples)


def _ramsey_table(scenario: Scenario) -> ResultTable:
    p = scenario.public
    rp = p.ramsey
    M = p.trials
    phases = np.linspace(0.0, rp.max_phase, rp.points) if rp.points > 1 else np.array([0.0])
    rows = []
    for point, wt in enumerate(phases):
        T = float(wt) / p.omega
        probs = qs.outcome_probabilities(pr.ramsey_state(p.omega, T), qs.computational_basis("A"))
        draws = trial_draws(p.seed, point * M, M)[:, SLOT_READOUT_Q1]
        n_excited = int(np.count_nonzero(qs.sample_outcome(probs, draws) == 1))
        rows.append((point, float(wt), T, M, n_excited, n_excited / M,
                     est.ramsey_excited_probability(p.omega, T)))
    return ResultTable(RAMSEY_COLUMNS, rows)


def _grid_values(spec):
    start, stop, count = spec
    return np.linspace(start, stop, count) if count > 1 else np.array([start])


def _phase_map_table(scenario: Scenario) -> ResultTable:
    p = scenario.public
    pm = p.phase_map
    uA = st.FourVelocity.from_velocity(pm.alice_velocity)
    uB = st.FourVelocity.from_velocity(pm.bob_velocity)
    xA0 = st.FourVector(*pm.alice_origin)
    xB0 = st.FourVector(*pm.bob_origin)
    rows = []
    for i, s1 in enumerate(_grid_values(pm.alice_proper_times)):
        x1 = xA0 + float(s1) * uA.u
        for j, s2 in enumerate(_grid_values(pm.bob_proper_times)):
            x2 = xB0 + float(s2) * uB.u
            phi = st.phi_delta(uA, uB, x1, x2, p.omega, scenario.truth.delta)
            rows.append((i, j, float(s1), float(s2), x1.t, x1.x, x1.y, x1.z,
                         x2.t, x2.x, x2.y, x2.z, phi, st.wrap_phase(phi),
                         st.is_timelike_separated(x1, x2)))
    return ResultTable(PHASE_MAP_COLUMNS, rows)


def run(scenario: Scenario, engine: str = "auto", command: str | None = None) -> ResultTable:
    """Execute a scenario. Identical scenarios give identical tables.

    ``engine="batch"`` samples all trials from precomputed branch tables;
    ``engine="trial"`` simulates each trial's state vector on its own stream.
    Both consume the same per-trial draws and agree record for record.
    Detection-heralded pairs (delta = cabrillo) always run per trial.
    """
    if engine not in ("auto", "batch", "trial"):
        raise ValueError(f"unknown engine {engine!r}")
    if engine == "auto":
        engine = "trial" if scenario.truth.delta is None else "batch"
    if engine == "batch" and scenario.truth.delta is None:
        raise ValueError("batch engine needs a fixed delta")
    protocol = scenario.protocol
    try:
        if protocol == "teleport":
            table = _teleport_table(scenario, engine)
        elif protocol == "basic-qcs":
            table = _qcs_table(scenario, engine)
        elif protocol == "ramsey":
            table = _ramsey_table(scenario)
        else:
            table = _phase_map_table(scenario)
    except pr.ProtocolError as exc:
        # timing errors do not depend on the draws, so the first trial already fails
        raise RunError(f"{protocol} run failed at trial 0: {exc}") from exc
    table.header = _scenario_header(scenario, command or protocol)
    return table


def records_digest(table: ResultTable) -> str:
    return hashlib.sha256(record_bytes(table)).hexdigest()


def oracle_observable(scenario: Scenario) -> float | None:
    if scenario.truth.delta is None:
        return None
    return st.wrap_phase(-scenario.public.omega * scenario.truth.tau + scenario.truth.delta)
