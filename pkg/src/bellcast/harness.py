"""Monte Carlo batch runner with reproducible seeding and JSON-lines output.

Seeding: each trial derives a 64-bit base seed from the master seed and the
trial index with a splitmix-style mix (constants 0x9E3779B97F4A7C15,
0xBF58476D1CE4E5B9, 0x94D049BB133111EB).  The base seed is mixed again with
stream tags 0 and 1 to give independent input-sampling and protocol seeds,
so identical configs reproduce byte-identical record streams.

Record schema (one JSON object per line, keys in this order):

    trial, seed, outcome, message_bits, fidelity, event*, a_re, a_im, b_re, b_im

``event`` appears in photon mode only.  ``outcome`` / ``message_bits`` /
``fidelity`` are null when the trial identified nothing, and the input
amplitude fields are null in swap mode, which has no single-qubit input.
"""

from __future__ import annotations

import dataclasses
import enum
import json
import time
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .observables import BellOutcome, bell_state
from .photonic import (
    IDENTIFYING_EVENTS,
    CascadeEventKind,
    CascadeRecord,
    EfficiencyConfig,
    analytic_distribution,
    run_cascade,
)
from .qcore import fidelity
from .teleport import (
    ClassicalMessage,
    TrialRecord,
    UnknownState,
    haar_random_input,
    run_baseline_computational,
    run_entangled_input,
    run_trial,
)

_MASK64 = (1 << 64) - 1
_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
_SPLITMIX_MULT1 = 0xBF58476D1CE4E5B9
_SPLITMIX_MULT2 = 0x94D049BB133111EB

SUCCESS_FIDELITY = 1.0 - 1e-10
SEED_ENV_VAR = "BELLCAST_SEED"


def derive_seed(master_seed: int, index: int) -> int:
    """Splitmix-style 64-bit mix of (master_seed, index)."""
    z = (master_seed + (index + 1) * _SPLITMIX_GAMMA) & _MASK64
    z ^= z >> 30
    z = (z * _SPLITMIX_MULT1) & _MASK64
    z ^= z >> 27
    z = (z * _SPLITMIX_MULT2) & _MASK64
    z ^= z >> 31
    return z


class Mode(enum.Enum):
    SPIN = "spin"
    PHOTON = "photon"
    BASELINE = "baseline"
    SWAP = "swap"


@dataclass(frozen=True)
class RunConfig:
    """Batch configuration.  ``fixed_input=None`` samples Haar-random inputs;
    ``output_path=None`` skips writing the record file."""

    mode: Mode
    trials: int = 10000
    master_seed: int = 42
    efficiency: EfficiencyConfig = field(default_factory=EfficiencyConfig)
    fixed_input: UnknownState | None = None
    output_path: str | None = None

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.master_seed <= _MASK64:
            raise ValueError("master_seed must fit in 64 bits")


@dataclass(frozen=True)
class BatchSummary:
    """Aggregate of one batch; ``duration_seconds`` is excluded from
    equality so a summary recomputed from the record file compares equal."""

    mode: Mode
    trials: int
    counts: dict[str, int]
    frequencies: dict[str, float]
    mean_fidelity: float | None
    min_fidelity: float | None
    success_rate: float
    chi_square: float | None
    duration_seconds: float = field(compare=False, default=0.0)

    def to_json_obj(self) -> dict:
        return {
            "mode": self.mode.value,
            "trials": self.trials,
            "counts": dict(sorted(self.counts.items())),
            "frequencies": dict(sorted(self.frequencies.items())),
            "mean_fidelity": self.mean_fidelity,
            "min_fidelity": self.min_fidelity,
            "success_rate": self.success_rate,
            "chi_square": self.chi_square,
            "duration_seconds": self.duration_seconds,
        }


def _wire_common(index: int, base_seed: int, input_state: UnknownState | None) -> dict:
    if input_state is None:
        amps = {"a_re": None, "a_im": None, "b_re": None, "b_im": None}
    else:
        amps = {
            "a_re": float(input_state.a.real),
            "a_im": float(input_state.a.imag),
            "b_re": float(input_state.b.real),
            "b_im": float(input_state.b.imag),
        }
    return {"trial": index, "seed": base_seed, **amps}


def _trial_wire(index: int, base_seed: int, record: TrialRecord) -> dict:
    common = _wire_common(index, base_seed, record.input)
    return {
        "trial": common["trial"],
        "seed": common["seed"],
        "outcome": record.outcome.value if record.outcome else None,
        "message_bits": record.message.as_string() if record.message else None,
        "fidelity": record.fidelity_value,
        "a_re": common["a_re"],
        "a_im": common["a_im"],
        "b_re": common["b_re"],
        "b_im": common["b_im"],
    }


def _swap_wire(
    index: int, base_seed: int, outcome: BellOutcome, fidelity_value: float
) -> dict:
    common = _wire_common(index, base_seed, None)
    return {
        "trial": common["trial"],
        "seed": common["seed"],
        "outcome": outcome.value,
        "message_bits": ClassicalMessage.from_outcome(outcome).as_string(),
        "fidelity": fidelity_value,
        "a_re": None,
        "a_im": None,
        "b_re": None,
        "b_im": None,
    }


def _cascade_wire(index: int, base_seed: int, record: CascadeRecord) -> dict:
    common = _wire_common(index, base_seed, record.input)
    original = record.event.original_bell
    message = (
        ClassicalMessage.from_outcome(original.bell_analog).as_string()
        if original
        else None
    )
    return {
        "trial": common["trial"],
        "seed": common["seed"],
        "outcome": original.value if original else None,
        "message_bits": message,
        "fidelity": record.fidelity_value,
        "event": record.event.kind.value,
        "a_re": common["a_re"],
        "a_im": common["a_im"],
        "b_re": common["b_re"],
        "b_im": common["b_im"],
    }


def _input_for_trial(cfg: RunConfig, base_seed: int) -> UnknownState:
    if cfg.fixed_input is not None:
        return cfg.fixed_input
    rng = np.random.default_rng(derive_seed(base_seed, 0))
    return haar_random_input(rng)


def iter_records(cfg: RunConfig) -> Iterator[dict]:
    """Generate the batch's wire records in trial order."""
    singlet = bell_state(BellOutcome.PSI_MINUS)
    for index in range(cfg.trials):
        base_seed = derive_seed(cfg.master_seed, index)
        protocol_seed = derive_seed(base_seed, 1)
        if cfg.mode is Mode.SPIN:
            record = run_trial(_input_for_trial(cfg, base_seed), protocol_seed)
            yield _trial_wire(index, base_seed, record)
        elif cfg.mode is Mode.BASELINE:
            _, record = run_baseline_computational(
                _input_for_trial(cfg, base_seed), protocol_seed
            )
            yield _trial_wire(index, base_seed, record)
        elif cfg.mode is Mode.SWAP:
            outcome, final = run_entangled_input(protocol_seed)
            yield _swap_wire(index, base_seed, outcome, fidelity(final, singlet))
        elif cfg.mode is Mode.PHOTON:
            record = run_cascade(
                _input_for_trial(cfg, base_seed), cfg.efficiency, protocol_seed
            )
            yield _cascade_wire(index, base_seed, record)
        else:  # pragma: no cover - Mode is exhaustive
            raise ValueError(f"unsupported mode {cfg.mode}")


def record_to_line(record: dict) -> str:
    return json.dumps(record, separators=(",", ":"), allow_nan=False)


def run_batch(cfg: RunConfig) -> BatchSummary:
    """Run the batch, optionally writing one JSON-lines record per trial."""
    start = time.perf_counter()
    records = list(iter_records(cfg))
    if cfg.output_path is not None:
        try:
            with open(cfg.output_path, "w", encoding="utf-8", newline="\n") as handle:
                for record in records:
                    handle.write(record_to_line(record) + "\n")
        except OSError as exc:
            raise ValueError(f"cannot write output path {cfg.output_path!r}: {exc}")
    analytic = None
    if cfg.mode is Mode.PHOTON:
        reference_input = cfg.fixed_input or UnknownState(1.0, 0.0)
        analytic = analytic_distribution(reference_input, cfg.efficiency)
    summary = summarize(records, mode=cfg.mode, analytic=analytic)
    return dataclasses.replace(summary, duration_seconds=time.perf_counter() - start)


def load_records(path: str) -> Iterator[dict]:
    """Yield wire records back from a JSON-lines file."""
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                yield json.loads(line)


_IDENTIFYING_WIRE = frozenset(kind.value for kind in IDENTIFYING_EVENTS)


def summarize(
    records: Iterable[dict],
    mode: Mode,
    analytic: dict[CascadeEventKind, float] | None = None,
) -> BatchSummary:
    """Aggregate a stream of wire records.

    Counting key: the event string in photon mode, else the outcome string
    (missing outcomes count under "none").  Mean/min fidelity cover only the
    records that carry one.  Success means fidelity at the recovery threshold
    for spin/swap, an identified trial for baseline, and a detected
    branch-identifying event for photon mode.
    """
    counts: dict[str, int] = {}
    fidelities: list[float] = []
    successes = 0
    total = 0
    for record in records:
        total += 1
        if mode is Mode.PHOTON:
            key = record["event"]
            if key in _IDENTIFYING_WIRE:
                successes += 1
        else:
            key = record["outcome"] or "none"
            if mode is Mode.BASELINE:
                successes += record["outcome"] is not None
            elif record["fidelity"] is not None:
                successes += record["fidelity"] >= SUCCESS_FIDELITY
        counts[key] = counts.get(key, 0) + 1
        if record["fidelity"] is not None:
            fidelities.append(record["fidelity"])
    if total == 0:
        raise ValueError("cannot summarize an empty record stream")

    frequencies = {key: count / total for key, count in counts.items()}
    chi_square = None
    if analytic is not None:
        chi_square = 0.0
        for kind, probability in analytic.items():
            observed = counts.get(kind.value, 0)
            expected = probability * total
            if expected <= 0.0:
                if observed:
                    chi_square = float("inf")
                    break
                continue
            chi_square += (observed - expected) ** 2 / expected
    return BatchSummary(
        mode=mode,
        trials=total,
        counts=counts,
        frequencies=frequencies,
        mean_fidelity=float(np.mean(fidelities)) if fidelities else None,
        min_fidelity=float(np.min(fidelities)) if fidelities else None,
        success_rate=successes / total,
        chi_square=chi_square,
    )


_CONFIG_KEYS = (
    "mode",
    "trials",
    "master_seed",
    "eta_abs",
    "eta_det",
    "p_in",
    "p_pdc",
    "input",
    "output",
)


def _parse_fixed_input(value: str, line_no: int) -> UnknownState:
    parts = [p.strip() for p in value.split(",")]
    if len(parts) != 2:
        raise ValueError(
            f"line {line_no}: fixed input needs two comma-separated amplitudes"
        )
    try:
        a, b = (complex(p) for p in parts)
    except ValueError:
        raise ValueError(f"line {line_no}: cannot parse input amplitudes {value!r}")
    total = abs(a) ** 2 + abs(b) ** 2
    if abs(total - 1.0) > 1e-9:
        raise ValueError(
            f"line {line_no}: input not normalized (|a|^2+|b|^2 = {total:.12g})"
        )
    return UnknownState.normalized(a, b)


def parse_config(text: str) -> RunConfig:
    """Parse a flat ``key=value`` config ('#' starts a comment).

    Recognized keys: mode, trials, master_seed, eta_abs, eta_det, p_in,
    p_pdc, input (``haar-random`` or ``fixed:a,b``), output.  Errors carry
    the offending line number and key.
    """
    mode: Mode | None = None
    values: dict[str, object] = {}
    efficiency_kwargs: dict[str, float] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {line_no}: expected key=value, got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_KEYS:
            raise ValueError(f"line {line_no}: unknown key {key!r}")
        if key == "mode":
            try:
                mode = Mode(value)
            except ValueError:
                raise ValueError(f"line {line_no}: unknown mode {value!r}")
        elif key == "trials":
            try:
                trials = int(value)
            except ValueError:
                raise ValueError(f"line {line_no}: trials must be an integer")
            if trials < 1:
                raise ValueError(f"line {line_no}: trials must be >= 1")
            values["trials"] = trials
        elif key == "master_seed":
            try:
                values["master_seed"] = int(value)
            except ValueError:
                raise ValueError(f"line {line_no}: master_seed must be an integer")
        elif key in ("eta_abs", "eta_det", "p_in", "p_pdc"):
            try:
                number = float(value)
            except ValueError:
                raise ValueError(f"line {line_no}: {key} must be a number")
            if not 0.0 <= number <= 1.0:
                raise ValueError(f"line {line_no}: {key} must lie in [0, 1]")
            efficiency_kwargs[key] = number
        elif key == "input":
            if value == "haar-random":
                values["fixed_input"] = None
            elif value.startswith("fixed:"):
                values["fixed_input"] = _parse_fixed_input(
                    value[len("fixed:"):], line_no
                )
            else:
                raise ValueError(
                    f"line {line_no}: input must be 'haar-random' or 'fixed:a,b'"
                )
        elif key == "output":
            values["output_path"] = value
    if mode is None:
        raise ValueError("config must set mode")
    return RunConfig(
        mode=mode, efficiency=EfficiencyConfig(**efficiency_kwargs), **values
    )
