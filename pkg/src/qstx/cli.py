"""``qstx`` command line: scenario runner, emitters and the verify suite.

A scenario is validated completely (``validate_config``) before any operator
is built; runners receive only the resolved parameter dict.
"""
from __future__ import annotations

import argparse
import ast
import copy
import csv
import io
import json
import math
import operator
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import lattice, programmable, transfer, walk
from .errors import QstxError, ValidationError
from .tensor import (
    PureState,
    basis_state,
    entanglement_entropy,
    hermitian_residual,
    mat_exp_i,
    max_abs_diff,
    state,
    unitary_residual,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
DUMP_LIMIT = 256

# incremented by every scenario runner; lets the suite confirm that rejected
# configs never reached operator construction
BUILD_COUNTER = {"runs": 0}


class UsageError(QstxError):
    """Invalid configuration; ``key`` names the offending parameter."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


def default_tolerance(fallback: float) -> float:
    raw = os.environ.get("QSTX_TOL")
    if not raw:
        return fallback
    try:
        tol = float(raw)
    except ValueError:
        raise UsageError(f"QSTX_TOL must be a number, got {raw!r}", "QSTX_TOL") from None
    if not tol > 0:
        raise UsageError("QSTX_TOL must be positive", "QSTX_TOL")
    return tol


# --------------------------------------------------------------------- parsing

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_real(value, key: str = "value") -> float:
    """Parse a number or an arithmetic expression in ``pi`` such as ``"3*pi/4"``."""
    if isinstance(value, bool):
        raise UsageError(f"{key}: expected a number, got {value!r}", key)
    if isinstance(value, (int, float)):
        out = float(value)
    else:
        text = str(value).strip().replace("π", "pi")
        try:
            out = float(_eval_expr(ast.parse(text, mode="eval").body))
        except (SyntaxError, ValueError, TypeError, ZeroDivisionError) as exc:
            raise UsageError(f"{key}: cannot parse {value!r} as a real number ({exc})", key) from None
    if not math.isfinite(out):
        raise UsageError(f"{key}: value must be finite", key)
    return out


def _eval_expr(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return node.value
    if isinstance(node, ast.Name) and node.id == "pi":
        return math.pi
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_expr(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_expr(node.left), _eval_expr(node.right))
    raise ValueError("only numbers, pi, + - * / and parentheses are allowed")


def parse_int(value, key: str, minimum: int | None = None) -> int:
    if isinstance(value, bool):
        raise UsageError(f"{key}: expected an integer, got {value!r}", key)
    try:
        f = float(value)
    except (TypeError, ValueError):
        raise UsageError(f"{key}: expected an integer, got {value!r}", key) from None
    if not f.is_integer():
        raise UsageError(f"{key}: expected an integer, got {value!r}", key)
    out = int(f)
    if minimum is not None and out < minimum:
        raise UsageError(f"{key}: must be >= {minimum}, got {out}", key)
    return out


def parse_amplitudes(text, dim: int, key: str) -> list[complex]:
    """Program/coin register state: ``0``..``dim-1`` (basis), ``+``/``-``, or comma-separated amplitudes."""
    t = str(text).strip()
    if t in ("+", "-") and dim == 2:
        return [1 / math.sqrt(2), (1 if t == "+" else -1) / math.sqrt(2)]
    if t.isdigit():
        k = int(t)
        if k >= dim:
            raise UsageError(f"{key}: basis index {k} out of range for dimension {dim}", key)
        return [1.0 if i == k else 0.0 for i in range(dim)]
    try:
        amps = [complex(p.strip().replace(" ", "")) for p in t.split(",")]
    except ValueError:
        raise UsageError(f"{key}: cannot parse register state {text!r}", key) from None
    if len(amps) != dim:
        raise UsageError(f"{key}: expected {dim} amplitudes, got {len(amps)}", key)
    nrm = math.sqrt(sum(abs(a) ** 2 for a in amps))
    if nrm == 0:
        raise UsageError(f"{key}: register state is the zero vector", key)
    return [a / nrm for a in amps]


def parse_coin(spec: str, theta: float | None, key: str = "coin") -> tuple[str, float | None]:
    spec = spec.strip()
    if spec.startswith("rotation(") and spec.endswith(")"):
        return "rotation", parse_real(spec[len("rotation("):-1], key)
    if spec == "rotation":
        if theta is None:
            raise UsageError(f"{key}: rotation coin needs --theta or rotation(<angle>)", key)
        return "rotation", theta
    if spec in ("hadamard_y", "hadamard_x"):
        return spec, None
    raise UsageError(f"{key}: unknown coin {spec!r} (hadamard_y, hadamard_x, rotation(<angle>))", key)


def parse_moves(value, key: str = "moves") -> list[tuple[int, int]]:
    if isinstance(value, (list, tuple)):
        pairs = [tuple(p) for p in value]
    else:
        pairs = [tuple(p.split(",")) for p in str(value).split(";") if p.strip()]
    out = []
    for p in pairs:
        if len(p) != 2:
            raise UsageError(f"{key}: each move is 'k,j', got {p!r}", key)
        out.append((parse_int(p[0], key), parse_int(p[1], key)))
    if not out:
        raise UsageError(f"{key}: move list is empty", key)
    if len(set(out)) != len(out):
        raise UsageError(f"{key}: duplicate moves in {out}", key)
    return out


# ------------------------------------------------------------------- scenarios

@dataclass
class RunResult:
    scenario: str
    parameters: dict
    tables: dict = field(default_factory=dict)  # name -> (columns, rows)
    scalars: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)  # (name, residual, tolerance)
    reports: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        ok = all(r <= t for _, r, t in self.checks)
        return ok and all(rep["passed"] for rep in self.reports.values())


@dataclass(frozen=True)
class Scenario:
    formula: str
    validate: Callable[[dict], dict]
    run: Callable[[dict], RunResult]


def matrix_table(m: np.ndarray):
    rows = [(i, j, m[i, j].real, m[i, j].imag) for i in range(m.shape[0]) for j in range(m.shape[1])]
    return ("row", "col", "re", "im"), rows


def vector_table(v, index="site", value="probability"):
    return (index, value), [(i, float(x)) for i, x in enumerate(v)]


def _maybe_dump(res: RunResult, name: str, m: np.ndarray, force: bool):
    if m.shape[0] > DUMP_LIMIT and not force:
        res.notes.append(f"{name} matrix ({m.shape[0]}x{m.shape[0]}) not dumped; pass --force-dump")
        return
    res.tables[name] = matrix_table(m)


def _get(p: dict, key: str, default=None, required=False):
    if key in p and p[key] is not None:
        return p[key]
    if required:
        raise UsageError(f"missing required parameter '{key}'", key)
    return default


def _sites(p, key="n"):
    n = parse_int(_get(p, key, required=True), key)
    if n < 2:
        raise UsageError(f"{key}: lattice size must be >= 2, got {n}", key)
    return n


def _site_index(p, key, n, default):
    i = parse_int(_get(p, key, default), key)
    if not 0 <= i < n:
        raise UsageError(f"{key}: site {i} out of range [0, {n})", key)
    return i


def _common(p):
    return {"force_dump": bool(p.get("force_dump", False))}


# shift

def _v_shift(p):
    n = _sites(p)
    alpha = parse_real(_get(p, "alpha", required=True), "alpha")
    method = _get(p, "method", "spectral")
    if method not in ("spectral", "closed"):
        raise UsageError("method: expected 'spectral' or 'closed'", "method")
    return {"n": n, "alpha": alpha, "method": method, **_common(p)}


def _r_shift(q):
    n, a = q["n"], q["alpha"]
    build = lattice.shift_root_spectral if q["method"] == "spectral" else lattice.shift_root_closed
    other = lattice.shift_root_closed if q["method"] == "spectral" else lattice.shift_root_spectral
    u = build(n, a)
    res = RunResult("shift", q)
    _maybe_dump(res, "matrix", u, q["force_dump"])
    res.tables["distribution"] = vector_table(np.abs(u[:, 0]) ** 2)
    res.checks.append(("unitarity_residual", unitary_residual(u), default_tolerance(1e-11)))
    res.checks.append(("construction_gap", max_abs_diff(u, other(n, a)), default_tolerance(1e-10)))
    return res


# hamiltonian

def _v_hamiltonian(p):
    n = _sites(p)
    t = parse_real(_get(p, "time", 1.0), "time")
    return {"n": n, "time": t, **_common(p)}


def _r_hamiltonian(q):
    n, t = q["n"], q["time"]
    h = lattice.shift_hamiltonian_spectral(n)
    res = RunResult("hamiltonian", q)
    _maybe_dump(res, "matrix", h, q["force_dump"])
    res.tables["spectrum"] = vector_table(np.linalg.eigvalsh(h), "index", "eigenvalue")
    res.scalars["varpi"] = lattice.varpi(n)
    res.checks.append(("hermitian_residual", hermitian_residual(h), default_tolerance(1e-12)))
    res.checks.append(
        ("construction_gap", max_abs_diff(h, lattice.shift_hamiltonian_closed(n)), default_tolerance(1e-10))
    )
    res.checks.append(
        ("generator_residual", max_abs_diff(mat_exp_i(h, t), lattice.shift_root_spectral(n, t)), default_tolerance(1e-9))
    )
    return res


# qubot

def _v_qubot(p):
    n = _sites(p)
    q = {
        "n": n,
        "program": parse_amplitudes(_get(p, "program", "0"), 2, "program"),
        "start": _site_index(p, "start", n, 0),
        "steps": parse_int(_get(p, "steps", 1), "steps", 0),
        "time": None,
        **_common(p),
    }
    if _get(p, "time") is not None:
        q["time"] = parse_real(p["time"], "time")
    return q


def _r_qubot(q):
    n = q["n"]
    prog = state(q["program"], (2,))
    data = basis_state((n,), (q["start"],))
    if q["time"] is None:
        out, ent = programmable.run_conditional(programmable.qubot_gate(n), prog, data, q["steps"])
    else:
        out, ent = programmable.run_conditional(programmable.qubot_hamiltonian(n), prog, data, q["time"])
    res = RunResult("qubot", q)
    probs = np.abs(out.tensor()) ** 2
    res.tables["distribution"] = vector_table(probs.sum(axis=0))
    res.tables["program_populations"] = vector_table(probs.sum(axis=1), "program", "probability")
    res.scalars["entropy_bits"] = ent
    return res


# switch

def _v_switch(p):
    n = _sites(p)
    g = _get(p, "g")
    q = {
        "n": n,
        "g": parse_real(g, "g") if g is not None else programmable.default_switch_coupling(n),
        "time": parse_real(_get(p, "time", required=True), "time"),
        "program": parse_amplitudes(_get(p, "program", "1"), 2, "program"),
        "start": _site_index(p, "start", n, 0),
        "chain": _get(p, "chain", "lattice"),
        **_common(p),
    }
    if q["chain"] not in ("lattice", "spin"):
        raise UsageError("chain: expected 'lattice' or 'spin'", "chain")
    return q


def _r_switch(q):
    n = q["n"]
    if q["chain"] == "spin":
        h = transfer.pst_switch_hamiltonian(n, q["g"])
        a, b = transfer.pst_switch_summands(n, q["g"])
    else:
        h = programmable.switch_hamiltonian(n, q["g"])
        a, b = programmable.switch_summands(n, q["g"])
    psi0 = np.kron(q["program"], np.kron([1, 0], np.eye(n)[q["start"]]))
    psi = (mat_exp_i(h, q["time"]) @ psi0).reshape(2, 2, n)
    probs = np.abs(psi) ** 2
    res = RunResult("switch", q)
    res.tables["rail_populations"] = vector_table(probs.sum(axis=(0, 2)), "rail", "probability")
    rail_site = probs.sum(axis=0)
    res.tables["distribution"] = (
        ("rail", "site", "probability"),
        [(r, j, float(rail_site[r, j])) for r in range(2) for j in range(n)],
    )
    res.scalars["entropy_bits"] = entanglement_entropy(PureState(psi.reshape(-1), (2, 2, n)), 0)
    res.checks.append(("summand_commutator", float(np.max(np.abs(a @ b - b @ a))), default_tolerance(1e-12)))
    return res


# chessman

def _v_chessman(p):
    n = _sites(p)
    m = _sites(p, "m") if _get(p, "m") is not None else n
    moves = parse_moves(_get(p, "moves")) if _get(p, "moves") is not None else list(programmable.DEFAULT_MOVES)
    start = _get(p, "start", "0,0")
    parts = str(start).split(",") if not isinstance(start, (list, tuple)) else list(start)
    if len(parts) != 2:
        raise UsageError("start: chessman start is 'x,y' (x on the m-lattice, y on the n-lattice)", "start")
    sx, sy = parse_int(parts[0], "start", 0), parse_int(parts[1], "start", 0)
    if sx >= m or sy >= n:
        raise UsageError(f"start: ({sx},{sy}) outside the {m}x{n} lattice", "start")
    return {
        "n": n,
        "m": m,
        "moves": moves,
        "program": parse_amplitudes(_get(p, "program", "0"), len(moves), "program"),
        "time": parse_real(_get(p, "time", 1.0), "time"),
        "start": [sx, sy],
        **_common(p),
    }


def _r_chessman(q):
    m, n = q["m"], q["n"]
    h = programmable.chessman_hamiltonian(m, n, q["moves"])
    lat = np.zeros((m, n))
    lat[q["start"][0], q["start"][1]] = 1.0
    psi0 = np.kron(q["program"], lat.reshape(-1))
    psi = (mat_exp_i(h, q["time"]) @ psi0).reshape(len(q["moves"]), m, n)
    grid = (np.abs(psi) ** 2).sum(axis=0)
    res = RunResult("chessman", q)
    res.tables["distribution"] = (
        ("x", "y", "probability"),
        [(i, j, float(grid[i, j])) for i in range(m) for j in range(n)],
    )
    res.scalars["entropy_bits"] = entanglement_entropy(PureState(psi.reshape(-1), (len(q["moves"]), m, n)), 0)
    return res


# pst

def _v_pst(p):
    n = _sites(p)
    omega = parse_real(_get(p, "omega", 1.0), "omega")
    if omega == 0:
        raise UsageError("omega: must be non-zero", "omega")
    t = _get(p, "time")
    return {
        "n": n,
        "omega": omega,
        "time": parse_real(t, "time") if t is not None else math.pi / omega,
        "source": _site_index(p, "source", n, 0),
        "target": _site_index(p, "target", n, n - 1),
        "steps": parse_int(_get(p, "steps", 0), "steps", 0),
        **_common(p),
    }


def _r_pst(q):
    h = transfer.pst_hamiltonian(q["n"], q["omega"])
    res = RunResult("pst", q)
    res.scalars["fidelity"] = transfer.transfer_fidelity(h, q["time"], q["source"], q["target"])
    bonds = transfer.coupling_profile(q["n"], q["omega"])
    res.tables["coupling_profile"] = (("bond", "coupling"), [(k + 1, b) for k, b in enumerate(bonds)])
    res.tables["mirror_phases"] = vector_table(transfer.mirror_phases(q["n"]), "site", "phase")
    if q["steps"]:
        times = np.linspace(0.0, q["time"], q["steps"] + 1)
        curve = [(float(t), transfer.transfer_fidelity(h, t, q["source"], q["target"])) for t in times]
        res.tables["fidelity_curve"] = (("time", "fidelity"), curve)
    return res


# walk

def _coin_list(p, key="coin"):
    theta = parse_real(p["theta"], "theta") if _get(p, "theta") is not None else None
    raw = _get(p, key, "hadamard_y")
    specs = raw if isinstance(raw, (list, tuple)) else [s for s in _split_coins(str(raw))]
    if not specs:
        raise UsageError(f"{key}: no coins given", key)
    return [dict(zip(("kind", "theta"), parse_coin(s, theta, key))) for s in specs]


def _split_coins(text: str) -> list[str]:
    # split on commas that are not inside rotation(...)
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch == "," and depth == 0:
            out.append(cur.strip())
            cur = ""
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur += ch
    if cur.strip():
        out.append(cur.strip())
    return out


def _make_coins(specs):
    return [walk.make_coin(c["kind"], c["theta"]) for c in specs]


def _v_walk(p):
    n = _sites(p)
    return {
        "n": n,
        "coins": _coin_list(p),
        "steps": parse_int(_get(p, "steps", 1), "steps", 0),
        "start": _site_index(p, "start", n, 0),
        "coin_state": parse_amplitudes(_get(p, "program", "0"), 2, "program"),
        **_common(p),
    }


def _r_walk(q):
    n = q["n"]
    traj = walk.walk_evolve(n, _make_coins(q["coins"]), q["steps"], walk.walker(n, q["start"], q["coin_state"]))
    dist = walk.position_distribution(traj[-1])
    res = RunResult("walk", q)
    res.tables["distribution"] = vector_table(dist)
    classical = walk.classical_walk_reference(n, q["steps"], 0.5, q["start"])
    res.scalars["sigma"] = walk.spread_sigma(dist, q["start"])
    res.scalars["classical_sigma"] = walk.spread_sigma(classical, q["start"])
    far = walk.far_mass(dist, q["start"])
    res.scalars["far_mass"] = far
    if far > 0.01:
        res.notes.append(f"warning: {far:.3f} of the probability lies beyond n/4; sigma is wrap-affected")
    return res


# controlled-walk

def _v_cwalk(p):
    n = _sites(p)
    coins = _coin_list(p)
    default_prog = ",".join(["1"] * len(coins))
    return {
        "n": n,
        "coins": coins,
        "steps": parse_int(_get(p, "steps", 1), "steps", 0),
        "start": _site_index(p, "start", n, 0),
        "program": parse_amplitudes(_get(p, "program", default_prog), len(coins), "program"),
        **_common(p),
    }


def _r_cwalk(q):
    n = q["n"]
    coins = _make_coins(q["coins"])
    traj = walk.controlled_walk_evolve(coins, n, q["steps"], state(q["program"]), walk.walker(n, q["start"]))
    final = traj[-1]
    res = RunResult("controlled-walk", q)
    res.tables["distribution"] = vector_table(walk.position_distribution(final))
    res.scalars["control_entropy_bits"] = entanglement_entropy(final, 0)
    return res


# audit

def _v_audit(p):
    n = _sites(p)
    progs = str(_get(p, "program", "0;1")).split(";")
    return {
        "n": n,
        "programs": [parse_amplitudes(s, 2, "program") for s in progs if s.strip()],
        "tol": parse_real(p["tol"], "tol") if _get(p, "tol") is not None else default_tolerance(1e-8),
    }


def _r_audit(q):
    n = q["n"]
    gate = programmable.qubot_gate(n)
    progs = [state(a, (2,)) for a in q["programs"]]
    data = [basis_state((n,), (i,)) for i in range(n)]
    res = RunResult("audit", q)
    res.reports["programmability"] = programmable.check_programmability(gate, progs, data, q["tol"]).as_dict()
    if len(progs) == 2:
        bank = programmable.ProgramBank((lattice.shift_u(n), lattice.shift_u(n).conj().T))
        res.reports["program_overlap"] = programmable.program_overlap_audit(progs, bank, q["tol"]).as_dict()
    else:
        res.notes.append("overlap audit needs exactly one program per bank operator (2); skipped")
    return res


SCENARIOS: dict[str, Scenario] = {
    "shift": Scenario("U(alpha) = F^dag V(alpha) F, entries kernel(k - j + alpha)", _v_shift, _r_shift),
    "hamiltonian": Scenario("H_U = F^dag K F, K = diag(2 pi k / n); exp(i H_U t) = U(t)", _v_hamiltonian, _r_hamiltonian),
    "qubot": Scenario(
        "B = |0><0| (x) U + |1><1| (x) U^dag (steps), or exp(i sigma_z (x) H_U t) (--time)", _v_qubot, _r_qubot
    ),
    "switch": Scenario(
        "H = I (x) I (x) H_U + g |1><1| (x) sigma_x (x) I  (--chain spin uses J_x)", _v_switch, _r_switch
    ),
    "chessman": Scenario("H = sum |k,j><k,j| (x) (k I (x) H_U + j H_U (x) I)", _v_chessman, _r_chessman),
    "pst": Scenario("|<target| exp(i omega J_x t) |source>|, couplings omega sqrt(k(n-k))/2", _v_pst, _r_pst),
    "walk": Scenario("(B (C (x) I))^T with a cyclic coin schedule", _v_walk, _r_walk),
    "controlled-walk": Scenario("S = (C (x) I)(I (x) B), C = sum |k><k| (x) coin_k", _v_cwalk, _r_cwalk),
    "audit": Scenario("programmability and program-orthogonality audits of B", _v_audit, _r_audit),
}


def validate_config(config: dict) -> tuple[str, dict]:
    config = dict(config)
    name = config.pop("scenario", None)
    if name not in SCENARIOS:
        raise UsageError(f"scenario: expected one of {', '.join(SCENARIOS)}, got {name!r}", "scenario")
    params = dict(config.pop("parameters", {}) or {})
    params.update({k: v for k, v in config.items() if k not in ("output", "sweep")})
    try:
        return name, SCENARIOS[name].validate(params)
    except ValidationError as exc:
        raise UsageError(f"{name}: {exc}") from exc


def run_validated(name: str, params: dict) -> RunResult:
    BUILD_COUNTER["runs"] += 1
    t0 = time.perf_counter()
    try:
        res = SCENARIOS[name].run(params)
    except ValidationError as exc:
        raise UsageError(f"{name}: {exc}") from exc
    res.wall_time = time.perf_counter() - t0
    return res


def run_scenario(config: dict) -> RunResult:
    """Validate ``config`` then run it; deterministic for identical configs."""
    name, params = validate_config(config)
    return run_validated(name, params)


# --------------------------------------------------------------------- emitters

def _num(x) -> str:
    return format(float(x), ".17g") if isinstance(x, (float, np.floating)) else str(x)


def _json_value(v):
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    return v


def _table_json(columns, rows):
    if tuple(columns) == ("row", "col", "re", "im"):
        dim = int(math.isqrt(len(rows)))
        mat = [[None] * dim for _ in range(dim)]
        for i, j, re, im in rows:
            mat[i][j] = {"re": float(re), "im": float(im)}
        return mat
    if len(columns) == 2:
        return [float(r[1]) for r in rows]
    return {"columns": list(columns), "rows": [[_json_value(x) for x in r] for r in rows]}


def result_dict(res: RunResult, timing: bool = False) -> dict:
    doc = {
        "scenario": res.scenario,
        "parameters": _json_value(res.parameters),
        "outputs": {name: _table_json(*tbl) for name, tbl in res.tables.items()},
        "scalars": _json_value(res.scalars),
        "checks": [{"name": n, "residual": r, "tolerance": t, "passed": r <= t} for n, r, t in res.checks],
        "reports": res.reports,
        "passed": res.passed,
        "notes": res.notes,
    }
    if timing:
        doc["wall_time_s"] = res.wall_time
    return doc


def _csv_rows(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_num(x) for x in r])
    return buf.getvalue()


def _scalar_rows(res: RunResult):
    rows = [(k, v) for k, v in res.scalars.items()]
    rows += [(f"check:{n}", r) for n, r, _ in res.checks]
    for rname, rep in res.reports.items():
        rows += [(f"{rname}:{c['name']}", c["residual"]) for c in rep["checks"]]
    return rows


def csv_tables(res: RunResult) -> dict[str, str]:
    out = {name: _csv_rows(*tbl) for name, tbl in res.tables.items()}
    scal = _scalar_rows(res)
    if scal:
        out["scalars"] = _csv_rows(("name", "value"), scal)
    return out


def render(res: RunResult, fmt: str, timing: bool = False) -> str:
    if fmt == "json":
        return json.dumps(result_dict(res, timing), indent=2) + "\n"
    return "".join(f"# table: {name}\n{text}" for name, text in csv_tables(res).items())


def emit(res: RunResult, fmt: str, path: str | os.PathLike | None, timing: bool = False) -> list[Path]:
    """Write ``res``; CSV goes to ``path`` (first table) plus ``<stem>__<table>.csv`` siblings."""
    if path is None:
        sys.stdout.write(render(res, fmt, timing))
        return []
    path = Path(path)
    written = []
    try:
        if fmt == "json":
            path.write_text(render(res, fmt, timing), encoding="utf-8", newline="\n")
            return [path]
        tables = csv_tables(res)
        for i, (name, text) in enumerate(tables.items()):
            target = path if i == 0 else path.with_name(f"{path.stem}__{name}{path.suffix or '.csv'}")
            target.write_text(text, encoding="utf-8", newline="\n")
            written.append(target)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return written


def load_matrix_json(doc) -> np.ndarray:
    """Inverse of the JSON matrix encoding (rows of ``{"re", "im"}``)."""
    return np.array([[complex(e["re"], e["im"]) for e in row] for row in doc], dtype=complex)


# ------------------------------------------------------------------------ sweep

def parse_sweep(spec: str) -> tuple[str, list[float]]:
    try:
        key, rng = spec.split("=", 1)
        start, stop, count = rng.split(":")
    except ValueError:
        raise UsageError(f"sweep: expected key=start:stop:count, got {spec!r}", "sweep") from None
    count = parse_int(count, "sweep", 1)
    return key.strip(), list(np.linspace(parse_real(start, "sweep"), parse_real(stop, "sweep"), count))


def run_sweep(config: dict, key: str, values: list[float], workers: int = 4) -> list[RunResult]:
    configs = []
    for v in values:
        c = copy.deepcopy(config)
        c[key] = float(v)
        configs.append(c)
    validated = [validate_config(c) for c in configs]  # every grid point before any run
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda nv: run_validated(*nv), validated))


def render_sweep(key: str, values, results: list[RunResult], fmt: str, timing: bool = False) -> str:
    if fmt == "json":
        doc = {"sweep": {"key": key, "values": [float(v) for v in values]},
               "runs": [result_dict(r, timing) for r in results]}
        return json.dumps(doc, indent=2) + "\n"
    names = []
    for r in results:
        for n, _ in _scalar_rows(r):
            if n not in names:
                names.append(n)
    rows = []
    for v, r in zip(values, results):
        vals = dict(_scalar_rows(r))
        rows.append([float(v)] + [vals.get(n, "") for n in names])
    return _csv_rows([key] + names, rows)


# ------------------------------------------------------------------------- main

_FLAGS = [
    ("n", str, "lattice size"),
    ("m", str, "second lattice size (chessman)"),
    ("alpha", str, "fractional shift amount; accepts pi expressions"),
    ("omega", str, "chain coupling strength"),
    ("g", str, "switch coupling (default 2/(n-1))"),
    ("theta", str, "rotation coin angle"),
    ("steps", str, "number of discrete steps (or curve samples for pst)"),
    ("time", str, "evolution time; accepts pi expressions such as pi/2"),
    ("source", str, "source site"),
    ("target", str, "target site"),
    ("start", str, "start site (chessman: 'x,y')"),
    ("coin", str, "coin schedule, e.g. hadamard_y or 'rotation(0),rotation(pi/2)'"),
    ("program", str, "control/program state: 0, 1, +, -, or amplitudes 'a,b'; audit takes ';'-separated list"),
    ("moves", str, "chessman moves 'k,j;k,j;...'"),
    ("method", str, "shift construction: spectral or closed"),
    ("chain", str, "switch transport: lattice (H_U) or spin (J_x)"),
    ("tol", str, "audit tolerance"),
]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    for name, typ, hlp in _FLAGS:
        common.add_argument(f"--{name}", type=typ, default=None, help=hlp)
    common.add_argument("--config", help="JSON scenario config; flags override its values")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--sweep", help="key=start:stop:count parameter grid")
    common.add_argument("--force-dump", action="store_true", default=None, help=f"dump matrices above {DUMP_LIMIT}")
    common.add_argument("--timing", action="store_true", help="include wall time (output no longer byte-stable)")

    scen_help = "\n".join(f"  {k:<16} {s.formula}" for k, s in SCENARIOS.items())
    parser = argparse.ArgumentParser(
        prog="qstx",
        description="Programmable quantum state transfer: scenarios and verification.",
        epilog="scenarios:\n" + scen_help + "\n  verify           run the invariant suite (all or one module)\n\n"
        "exit codes: 0 ok, 1 check/invariant failure, 2 usage error, 3 I/O error.\n"
        "QSTX_TOL overrides the default comparison tolerance of scenario checks and audits.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, s in SCENARIOS.items():
        sub.add_parser(name, parents=[common], help=s.formula, description=s.formula)
    from .verify import MODULES

    v = sub.add_parser("verify", help="run invariants; exit 0 iff all pass")
    v.add_argument("selection", nargs="?", default="all", help="all or one of: " + ", ".join(MODULES))
    return parser


def _merge_config(args) -> dict:
    cfg: dict[str, Any] = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise OSError(f"cannot read config {args.config}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {args.config}: invalid JSON ({exc})", "config") from None
        if not isinstance(doc, dict):
            raise UsageError("config must be a JSON object", "config")
        if doc.get("scenario") not in (None, args.command):
            raise UsageError(f"config scenario {doc['scenario']!r} != subcommand {args.command!r}", "scenario")
        cfg.update(doc.get("parameters", {}) or {})
        cfg.update({k: v for k, v in doc.items() if k not in ("scenario", "parameters", "output")})
        out = doc.get("output") or {}
        cfg.setdefault("_format", out.get("format"))
        cfg.setdefault("_out", out.get("path"))
    for name, _, _ in _FLAGS:
        val = getattr(args, name)
        if val is not None:
            cfg[name] = val
    if args.force_dump:
        cfg["force_dump"] = True
    if args.format:
        cfg["_format"] = args.format
    if args.out:
        cfg["_out"] = args.out
    if args.sweep:
        cfg["_sweep"] = args.sweep
    cfg["scenario"] = args.command
    return cfg


def _run_verify(selection: str) -> int:
    from .verify import run_suite

    t0 = time.perf_counter()
    try:
        outcomes = run_suite(selection, echo=lambda line: print(line, flush=True))
    except ValueError as exc:
        print(f"qstx: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    failed = [o for o in outcomes if not o.passed]
    dt = time.perf_counter() - t0
    print(f"{len(outcomes) - len(failed)}/{len(outcomes)} passed in {dt:.1f}s")
    for o in failed:
        print(f"failing: {o.module}/{o.name}")
    return EXIT_OK if not failed else EXIT_FAIL


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if args.command == "verify":
        return _run_verify(args.selection)
    try:
        cfg = _merge_config(args)
        fmt = cfg.pop("_format", None) or "json"
        out = cfg.pop("_out", None)
        sweep = cfg.pop("_sweep", None)
        if fmt not in ("json", "csv"):
            raise UsageError(f"format: expected json or csv, got {fmt!r}", "format")
        if sweep:
            key, values = parse_sweep(sweep)
            results = run_sweep(cfg, key, values)
            text = render_sweep(key, values, results, fmt, args.timing)
            if out:
                Path(out).write_text(text, encoding="utf-8", newline="\n")
            else:
                sys.stdout.write(text)
            ok = all(r.passed for r in results)
            notes = [n for r in results for n in r.notes]
        else:
            res = run_scenario(cfg)
            emit(res, fmt, out, args.timing)
            ok, notes = res.passed, res.notes
    except UsageError as exc:
        key = f" [{exc.key}]" if exc.key else ""
        print(f"qstx {args.command}: usage error{key}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"qstx {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    for n in notes:
        print(f"qstx {args.command}: {n}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
