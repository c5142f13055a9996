"""Test-side helpers: a tiny independent LP parser and a random structural
schedule generator used for cross-oracle fuzzing."""

from __future__ import annotations

import numpy as np

from heliplan.model import AtNode, Flying, Schedule


def parse_lp(text: str) -> dict:
    """Parse the LP subset heliplan emits; independent of the writer."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("\\")]
    section = None
    objective: dict[str, float] = {}
    rows = []
    free = set()
    binaries = set()
    for ln in lines:
        stripped = ln.strip()
        header = stripped.lower()
        if header in ("maximize", "minimize", "subject to", "bounds", "binaries", "end"):
            section = header
            continue
        if section == "maximize":
            body = stripped.split(":", 1)[1] if ":" in stripped else stripped
            toks = body.split()
            for k in range(0, len(toks), 2):
                objective[toks[k + 1]] = objective.get(toks[k + 1], 0.0) + float(toks[k])
        elif section == "subject to":
            name, body = stripped.split(":", 1)
            toks = body.split()
            sense_pos = next(k for k, t in enumerate(toks) if t in ("<=", ">=", "="))
            terms = {}
            for k in range(0, sense_pos, 2):
                terms[toks[k + 1]] = terms.get(toks[k + 1], 0.0) + float(toks[k])
            rows.append(
                {
                    "name": name.strip(),
                    "terms": terms,
                    "sense": toks[sense_pos],
                    "rhs": float(toks[sense_pos + 1]),
                }
            )
        elif section == "bounds":
            toks = stripped.split()
            assert toks[-1] == "free", f"unexpected bound line: {stripped}"
            free.add(toks[0])
        elif section == "binaries":
            binaries.update(stripped.split())
    return {"objective": objective, "rows": rows, "free": free, "binaries": binaries}


def random_schedule(inst, rng: np.random.Generator, stay_bias: float = 0.55) -> Schedule:
    """Random structurally-valid timeline: a walk of node stays and complete
    flight runs. Most draws violate some rule family; that is the point."""
    horizon = inst.grid.horizon_intervals
    out_edges: dict[str, list] = {}
    for e in inst.edges:
        out_edges.setdefault(e.tail, []).append(e)
    rows = []
    for heli in inst.helicopters:
        row: list = [AtNode(heli.start_node)]
        cur = heli.start_node
        while len(row) < horizon:
            options = [
                e for e in out_edges.get(cur, [])
                if len(row) + e.flight_time[heli.id] + 1 <= horizon
            ]
            if not options or rng.random() < stay_bias:
                row.append(AtNode(cur))
                continue
            e = options[rng.integers(len(options))]
            row.extend([Flying(e.tail, e.head)] * e.flight_time[heli.id])
            row.append(AtNode(e.head))
            cur = e.head
        rows.append(tuple(row))
    return Schedule(activities=tuple(rows))
