"""Schedule rendering: text Gantt, per-helicopter work windows, and SVG.

Cell legend: P start position, C# water point, I# wildfire node, B# rest
base, F flying, ? unplaced. Clock labels anchor interval 1 at the grid's
start_clock (default 10:00) and are rendering-only.
"""

from __future__ import annotations

from dataclasses import dataclass

from .encode import encode_instance, encode_schedule
from . import engine
from .model import AtNode, Flying, Instance, Schedule

DEFAULT_START_CLOCK = "10:00"


def _clock_minutes(clock: str) -> int:
    hh, mm = clock.split(":")
    return int(hh) * 60 + int(mm)


def _fmt_clock(minutes: int) -> str:
    return f"{minutes // 60:02d}:{minutes % 60:02d}"


def _glyphs(instance: Instance):
    water = {n.id: f"C{k + 1}" for k, n in enumerate(instance.water_points)}
    fire = {n.id: f"I{k + 1}" for k, n in enumerate(instance.wildfire_points)}
    base = {n.id: f"B{k + 1}" for k, n in enumerate(instance.rest_bases)}
    start = {n.id: "P" for n in instance.start_positions}
    return {**water, **fire, **base, **start}


def render_schedule(instance: Instance, schedule: Schedule) -> str:
    """One row per helicopter, one fixed-width column per interval."""
    glyphs = _glyphs(instance)
    cells: list[list[str]] = []
    for row in schedule.activities:
        line = []
        for act in row:
            if isinstance(act, AtNode):
                line.append(glyphs.get(act.node, "?"))
            elif isinstance(act, Flying):
                line.append("F")
            else:
                line.append("?")
        cells.append(line)
    width = max((len(c) for line in cells for c in line), default=1)
    names = [h.id for h in instance.helicopters]
    label = max((len(n) for n in names), default=2) + 1
    out = []
    header = " " * label + "".join(
        f"{t + 1:>{width}} " if (t + 1) % 5 == 0 or t == 0 else " " * (width + 1)
        for t in range(instance.grid.horizon_intervals)
    )
    out.append(header.rstrip())
    for name, line in zip(names, cells):
        out.append(f"{name:<{label}}" + " ".join(f"{c:>{width}}" for c in line))
    legend = "P start  C# water point  I# wildfire  B# base  F flying"
    out.append(legend)
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class WorkWindow:
    start_clock: str
    end_clock: str
    start_interval: int
    end_interval: int
    drops: int


def work_windows(instance: Instance, schedule: Schedule) -> dict[str, list[WorkWindow]]:
    """Contiguous active spans (flying or loading/dropping) per helicopter,
    with clock labels and the number of drops completed in each span."""
    enc = encode_instance(instance)
    res = engine.sweep(enc, encode_schedule(enc, schedule))
    base_min = _clock_minutes(instance.grid.start_clock or DEFAULT_START_CLOCK)
    step = instance.grid.interval_minutes
    drop_marks: dict[int, list[int]] = {}
    for a, _node, t1 in res["drop_events"]:
        drop_marks.setdefault(a, []).append(t1)
    out: dict[str, list[WorkWindow]] = {}
    for a, heli in enumerate(instance.helicopters):
        row = schedule.activities[a]
        active = [
            isinstance(act, Flying)
            or (isinstance(act, AtNode) and (enc.node_index[act.node] >= enc.water_lo
                                             and enc.node_index[act.node] < enc.fire_hi))
            for act in row
        ]
        spans = []
        t = 0
        horizon = len(row)
        while t < horizon:
            if not active[t]:
                t += 1
                continue
            u = t
            while u + 1 < horizon and active[u + 1]:
                u += 1
            # a drop completion lands on the first interval after the stay,
            # still inside the active span
            drops = sum(1 for d in drop_marks.get(a, []) if t + 1 <= d <= u + 1)
            spans.append(
                WorkWindow(
                    start_clock=_fmt_clock(base_min + t * step),
                    end_clock=_fmt_clock(base_min + (u + 1) * step),
                    start_interval=t + 1,
                    end_interval=u + 1,
                    drops=drops,
                )
            )
            t = u + 1
        out[heli.id] = spans
    return out


def format_work_windows(instance: Instance, schedule: Schedule) -> str:
    """Table of work windows and drop counts per helicopter."""
    windows = work_windows(instance, schedule)
    most = max((len(v) for v in windows.values()), default=0)
    head = "helicopter" + "".join(f"  window {k + 1}      " for k in range(most)) + "  drops"
    lines = [head]
    for hid, spans in windows.items():
        cells = "".join(f"  {w.start_clock}-{w.end_clock}    " for w in spans)
        cells += "                 " * (most - len(spans))
        lines.append(f"{hid:<10}{cells}  {sum(w.drops for w in spans)}")
    return "\n".join(lines) + "\n"


_FILL = {
    "start": "#b8c4d8",
    "flying": "#f5a623",
    "water": "#2f7ed8",
    "fire": "#d0452b",
    "base": "#5d9e52",
    "unplaced": "#888888",
}


def render_gantt_svg(instance: Instance, schedule: Schedule, cell: int = 14) -> str:
    """Standalone SVG of the schedule grid with a class legend."""
    enc = encode_instance(instance)
    horizon = instance.grid.horizon_intervals
    rows = len(instance.helicopters)
    label_w = 64
    header_h = 22
    legend_h = 26
    width = label_w + horizon * cell + 10
    height = header_h + rows * (cell + 4) + legend_h + 10

    def klass(act):
        if isinstance(act, Flying):
            return "flying", "F"
        if not isinstance(act, AtNode):
            return "unplaced", "?"
        idx = enc.node_index[act.node]
        if enc.is_water(idx):
            return "water", f"C{idx - enc.water_lo + 1}"
        if enc.is_fire(idx):
            return "fire", f"I{idx - enc.fire_lo + 1}"
        if enc.is_base(idx):
            return "base", f"B{idx - enc.base_lo + 1}"
        return "start", "P"

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="monospace" font-size="9">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for t in range(0, horizon, 5):
        x = label_w + t * cell
        parts.append(f'<text x="{x + 2}" y="{header_h - 8}" fill="#333">{t + 1}</text>')
    for k, heli in enumerate(instance.helicopters):
        y = header_h + k * (cell + 4)
        parts.append(
            f'<text x="4" y="{y + cell - 3}" fill="#000">{heli.id}</text>'
        )
        for t, act in enumerate(schedule.activities[k]):
            cls, _g = klass(act)
            x = label_w + t * cell
            parts.append(
                f'<rect x="{x}" y="{y}" width="{cell - 1}" height="{cell}" '
                f'fill="{_FILL[cls]}"><title>{heli.id} t{t + 1}</title></rect>'
            )
    y = header_h + rows * (cell + 4) + 14
    x = label_w
    for cls, label in (
        ("start", "start"), ("flying", "flying"), ("water", "loading"),
        ("fire", "dropping"), ("base", "base"),
    ):
        parts.append(f'<rect x="{x}" y="{y - 9}" width="10" height="10" fill="{_FILL[cls]}"/>')
        parts.append(f'<text x="{x + 14}" y="{y}" fill="#000">{label}</text>')
        x += 14 + 8 * len(label) + 18
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
