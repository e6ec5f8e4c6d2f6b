"""
CSV emission, SVG rendering and the figure builders.

Numbers are written with 12 significant digits; vectors inside a CSV field
use '|' between entries. SVG output is a pure function of its input.
"""

import csv
import io
import logging
import math
import os
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from jinja2 import Environment, FileSystemLoader, select_autoescape

from kitaev_lab.bounds import bound_curves, lossy_general_bound, lossy_unentangled_asymptote
from kitaev_lab.cost import optimal_cost, shot_noise_cost
from kitaev_lab.errors import UsageError
from kitaev_lab.profile import compute_profile, profile_doubled, profile_kitaev
from kitaev_lab.schemas import (
    REPETITION_TIERS,
    Alphabet,
    FrozenModel,
    PlotSpec,
    SearchConfig,
    SearchResult,
    SearchStrategy,
    Series,
    tripled_vector,
)
from kitaev_lab.search import multiplicity_intuition_violations, run_search, search_lossy
from kitaev_lab.settings import get_settings

logger = logging.getLogger(__name__)

TEMPLATES_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "templates")
_env = Environment(loader=FileSystemLoader(TEMPLATES_DIR), autoescape=select_autoescape(["svg", "j2"]))

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f", "#17becf", "#bcbd22")
WIDTH, PANEL_HEIGHT = 760, 420
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 70, 190, 30, 50
CURVE_POINTS = 80
# best/optimum ratio the constrained search is expected to settle around
RATIO_TARGET = 1.04
RATIO_TOLERANCE = 0.02


# ============= CSV =============

def format_number(x: float) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.12g}"


def format_row(values: Sequence[object]) -> List[str]:
    out = []
    for v in values:
        if v is None:
            out.append("")
        elif isinstance(v, str):
            out.append(v)
        else:
            out.append(format_number(v))
    return out


def csv_text(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(format_row(row))
    return buffer.getvalue()


# ============= SVG =============

def _axis(values: Sequence[float], log: bool) -> Tuple[float, float]:
    lo, hi = min(values), max(values)
    if log:
        lo, hi = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
        if lo == hi:
            hi += 1
        return float(lo), float(hi)
    if lo == hi:
        return lo - 1.0, hi + 1.0
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _ticks(lo: float, hi: float, log: bool) -> List[Tuple[float, str]]:
    if log:
        return [(float(k), f"1e{k}") for k in range(int(lo), int(hi) + 1)]
    return [(float(v), f"{v:.4g}") for v in np.linspace(lo, hi, 6)]


def _panel(spec: PlotSpec, offset: int) -> Dict[str, object]:
    log = spec.log_log
    to_axis = (lambda t: math.log10(t)) if log else (lambda t: t)
    xs = [x for s in spec.series for x, _ in s.points] or [1.0, 10.0]
    ys = [y for s in spec.series for _, y in s.points] or [1.0, 10.0]
    x_lo, x_hi = _axis(xs, log)
    y_lo, y_hi = _axis(ys, log)

    left, top = MARGIN_LEFT, MARGIN_TOP
    plot_width = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_height = PANEL_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(x: float) -> str:
        return f"{left + (to_axis(x) - x_lo) / (x_hi - x_lo) * plot_width:.2f}"

    def py(y: float) -> str:
        return f"{top + plot_height - (to_axis(y) - y_lo) / (y_hi - y_lo) * plot_height:.2f}"

    def tick_x(t: float) -> str:
        return f"{left + (t - x_lo) / (x_hi - x_lo) * plot_width:.2f}"

    def tick_y(t: float) -> float:
        return round(top + plot_height - (t - y_lo) / (y_hi - y_lo) * plot_height, 2)

    series = [
        {
            "label": s.label,
            "style": s.style,
            "color": COLORS[i % len(COLORS)],
            "points": [(px(x), py(y)) for x, y in s.points],
        }
        for i, s in enumerate(spec.series)
    ]
    return {
        "offset": offset,
        "title": spec.title,
        "x_label": spec.x_label,
        "y_label": spec.y_label,
        "left": left,
        "top": top,
        "right": left + plot_width,
        "bottom": top + plot_height,
        "plot_width": plot_width,
        "plot_height": plot_height,
        "x_ticks": [{"pos": tick_x(t), "label": label} for t, label in _ticks(x_lo, x_hi, log)],
        "y_ticks": [{"pos": tick_y(t), "label": label} for t, label in _ticks(y_lo, y_hi, log)],
        "series": series,
    }


def render_svg(specs: Sequence[PlotSpec]) -> str:
    """Stacked panels, one per spec."""
    panels = [_panel(spec, i * PANEL_HEIGHT) for i, spec in enumerate(specs)]
    template = _env.get_template("plot.svg.j2")
    return template.render(width=WIDTH, height=PANEL_HEIGHT * len(panels), panels=panels)


# ============= Figures =============

class FigureReport(FrozenModel):
    """Main plot, optional inset, and the long-format data behind them."""

    plot: PlotSpec
    inset: Optional[PlotSpec] = None

    def panels(self) -> List[PlotSpec]:
        return [self.plot] if self.inset is None else [self.plot, self.inset]

    def rows(self) -> List[Tuple[str, float, float]]:
        return [(s.label, x, y) for spec in self.panels() for s in spec.series for x, y in s.points]

    def to_csv(self) -> str:
        return csv_text(("series", "x", "y"), self.rows())

    def to_svg(self) -> str:
        return render_svg(self.panels())


def _grid(n_max: float) -> List[float]:
    return sorted(set(float(x) for x in np.geomspace(1.0, n_max, CURVE_POINTS)))


def best_found_fig2(n_max: int, threads: Optional[int] = None) -> SearchResult:
    """Exhaustive table within the oracle limit, the tiered powers-of-two search beyond it."""
    settings = get_settings()
    if n_max <= settings.exhaustive_limit:
        cfg = SearchConfig(
            n_max=n_max, strategy=SearchStrategy.EXHAUSTIVE, exhaustive_limit=settings.exhaustive_limit
        )
    else:
        cfg = SearchConfig(
            n_max=n_max,
            alphabet=Alphabet.POWERS_OF_TWO,
            m_max=settings.search_max_qubits,
            repetition_tiers=REPETITION_TIERS,
        )
    return run_search(cfg, threads=threads)


def family_points(n_max: int) -> Dict[str, List[Tuple[float, float]]]:
    """(N, cost) of the m1, m1 ∧ m1 and m1 ∧ m1 ∧ m1 families up to n_max."""
    points: Dict[str, List[Tuple[float, float]]] = {"kitaev": [], "m2": [], "m3": []}
    m_count = 1
    while 2 ** m_count - 1 <= n_max:
        points["kitaev"].append((float(2 ** m_count - 1), optimal_cost(profile_kitaev(m_count))))
        m_count += 1
    m_count = 2
    while 2 * (2 ** (m_count // 2) - 1) <= n_max:
        p = profile_doubled(m_count)
        points["m2"].append((float(p.n_total), optimal_cost(p)))
        m_count += 2
    m_count = 3
    while 3 * (2 ** (m_count // 3) - 1) <= n_max:
        p = compute_profile(tripled_vector(m_count))
        points["m3"].append((float(p.n_total), optimal_cost(p)))
        m_count += 3
    return points


def report_fig2(n_max: int, threads: Optional[int] = None) -> FigureReport:
    if n_max < 1:
        raise UsageError("n_max must be >= 1")
    result = best_found_fig2(n_max, threads=threads)
    curves = bound_curves(_grid(n_max))
    families = family_points(n_max)
    series = [
        Series(label="best", points=tuple((float(e.n_key), e.cost) for e in result.entries), style="points"),
        Series(label="kitaev", points=tuple(families["kitaev"]), style="points"),
        Series(label="m2", points=tuple(families["m2"]), style="points"),
        Series(label="m3", points=tuple(families["m3"]), style="points"),
        Series(label="bound_m2", points=tuple(curves["bound_m2"]), style="dashed"),
        Series(label="bound_m3", points=tuple(curves["bound_m3"]), style="dashed"),
        Series(label="optimum", points=tuple(curves["optimum"])),
        Series(label="shot_noise", points=tuple((float(n), shot_noise_cost(n)) for n in range(1, n_max + 1))),
    ]
    inset = PlotSpec(
        title="best / optimum",
        y_label="ratio",
        series=(Series(label="ratio", points=tuple((float(e.n_key), e.ratio) for e in result.entries), style="points"),),
        log_log=False,
    )
    worst = max(result.entries, key=lambda e: e.ratio, default=None)
    if worst is not None:
        limit = RATIO_TARGET + RATIO_TOLERANCE
        if worst.ratio > limit:
            logger.warning(
                f"⚠️ Best/optimum ratio {worst.ratio:.6f} at N={worst.n_key} ({worst.vector}) exceeds {limit:g}"
            )
        else:
            logger.info(f"📈 Worst best/optimum ratio up to N={n_max}: {worst.ratio:.6f} at N={worst.n_key}")
    return FigureReport(plot=PlotSpec(title="Cost versus resources", series=tuple(series)), inset=inset)


def report_fig3(eta_list: Sequence[float], n_max: int, threads: Optional[int] = None) -> FigureReport:
    if not eta_list:
        raise UsageError("at least one eta is required")
    for eta in eta_list:
        if not 0.0 < eta < 1.0:
            raise UsageError(f"eta must lie in (0, 1) for the lossy figure, got {eta}")
    if n_max < 2:
        raise UsageError("n_max must be >= 2")

    settings = get_settings()
    cfg = SearchConfig(n_max=n_max, alphabet=Alphabet.POWERS_OF_TWO, m_max=settings.search_max_qubits)
    grid = _grid(n_max)
    series: List[Series] = []
    results: Dict[float, SearchResult] = {}
    for eta in eta_list:
        result = search_lossy(cfg, eta, threads=threads)
        results[eta] = result
        below = [e.n_key for e in result.entries if e.cost < lossy_general_bound(eta, e.resources)]
        if below:
            logger.warning(f"⚠️ eta={eta}: best-found cost below the general bound at buckets {below}")
        series.extend(
            [
                Series(
                    label=f"best eta={eta:g}",
                    points=tuple((e.resources, e.cost) for e in result.entries),
                    style="points",
                ),
                Series(
                    label=f"asymptote eta={eta:g}",
                    points=tuple((r, lossy_unentangled_asymptote(eta, r)) for r in grid),
                ),
                Series(
                    label=f"general bound eta={eta:g}",
                    points=tuple((r, lossy_general_bound(eta, r)) for r in grid),
                    style="dashed",
                ),
            ]
        )
    series.append(Series(label="optimum", points=tuple(bound_curves(grid)["optimum"])))

    ordered = sorted(eta_list)
    for lossier, clearer in zip(ordered, ordered[1:]):
        violations = multiplicity_intuition_violations(results[lossier], results[clearer])
        if violations:
            logger.warning(
                f"⚠️ eta={lossier} uses larger multiplicities than eta={clearer} at buckets {violations}"
            )
    return FigureReport(plot=PlotSpec(title="Lossy cost versus adjusted resources", x_label="R", series=tuple(series)))
