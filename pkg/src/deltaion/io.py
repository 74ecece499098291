"""CSV tables, SVG line plots and run manifests."""

from __future__ import annotations

import hashlib
import io as _io
import json
import math
import subprocess
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

TRAJECTORY_HEADER = ("t", "re_Y", "im_Y", "re_theta", "im_theta", "survival")
SPECTRUM_HEADER = ("k", "re_Theta", "im_Theta", "density")
SCAN_HEADER = ("omega", "r", "re_p", "im_p", "gamma", "inv_gamma", "secular_residual", "iters", "flag")
KERNEL_HEADER = ("s", "re_M", "im_M")


def fmt(value) -> str:
    """17 significant digits for floats, plain text otherwise."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    return str(value)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = _io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} fields, header has {len(header)}")
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(csv_text(header, rows))
    return path


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ValueError(f"{path}: empty file")
    return lines[0].split(","), [ln.split(",") for ln in lines[1:]]


def trajectory_rows(traj, stride: int = 1):
    idx = range(0, len(traj.times), max(1, stride))
    for j in idx:
        y = traj.Y[j]
        th = traj.theta[j]
        yield (traj.times[j], y.real, y.imag, th.real, th.imag, traj.survival[j])


def write_trajectory(path, traj, stride: int = 1) -> Path:
    return write_csv(path, TRAJECTORY_HEADER, trajectory_rows(traj, stride))


def write_spectrum(path, spectrum) -> Path:
    rows = zip(spectrum.k_grid, spectrum.Theta.real, spectrum.Theta.imag, spectrum.density)
    return write_csv(path, SPECTRUM_HEADER, rows)


def scan_rows(results):
    for res in results:
        p = res.p_star
        yield (res.omega, res.r, p.real, p.imag, res.gamma_rate, res.inv_gamma, res.secular_residual, res.newton_iters, res.flag)


def write_scan(path, results) -> Path:
    return write_csv(path, SCAN_HEADER, scan_rows(results))


def write_kernel_table(path, s_values, m_values) -> Path:
    m_values = np.asarray(m_values)
    return write_csv(path, KERNEL_HEADER, zip(np.asarray(s_values, dtype=float), m_values.real, m_values.imag))


def file_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def code_revision() -> str:
    """Git commit of the source tree plus a digest of the package files."""
    pkg = Path(__file__).resolve().parent
    digest = hashlib.sha256()
    for f in sorted(pkg.glob("*.py")):
        digest.update(f.name.encode())
        digest.update(f.read_bytes())
    try:
        commit = subprocess.run(
            ["git", "rev-parse", "HEAD"], cwd=pkg, capture_output=True, text=True, timeout=5, check=True
        ).stdout.strip()
    except (OSError, subprocess.SubprocessError):
        commit = "unknown"
    return f"{commit}+src.{digest.hexdigest()[:16]}"


def write_manifest(path, payload: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")
    return path


def read_manifest(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


# ---- SVG ----

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


def _nice(v: float) -> str:
    return format(v, ".3g")


def svg_line_plot(
    path,
    series: Sequence[tuple[str, Sequence[float], Sequence[float]]],
    *,
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    width: int = 640,
    height: int = 420,
    max_points: int = 2000,
) -> Path:
    """Standalone SVG with one polyline per series; text uses generic font families only."""
    left, right, top, bottom = 70, 20, 30, 50
    pw, ph = width - left - right, height - top - bottom
    cleaned = []
    for label, xs, ys in series:
        x = np.asarray(xs, dtype=float)
        y = np.asarray(ys, dtype=float)
        ok = np.isfinite(x) & np.isfinite(y)
        x, y = x[ok], y[ok]
        if len(x) > max_points:
            sel = np.unique(np.linspace(0, len(x) - 1, max_points).round().astype(int))
            x, y = x[sel], y[sel]
        cleaned.append((label, x, y))
    allx = np.concatenate([c[1] for c in cleaned]) if cleaned else np.array([0.0, 1.0])
    ally = np.concatenate([c[2] for c in cleaned]) if cleaned else np.array([0.0, 1.0])
    if allx.size == 0:
        allx, ally = np.array([0.0, 1.0]), np.array([0.0, 1.0])
    x0, x1 = float(allx.min()), float(allx.max())
    y0, y1 = float(ally.min()), float(ally.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5

    def sx(v):
        return left + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return top + (1.0 - (v - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for i in range(5):
        fx = x0 + (x1 - x0) * i / 4
        fy = y0 + (y1 - y0) * i / 4
        out.append(
            f'<text x="{sx(fx):.1f}" y="{top + ph + 16}" font-family="sans-serif" font-size="11" text-anchor="middle">{_nice(fx)}</text>'
        )
        out.append(
            f'<text x="{left - 6}" y="{sy(fy) + 4:.1f}" font-family="sans-serif" font-size="11" text-anchor="end">{_nice(fy)}</text>'
        )
    if title:
        out.append(f'<text x="{width / 2}" y="18" font-family="sans-serif" font-size="13" text-anchor="middle">{_esc(title)}</text>')
    if xlabel:
        out.append(
            f'<text x="{left + pw / 2}" y="{height - 12}" font-family="sans-serif" font-size="12" text-anchor="middle">{_esc(xlabel)}</text>'
        )
    if ylabel:
        out.append(
            f'<text x="16" y="{top + ph / 2}" font-family="sans-serif" font-size="12" text-anchor="middle" '
            f'transform="rotate(-90 16 {top + ph / 2})">{_esc(ylabel)}</text>'
        )
    for i, (label, x, y) in enumerate(cleaned):
        color = _PALETTE[i % len(_PALETTE)]
        if len(x):
            pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{pts}"/>')
        ly = top + 14 + 14 * i
        out.append(f'<line x1="{left + pw - 150}" y1="{ly - 4}" x2="{left + pw - 130}" y2="{ly - 4}" stroke="{color}"/>')
        out.append(f'<text x="{left + pw - 125}" y="{ly}" font-family="sans-serif" font-size="11">{_esc(label)}</text>')
    out.append("</svg>")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(out) + "\n", encoding="utf-8")
    return path


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
