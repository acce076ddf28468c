"""Figure rendering for sweep, EP and boundary outputs (PNG via Agg)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

AXIS_LABELS = {"lambda": r"$\lambda$", "gamma": r"$\gamma$", "U": r"$U$",
               "eps": r"$\epsilon$", "t": r"$t$"}

STYLE = {
    "figure.dpi": 100,
    "savefig.dpi": 150,
    "font.size": 11,
    "axes.linewidth": 0.8,
    "lines.linewidth": 1.6,
    "legend.frameon": False,
}


def _save(fig, path):
    fig.tight_layout()
    # fixed metadata keeps repeated renders byte-identical
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def plot_sweep(axis, xs, pairs, path, title=None):
    """Imaginary (left) and real (right) parts of the tracked pair."""
    xs = np.asarray(xs)
    plus = np.array([p[0] for p in pairs])
    minus = np.array([p[1] for p in pairs])
    with plt.rc_context(STYLE):
        fig, (ax_im, ax_re) = plt.subplots(1, 2, figsize=(9, 3.6))
        for ax, part, name in ((ax_im, np.imag, "Im"), (ax_re, np.real, "Re")):
            ax.plot(xs, part(plus), label=r"$E^+$")
            ax.plot(xs, part(minus), "--", label=r"$E^-$")
            ax.set_xlabel(AXIS_LABELS.get(axis, axis))
            ax.set_ylabel(rf"{name} $E^\pm$")
        ax_im.legend()
        if title:
            fig.suptitle(title, fontsize=10)
        _save(fig, path)


def plot_boundary(curves, path, title=None):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 3.8))
        for c in curves:
            ax.plot(c.u, c.critical, "o-", ms=2.5, label=f"branch {c.branch}")
        axis = curves[0].plane[0] if curves else "lambda"
        ax.set_xlabel(r"$U$")
        ax.set_ylabel(AXIS_LABELS.get(axis, axis) + r"$_e$")
        if len(curves) > 1:
            ax.legend()
        if title:
            ax.set_title(title, fontsize=10)
        _save(fig, path)


def plot_discriminant(axis, xs, disc, eps, path, title=None):
    """Signed discriminant along the scan with EP locations marked."""
    xs = np.asarray(xs)
    disc = np.asarray(disc)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.5, 3.6))
        ax.plot(xs, np.sign(disc) * np.log1p(np.abs(disc)))
        ax.axhline(0.0, color="0.5", lw=0.6)
        for ep in eps:
            ax.axvline(ep.value, color="C3", ls=":", lw=1.0)
        ax.set_xlabel(AXIS_LABELS.get(axis, axis))
        ax.set_ylabel(r"sign$(\Delta)\,\log(1+|\Delta|)$")
        if title:
            ax.set_title(title, fontsize=10)
        _save(fig, path)
