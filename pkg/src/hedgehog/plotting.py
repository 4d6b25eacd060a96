"""
Figures written next to the CSV/JSON outputs of the command line tool.

Everything renders with the Agg backend straight to a file; nothing is shown.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


STYLE = {
    "font.size": 10,
    "axes.labelsize": 10,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "lines.linewidth": 1.2,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "savefig.dpi": 120,
}


def _figure(ncols=1, width=5.0, height=3.6):
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, ncols, figsize=(width * ncols, height), squeeze=False)
    return fig, axes[0]


def _save(fig, path):
    with plt.rc_context(STYLE):
        fig.tight_layout()
        # no Software/date keys: reruns must give identical files
        fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def _angles(vectors):
    v = np.asarray(vectors, dtype=float)
    theta = np.arccos(np.clip(v[:, 2], -1.0, 1.0))
    phi = np.mod(np.arctan2(v[:, 1], v[:, 0]), 2 * np.pi)
    return theta, phi


def plot_constellation(m, path):
    """Spikes in the (azimuth, polar angle) chart, numbered by index."""
    fig, (ax,) = _figure()
    theta, phi = _angles(m.vectors)
    ax.scatter(phi, theta, s=18, c=np.arange(len(m)), cmap="viridis")
    for n, (x, y) in enumerate(zip(phi, theta)):
        ax.annotate(str(n), (x, y), fontsize=6, xytext=(2, 2), textcoords="offset points")
    ax.set_xlim(0, 2 * np.pi)
    ax.set_ylim(np.pi, 0)
    ax.set_xlabel("azimuth")
    ax.set_ylabel("polar angle")
    ax.set_title(f"{m.label or 'constellation'}  (N = {len(m)})")
    _save(fig, path)


def plot_spectrum(diag, path):
    fig, (ax,) = _figure()
    eig = np.asarray(diag.eigenvalues)
    floor = np.finfo(float).tiny
    ax.semilogy(np.arange(1, len(eig) + 1), np.maximum(np.abs(eig), floor), "o-", ms=3)
    ax.axhline(diag.tau, color="C3", ls="--", label=f"tau = {diag.tau:.2e}")
    ax.set_xlabel("index (ascending)")
    ax.set_ylabel("|Gram eigenvalue|")
    ax.set_title("basis" if diag.is_basis else "not a basis")
    ax.legend()
    _save(fig, path)


def plot_trajectory(states, path):
    """Energy error and the path of the moving spike."""
    fig, (ax_e, ax_p) = _figure(ncols=2)
    t = np.array([st.t for st in states])
    energy = np.array([st.energy for st in states])
    ax_e.plot(t, energy - energy[0])
    ax_e.set_xlabel("t")
    ax_e.set_ylabel("H(t) - H(0)")
    theta, phi = _angles([st.v for st in states])
    ax_p.plot(phi, theta, lw=0.8)
    ax_p.plot(phi[:1], theta[:1], "o", color="C2", ms=4, label="start")
    others = np.delete(states[0].constellation.vectors, states[0].active_index, axis=0)
    o_theta, o_phi = _angles(others)
    ax_p.plot(o_phi, o_theta, "x", color="0.4", ms=4, label="fixed spikes")
    ax_p.set_xlim(0, 2 * np.pi)
    ax_p.set_ylim(np.pi, 0)
    ax_p.set_xlabel("azimuth")
    ax_p.set_ylabel("polar angle")
    ax_p.legend()
    _save(fig, path)


def plot_sweep(rows, path):
    fig, (ax_c, ax_f) = _figure(ncols=2)
    n = [r["n_points"] for r in rows]
    ax_c.semilogy(n, [r["median_condition_number"] for r in rows], "o-")
    ax_c.set_xlabel("N_s")
    ax_c.set_ylabel("median condition number")
    ax_f.plot(n, [r["pass_fraction"] for r in rows], "s-")
    ax_f.set_ylim(-0.05, 1.05)
    ax_f.set_xlabel("N_s")
    ax_f.set_ylabel("fraction passing basis test")
    _save(fig, path)
