"""Figure rendering for the CLI report paths.

Each renderer takes the same row dictionaries the CSV writers emit and draws
them to a file; the format follows the file extension.  Line styles are kept
constant across figures: dotted for UT, solid for RT, star markers for PTT.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def render_power_curves(rows: list[dict], path: str) -> None:
    """Plot the three power columns against whichever lambda grid varies."""
    lambda1_values = sorted({r["lambda1"] for r in rows})
    lambda2_values = sorted({r["lambda2"] for r in rows})
    if len(lambda2_values) > 1:
        x_key, group_key = "lambda2", "lambda1"
        groups = lambda1_values
    else:
        x_key, group_key = "lambda1", "lambda2"
        groups = lambda2_values

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for g in groups:
        sub = sorted((r for r in rows if r[group_key] == g), key=lambda r: r[x_key])
        xs = [r[x_key] for r in sub]
        suffix = f" ({group_key[:-1]}{group_key[-1]}={g:g})" if len(groups) > 1 else ""
        ax.plot(xs, [r["pi_ut"] for r in sub], linestyle=":", label="UT" + suffix)
        ax.plot(xs, [r["pi_rt"] for r in sub], linestyle="-", label="RT" + suffix)
        ax.plot(
            xs, [r["pi_ptt"] for r in sub], linestyle="-", marker="*", markevery=max(1, len(xs) // 15),
            label="PTT" + suffix,
        )
    ax.set_xlabel(x_key)
    ax.set_ylabel("asymptotic power")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_size_curves(rows: list[dict], path: str) -> None:
    """Plot the two-stage test's size against the pre-test nominal size."""
    groups = sorted({(r["lambda2"], r["alpha2"]) for r in rows})
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for lam2, a2 in groups:
        sub = sorted(
            (r for r in rows if r["lambda2"] == lam2 and r["alpha2"] == a2),
            key=lambda r: r["alpha3"],
        )
        ax.plot(
            [r["alpha3"] for r in sub],
            [r["alpha_ptt"] for r in sub],
            label=f"lambda2={lam2:g}, alpha2={a2:g}",
        )
    ax.set_xlabel("alpha3 (pre-test nominal size)")
    ax.set_ylabel("two-stage size")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
