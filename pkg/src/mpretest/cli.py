"""Command-line front end.

Subcommands: ``test`` and ``estimate`` consume a two-column CSV of (x, c)
observations; ``power`` and ``size-table`` evaluate the asymptotic power
formulas over grids and emit CSV (optionally a rendered figure); ``simulate``
runs the Monte Carlo engine and emits a one-row CSV.

Exit codes: 0 success, 2 bad input or parameters, 3 degenerate data (constant
regressor, zero variance, saturated estimating equation).  CSV uses LF line
endings, a mandatory header row, and full-precision floats; human-readable
tables round to 6 significant digits.
"""

from __future__ import annotations

import csv
import io
import math
import sys

import click

from .errors import (
    DegenerateDesign,
    EmptyInput,
    InvalidParams,
    MpretestError,
    NoSignChange,
    ZeroVariance,
)
from .montecarlo import (
    ErrorDistribution,
    Regressor,
    SimConfig,
    population_score_moments,
    simulate,
)
from .mstat import estimate_all, make_sample
from .mtest import TestConfig, run_ptt
from .power import PowerParams, power_ptt, power_rt, power_ut
from .score import ScoreFunction

DATA_EXIT = 3
PARSE_EXIT = 2


class _CliError(click.ClickException):
    def __init__(self, message, exit_code):
        super().__init__(message)
        self.exit_code = exit_code


def _parse_error(message):
    return _CliError(message, PARSE_EXIT)


def _data_error(message):
    return _CliError(message, DATA_EXIT)


def _read_data_file(path):
    """Read a UTF-8 CSV with header x,c; report parse failures by line number."""
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise _parse_error(f"cannot open {path}: {exc}")
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise _parse_error(f"{path}: empty file, expected header x,c")
        fields = [h.strip() for h in header]
        if sorted(fields) != ["c", "x"]:
            raise _parse_error(f"{path}:1: expected header x,c, got {','.join(header)}")
        ix, ic = fields.index("x"), fields.index("c")
        xs, cs = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise _parse_error(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
            try:
                xv, cv = float(row[ix]), float(row[ic])
            except ValueError:
                raise _parse_error(f"{path}:{lineno}: non-numeric value in {row}")
            if not (math.isfinite(xv) and math.isfinite(cv)):
                raise _parse_error(f"{path}:{lineno}: non-finite value in {row}")
            xs.append(xv)
            cs.append(cv)
    if len(xs) < 2:
        raise _parse_error(f"{path}: need at least 2 data rows, got {len(xs)}")
    return xs, cs


def _build_sample(xs, cs):
    try:
        return make_sample(xs, cs)
    except EmptyInput as exc:
        raise _parse_error(str(exc))
    except DegenerateDesign as exc:
        raise _data_error(str(exc))


def _score_from_flags(psi_kind, k):
    try:
        return ScoreFunction(psi_kind, k)
    except InvalidParams as exc:
        raise _parse_error(str(exc))


def _parse_grid(text, name):
    """Parse 'lo:hi:count' as an inclusive linear grid, else a comma list."""
    text = text.strip()
    try:
        if ":" in text:
            lo_s, hi_s, count_s = text.split(":")
            lo, hi, count = float(lo_s), float(hi_s), int(count_s)
            if count < 1:
                raise ValueError
            if count == 1:
                return [lo]
            step = (hi - lo) / (count - 1)
            return [lo + i * step for i in range(count)]
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise _parse_error(f"bad {name} grid {text!r}; use lo:hi:count or v1,v2,...")


def _fmt6(v):
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _fmt_full(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    return str(v)


def _emit_kv(pairs):
    for key, value in pairs:
        click.echo(f"{key}={_fmt_full(value)}")


def _write_csv(rows, fieldnames, out):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fieldnames)
    for row in rows:
        writer.writerow([_fmt_full(row[f]) for f in fieldnames])
    text = buf.getvalue()
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _default_sigma_gamma(sigma0, gamma):
    """Fill unset sigma0/gamma with the quadrature values for huber(1.28) + N(0,1)."""
    if sigma0 is None or gamma is None:
        s2, g = population_score_moments(ScoreFunction("huber"), ErrorDistribution())
        if sigma0 is None:
            sigma0 = math.sqrt(s2)
        if gamma is None:
            gamma = g
    return sigma0, gamma


@click.group()
@click.version_option(package_name="mpretest")
def main():
    """Robust score-type M-tests for the intercept of a simple regression."""


_psi_option = click.option(
    "--psi", "psi_kind", type=click.Choice(["huber", "identity"]), default="huber",
    show_default=True, help="Score function family.",
)
_k_option = click.option(
    "--k", type=float, default=1.28, show_default=True, help="Huber clip constant."
)


def _alpha_options(fn):
    for name in ("alpha3", "alpha2", "alpha1"):
        fn = click.option(
            f"--{name}", type=float, default=0.05, show_default=True,
            help=f"Nominal one-sided size {name}.",
        )(fn)
    return fn


@main.command("test")
@click.argument("data", type=click.Path())
@_psi_option
@_k_option
@_alpha_options
@click.option("--beta0", type=float, default=0.0, show_default=True,
              help="Suspected slope value; responses are shifted by -beta0*c before testing.")
def cmd_test(data, psi_kind, k, alpha1, alpha2, alpha3, beta0):
    """Run the two-stage intercept test on a data file."""
    xs, cs = _read_data_file(data)
    if beta0 != 0.0:
        xs = [x - beta0 * c for x, c in zip(xs, cs)]
    sample = _build_sample(xs, cs)
    score = _score_from_flags(psi_kind, k)
    try:
        config = TestConfig(score=score, alpha1=alpha1, alpha2=alpha2, alpha3=alpha3)
    except InvalidParams as exc:
        raise _parse_error(str(exc))
    try:
        outcome = run_ptt(config, sample)
    except (ZeroVariance, NoSignChange, DegenerateDesign) as exc:
        raise _data_error(str(exc))

    click.echo(f"{'test':<6}{'raw':>14}{'standardized':>14}{'critical':>12}{'reject':>9}")
    for name, raw, z, crit in (
        ("UT", outcome.t_ut, outcome.z_ut, outcome.crit_ut),
        ("RT", outcome.t_rt, outcome.z_rt, outcome.crit_rt),
        ("PT", outcome.t_pt, outcome.z_pt, outcome.crit_pt),
    ):
        click.echo(
            f"{name:<6}{_fmt6(raw):>14}{_fmt6(z):>14}{_fmt6(crit):>12}{str(z > crit):>9}"
        )
    click.echo(f"branch: {outcome.branch}    two-stage reject: {outcome.ptt_reject}")
    click.echo("")
    _emit_kv(
        [
            ("t_ut", outcome.t_ut),
            ("t_rt", outcome.t_rt),
            ("t_pt", outcome.t_pt),
            ("z_ut", outcome.z_ut),
            ("z_rt", outcome.z_rt),
            ("z_pt", outcome.z_pt),
            ("crit_ut", outcome.crit_ut),
            ("crit_rt", outcome.crit_rt),
            ("crit_pt", outcome.crit_pt),
            ("pt_rejected", outcome.pt_rejected),
            ("branch", outcome.branch),
            ("ptt_reject", outcome.ptt_reject),
        ]
    )


@main.command("estimate")
@click.argument("data", type=click.Path())
@_psi_option
@_k_option
def cmd_estimate(data, psi_kind, k):
    """Print the constrained estimates and variance estimators for a data file."""
    xs, cs = _read_data_file(data)
    sample = _build_sample(xs, cs)
    score = _score_from_flags(psi_kind, k)
    try:
        est = estimate_all(score, sample)
    except (ZeroVariance, NoSignChange, DegenerateDesign) as exc:
        raise _data_error(str(exc))
    rows = [
        ("theta_tilde", est.theta_tilde),
        ("beta_tilde", est.beta_tilde),
        ("s1_sq", est.s1_sq),
        ("s2_sq", est.s2_sq),
        ("s3_sq", est.s3_sq),
        ("gamma_hat_theta", est.gamma_hat_theta),
        ("gamma_hat_beta", est.gamma_hat_beta),
    ]
    for name, value in rows:
        click.echo(f"{name:<18}{_fmt6(value):>14}")
    click.echo("")
    _emit_kv(rows)


@main.command("power")
@click.option("--lambda1-grid", default="0", show_default=True,
              help="Grid for the local intercept (lo:hi:count or comma list).")
@click.option("--lambda2-grid", default="0:10:41", show_default=True,
              help="Grid for the local slope.")
@click.option("--cbar", type=float, default=0.5, show_default=True,
              help="Limiting regressor mean.")
@click.option("--cstar", type=float, default=0.5, show_default=True,
              help="Limiting centered root-mean-square of the regressor.")
@click.option("--sigma0", type=float, default=None,
              help="Score standard deviation [default: quadrature for huber(1.28)+N(0,1)].")
@click.option("--gamma", type=float, default=None,
              help="Score average slope [default: quadrature for huber(1.28)+N(0,1)].")
@_alpha_options
@click.option("--out", type=click.Path(), default=None, help="CSV destination [default: stdout].")
@click.option("--figure", type=click.Path(), default=None,
              help="Also render the curves to this image file.")
def cmd_power(lambda1_grid, lambda2_grid, cbar, cstar, sigma0, gamma,
              alpha1, alpha2, alpha3, out, figure):
    """Tabulate the three asymptotic power functions over a lambda grid."""
    grid1 = _parse_grid(lambda1_grid, "lambda1")
    grid2 = _parse_grid(lambda2_grid, "lambda2")
    sigma0, gamma = _default_sigma_gamma(sigma0, gamma)
    rows = []
    for lam1 in grid1:
        for lam2 in grid2:
            try:
                params = PowerParams(
                    lambda1=lam1, lambda2=lam2, cbar=cbar, cstar=cstar,
                    sigma0=sigma0, gamma=gamma,
                    alpha1=alpha1, alpha2=alpha2, alpha3=alpha3,
                )
            except InvalidParams as exc:
                raise _parse_error(str(exc))
            rows.append(
                {
                    "lambda1": lam1,
                    "lambda2": lam2,
                    "pi_ut": power_ut(params),
                    "pi_rt": power_rt(params),
                    "pi_ptt": power_ptt(params),
                }
            )
    _write_csv(rows, ["lambda1", "lambda2", "pi_ut", "pi_rt", "pi_ptt"], out)
    if figure is not None:
        from .figures import render_power_curves

        render_power_curves(rows, figure)


@main.command("size-table")
@click.option("--lambda2-list", default="0,0.1,0.2,0.4,0.6,0.8,1,2,4,6,8,10",
              show_default=True, help="Slope alternatives to tabulate.")
@click.option("--alpha2-list", default="0.05", show_default=True,
              help="Nominal restricted-test sizes to tabulate.")
@click.option("--alpha3-grid", default="0.001:0.999:500", show_default=True,
              help="Pre-test nominal sizes to scan.")
@click.option("--alpha1", type=float, default=0.05, show_default=True,
              help="Nominal unrestricted-test size.")
@click.option("--target", type=float, default=0.05, show_default=True,
              help="Two-stage size a row is marked for achieving.")
@click.option("--target-tol", type=float, default=5e-4, show_default=True,
              help="How close alpha_ptt must come to the target to be marked.")
@click.option("--cbar", type=float, default=0.5, show_default=True)
@click.option("--cstar", type=float, default=0.5, show_default=True)
@click.option("--sigma0", type=float, default=None,
              help="Score standard deviation [default: quadrature for huber(1.28)+N(0,1)].")
@click.option("--gamma", type=float, default=None,
              help="Score average slope [default: quadrature for huber(1.28)+N(0,1)].")
@click.option("--out", type=click.Path(), default=None, help="CSV destination [default: stdout].")
@click.option("--figure", type=click.Path(), default=None,
              help="Also render the size curves to this image file.")
def cmd_size_table(lambda2_list, alpha2_list, alpha3_grid, alpha1, target, target_tol,
                   cbar, cstar, sigma0, gamma, out, figure):
    """Tabulate the two-stage test's size as the pre-test nominal size varies.

    For each (lambda2, alpha2) pair the alpha3 grid is scanned; the row
    minimizing the two-stage size is marked, as is the row coming within
    --target-tol of the target size (if any).
    """
    lam2s = _parse_grid(lambda2_list, "lambda2")
    a2s = _parse_grid(alpha2_list, "alpha2")
    a3s = _parse_grid(alpha3_grid, "alpha3")
    sigma0, gamma = _default_sigma_gamma(sigma0, gamma)
    rows = []
    for lam2 in lam2s:
        for a2 in a2s:
            sizes = []
            for a3 in a3s:
                try:
                    params = PowerParams(
                        lambda1=0.0, lambda2=lam2, cbar=cbar, cstar=cstar,
                        sigma0=sigma0, gamma=gamma,
                        alpha1=alpha1, alpha2=a2, alpha3=a3,
                    )
                except InvalidParams as exc:
                    raise _parse_error(str(exc))
                sizes.append(power_ptt(params))
            i_min = min(range(len(a3s)), key=lambda i: sizes[i])
            i_target = min(range(len(a3s)), key=lambda i: abs(sizes[i] - target))
            target_hit = abs(sizes[i_target] - target) <= target_tol
            for i, (a3, size) in enumerate(zip(a3s, sizes)):
                rows.append(
                    {
                        "lambda2": lam2,
                        "alpha2": a2,
                        "alpha3": a3,
                        "alpha_ptt": size,
                        "is_minimum": i == i_min,
                        "achieves_target": target_hit and i == i_target,
                    }
                )
    _write_csv(
        rows,
        ["lambda2", "alpha2", "alpha3", "alpha_ptt", "is_minimum", "achieves_target"],
        out,
    )
    if figure is not None:
        from .figures import render_size_curves

        render_size_curves(rows, figure)


@main.command("simulate")
@click.option("--n", type=int, default=1000, show_default=True, help="Sample size.")
@click.option("--reps", type=int, default=1000, show_default=True, help="Replications.")
@click.option("--seed", type=int, default=0, show_default=True, help="Stream seed.")
@click.option("--theta", type=float, default=0.0, show_default=True, help="True intercept.")
@click.option("--beta", type=float, default=0.0, show_default=True, help="True slope.")
@click.option("--dist", type=click.Choice(["standard_normal", "laplace", "student_t",
                                           "contaminated_normal"]),
              default="standard_normal", show_default=True, help="Error distribution.")
@click.option("--dist-scale", type=float, default=1.0, show_default=True,
              help="Laplace scale / contamination spread.")
@click.option("--dist-df", type=float, default=3.0, show_default=True,
              help="Student-t degrees of freedom.")
@click.option("--dist-eps", type=float, default=0.1, show_default=True,
              help="Contamination fraction.")
@click.option("--design", type=click.Choice(["zeros_ones", "neg1_zeros", "neg1_pos1"]),
              default="zeros_ones", show_default=True, help="Regressor design.")
@_psi_option
@_k_option
@_alpha_options
@click.option("--out", type=click.Path(), default=None, help="CSV destination [default: stdout].")
def cmd_simulate(n, reps, seed, theta, beta, dist, dist_scale, dist_df, dist_eps,
                 design, psi_kind, k, alpha1, alpha2, alpha3, out):
    """Run the Monte Carlo engine and emit one CSV row of aggregates."""
    score = _score_from_flags(psi_kind, k)
    try:
        config = SimConfig(
            n=n,
            reps=reps,
            seed=seed,
            theta=theta,
            beta=beta,
            error_dist=ErrorDistribution(kind=dist, scale=dist_scale, df=dist_df, eps=dist_eps),
            regressor=Regressor(kind=design),
            test_config=TestConfig(score=score, alpha1=alpha1, alpha2=alpha2, alpha3=alpha3),
        )
    except InvalidParams as exc:
        raise _parse_error(str(exc))
    try:
        result = simulate(config)
    except MpretestError as exc:
        raise _data_error(str(exc))
    if result.n_failed:
        click.echo(f"warning: {result.n_failed} replications failed and were excluded",
                   err=True)
    row = {
        "n": n,
        "reps": reps,
        "seed": seed,
        "theta": theta,
        "beta": beta,
        "dist": dist,
        "design": design,
        "psi": psi_kind,
        "k": k,
        "alpha1": alpha1,
        "alpha2": alpha2,
        "alpha3": alpha3,
        "reject_rate_ut": result.reject_rate_ut,
        "reject_rate_rt": result.reject_rate_rt,
        "reject_rate_ptt": result.reject_rate_ptt,
        "pt_reject_rate": result.pt_reject_rate,
        "stderr_ut": result.stderr_ut,
        "stderr_rt": result.stderr_rt,
        "stderr_ptt": result.stderr_ptt,
        "stderr_pt": result.stderr_pt,
        "corr_rt_pt": result.corr_rt_pt,
        "corr_ut_pt": result.corr_ut_pt,
        "mean_z_ut": result.mean_z_ut,
        "sd_z_ut": result.sd_z_ut,
        "mean_z_rt": result.mean_z_rt,
        "sd_z_rt": result.sd_z_rt,
        "mean_z_pt": result.mean_z_pt,
        "sd_z_pt": result.sd_z_pt,
        "n_reps": result.n_reps,
        "n_failed": result.n_failed,
    }
    _write_csv([row], list(row.keys()), out)


if __name__ == "__main__":
    main()
