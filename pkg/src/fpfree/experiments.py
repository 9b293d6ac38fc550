"""Experiment runners: each turns a resolved config into a :class:`Report`.

Every random draw comes from one ``numpy`` generator seeded by the config and
loops run in index order, so the measurement tables are a pure function of
the config.  ``bound_scale`` multiplies the right-hand side of every
inequality verdict; values below 1 inject a deliberately wrong constant.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from . import flat_construction as fc
from . import medina as md
from .bodies import heights, preset
from .config import ConfigError, ExperimentConfig, Target
from .core_seq import Coeffs, SpaceSpec, fundamental_function, lp_norm
from .cube_affine import AlphaSchedule, affine_power_array, uniform_ar_bound
from .lin_map import MonotoneCapK, _g_array, displacement_hit, orbit, retract_monotone
from .report import Report, Verdict
from .sampling import ball_point, cap_point, close_pair, cube_point, log_uniform, simplex_point
from .transfer import build_holder_free_map, holder_search, iterate_search

EXACT_TOL = 1e-12


def le(check: str, measured, bound, tol: float = 0.0, note: str = "") -> Verdict:
    return Verdict(check, measured, bound, bool(measured <= bound + tol), note)


def parse_schedule(text: str) -> fc.RSchedule:
    kind, _, val = text.partition(":")
    try:
        v = float(val)
        if kind == "exp":
            return fc.RSchedule.exponential(v)
        if kind == "holder":
            return fc.RSchedule.holder(v)
    except ValueError as exc:
        raise ConfigError(f"bad schedule {text!r}: {exc}") from None
    raise ConfigError(f"schedule must read 'exp:<b>' or 'holder:<alpha>', got {text!r}")


def _worst(ratios) -> float:
    return max(ratios) if ratios else 0.0


# ar-decay ------------------------------------------------------------------

def ar_decay_lin(cfg: ExperimentConfig, t: Target, rng) -> Report:
    p, scale = t.params["p"], t.params["bound_scale"]
    K = MonotoneCapK(SpaceSpec.lp(p))
    rows, ratios, by_n = [], [], {}
    for s in range(cfg.samples):
        x = cap_point(rng, t.params["support"], p)
        rec = orbit(Coeffs(x), K, cfg.horizon + 2)
        for n, gap, inv_phi, tail, bound in rec.ar_rows():
            ok = gap <= scale * bound + EXACT_TOL
            rows.append((s, n, gap, inv_phi, tail, bound, ok))
            ratios.append(gap / bound)
            by_n.setdefault(n, []).append(gap)
    ns = sorted(by_n)
    last = max(by_n[ns[-1]])
    verdicts = [le("gap_n <= 1/Phi(n) + tail (worst ratio)", _worst(ratios), scale, EXACT_TOL,
                   f"{len(rows)} rows"),
                le(f"max gap at n={ns[-1]} <= 1/Phi(n) + max tail", last,
                   scale * (1 / fundamental_function(ns[-1], K.space)
                            + max(r[4] for r in rows if r[1] == ns[-1])), EXACT_TOL)]
    plot = {"series": {"max gap": (ns, [max(by_n[n]) for n in ns]),
                       "1/Phi(n)": (ns, [1 / fundamental_function(n, K.space) for n in ns])},
            "title": f"asymptotic regularity, {t.name}", "xlabel": "n", "ylabel": "gap"}
    return Report(["seed", "n", "gap", "inv_phi", "tail", "bound", "passed"], rows, verdicts, plot)


def ar_decay_affine(cfg: ExperimentConfig, t: Target, rng) -> Report:
    q, N, scale = t.params["q"], t.params["support"], t.params["bound_scale"]
    a = AlphaSchedule(ratio=q)
    al = a.alphas(N)
    bounds = [uniform_ar_bound(a, m) for m in range(1, cfg.horizon + 1)]
    rows, ratios, worst_by_m = [], [], [0.0] * cfg.horizon
    for s in range(cfg.samples):
        x = cube_point(rng, N)
        prev = affine_power_array(x, al, 1)
        for m in range(1, cfg.horizon + 1):
            nxt = affine_power_array(x, al, m + 1)
            # coordinates past N start at 0, where the gap is alpha^m (1 - alpha) <= bound / 2
            gap = float(np.max(np.abs(nxt - prev)))
            b = bounds[m - 1]
            rows.append((s, m, gap, b, gap <= scale * b + EXACT_TOL))
            ratios.append(gap / b)
            worst_by_m[m - 1] = max(worst_by_m[m - 1], gap)
            prev = nxt
    ms = list(range(1, cfg.horizon + 1))
    verdicts = [le("sup-norm gap <= 2 sup alpha_n^m (1 - alpha_n) (worst ratio)", _worst(ratios), scale,
                   EXACT_TOL)]
    plot = {"series": {"max gap": (ms, worst_by_m), "bound": (ms, bounds)},
            "title": f"cube affine map, {t.name}", "xlabel": "m", "ylabel": "gap"}
    return Report(["seed", "m", "gap", "bound", "passed"], rows, verdicts, plot)


# lipschitz-estimate --------------------------------------------------------

def _cap_pair(rng, N: int, p: float):
    x = cap_point(rng, N, p)
    if rng.random() < 0.5 or x.size == 0:
        return x, cap_point(rng, N, p)
    y = np.minimum.accumulate(np.abs(close_pair(rng, x, log_uniform(rng, 1e-8, 1e-1))))
    ny = lp_norm(y, p)
    return x, (y / ny if ny > 1 else y)


def _pad(a, b):
    n = max(a.size, b.size)
    return np.pad(a, (0, n - a.size)), np.pad(b, (0, n - b.size))


def lipschitz_lin(cfg: ExperimentConfig, t: Target, rng) -> Report:
    p, scale = t.params["p"], t.params["bound_scale"]
    rows, g_r, f_r = [], [], []
    for s in range(cfg.samples):
        x, y = _cap_pair(rng, t.params["support"], p)
        dx = lp_norm(np.subtract(*_pad(x, y)), p)
        if dx == 0:
            continue
        gx, gy = _g_array(x, p), _g_array(y, p)
        gd = lp_norm(np.subtract(*_pad(gx, gy)), p)
        fd = lp_norm(np.subtract(*_pad(gx / lp_norm(gx, p), gy / lp_norm(gy, p))), p)
        rows.append((s, dx, gd / dx, fd / dx))
        g_r.append(gd / dx)
        f_r.append(fd / dx)
    verdicts = [le("g Lipschitz ratio <= D + 2 = 3", _worst(g_r), 3 * scale, 1e-9),
                le("F Lipschitz ratio <= 8", _worst(f_r), 8 * scale, 1e-9, "acceptance constant"),
                le("F Lipschitz ratio <= 4(D + 2) = 12", _worst(f_r), 12 * scale, 1e-9,
                   "constant from the quotient estimate with ||g|| >= 1/2")]
    return Report(["pair", "dist", "g_ratio", "f_ratio"], rows, verdicts)


def _extremal_runmin_pair(p: float):
    """``(1, 1)`` vs ``(0, 1)``: running min maps them to ``(1, 1)`` and ``0``, ratio ``2^{1/p}``."""
    c = 2.0 ** (-1 / p)
    return np.array([c, c]), np.array([0.0, c])


def lipschitz_runmin(cfg: ExperimentConfig, t: Target, rng) -> Report:
    p, N, scale = t.params["p"], t.params["support"], t.params["bound_scale"]
    rows, ratios = [], []
    for s in range(cfg.samples):
        if s == 0:
            x, y = _extremal_runmin_pair(p)
        else:
            x = ball_point(rng, N, p)
            y = ball_point(rng, N, p) if rng.random() < 0.5 else close_pair(rng, x, log_uniform(rng, 1e-8, 1))
        dx = lp_norm(x - y, p)
        if dx == 0:
            continue
        q = lp_norm(np.subtract(*_pad(retract_monotone(Coeffs(x)).dense(N),
                                      retract_monotone(Coeffs(y)).dense(N))), p) / dx
        rows.append((s, dx, q))
        ratios.append(q)
    # each output coordinate moves by at most ||x - y||_inf, so N^{1/p} is the sharp constant on R^N;
    # the flat block c(1, ..., 1) minus a nudge of its first entry attains it
    return Report(["pair", "dist", "ratio"], rows,
                  [le("running-min Lipschitz ratio <= 2", _worst(ratios), 2 * scale, 1e-9),
                   le(f"running-min Lipschitz ratio <= N^(1/p), N={N}", _worst(ratios),
                      scale * N ** (1 / p), 1e-9, "dimensional constant")])


def lipschitz_affine(cfg: ExperimentConfig, t: Target, rng) -> Report:
    N, scale = t.params["support"], t.params["bound_scale"]
    al = AlphaSchedule(ratio=t.params["q"]).alphas(N)
    rows, ratios = [], []
    for s in range(cfg.samples):
        x, y = cube_point(rng, N), cube_point(rng, N)
        m = int(rng.integers(1, cfg.horizon + 1))
        dx = float(np.max(np.abs(x - y)))
        if dx == 0:
            continue
        q = float(np.max(np.abs(affine_power_array(x, al, m) - affine_power_array(y, al, m)))) / dx
        rows.append((s, m, dx, q))
        ratios.append(q)
    return Report(["pair", "m", "dist", "ratio"], rows,
                  [le("F^m is sup-norm nonexpansive", _worst(ratios), scale, EXACT_TOL)])


def lipschitz_qretract(cfg: ExperimentConfig, t: Target, rng) -> Report:
    N, scale = t.params["support"], t.params["bound_scale"]
    rows, ratios = [], []
    for s in range(cfg.samples):
        x, y = 2 * rng.standard_normal(N), 2 * rng.standard_normal(N)
        dx = float(np.max(np.abs(x - y)))
        q = float(np.max(np.abs(np.minimum(1, np.abs(x)) - np.minimum(1, np.abs(y))))) / dx
        rows.append((s, dx, q))
        ratios.append(q)
    return Report(["pair", "dist", "ratio"], rows,
                  [le("cube retraction is sup-norm nonexpansive", _worst(ratios), scale, EXACT_TOL)])


def lipschitz_shift(cfg: ExperimentConfig, t: Target, rng) -> Report:
    N = t.params["support"]
    rows, devs = [], []
    for s in range(cfg.samples):
        x, y = simplex_point(rng, N), simplex_point(rng, N)
        dx = float(np.sum(np.abs(x - y)))
        sx, sy = np.concatenate([[0.0], x]), np.concatenate([[0.0], y])
        q = float(np.sum(np.abs(sx - sy))) / dx
        rows.append((s, dx, q))
        devs.append(abs(q - 1))
    return Report(["pair", "dist", "ratio"], rows,
                  [le("shift is an l1 isometry: |ratio - 1|", _worst(devs), EXACT_TOL)])


# holder-modulus --------------------------------------------------------------

def holder_ball(cfg: ExperimentConfig, t: Target, rng, source: str) -> Report:
    alpha, lam, scale = t.params["alpha"], t.params["lam"], t.params["bound_scale"]
    T = build_holder_free_map(alpha, lam, source)
    restarts = t.params["restarts"] if t.params["restarts"] >= 0 else cfg.samples // 100
    rec = []
    res = holder_search(T, alpha, scale * lam, t.params["dim"], cfg.samples, restarts, cfg.seed,
                        record=rec)
    rows = [(k, phase, d, q, q <= 1 + EXACT_TOL) for k, (phase, d, q) in enumerate(rec)]
    verdicts = [le(f"||Tx - Ty|| / (lam ||x - y||^{alpha:g}) (worst ratio)", res.worst_ratio, 1.0,
                   EXACT_TOL, f"r={T.notes['r']:g}, L={T.notes['L']:g}"),
                le("violations", res.violations, 0)]
    return Report(["pair", "phase", "dist", "ratio", "passed"], rows, verdicts)


def _flat(t: Target):
    alpha = t.params["alpha"]
    if t.family == "thmM4":
        return build_holder_free_map(alpha, 1.0, "ThmM4", t.params["d"])
    return build_holder_free_map(alpha, t.params["lam"], "Pipeline", t.params["d"])


def holder_flat(cfg: ExperimentConfig, t: Target, rng) -> Report:
    H = _flat(t)
    scale = t.params["bound_scale"]
    rec = []
    res = iterate_search(H, cfg.horizon, cfg.samples, cfg.seed, record=rec)
    rows = [(k, d, q, q <= scale) for k, (_, d, q) in enumerate(rec)]
    verdicts = [le(f"||T^n x - T^n y|| / (r_n (||x - y||^{t.params['alpha']:g} + 1)), n <= {cfg.horizon}",
                   res.worst_ratio, scale, 0.0, H.notes["weights"])]
    return Report(["pair", "dist", "worst_ratio", "passed"], rows, verdicts)


def _medina_setup(t: Target):
    body = preset(t.variant, parse_schedule(t.params["schedule"]))
    return body, md.NetHierarchy(body)


def holder_medina(cfg: ExperimentConfig, t: Target, rng) -> Report:
    body, H = _medina_setup(t)
    P, scale = t.params, t.params["bound_scale"]
    ts = np.geomspace(P["t_min"], P["t_max"], P["t_points"])
    holder = body.r.kind == "holder"
    rows, ratios, hratios, ests = [], [], [], []
    for k, tt in enumerate(ts):
        res = md.modulus_estimate(body, H, float(tt), cfg.samples, cfg.seed + k,
                                  dmin=P["dmin"], dmax=P["dmax"])
        b = md.modulus_bound(float(tt), body.r)
        hb = md.holder_bound(float(tt), body.r.alpha) if holder else math.nan
        rows.append((k, float(tt), res.estimate, b, hb, res.pairs))
        ratios.append(res.estimate / b)
        ests.append(res.estimate)
        if holder:
            hratios.append(res.estimate / hb)
    verdicts = [le("omega_R(t) / (1520 20^{n(t/20)} t) (worst)", _worst(ratios), scale)]
    if holder:
        verdicts.append(le("omega_R(t) / (1520 20^{2-alpha} t^alpha) (worst)", _worst(hratios), scale))
    series = {"empirical omega": (ts, ests),
              "1520 20^{n(t/20)} t": (ts, [r[3] for r in rows])}
    plot = {"series": series, "title": f"retraction modulus, {t.name} [{body.r.label}]",
            "xlabel": "t", "ylabel": "modulus"}
    return Report(["k", "t", "omega", "bound", "holder_bound", "pairs"], rows, verdicts, plot)


# flatness ------------------------------------------------------------------

def _random_wpoint(rng, support: int, mu: Fraction) -> fc.WPoint:
    k = int(rng.integers(1, support + 1))
    raw = [int(v) for v in rng.integers(0, 1000, k + 1)]
    if rng.random() < 0.5:
        raw[0] = 0
    total = sum(raw) or 1
    fill = Fraction(int(rng.integers(1, 1001)), 1000)
    return fc.WPoint(tuple(Fraction(v, total) * fill * mu for v in raw), mu)


def flatness_flat(cfg: ExperimentConfig, t: Target, rng) -> Report:
    H = _flat(t)
    K, r, scale = H.K, H.r, t.params["bound_scale"]
    support = cfg.horizon + 3
    pts = [_random_wpoint(rng, support, K.mu) for _ in range(cfg.samples)]
    # the unit vectors mu w_{n+2} nearly realize the height
    pts += [fc.WPoint.unit(k, K.mu) for k in range(1, support + 1)]
    rows, r1, r2 = [], [], []
    for n in range(1, cfg.horizon + 1):
        h = fc.height_upper_bound(K, n, pts)
        tail = fc.height_closed_form(K, n)
        rn1 = r.r(n + 1)
        rows.append((n, h, tail, rn1, bool(h <= scale * tail and tail <= scale * rn1)))
        r1.append(h / tail)
        r2.append(tail / rn1)
    cert = fc.check_weights(K.weights, r, strong=True)
    verdicts = [le("measured height / 3 mu sum_{k>=n+2} alpha_k (worst)", float(max(r1)), scale),
                le("3 mu sum_{k>=n+2} alpha_k / r_{n+1} (worst)", float(max(r2)), scale),
                Verdict("weight certificate recomputed", cert["worst_tail_ratio"], 1.0, cert["ok"],
                        f"c={cert['c']}, q={cert['q']}, scanned to {cert['scanned_to']}")]
    ns = [row[0] for row in rows]
    plot = {"series": {"height": (ns, [row[1] for row in rows]),
                       "3 mu tail": (ns, [row[2] for row in rows]),
                       "r_{n+1}": (ns, [row[3] for row in rows])},
            "title": f"flatness, {t.name}", "xlabel": "n", "ylabel": "height"}
    return Report(["n", "height", "tail_bound", "r_next", "passed"], rows, verdicts, plot)


def flatness_medina(cfg: ExperimentConfig, t: Target, rng) -> Report:
    body, _ = _medina_setup(t)
    scale = t.params["bound_scale"]
    rows = [(m, h, body.r.r_float(m), h <= scale * body.r.r_float(m))
            for m, h in enumerate(heights(body), start=1)]
    worst = max(row[1] / row[2] for row in rows)
    return Report(["m", "height", "r_m", "passed"], rows,
                  [le("h_m / r_m (worst)", worst, scale, 0.0, body.r.label)])


# displacement ----------------------------------------------------------------

def displacement_lin(cfg: ExperimentConfig, t: Target, rng) -> Report:
    p, eps = t.params["p"], t.params["eps"]
    K = MonotoneCapK(SpaceSpec.lp(p))
    rows, finals = [], []
    for s in range(cfg.samples):
        x = ball_point(rng, t.params["support"], p) if s % 2 else cap_point(rng, t.params["support"], p)
        k, d = displacement_hit(Coeffs(x), K, eps, cfg.horizon)
        rows.append((s, -1 if k is None else k, d, k is not None))
        finals.append(d)
    return Report(["seed", "hit_step", "displacement", "hit"], rows,
                  [le(f"min displacement of F o runmin within {cfg.horizon} steps", _worst(finals),
                      eps * t.params["bound_scale"], 0.0, "worst over seeds")])


def displacement_affine(cfg: ExperimentConfig, t: Target, rng) -> Report:
    N, scale = t.params["support"], t.params["bound_scale"]
    a = AlphaSchedule(ratio=t.params["q"])
    al = a.alphas(N)
    rows, ratios = [], []
    for s in range(cfg.samples):
        x = cube_point(rng, N)
        d = float(np.max(np.abs(affine_power_array(x, al, cfg.horizon + 1)
                                - affine_power_array(x, al, cfg.horizon))))
        b = uniform_ar_bound(a, cfg.horizon)
        rows.append((s, cfg.horizon, d, b))
        ratios.append(d / b)
    return Report(["seed", "m", "displacement", "bound"], rows,
                  [le("||F(F^m x) - F^m x|| / uniform bound (worst)", _worst(ratios), scale, EXACT_TOL)])


def displacement_shift(cfg: ExperimentConfig, t: Target, rng) -> Report:
    """Every point moves, yet the flat blocks ``(1/k, ..., 1/k)`` move by only ``2/k``."""
    N = t.params["support"]
    rows, disps = [], []
    for s in range(cfg.samples):
        if s % 2:
            x = simplex_point(rng, N)
        else:
            k = int(rng.integers(1, cfg.horizon + 1))
            x = np.full(k, 1.0 / k)
        d = float(np.sum(np.abs(np.concatenate([[0.0], x]) - np.concatenate([x, [0.0]]))))
        rows.append((s, x.size, d))
        disps.append(d)
    k = cfg.horizon
    return Report(["seed", "support", "displacement"], rows,
                  [Verdict("no fixed point: min sampled displacement > 0", min(disps), 0.0, min(disps) > 0),
                   Verdict(f"flat block witness 2/k at k={k} (infimum is 0)", 2.0 / k, 2.0 / k, True,
                           "informational")])


def displacement_flat(cfg: ExperimentConfig, t: Target, rng) -> Report:
    H = _flat(t)
    rows, errs = [], []
    for m, d, closed in H.witness(cfg.horizon):
        err = abs(d - closed) / closed
        rows.append((m, d, closed, err))
        errs.append(err)
    plot = {"series": {"displacement": ([r[0] for r in rows], [r[1] for r in rows])},
            "title": f"witness orbit, {t.name}", "xlabel": "m", "ylabel": "displacement"}
    return Report(["m", "displacement", "closed_form", "rel_error"], rows,
                  [le("witness displacement vs mu alpha_{m+2} (relative)", float(max(errs)), EXACT_TOL)],
                  plot)


# retraction-check ----------------------------------------------------------------

def retraction_runmin(cfg: ExperimentConfig, t: Target, rng) -> Report:
    p, N = t.params["p"], t.params["support"]
    K = MonotoneCapK(SpaceSpec.lp(p))
    rows, bad = [], 0
    for s in range(cfg.samples):
        x = ball_point(rng, N, p)
        rx = retract_monotone(Coeffs(x))
        idem = bool(np.array_equal(retract_monotone(rx).dense(N), rx.dense(N)))
        member = K.contains(rx)
        k = cap_point(rng, N, p)
        fixes = bool(np.array_equal(retract_monotone(Coeffs(k)).dense(N), Coeffs(k).dense(N)))
        rows.append((s, idem, member, fixes))
        bad += (not idem) + (not member) + (not fixes)
    return Report(["sample", "idempotent", "in_cap", "fixes_cap_point"], rows,
                  [le("idempotence, membership and identity-on-K failures", bad, 0)])


def retraction_qretract(cfg: ExperimentConfig, t: Target, rng) -> Report:
    N = t.params["support"]
    rows, bad = [], 0
    for s in range(cfg.samples):
        x = 2 * rng.standard_normal(N)
        rx = np.minimum(1, np.abs(x))
        c = cube_point(rng, N)
        idem = bool(np.array_equal(np.minimum(1, np.abs(rx)), rx))
        fixes = bool(np.array_equal(np.minimum(1, np.abs(c)), c))
        member = bool(np.all((rx >= 0) & (rx <= 1)))
        rows.append((s, idem, member, fixes))
        bad += (not idem) + (not member) + (not fixes)
    return Report(["sample", "idempotent", "in_cube", "fixes_cube_point"], rows,
                  [le("idempotence, membership and identity-on-K failures", bad, 0)])


def retraction_medina(cfg: ExperimentConfig, t: Target, rng) -> Report:
    body, H = _medina_setup(t)
    P, scale = t.params, t.params["bound_scale"]
    xs = md.sample_exterior(body, cfg.samples, rng, P["dmin"], P["dmax"])
    rows, disp_r, wsum, cell_r, member = [], [], [], [], []
    for i, x in enumerate(xs):
        d = float(body.distance(x))
        cws = md.cell_weights(x, body, H)
        y = sum(cw.weight * H.level(cw.n).points[cw.i] for cw in cws)
        disp = float(np.linalg.norm(y - x))
        err = abs(math.fsum(cw.weight for cw in cws) - 1.0)
        cap = 5 * 20 ** md.level_index(d / 10, body.r)
        dy = float(body.distance(y))
        rows.append((i, d, disp, 9 * d, err, len(cws), cap, dy))
        disp_r.append(disp / (9 * d))
        wsum.append(err)
        cell_r.append(len(cws) / cap)
        member.append(dy)
    verdicts = [le("||R(x) - x|| / 9 d(x, K) (worst)", _worst(disp_r), scale),
                le("|sum of weights - 1| (worst)", _worst(wsum), 1e-9),
                le("active cells / 5 20^{n(d/10)} (worst)", _worst(cell_r), scale),
                le("d(R(x), K) (worst)", _worst(member), 1e-9)]
    return Report(["sample", "dist", "displacement", "nine_d", "weight_sum_error", "cells", "cell_bound",
                   "image_dist"], rows, verdicts)


RUNNERS = {
    ("ar-decay", "lin"): ar_decay_lin,
    ("ar-decay", "affine"): ar_decay_affine,
    ("lipschitz-estimate", "lin"): lipschitz_lin,
    ("lipschitz-estimate", "runmin"): lipschitz_runmin,
    ("lipschitz-estimate", "affine"): lipschitz_affine,
    ("lipschitz-estimate", "qretract"): lipschitz_qretract,
    ("lipschitz-estimate", "shift"): lipschitz_shift,
    ("holder-modulus", "hilbert"): lambda c, t, r: holder_ball(c, t, r, "Hilbert"),
    ("holder-modulus", "linball"): lambda c, t, r: holder_ball(c, t, r, "LinBall"),
    ("holder-modulus", "thmM4"): holder_flat,
    ("holder-modulus", "pipeline"): holder_flat,
    ("holder-modulus", "medina"): holder_medina,
    ("flatness", "thmM4"): flatness_flat,
    ("flatness", "pipeline"): flatness_flat,
    ("flatness", "medina"): flatness_medina,
    ("displacement", "lin"): displacement_lin,
    ("displacement", "affine"): displacement_affine,
    ("displacement", "shift"): displacement_shift,
    ("displacement", "thmM4"): displacement_flat,
    ("displacement", "pipeline"): displacement_flat,
    ("retraction-check", "runmin"): retraction_runmin,
    ("retraction-check", "qretract"): retraction_qretract,
    ("retraction-check", "medina"): retraction_medina,
}


def run_experiment(cfg: ExperimentConfig) -> Report:
    """Raises :class:`ConfigError` for unsupported pairs and ``SolverError`` from weight solving."""
    t = cfg.resolved()
    runner = RUNNERS.get((cfg.experiment, t.family))
    if runner is None:
        raise ConfigError(f"no runner for {cfg.experiment} on {t.family}")
    rng = np.random.default_rng(cfg.seed)
    report = runner(cfg, t, rng)
    report.extra.update({"target": t.name, "params": t.params})
    return report
