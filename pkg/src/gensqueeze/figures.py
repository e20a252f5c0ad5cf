"""Parameter sweeps behind the squeezing and photon-statistics figures."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import poisson

from .errors import GenSqueezeError
from .moments import direct_fock_variances, photon_statistics
from .su11 import Su11Params, build_state, ladder_to_fock, squeezed_cat_params

FIG2A = dict(z=-0.5 - 5j, u=math.sqrt(1.25), v=-0.5)
FIG2B = dict(z=1.0, u=math.sqrt(10.0), v=-3.0)
FIG1B_SQUEEZE = 0.31


@dataclass
class Sweep:
    """Rows of one figure plus a summary of derived quantities."""

    columns: list
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(x) for x in r])
        return buf.getvalue()


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def _grid(start, stop, step):
    n = int(round((stop - start) / step))
    return [round(start + i * step, 12) for i in range(n + 1)]


def crossings(xs, ys, level) -> list:
    """Linear-interpolated points where ys - level changes sign."""
    out = []
    for (x0, y0), (x1, y1) in zip(zip(xs, ys), zip(xs[1:], ys[1:])):
        if not (np.isfinite(y0) and np.isfinite(y1)):
            continue
        a, b = y0 - level, y1 - level
        if a == 0:
            out.append(x0)
        elif a * b < 0:
            out.append(x0 + (x1 - x0) * a / (a - b))
    return out


def even_fock_state(params: Su11Params, fock_cutoff: int | None):
    ladder_cut = None if fock_cutoff is None else max(1, fock_cutoff // 2)
    return ladder_to_fock(build_state(params, ladder_cut), "even")


def fig1a(step: float = 0.05, cutoff: int | None = 512, stop: float = 6.0) -> Sweep:
    """Delta^2 p and Delta^2 K~2 for |1, sqrt(1+x^2), -x, 0; +> over x in [0, stop]."""
    sw = Sweep(["x", "var_p", "var_Ktilde2", "ref_p", "ref_K"])
    errors = []
    for x in _grid(0.0, stop, step):
        try:
            st = even_fock_state(Su11Params(1, math.sqrt(1 + x * x), -x, 0, 0.25), cutoff)
            v = direct_fock_variances(st)
            vp, vk = v["var_p"], v["var_Kt2"]
        except GenSqueezeError as e:
            vp = vk = float("nan")
            errors.append({"x": x, "error": str(e)})
        sw.rows.append([x, vp, vk, 0.5, 1.0])
    xs = [r[0] for r in sw.rows]
    ck = crossings(xs, [r[2] for r in sw.rows], 1.0)
    cp = crossings(xs, [r[1] for r in sw.rows], 0.5)
    sw.summary = {
        "Ktilde2_crossing": ck[0] if ck else None,
        "p_crossing": cp[0] if cp else None,
        "joint_interval": [ck[0], cp[0]] if ck and cp and ck[0] < cp[0] else None,
        "row_errors": errors,
    }
    return sw


def squeezed_cat_fock(d: float, squeeze: float = FIG1B_SQUEEZE, cutoff: int | None = None):
    """Even squeezed cat with z = -d as a Fock state (recurrence construction)."""
    return even_fock_state(squeezed_cat_params(-d, squeeze), cutoff)


def fig1b(step: float = 0.01, cutoff: int | None = 512, stop: float = 1.0) -> Sweep:
    """2 Delta^2 q and Delta^2 K~1 for the even squeezed cat, z = -d, squeeze 0.31."""
    sw = Sweep(["d", "two_var_q", "var_Ktilde1"])
    errors = []
    for d in _grid(0.0, stop, step):
        try:
            v = direct_fock_variances(squeezed_cat_fock(d, cutoff=cutoff))
            q2, k1 = 2 * v["var_q"], v["var_Kt1"]
        except GenSqueezeError as e:
            q2 = k1 = float("nan")
            errors.append({"d": d, "error": str(e)})
        sw.rows.append([d, q2, k1])
    ds = [r[0] for r in sw.rows]
    cq = crossings(ds, [r[1] for r in sw.rows], 1.0)
    ck = crossings(ds, [r[2] for r in sw.rows], 1.0)
    q_int = cq[:2] if len(cq) >= 2 else None
    k_int = ck[:2] if len(ck) >= 2 else None
    joint = None
    if q_int and k_int:
        lo, hi = max(q_int[0], k_int[0]), min(q_int[1], k_int[1])
        joint = [lo, hi] if lo < hi else None
    sw.summary = {"q_interval": q_int, "Ktilde1_interval": k_int, "joint_interval": joint,
                  "row_errors": errors}
    return sw


def photon_sweep(z, u, v, cutoff: int | None = 512, tail: float = 1e-12) -> Sweep:
    """p(n) of the even state |z, u, v; +> and a Poisson reference with the same mean."""
    st = even_fock_state(Su11Params(z, u, v, 0, 0.25), cutoff)
    ps = photon_statistics(st)
    p = ps.distribution
    n = np.arange(len(p))
    ref = poisson.pmf(n, ps.mean)
    keep = np.flatnonzero((p > tail) | (ref > tail))
    nmax = int(keep.max()) if len(keep) else 0
    sw = Sweep(["n", "p", "poisson_ref"])
    for i in range(nmax + 1):
        sw.rows.append([i, p[i], ref[i]])
    sw.summary = {
        "mean_n": ps.mean,
        "variance_n": ps.variance,
        "Q": ps.mandel_q,
        "odd_mass": float(p[1::2].sum()),
        "tail_mass": st.tail_mass,
    }
    return sw


def fig2a(cutoff: int | None = 512) -> Sweep:
    return photon_sweep(cutoff=cutoff, **FIG2A)


def fig2b(cutoff: int | None = 512) -> Sweep:
    return photon_sweep(cutoff=cutoff, **FIG2B)
