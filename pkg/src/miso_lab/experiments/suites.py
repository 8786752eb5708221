"""The four experiment suites.  Each builds a list of record factories."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from .. import dirichlet as dr
from .. import isometry as iso
from .. import measures as ms
from .. import numerics as nx
from .. import semigroup as sg
from ..errors import CayleyPole
from . import families as fam
from .config import ExperimentConfig, named_measures, tolerance_scale
from .lsds import second_difference, shift_Lsds_norm
from .report import Record, Report, run_checks

DEFAULT_TOLERANCES = {
    "binomial-sum": 0.0,
    "beta-recursion": 1e-9,
    "sum-of-defects": 1e-9,
    "alpha-recursion": 1e-9,
    "shifted-defect": 1e-9,
    "cayley-bridge": 1e-9,
    "cayley-roundtrip": 1e-9,
    "gen-eig-routes": 1e-9,
    "mat-exp-oracle": 1e-12,
    "nilpotent-growth": 1e-10,
    "growth-polynomial": 1e-7,
    "resolvent": 1e-6,
    "difference-quotient": 1e-6,
    "quasicontractivity": 1e-10,
    "concave-growth": 1e-10,
    "fourier-symmetry": 0.0,
    "poisson-psd": 1e-10,
    "two-isometry": 1e-10,
    "defect-formula": 1e-10,
    "fubini": 1e-10,
    "w-monotone": 1e-12,
    "closed-form": 1e-12,
    "multiplication-exact": 1e-12,
    "kr-monotone": 0.0,
}

ANCHOR_DEFECTS = "defect operators of m-isometries"
ANCHOR_GENERATORS = "m-skew-symmetric generators"
ANCHOR_MODEL = "Dirichlet space model of M_z"
ANCHOR_SHIFT = "Dirichlet shift example"
ANCHOR_ABS = "density |1 - zeta| example"
ANCHOR_LSDS = "right shift on L2(s ds) example"
ANCHOR_NEG1 = "point mass at -1"


class Context:
    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.scale = tolerance_scale()

    def tol(self, name):
        base = self.config.tolerances_override.get(name, DEFAULT_TOLERANCES[name])
        return base * self.scale

    def residual(self, check, family, anchor, value, expected=0.0):
        tol = self.tol(family)
        return Record(check, anchor, float(value), expected, tol, bool(value <= tol))

    def rng(self, salt=0):
        return np.random.default_rng([self.config.seed, salt])


# ------------------------------------------------------------------ core


def _core(ctx: Context):
    def sample(salt):
        rng = ctx.rng(salt)
        return [(fam.random_matrix(rng, int(rng.integers(1, 9))), int(rng.integers(0, 5))) for _ in range(20)]

    def worst(fn, salt):
        return max(fn(t, m) for t, m in sample(salt))

    def bridge(a, m):
        try:
            return sg.beta_alpha_bridge_residual(a, m)
        except CayleyPole:
            return 0.0

    def roundtrip(a, _m):
        try:
            t = sg.cayley_cogenerator(a)
            back = sg.cayley_generator(t)
        except CayleyPole:
            return 0.0
        return nx.opnorm(back - a) / nx.scale(a, back)

    def gen_eig(a, _m):
        q = nx.hermitian_part(a)
        g = a @ a.conj().T + np.eye(a.shape[0])
        x, y = nx.gen_eig_max(q, g), nx.gen_eig_max_whitened(q, g)
        return abs(x - y) / (1 + abs(x))

    def exp_oracle(a, _m):
        x = nx.mat_exp(a, 0.3)
        y = nx.taylor_series_exp(a, 0.3)
        return nx.opnorm(x - y) / nx.scale(x)

    def nilpotent():
        a = fam.nilpotent_witness()
        rng = ctx.rng(99)
        worst_ = 0.0
        for _ in range(5):
            res = sg.growth_residuals(a, fam.random_vector(rng, 2), 3, np.linspace(0, 5, 21))
            worst_ = max(worst_, max(res))
        return ctx.residual("nilpotent-growth", "nilpotent-growth", ANCHOR_GENERATORS, worst_)

    checks = [
        lambda: Record(
            "binomial-sum", "binomial identity", len(iso.binom_sum_sweep(30, 10)), 0, 0.0, not iso.binom_sum_sweep(30, 10)
        ),
        lambda: ctx.residual("beta-recursion", "beta-recursion", ANCHOR_DEFECTS, worst(iso.beta_recursion_residual, 1)),
        lambda: ctx.residual("sum-of-defects", "sum-of-defects", ANCHOR_DEFECTS, worst(iso.sum_of_defects_residual, 2)),
        lambda: ctx.residual("alpha-recursion", "alpha-recursion", ANCHOR_GENERATORS, worst(sg.alpha_recursion_residual, 3)),
        lambda: ctx.residual(
            "shifted-defect",
            "shifted-defect",
            ANCHOR_DEFECTS,
            worst(lambda t, m: max(iso.shifted_defect_residual(t, max(m, 1), j) for j in range(3)), 4),
        ),
        lambda: ctx.residual("cayley-bridge", "cayley-bridge", "Cayley transform of forms", worst(bridge, 5)),
        lambda: ctx.residual("cayley-roundtrip", "cayley-roundtrip", "Cayley transform of forms", worst(roundtrip, 6)),
        lambda: ctx.residual("gen-eig-routes", "gen-eig-routes", "generalized eigenvalue", worst(gen_eig, 7)),
        lambda: ctx.residual("mat-exp-oracle", "mat-exp-oracle", "matrix exponential", worst(exp_oracle, 8)),
        nilpotent,
    ]
    return Report("core-identities", run_checks(checks))


# ------------------------------------------------------------------ measure report


def _w_sweep(mu, degrees):
    def one(n):
        try:
            w1 = dr.estimate_w1(mu, n)
        except ArithmeticError:
            w1 = float("nan")
        return n, w1, dr.estimate_w2(mu, n)

    with ThreadPoolExecutor(max_workers=4) as pool:
        return list(pool.map(one, degrees))


def _nondecreasing(values, tol):
    return all(b >= a - tol for a, b in zip(values, values[1:]))


def _measure_report(ctx: Context):
    mu = ctx.config.measure or named_measures()["atomic-neg1"]
    degrees = ctx.config.degrees
    sweep = _w_sweep(mu, degrees)
    table = [{"N": n, "w1": w1, "w2": str(w2) if isinstance(w2, ms.Diverges) else w2} for n, w1, w2 in sweep]
    tol = ctx.tol("w-monotone")
    records = []
    for n, w1, w2 in sweep:
        records.append(Record(f"w1[N={n}]", "boundary form over ||(1 - z) f||^2", w1, None, None, math.isfinite(w1)))
        if isinstance(w2, ms.Diverges):
            records.append(Record(f"w2[N={n}]", "tilde boundary form over ||f||^2", "diverges", None, None, True))
        else:
            records.append(Record(f"w2[N={n}]", "tilde boundary form over ||f||^2", w2, None, None, math.isfinite(w2)))
    w1s = [w1 for _, w1, _ in sweep]
    records.append(Record("w1-nondecreasing", "nested truncations", w1s, "nondecreasing", tol, _nondecreasing(w1s, tol)))
    w2s = [w2 for _, _, w2 in sweep]
    if not any(isinstance(w, ms.Diverges) for w in w2s):
        records.append(
            Record("w2-nondecreasing", "nested truncations", w2s, "nondecreasing", tol, _nondecreasing(w2s, tol))
        )

    rng = ctx.rng(11)

    def two_isometry(n):
        form = dr.mz_defect_form(mu, n, 2)
        return ctx.residual(f"two-isometry[N={n}]", "two-isometry", ANCHOR_MODEL, nx.opnorm(form) / nx.scale(dr.gram(mu, n + 2).G))

    def defect():
        worst = 0.0
        for _ in range(10):
            deg = int(rng.integers(0, 7))
            f = dr.VecPoly(rng.standard_normal((deg + 1, mu.dim)) + 1j * rng.standard_normal((deg + 1, mu.dim)))
            worst = max(worst, dr.defect_formula_residual(mu, f))
        return ctx.residual("defect-formula", "defect-formula", ANCHOR_MODEL, worst)

    def symmetry():
        worst = max(
            float(np.max(np.abs(ms.fourier(mu, -n) - ms.fourier(mu, n).conj().T))) for n in range(0, 2 * max(degrees) + 2)
        )
        return ctx.residual("fourier-symmetry", "fourier-symmetry", "Fourier coefficients", worst)

    def poisson():
        prng = ctx.rng(12)
        low = 0.0
        for _ in range(100):
            z = math.sqrt(prng.uniform(0, 0.99)) * complex(np.exp(2j * math.pi * prng.uniform()))
            low = min(low, nx.lambda_min(ms.poisson(mu, z)))
        return ctx.residual("poisson-psd", "poisson-psd", "Poisson extension", -low)

    checks = [lambda n=n: two_isometry(n) for n in degrees if n <= 12] + [defect, symmetry, poisson]
    if mu.is_atomic:

        def fubini():
            frng = ctx.rng(13)
            worst = 0.0
            for deg in range(11):
                f = dr.VecPoly(frng.standard_normal((deg + 1, mu.dim)) + 1j * frng.standard_normal((deg + 1, mu.dim)))
                worst = max(worst, dr.fubini_residual(mu, f))
            return ctx.residual("fubini", "fubini", ANCHOR_MODEL, worst)

        checks.append(fubini)
    records.extend(run_checks(checks))
    return Report("measure-report", records, table)


# ------------------------------------------------------------------ semigroup


def _shipped_generators(rng):
    return [
        ("nilpotent", fam.nilpotent_witness(), 3),
        ("skew-adjoint", fam.skew_adjoint(rng, 4), 1),
        ("three-skew", fam.three_skew(rng, 5), 3),
        ("zero", np.zeros((3, 3), dtype=complex), 1),
    ]


def _semigroup(ctx: Context):
    rng = ctx.rng(21)
    gens = _shipped_generators(rng)
    times = ctx.config.times
    checks = []

    for idx, (name, a, m) in enumerate(gens):

        def growth(name=name, a=a, m=m, idx=idx):
            xrng = ctx.rng(100 + idx)
            worst = max(max(sg.growth_residuals(a, fam.random_vector(xrng, a.shape[0]), m, times)) for _ in range(20))
            return ctx.residual(f"growth-polynomial[{name}]", "growth-polynomial", ANCHOR_GENERATORS, worst)

        def diffq(name=name, a=a, m=m, idx=idx):
            xrng = ctx.rng(200 + idx)
            y = fam.random_vector(xrng, a.shape[0])
            return ctx.residual(
                f"difference-quotient[{name}]", "difference-quotient", ANCHOR_GENERATORS, sg.difference_quotient_check(a, y, m, 0.5)
            )

        checks += [growth, diffq]

    resolvent_family = [
        ("zero", np.zeros((2, 2), dtype=complex)),
        ("nilpotent", fam.nilpotent_witness()),
        ("minus-identity", -np.eye(3, dtype=complex)),
        ("dissipative", fam.random_dissipative(rng, 4)),
    ]
    for name, a in resolvent_family:

        def resolvent(name=name, a=a):
            w = sg.dissipativity_w(a)
            worst = max(sg.resolvent_residual(a, w + d) for d in (0.5, 1.0, 2.0))
            return ctx.residual(f"resolvent[{name}]", "resolvent", "Laplace transform of the semigroup", worst)

        def quasi(name=name, a=a):
            return ctx.residual(
                f"quasicontractivity[{name}]", "quasicontractivity", "Lumer-Phillips bound", max(sg.quasicontractivity_excess(a), 0.0)
            )

        checks += [resolvent, quasi]

    def concave():
        a = fam.concave_example()
        crng = ctx.rng(31)
        worst = max(sg.concave_growth_check(a, fam.random_vector(crng, 2), 3) for _ in range(10))
        return ctx.residual("concave-growth", "concave-growth", "m-concave generators", max(worst, 0.0))

    checks.append(concave)
    return Report("semigroup-sim", run_checks(checks))


# ------------------------------------------------------------------ worked examples


def _verdict(name, anchor, value, expect_diverges=True):
    got = isinstance(value, ms.Diverges)
    shown = "diverges" if got else value
    return Record(name, anchor, shown, "diverges" if expect_diverges else "finite", None, got == expect_diverges)


def example_checks(ctx: Context, name: str):
    closed = ctx.tol("closed-form")
    leb = ms.lebesgue()
    neg1 = named_measures()["atomic-neg1"]
    fej = named_measures()["abs1mz-fejer"]
    if name == "dirichlet-shift":

        def norms():
            g = dr.gram(leb, 12).G
            err = max(abs(g[k, k] - (1 + k)) for k in range(13))
            off = float(np.max(np.abs(g - np.diag(np.diag(g)))))
            return ctx.residual("dirichlet-shift-norms", "closed-form", ANCHOR_SHIFT, max(err, off))

        def w1_growth():
            a, b = dr.estimate_w1(leb, 4), dr.estimate_w1(leb, 16)
            return Record("dirichlet-shift-w1-growth", ANCHOR_SHIFT, b / a, ">= 2", None, b >= 2 * a)

        def dissipativity():
            ws = [sg.dissipativity_w(sg.cayley_generator(dr.truncated_model_shift(leb, n))) for n in (2, 4, 8, 16, 32)]
            ok = all(b > a for a, b in zip(ws, ws[1:])) and ws[-1] > 4 * ws[0]
            return Record("dirichlet-shift-dissipativity", ANCHOR_SHIFT, ws, "unbounded", None, ok)

        def two_iso():
            form = dr.mz_defect_form(leb, 12, 2)
            return ctx.residual("dirichlet-shift-two-isometry", "two-isometry", ANCHOR_SHIFT, nx.opnorm(form))

        return [
            norms,
            lambda: _verdict("dirichlet-shift-w2", ANCHOR_SHIFT, dr.estimate_w2(leb, 4)),
            w1_growth,
            dissipativity,
            two_iso,
        ]
    if name == "abs1mz-density":

        def kr():
            rep = dr.kr_convergence_report(fej, dr.VecPoly.scalar(1.0))
            ok = all(b < a for a, b in zip(rep, rep[1:]))
            return Record("abs1mz-kr-decreasing", ANCHOR_ABS + " (degree-8 Fejer approximation)", rep, "decreasing", None, ok)

        def power4():
            t = ms.tilde_measure(named_measures()["abs1mz-power4"])
            want = {-1: -1.0, 0: 2.0, 1: -1.0}
            err = max(abs(ms.fourier(t, n)[0, 0] - want.get(n, 0.0)) for n in range(-3, 4))
            return ctx.residual("abs1mz-power4-tilde", "closed-form", "density |1 - zeta|^4", err)

        def two_iso():
            form = dr.mz_defect_form(fej, 12, 2)
            return ctx.residual("abs1mz-two-isometry", "two-isometry", ANCHOR_ABS, nx.opnorm(form))

        return [
            lambda: _verdict("abs1mz-tilde", ANCHOR_ABS + " (degree-8 Fejer approximation)", ms.tilde_measure(fej)),
            kr,
            power4,
            two_iso,
        ]
    if name == "right-shift-lsds":

        def indicator():
            worst = Fraction(0)
            for t in (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(7, 10), Fraction(3)):
                for h in (Fraction(1, 4), Fraction(1), Fraction(5, 2)):
                    got = shift_Lsds_norm(t, [0, h], [1])
                    worst = max(worst, abs(got - (t * h + h * h / 2)))
            return ctx.residual("right-shift-Lsds", "closed-form", ANCHOR_LSDS, float(worst))

        def two_iso():
            worst = Fraction(0)
            steps = [([0, 1], [1]), ([0, Fraction(1, 3), 2], [2, -1]), ([Fraction(1, 2), 1, 3, 4], [1, 3, Fraction(-1, 2)])]
            for bps, vals in steps:
                for t in (Fraction(7, 10), Fraction(1), Fraction(5, 2)):
                    worst = max(worst, abs(second_difference(t, bps, vals)))
            return ctx.residual("right-shift-Lsds-2isometry", "closed-form", ANCHOR_LSDS, float(worst))

        return [indicator, two_iso]
    if name == "atomic-neg1":

        def w2_start():
            w = dr.estimate_w2(neg1, 0)
            return ctx.residual("atomic-neg1-w2-start", "closed-form", ANCHOR_NEG1, abs(w - 0.25), 0.25)

        def gap():
            ns = (0, 1, 2, 4, 8, 12)
            w1 = [dr.estimate_w1(neg1, n) for n in ns]
            w2 = [dr.estimate_w2(neg1, n) for n in ns]
            gaps = [abs(a - b) for a, b in zip(w1, w2)]
            ok = _nondecreasing(w2, ctx.tol("w-monotone")) and all(b <= a + 1e-12 for a, b in zip(gaps[1:], gaps[2:]))
            return Record("atomic-neg1-w-gap", ANCHOR_NEG1, gaps, "decreasing", None, ok)

        def local_phi():
            err = 0.0
            for t in (0.5, 1.0, 2.0, 4.0):
                err = max(err, abs(dr.local_dirichlet_phi(t, -1) - t / 2), abs(dr.local_dirichlet_phi(t, 1j) - t))
            return ctx.residual("atomic-neg1-local-phi", "closed-form", "local Dirichlet integral of phi_t", err)

        def mult():
            worst = 0.0
            for f in (dr.VecPoly.scalar(1), dr.VecPoly.scalar(0, 1), dr.VecPoly.scalar(1, 1), dr.VecPoly.scalar(0, 0, 1)):
                for t in (0.5, 1.0, 2.0, 4.0):
                    exact = dr.phi_times_norm_exact(neg1, f, t)
                    worst = max(worst, abs(exact - dr.multiplication_rhs(neg1, f, t)))
            return ctx.residual("atomic-neg1-multiplication", "multiplication-exact", "multiplication formula", worst)

        return [w2_start, gap, local_phi, mult]
    raise KeyError(name)


EXAMPLES = ("dirichlet-shift", "abs1mz-density", "right-shift-lsds", "atomic-neg1")


def _worked_examples(ctx: Context):
    checks = [c for name in EXAMPLES for c in example_checks(ctx, name)]
    return Report("paper-examples", run_checks(checks))


def run(config: ExperimentConfig) -> Report:
    ctx = Context(config)
    return {
        "core-identities": _core,
        "measure-report": _measure_report,
        "semigroup-sim": _semigroup,
        "paper-examples": _worked_examples,
    }[config.suite](ctx)


def run_example(name: str) -> Report:
    ctx = Context(ExperimentConfig("paper-examples"))
    return Report(f"example:{name}", run_checks(example_checks(ctx, name)))
