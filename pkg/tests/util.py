"""Shared generators and sampling helpers for the test suite."""

import random

from exforms import expressions as ex
from exforms.forms import DifferentialForm, VectorField


def sample_points(names, n, seed, low=-1.0, high=1.0):
    rng = random.Random(seed)
    return [{v: rng.uniform(low, high) for v in names} for _ in range(n)]


def rand_expr(rng, names, depth=3, safe=True):
    """Random expression tree.

    With safe=True the tree avoids div/log/sqrt so it evaluates everywhere;
    otherwise those appear with guarded arguments for parser round trips.
    """
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.4:
            return ex.const(round(rng.uniform(-3, 3), 3))
        return ex.var(rng.choice(names))
    ops = ["add", "sub", "mul", "neg", "sin", "cos", "pow"]
    if not safe:
        ops += ["div", "log", "sqrt", "exp"]
    op = rng.choice(ops)
    a = rand_expr(rng, names, depth - 1, safe)
    if op in ("add", "sub", "mul", "div"):
        b = rand_expr(rng, names, depth - 1, safe)
        return ex.ScalarExpr(op, (a, b))
    if op == "pow":
        return ex.ScalarExpr("pow", (a,), exponent=float(rng.choice([2, 3])))
    return ex.ScalarExpr(op, (a,))


def rand_smooth_expr(rng, names, terms=None):
    """Small random polynomial with an occasional trig factor; C2 and tame."""
    n_terms = terms if terms is not None else rng.randint(1, 3)
    acc = ex.ZERO
    for _ in range(n_terms):
        c = ex.const(round(rng.uniform(-2, 2), 3))
        term = c
        for _ in range(rng.randint(1, 2)):
            v = ex.var(rng.choice(names))
            if rng.random() < 0.25:
                term = ex.mul(term, ex.sin(v) if rng.random() < 0.5 else ex.cos(v))
            else:
                term = ex.mul(term, v)
        acc = ex.add(acc, term)
    return acc


def rand_form(rng, names, degree, n_keys=2):
    """Random form of the given degree with smooth random coefficients."""
    import itertools

    keys = list(itertools.combinations(range(len(names)), degree))
    rng.shuffle(keys)
    coeffs = {}
    for key in keys[: min(n_keys, len(keys))]:
        coeffs[key] = rand_smooth_expr(rng, names)
    return DifferentialForm(tuple(names), degree, coeffs)


def rand_vector_field(rng, names):
    return VectorField(tuple(names), tuple(rand_smooth_expr(rng, names) for _ in names))


def max_abs_form(form, points):
    """Largest |coefficient| of a form over the sample points."""
    worst = 0.0
    for key, c in form.coeffs.items():
        for p in points:
            worst = max(worst, abs(c.evaluate(p)))
    return worst


def max_abs_diff(f, g, points):
    return max_abs_form(f - g, points)
