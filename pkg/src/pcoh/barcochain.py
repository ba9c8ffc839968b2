"""Normalized bar-resolution cochains and their transport to minimal
resolutions.

A degree-n cochain is a function on n-tuples of group elements that
vanishes whenever an argument is the identity (normalization is enforced
centrally in evaluation).  Small cochains are value tables of shape
(|G|,)*n; larger ones stay formula-backed and are evaluated in batches.

The coboundary is the alternating face sum

    (df)(g_1,...,g_{n+1}) = f(g_2,...) - f(g_1 g_2, g_3,...) + ...
                            + (-1)^{n+1} f(g_1,...,g_n),

which for 1-cochains reads df(g, h) = f(g) - f(gh) + f(h).  The cup product
is the front-face/back-face one: (f u g)(all) = f(front) * g(back).

Transport in both directions runs through comparison chain maps between the
normalized bar resolution and the minimal resolution: minimal -> bar is
built from the bar resolution's standard contracting homotopy, bar ->
minimal from the minimal resolution's computed one.
"""

from __future__ import annotations

import re

import numpy as np

from .conventions import conventions
from .groups import GroupSpec
from .linalg import mm
from .resolution import CohClass, Resolution, coh_class

TABLE_CAP = 2_100_000        # largest |G|**n value table we materialize
EVAL_BATCH = 1 << 20
EXHAUSTIVE_CAP = 260_000_000  # budget for exhaustive tuple sweeps


class BarBudgetError(RuntimeError):
    pass


class BarCochain:
    """A normalized cochain: a value table or a lazy formula."""

    def __init__(self, group: GroupSpec, degree: int, table=None, fn=None, name=""):
        if (table is None) == (fn is None):
            raise ValueError("exactly one of table/fn required")
        self.group = group
        self.degree = degree
        self.name = name
        if table is not None:
            table = np.asarray(table, dtype=np.int64) % group.p
            if table.shape != (group.order,) * degree:
                raise ValueError("table shape does not match degree")
        self.table = table
        self.fn = fn

    def eval(self, tuples: np.ndarray) -> np.ndarray:
        """Values on rows of ``tuples`` (element indices); tuples containing
        the identity evaluate to 0 (normalization)."""
        tuples = np.asarray(tuples, dtype=np.int64)
        if self.degree == 0:
            base = np.full(len(tuples), int(self.table.reshape(()))) if self.table is not None else self.fn(tuples)
            return base % self.group.p
        if self.table is not None:
            vals = self.table[tuple(tuples[:, i] for i in range(self.degree))]
        else:
            vals = self.fn(tuples) % self.group.p
        e = self.group.identity().index
        degenerate = (tuples == e).any(axis=1)
        if degenerate.any():
            vals = np.where(degenerate, 0, vals)
        return vals % self.group.p

    def as_table(self) -> np.ndarray:
        if self.table is not None:
            return self.table
        ng = self.group.order
        if ng**self.degree > TABLE_CAP:
            raise BarBudgetError(f"degree-{self.degree} table over {self.group.name} exceeds budget")
        tuples = _all_tuples(ng, self.degree)
        table = self.eval(tuples).reshape((ng,) * self.degree)
        self.table = table
        self.fn = None
        return table

    def is_normalized(self) -> bool:
        """Tables must vanish on degenerate tuples; formulas are masked."""
        if self.table is None or self.degree == 0:
            return True
        e = self.group.identity().index
        t = self.table
        for axis in range(self.degree):
            sl = [slice(None)] * self.degree
            sl[axis] = e
            if t[tuple(sl)].any():
                return False
        return True

    def __add__(self, other):
        _check_pair(self, other)
        if self.table is not None and other.table is not None:
            return BarCochain(self.group, self.degree, table=(self.table + other.table) % self.group.p)
        return BarCochain(self.group, self.degree,
                          fn=lambda t, a=self, b=other: a.eval(t) + b.eval(t))

    def __sub__(self, other):
        return self + (-1) * other

    def __rmul__(self, c: int):
        c = int(c) % self.group.p
        if self.table is not None:
            return BarCochain(self.group, self.degree, table=self.table * c % self.group.p)
        return BarCochain(self.group, self.degree, fn=lambda t, a=self: c * a.eval(t))

    def __repr__(self):
        kind = "table" if self.table is not None else "formula"
        return f"<BarCochain {self.name or ''} deg {self.degree} ({kind}) on {self.group.name}>"


def _check_pair(a: BarCochain, b: BarCochain):
    if a.group is not b.group or a.degree != b.degree:
        raise ValueError("cochain mismatch")


def _all_tuples(ng: int, n: int) -> np.ndarray:
    idx = np.arange(ng**n)
    return np.stack(np.unravel_index(idx, (ng,) * n), axis=1)


def zero_cochain(group: GroupSpec, degree: int) -> BarCochain:
    if group.order**degree > TABLE_CAP:
        return BarCochain(group, degree, fn=lambda t: np.zeros(len(t), dtype=np.int64))
    return BarCochain(group, degree, table=np.zeros((group.order,) * degree, dtype=np.int64))


def cochain_from_exps(group: GroupSpec, fn_of_exps, name="") -> BarCochain:
    """Degree-1 cochain from a function of the normal-form exponent columns."""
    exps = np.array([group.exps_of_index(i) for i in range(group.order)], dtype=np.int64)
    vals = fn_of_exps(*[exps[:, t] for t in range(exps.shape[1])]) % group.p
    table = np.broadcast_to(vals, (group.order,)).copy()
    return BarCochain(group, 1, table=table, name=name)


def coboundary(f: BarCochain) -> BarCochain:
    """Alternating face sum, times the configured coboundary sign."""
    n = f.degree
    group = f.group
    p = group.p
    mul = group.mul_table()
    sign = conventions.coboundary_sign

    def delta(tuples, f=f, n=n, mul=mul, sign=sign, p=p):
        total = f.eval(tuples[:, 1:]).astype(np.int64)
        for i in range(1, n + 1):
            merged = np.concatenate(
                [tuples[:, : i - 1],
                 mul[tuples[:, i - 1], tuples[:, i]][:, None],
                 tuples[:, i + 1 :]],
                axis=1,
            )
            total += (-1) ** i * f.eval(merged)
        total += (-1) ** (n + 1) * f.eval(tuples[:, :n])
        return sign * total % p

    out = BarCochain(group, n + 1, fn=delta, name=f"d({f.name})" if f.name else "")
    if group.order ** (n + 1) <= TABLE_CAP:
        out.as_table()
    return out


def cup_bar(f: BarCochain, g: BarCochain) -> BarCochain:
    """Front-face/back-face product."""
    if f.group is not g.group:
        raise ValueError("cochain mismatch")
    group = f.group
    n, m = f.degree, g.degree

    def prod(tuples, f=f, g=g, n=n):
        return f.eval(tuples[:, :n]) * g.eval(tuples[:, n:]) % group.p

    if n == 0 or m == 0:
        scal = int(f.as_table().reshape(())) if n == 0 else int(g.as_table().reshape(()))
        other = g if n == 0 else f
        return (scal % group.p) * other
    out = BarCochain(group, n + m, fn=prod, name=f"{f.name}u{g.name}" if f.name and g.name else "")
    if f.table is not None and g.table is not None and group.order ** (n + m) <= TABLE_CAP:
        out.table = np.multiply.outer(f.table, g.table) % group.p
        # normalization rides along: factors vanish on degenerate slots
        out.fn = None
    return out


def is_cocycle(f: BarCochain):
    """(True, None) if df = 0 everywhere, else (False, first violating tuple).

    The sweep is exhaustive over |G|**(degree+1) tuples and refuses budgets
    beyond EXHAUSTIVE_CAP."""
    group = f.group
    ng = group.order
    n = f.degree
    total = ng ** (n + 1)
    if total > EXHAUSTIVE_CAP:
        raise BarBudgetError("cocycle check exceeds the evaluation budget")
    df = coboundary(f)
    if df.table is not None:
        nz = np.nonzero(df.table)
        if len(nz[0]) == 0:
            return True, None
        witness = tuple(int(ax[0]) for ax in nz)
        return False, witness
    for start in range(0, total, EVAL_BATCH):
        idx = np.arange(start, min(start + EVAL_BATCH, total))
        tuples = np.stack(np.unravel_index(idx, (ng,) * (n + 1)), axis=1)
        vals = df.eval(tuples)
        bad = np.nonzero(vals)[0]
        if bad.size:
            return False, tuple(int(x) for x in tuples[bad[0]])
    return True, None


# -- transport between bar and minimal coordinates ---------------------------


def _phi_chains(r: Resolution, n: int):
    """Images of the minimal resolution's generators in the normalized bar
    resolution, via the bar contracting homotopy.

    Stored as (bars, coeffs): the leading group entry is always the
    identity, so only the bar part (length n) is kept.  The recursion is
    phi_n(e) = h(phi_{n-1}(d e)); translating by g turns the implicit
    leading identity into a first bar entry g."""
    cache = r._aux.setdefault("phi", {})
    if n in cache:
        return cache[n]
    group = r.group
    ng = group.order
    p = r.p
    e = group.identity().index
    if n == 0:
        cache[0] = [(np.zeros((1, 0), dtype=np.int64), np.array([1], dtype=np.int64))]
        return cache[0]
    prev = _phi_chains(r, n - 1)
    mul = group.mul_table()
    out = []
    for m_gen in range(r.ranks[n]):
        img = r.gen_images[n][m_gen].astype(np.int64)
        rows = []
        coefs = []
        for rr in range(r.ranks[n - 1]):
            bars, cf = prev[rr]
            block = img[rr * ng : (rr + 1) * ng]
            for g in np.nonzero(block)[0]:
                if g == e:
                    continue  # new first bar entry would be degenerate
                first = np.full((bars.shape[0], 1), g, dtype=np.int64)
                rows.append(np.concatenate([first, bars], axis=1))
                coefs.append(cf * int(block[g]))
        if not rows:
            out.append((np.zeros((0, n), dtype=np.int64), np.zeros(0, dtype=np.int64)))
            continue
        tuples = np.concatenate(rows, axis=0)
        coefs = np.concatenate(coefs) % p
        # consolidate duplicate tuples
        flat = tuples @ (ng ** np.arange(n - 1, -1, -1, dtype=np.int64))
        uniq, inv = np.unique(flat, return_inverse=True)
        acc = np.zeros(len(uniq), dtype=np.int64)
        np.add.at(acc, inv, coefs)
        acc %= p
        keep = np.nonzero(acc)[0]
        uniq = uniq[keep]
        bars = np.stack(np.unravel_index(uniq, (ng,) * n), axis=1) if len(uniq) else np.zeros((0, n), dtype=np.int64)
        out.append((bars, acc[keep]))
    cache[n] = out
    return out


def bar_class_to_minimal(f: BarCochain, r: Resolution) -> CohClass:
    """Coordinates of a cocycle's class on the minimal resolution."""
    if f.group is not r.group:
        raise ValueError("group mismatch")
    n = f.degree
    r.check_degree(n)
    chains = _phi_chains(r, n)
    coords = []
    for bars, coefs in chains:
        if len(coefs) == 0:
            coords.append(0)
        else:
            coords.append(int((f.eval(bars) * coefs).sum() % r.p))
    return coh_class(n, coords)


def _psi_matrices(r: Resolution, n: int, cap: int = 600_000):
    """Chain map bar -> minimal as matrices (dim P_n) x |G|**n, built with
    the minimal resolution's contracting homotopy."""
    cache = r._aux.setdefault("psi", {})
    if n in cache:
        return cache[n]
    group = r.group
    ng = group.order
    p = r.p
    if ng**n > cap:
        raise BarBudgetError(f"bar comparison in degree {n} over {group.name} exceeds budget")
    if n == 0:
        # the single normalized 0-chain 1*() maps to the identity basis vector
        col = np.zeros((ng, 1), dtype=np.int8)
        col[group.identity().index, 0] = 1
        cache[0] = col
        return cache[0]
    prev = _psi_matrices(r, n - 1, cap)
    mul = group.mul_table()
    e = group.identity().index
    cols = ng**n
    digits = np.stack(np.unravel_index(np.arange(cols), (ng,) * n), axis=1)
    rhs = np.zeros((r.dim(n - 1), cols), dtype=np.int64)
    # face 0: g_1 acting on the column of (g_2..g_n)
    t = r._act()
    tail = cols // ng
    for g1 in range(ng):
        perm = (np.arange(r.dim(n - 1)) // ng) * ng + t[np.arange(r.dim(n - 1)) % ng, g1]
        rhs[:, g1 * tail : (g1 + 1) * tail] = prev[perm]
    # middle faces: merge the entries at slots i-1, i; prefix weights shrink
    # by a factor ng, the merged digit takes slot i's old weight, suffix stays
    weights = ng ** np.arange(n - 1, -1, -1, dtype=np.int64)
    flat = digits @ weights
    for i in range(1, n):
        merged_digit = mul[digits[:, i - 1], digits[:, i]].astype(np.int64)
        hi = flat // weights[i - 1]
        suffix = flat % weights[i]
        newflat = (hi // ng) * weights[i] * ng + merged_digit * weights[i] + suffix
        sub = prev[:, newflat]
        if i % 2 == 1:
            rhs -= sub
        else:
            rhs += sub
    # last face
    if n % 2 == 0:
        rhs += prev[:, flat // ng]
    else:
        rhs -= prev[:, flat // ng]
    rhs %= p
    psi = mm(r.homotopy(n - 1), rhs, p)
    degenerate = (digits == e).any(axis=1)
    psi[:, degenerate] = 0
    psi = psi.astype(np.int8)
    cache[n] = psi
    return psi


def minimal_class_to_bar(cls_: CohClass, r: Resolution) -> BarCochain:
    """A bar cocycle representing a minimal-resolution class."""
    n = cls_.degree
    psi = _psi_matrices(r, n)
    row = r.aug_functional(cls_)
    vals = mm(row[None, :], psi, r.p).ravel()
    return BarCochain(r.group, n, table=vals.reshape((r.group.order,) * n))


# -- the 1-cochain definition mini-language -----------------------------------

_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z_0-9']*|\d+|:=|[-+*^()])")


def parse_cochain_defs(group: GroupSpec, text: str, env: dict | None = None) -> dict:
    """Parse lines ``name := expr`` into degree-1 cochains.

    Expressions use the normal-form exponents as variables (``i``, ``j``,
    ``k``, ... positionally over the group's generators), previously defined
    cochain names, integer literals, ``inv2`` for the inverse of 2 mod p,
    and ``+ - * ^``.  Values are reduced mod p pointwise.
    """
    p = group.p
    exps = np.array([group.exps_of_index(t) for t in range(group.order)], dtype=np.int64)
    var_names = ["i", "j", "k", "l", "m", "n"][: exps.shape[1]]
    base_env: dict[str, np.ndarray] = {
        name: exps[:, t] % p for t, name in enumerate(var_names)
    }
    base_env["inv2"] = np.full(group.order, pow(2, p - 2, p), dtype=np.int64)
    if env:
        for k, v in env.items():
            base_env[k] = v.as_table() if isinstance(v, BarCochain) else np.asarray(v)
    out: dict[str, BarCochain] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":=" not in line:
            raise ValueError(f"expected 'name := expr' in {raw!r}")
        name, expr = line.split(":=", 1)
        name = name.strip()
        vals = _eval_expr(expr, base_env, p) % p
        vals = np.broadcast_to(vals, (group.order,)).copy()
        base_env[name] = vals
        out[name] = BarCochain(group, 1, table=vals, name=name)
    return out


def _tokenize(expr: str):
    pos = 0
    toks = []
    while pos < len(expr):
        m = _TOKEN.match(expr, pos)
        if not m:
            if expr[pos:].strip():
                raise ValueError(f"bad token at {expr[pos:]!r}")
            break
        toks.append(m.group(1))
        pos = m.end()
    toks.append(None)
    return toks


def _eval_expr(expr: str, env: dict, p: int):
    toks = _tokenize(expr)
    pos = [0]

    def peek():
        return toks[pos[0]]

    def take():
        t = toks[pos[0]]
        pos[0] += 1
        return t

    def atom():
        t = take()
        if t == "(":
            v = add_expr()
            if take() != ")":
                raise ValueError("missing )")
            return v
        if t == "-":
            return -atom()
        if t is None:
            raise ValueError("unexpected end of expression")
        if t.isdigit():
            return np.int64(int(t))
        if t in env:
            return env[t]
        raise ValueError(f"unknown name {t!r}")

    def power():
        v = atom()
        while peek() == "^":
            take()
            t = take()
            if not (t and t.isdigit()):
                raise ValueError("exponent must be a literal integer")
            v = pow(v, int(t)) if np.isscalar(v) else np.power(v, int(t)) % p
        return v

    def mul_expr():
        v = power()
        while peek() == "*":
            take()
            v = v * power() % p
        return v

    def add_expr():
        v = mul_expr()
        while peek() in ("+", "-"):
            op = take()
            w = mul_expr()
            v = (v + w) % p if op == "+" else (v - w) % p
        return v

    v = add_expr()
    if peek() is not None:
        raise ValueError(f"trailing tokens in {expr!r}")
    return v
