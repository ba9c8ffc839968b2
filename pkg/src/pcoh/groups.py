"""Finite p-groups given by power-commutator presentations.

A group is described by an ordered list of generators x_1 < ... < x_d with
relative orders q_i (powers of p), power tails x_i^{q_i} = w_i, and swap
rules x_j * x_i = x_i * x_j * c_{ji} for j > i, where c_{ji} is the
commutator [x_j, x_i].  Every element has a unique normal form
x_1^{e_1} ... x_d^{e_d} with 0 <= e_i < q_i.

Multiplication collects exponent vectors directly.  This is exact whenever
all commutators c_ji and power tails w_i are central elements (nilpotency
class <= 2 with central power tails), which covers the built-in family P(n)
and all of its subgroups; presentations outside that class are rejected.
Consistency of a presentation is checked by exhaustive associativity testing
up to a configurable order bound rather than by a confluence analysis.

The canonical enumeration of elements is lexicographic on exponent vectors.
Everything downstream (group-algebra coordinates, resolutions, caches)
indexes by it, so it is part of the on-disk format contract.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

ASSOC_CHECK_BOUND = 3**5


class GroupError(ValueError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class Element:
    """A group element in normal form, as a tuple of exponents."""

    group: "GroupSpec"
    exps: tuple[int, ...]

    def __mul__(self, other: "Element") -> "Element":
        if other.group is not self.group:
            raise GroupError("elements of different groups")
        return Element(self.group, self.group.multiply_exps(self.exps, other.exps))

    def __pow__(self, k: int) -> "Element":
        g = self.group
        if k < 0:
            return self.inverse() ** (-k)
        acc = g.identity()
        base = self
        while k:
            if k & 1:
                acc = acc * base
            base = base * base
            k >>= 1
        return acc

    def inverse(self) -> "Element":
        g = self.group
        return self ** (g.element_order(self) - 1) if self != g.identity() else self

    @property
    def index(self) -> int:
        return self.group.index_of_exps(self.exps)

    def __repr__(self):
        if self == self.group.identity():
            return "1"
        parts = []
        for name, e in zip(self.group.gen_names, self.exps):
            if e == 1:
                parts.append(name)
            elif e:
                parts.append(f"{name}^{e}")
        return "*".join(parts)


class GroupSpec:
    """A finite p-group with a central-collection presentation.

    Parameters
    ----------
    p : odd prime.
    gen_names : generator names, in collection order.
    orders : relative order of each generator (a power of p).
    comm : {(j, i): exps} for j > i, the normal form of [x_j, x_i];
           missing pairs commute.
    pow_tails : {i: exps}, the normal form of x_i^{q_i}; missing means 1.
    """

    def __init__(self, p, gen_names, orders, comm=None, pow_tails=None, name=None):
        if not _is_prime(p) or p == 2:
            raise GroupError(f"p must be an odd prime, got {p}")
        self.p = p
        self.gen_names = tuple(gen_names)
        self.orders = tuple(int(q) for q in orders)
        self.comm = {k: tuple(v) for k, v in (comm or {}).items()}
        self.pow_tails = {k: tuple(v) for k, v in (pow_tails or {}).items()}
        self.name = name or "G"
        d = len(self.orders)
        for q in self.orders:
            qq = q
            while qq % p == 0:
                qq //= p
            if qq != 1 or q < 1:
                raise GroupError(f"relative order {q} is not a power of {p}")
        self.order = reduce(lambda a, b: a * b, self.orders, 1)
        # mixed-radix place values for the canonical (lexicographic) index
        self._places = [1] * d
        for i in range(d - 2, -1, -1):
            self._places[i] = self._places[i + 1] * self.orders[i + 1]
        for (j, i), w in self.comm.items():
            if not (0 <= i < j < d):
                raise GroupError(f"bad commutator pair {(j, i)}")
            if not self._exps_central(w):
                raise GroupError("commutator values must be central")
        for i, w in self.pow_tails.items():
            if not self._exps_central(w):
                raise GroupError("power tails must be central")
        self._tables: dict[str, np.ndarray] = {}

    # -- normal form arithmetic ------------------------------------------

    def multiply_exps(self, a: tuple, b: tuple) -> tuple:
        """Normal form of (x^a)(x^b) by central collection."""
        d = len(self.orders)
        e = [a[i] + b[i] for i in range(d)]
        for (j, i), w in self.comm.items():
            c = a[j] * b[i]
            if c:
                for t in range(d):
                    e[t] += c * w[t]
        return self._reduce(e)

    def _reduce(self, e: list) -> tuple:
        d = len(self.orders)
        for _ in range(d + 2):
            done = True
            for i in range(d):
                q = self.orders[i]
                if not 0 <= e[i] < q:
                    k, e[i] = divmod(e[i], q)
                    tail = self.pow_tails.get(i)
                    if tail is not None and k:
                        for t in range(d):
                            e[t] += k * tail[t]
                    done = False
            if done:
                return tuple(e)
        raise GroupError("power-tail reduction did not stabilise")

    def _exps_central(self, w) -> bool:
        """Does the element with these exponents commute with all generators?

        Checked against the swap rules only: an exponent may sit on a
        noncentral generator slot only if that slot never appears in a
        nontrivial commutator.
        """
        d = len(self.orders)
        for t in range(d):
            if not w[t] % self.orders[t]:
                continue
            for (j, i), c in self.comm.items():
                if t in (j, i) and any(x % self.orders[k] for k, x in enumerate(c)):
                    return False
        return True

    # -- elements ---------------------------------------------------------

    def identity(self) -> Element:
        return Element(self, (0,) * len(self.orders))

    def element(self, *exps) -> Element:
        return Element(self, self._reduce(list(exps)))

    def generator(self, i) -> Element:
        if isinstance(i, str):
            i = self.gen_names.index(i)
        e = [0] * len(self.orders)
        e[i] = 1
        return Element(self, tuple(e))

    def generators(self) -> list[Element]:
        return [self.generator(i) for i in range(len(self.orders))]

    def index_of_exps(self, exps) -> int:
        return sum(e * pl for e, pl in zip(exps, self._places))

    def exps_of_index(self, idx: int) -> tuple:
        out = []
        for q, pl in zip(self.orders, self._places):
            out.append((idx // pl) % q)
        return tuple(out)

    def elements(self):
        for idx in range(self.order):
            yield Element(self, self.exps_of_index(idx))

    def element_order(self, g: Element) -> int:
        acc = g
        k = 1
        e = self.identity()
        while acc != e:
            acc = acc * g
            k += 1
            if k > self.order:
                raise GroupError("element order exceeds group order")
        return k

    # -- cached index tables -----------------------------------------------

    def mul_table(self) -> np.ndarray:
        """|G| x |G| table: mul[a, b] = index of (element a) * (element b)."""
        t = self._tables.get("mul")
        if t is None:
            n = self.order
            t = np.empty((n, n), dtype=np.int32)
            exps = [self.exps_of_index(i) for i in range(n)]
            for a in range(n):
                ea = exps[a]
                row = t[a]
                for b in range(n):
                    row[b] = self.index_of_exps(self.multiply_exps(ea, exps[b]))
            self._tables["mul"] = t
        return t

    def inv_table(self) -> np.ndarray:
        t = self._tables.get("inv")
        if t is None:
            mul = self.mul_table()
            e = self.identity().index
            t = np.empty(self.order, dtype=np.int32)
            for a in range(self.order):
                t[a] = int(np.nonzero(mul[a] == e)[0][0])
            self._tables["inv"] = t
        return t

    def enumeration_hash(self) -> str:
        """Hash of the multiplication table under the canonical enumeration."""
        h = hashlib.sha256()
        h.update(f"{self.p}:{self.order}:".encode())
        h.update(self.mul_table().tobytes())
        return h.hexdigest()[:16]

    def is_associative(self, bound: int = ASSOC_CHECK_BOUND) -> bool:
        """Exhaustive check (ab)c == a(bc); skipped above the order bound."""
        if self.order > bound:
            raise GroupError(f"group order {self.order} above associativity check bound {bound}")
        t = self.mul_table()
        n = self.order
        left = t[t, :]                       # left[a,b,c] = (ab)c
        right = t[:, t.reshape(-1)].reshape(n, n, n)  # right[a,b,c] = a(bc)
        return bool((left == right).all())

    def __repr__(self):
        return f"<GroupSpec {self.name} order {self.order}>"


def make_pn(p: int, n: int) -> GroupSpec:
    """The group P(n): generators A, B of order p and central C of order
    p^(n-2), with [A, B] = C^(p^(n-3))."""
    if not _is_prime(p) or p == 2:
        raise GroupError(f"p must be an odd prime, got {p}")
    if n < 3:
        raise GroupError(f"n must be at least 3, got {n}")
    qc = p ** (n - 2)
    m = p ** (n - 3)
    # B * A = A * B * [B, A] with [B, A] = [A, B]^-1 = C^-m
    return GroupSpec(
        p,
        ("A", "B", "C"),
        (p, p, qc),
        comm={(1, 0): (0, 0, (-m) % qc)},
        name=f"P({n})@p={p}",
    )


def cyclic(p: int, k: int = 1, name=None) -> GroupSpec:
    return GroupSpec(p, ("g",), (p**k,), name=name or f"C{p**k}")


def elementary_abelian(p: int, rank: int) -> GroupSpec:
    names = tuple(f"g{i}" for i in range(rank))
    return GroupSpec(p, names, (p,) * rank, name=f"C{p}^{rank}")


@dataclass
class SubgroupEmbedding:
    """A subgroup H <= G with its own presentation and the books to move
    between the two: an injection on elements and a left-coset transversal."""

    ambient: GroupSpec
    subgroup: GroupSpec
    gens: list               # generating Elements of the ambient group
    injection: list          # injection[h_index] = ambient Element
    transversal: list        # left-coset representatives, ambient Elements
    _index_maps: dict = field(default_factory=dict, repr=False)

    @property
    def index(self) -> int:
        return self.ambient.order // self.subgroup.order

    def inject(self, h: Element) -> Element:
        return self.injection[h.index]

    def ambient_index(self, h_index: int) -> int:
        return self.injection[h_index].index

    def decompose_left(self) -> tuple[np.ndarray, np.ndarray]:
        """For each ambient g: (transversal slot j, subgroup index) with
        g = t_j * h."""
        got = self._index_maps.get("left")
        if got is None:
            got = self._decompose(right=False)
            self._index_maps["left"] = got
        return got

    def decompose_right(self) -> tuple[np.ndarray, np.ndarray]:
        """For each ambient g: (slot j, subgroup index) with g = h * t_j^-1,
        i.e. a decomposition over the right transversal {t_j^-1}."""
        got = self._index_maps.get("right")
        if got is None:
            got = self._decompose(right=True)
            self._index_maps["right"] = got
        return got

    def _decompose(self, right: bool):
        g = self.ambient
        n = g.order
        slot = np.full(n, -1, dtype=np.int32)
        sub = np.full(n, -1, dtype=np.int32)
        for j, t in enumerate(self.transversal):
            tt = t if not right else t.inverse()
            for hi, h in enumerate(self.subgroup.elements()):
                a = (tt * self.inject(h)) if not right else (self.inject(h) * tt)
                slot[a.index] = j
                sub[a.index] = hi
        if (slot < 0).any():
            raise GroupError("transversal does not cover the group")
        return slot, sub


def _closure_indices(g: GroupSpec, gen_indices: list) -> list:
    mul = g.mul_table()
    e = g.identity().index
    seen = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gen_indices:
                y = int(mul[x, s])
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(seen)


def subgroup(g: GroupSpec, gens: list) -> SubgroupEmbedding:
    """Subgroup generated by ``gens``, with a derived presentation.

    The subgroup's polycyclic sequence is built center-first: a basis of the
    central part of H comes first, then the remaining given generators, so
    that every swap rule lands in the earlier (central) part.  Class <= 2 is
    required, matching the collection model.
    """
    for x in gens:
        if x.group is not g:
            raise GroupError("generators must belong to the ambient group")
    mul = g.mul_table()
    gen_idx = [x.index for x in gens]
    elems = _closure_indices(g, gen_idx)
    order = len(elems)
    if order == g.order:
        emb = SubgroupEmbedding(g, g, list(gens), list(g.elements()), [])
        emb.transversal = [g.identity()]
        return emb

    ea = np.array(elems)
    central = [x for x in elems if (mul[x, ea] == mul[ea, x]).all()]
    seq_idx: list[int] = []
    span = {g.identity().index}

    def add_to_seq(x):
        nonlocal span
        if x in span:
            return
        seq_idx.append(x)
        span = set(_closure_indices(g, seq_idx))

    def idx_order(x):
        k, acc, e = 1, x, g.identity().index
        while acc != e:
            acc = int(mul[acc, x])
            k += 1
        return k

    for x in sorted(central, key=lambda i: (-idx_order(i), i)):
        add_to_seq(x)
    for x in gen_idx:
        add_to_seq(x)
    if len(span) != order:
        raise GroupError("could not build a polycyclic sequence")
    seq = [Element(g, g.exps_of_index(i)) for i in seq_idx]

    # relative orders along the chain; drop redundant members
    def chain_orders(s):
        sizes = [1] + [len(_closure_indices(g, [x.index for x in s[: t + 1]]))
                       for t in range(len(s))]
        return [sizes[t + 1] // sizes[t] for t in range(len(s))]

    rel_orders = chain_orders(seq)
    if any(q == 1 for q in rel_orders):
        seq = [x for x, q in zip(seq, rel_orders) if q > 1]
        rel_orders = chain_orders(seq)

    # normal-form dictionary: ambient index -> exponent tuple over seq
    d = len(seq)
    nf: dict[int, tuple] = {}

    def fill(t, prefix, elem):
        if t == d:
            nf[elem.index] = tuple(prefix)
            return
        acc = elem
        for e in range(rel_orders[t]):
            fill(t + 1, prefix + [e], acc)
            acc = acc * seq[t]

    fill(0, [], g.identity())
    if len(nf) != order:
        raise GroupError("normal forms do not enumerate the subgroup")

    comm = {}
    for j in range(d):
        for i in range(j):
            c = seq[j].inverse() * seq[i].inverse() * seq[j] * seq[i]
            w = nf[c.index]
            if any(w):
                comm[(j, i)] = w
    tails = {}
    for t in range(d):
        w = nf[(seq[t] ** rel_orders[t]).index]
        if any(w):
            tails[t] = w

    names = tuple(f"h{t}" for t in range(d)) if d else ()
    h = GroupSpec(g.p, names, tuple(rel_orders), comm, tails,
                  name=f"sub{order}of{g.name}")
    injection = [None] * order
    for amb_idx, exps in nf.items():
        injection[h.index_of_exps(exps)] = Element(g, g.exps_of_index(amb_idx))

    emb = SubgroupEmbedding(g, h, list(gens), injection, [])
    emb.transversal = coset_transversal_for(g, set(elems))
    return emb


def coset_transversal_for(g: GroupSpec, sub_indices: set) -> list:
    """Left-coset representatives in canonical order: scan the canonical
    enumeration and keep each element whose coset is new."""
    mul = g.mul_table()
    seen = np.zeros(g.order, dtype=bool)
    out = []
    sub = sorted(sub_indices)
    for idx in range(g.order):
        if not seen[idx]:
            out.append(Element(g, g.exps_of_index(idx)))
            seen[mul[idx, sub]] = True
    return out


def coset_transversal(emb: SubgroupEmbedding) -> list:
    return list(emb.transversal)


# -- group spec files -------------------------------------------------------

_WORD_TERM = re.compile(r"([A-Za-z_][A-Za-z_0-9']*)(?:\^(-?\d+))?$")


def _parse_word(word: str, names: tuple) -> tuple:
    exps = [0] * len(names)
    word = word.strip()
    if word == "1":
        return tuple(exps)
    for term in word.split("*"):
        m = _WORD_TERM.match(term.strip())
        if not m:
            raise GroupError(f"bad word term {term!r}")
        name, e = m.group(1), int(m.group(2) or 1)
        if name not in names:
            raise GroupError(f"unknown generator {name!r}")
        exps[names.index(name)] += e
    return tuple(exps)


def parse_group_file(text: str) -> GroupSpec:
    """Parse the group-spec text format.

    Built-in:   ``p = 3`` and ``n = 4`` lines select P(n).
    General:    ``p = 3``, then ``gen <name> order <q>`` lines in collection
    order, optional ``comm [X,Y] = <word>`` lines (X declared after Y, value
    [X,Y] = X^-1 Y^-1 X Y), optional ``pow <name> = <word>`` tails.  Words
    are ``1`` or ``*``-separated ``name^exp`` factors.  ``#`` starts a
    comment.
    """
    p = n = None
    gens: list[tuple[str, int]] = []
    comms: list[tuple[str, str, str]] = []
    pows: list[tuple[str, str]] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if m := re.match(r"p\s*=\s*(\d+)$", line):
            p = int(m.group(1))
        elif m := re.match(r"n\s*=\s*(\d+)$", line):
            n = int(m.group(1))
        elif m := re.match(r"gen\s+(\S+)\s+order\s+(\d+)$", line):
            gens.append((m.group(1), int(m.group(2))))
        elif m := re.match(r"comm\s*\[\s*(\S+?)\s*,\s*(\S+?)\s*\]\s*=\s*(.+)$", line):
            comms.append((m.group(1), m.group(2), m.group(3)))
        elif m := re.match(r"pow\s+(\S+)\s*=\s*(.+)$", line):
            pows.append((m.group(1), m.group(2)))
        else:
            raise GroupError(f"cannot parse line {raw!r}")
    if p is None:
        raise GroupError("missing p = <prime> line")
    if n is not None:
        if gens or comms or pows:
            raise GroupError("n = <int> selects the built-in family; no other lines allowed")
        return make_pn(p, n)
    if not gens:
        raise GroupError("no generators given")
    names = tuple(name for name, _ in gens)
    orders = tuple(q for _, q in gens)
    comm = {}
    for xj, yi, word in comms:
        if xj not in names or yi not in names:
            raise GroupError(f"unknown generator in comm [{xj},{yi}]")
        j, i = names.index(xj), names.index(yi)
        if j <= i:
            raise GroupError(f"comm [{xj},{yi}]: {xj} must be declared after {yi}")
        comm[(j, i)] = _parse_word(word, names)
    tails = {}
    for name, word in pows:
        tails[names.index(name)] = _parse_word(word, names)
    spec = GroupSpec(p, names, orders, comm, tails, name="file-group")
    if spec.order <= ASSOC_CHECK_BOUND and not spec.is_associative():
        raise GroupError("presentation is inconsistent: multiplication not associative")
    return spec
