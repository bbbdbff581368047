"""Counting arguments that turn certificates into crossing-number bounds.

All arithmetic here is exact (``Fraction``); floats only enter as the decimal
values stored in certificates, which are converted exactly.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .circle_graph import zeta_complete


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


# -- polynomials in n ----------------------------------------------------------------

@dataclass(frozen=True)
class Polynomial:
    """c[0] + c[1] n + c[2] n^2 + ... with rational coefficients."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        c = [_frac(v) for v in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def of(cls, *coeffs) -> "Polynomial":
        return cls(tuple(_frac(c) for c in coeffs))

    def __call__(self, n) -> Fraction:
        return sum((c * _frac(n) ** k for k, c in enumerate(self.coeffs)), Fraction(0))

    def scale(self, factor) -> "Polynomial":
        return Polynomial(tuple(_frac(factor) * c for c in self.coeffs))

    def __str__(self) -> str:
        """Readable form; coefficients with large denominators are shown as decimals."""
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = {0: "", 1: "n"}.get(k, f"n^{k}")
            mag = abs(c)
            num = f"{mag}" if mag.denominator <= 10**4 else f"{float(mag):.10g}"
            body = mono if mag == 1 and mono else num + (f" {mono}" if mono else "")
            sign = "-" if c < 0 else "+"
            parts.append(f"{sign} {body}" if parts else f"-{body}" if c < 0 else body)
        return " ".join(parts)

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]


def genbound(m: int, t) -> Polynomial:
    """nu2(K_{m,n}) >= (t/2) n^2 - m(m-1) n / 4 for a certified QP lower bound t."""
    return Polynomial.of(0, Fraction(-m * (m - 1), 4), _frac(t) / 2)


def k7_to_k8_bipartite(bound7: Polynomial) -> Polynomial:
    """Each crossing of K_{8,n} survives in 6 of the 8 copies of K_{7,n}."""
    return bound7.scale(Fraction(8, 6))


def assemble_bipartite_bound(cert, q=None) -> Polynomial:
    """Polynomial bound from a Zarankiewicz certificate, after re-verifying it."""
    from .bipartite import build_q_matrix, build_type_table, verify_zar_certificate

    q = q if q is not None else build_q_matrix(build_type_table(cert.m))
    res = verify_zar_certificate(cert, q)
    if not res.valid:
        raise ValueError(f"invalid certificate: {res.reason}")
    return genbound(cert.m, res.certified_t)


def assemble_k7n_bound(cert, q=None) -> Polynomial:
    if cert.m != 7:
        raise ValueError(f"expected an m=7 certificate, got m={cert.m}")
    return assemble_bipartite_bound(cert, q)


# -- complete graphs -----------------------------------------------------------------

def claim_a_ratio(m: int, nu2_lower: int) -> Fraction:
    """Lower bound on lim nu2(K_n)/Z(n) from a lower bound on nu2(K_m).

    Every crossing uses four vertices and each 4-set lies in the same share of
    the m-subsets, so the crossing density of K_m carries over to K_n.
    """
    if m <= 3:
        raise ValueError("need m > 3")
    return Fraction(64 * nu2_lower, m * (m - 1) * (m - 2) * (m - 3))


def implied_gw_bound(n: int, gw_upper) -> int:
    """ceil(C(n,4) - GW upper bound), exact."""
    return math.ceil(math.comb(n, 4) - _frac(gw_upper))


def odd_to_even(nu_odd: int, n_odd: int) -> int:
    from .maxcut import odd_to_even_step

    return odd_to_even_step(nu_odd, n_odd)


# -- reports with replayable provenance ------------------------------------------------

def _step_exact_maxcut(n, optimum):
    return math.comb(n, 4) - optimum


_STEPS = {
    "exact_maxcut": _step_exact_maxcut,
    "gw_upper": implied_gw_bound,
    "odd_to_even": lambda nu, n: odd_to_even(nu, n),
    "claim_a": claim_a_ratio,
    "genbound": lambda m, t: genbound(m, Fraction(t)),
    "k7_to_k8": k7_to_k8_bipartite,
}


def _encode(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, Polynomial):
        return {"poly": v.to_json()}
    return v


@dataclass
class BoundReport:
    """A bound together with the chain of steps that produced it.

    Each step is ``{"op", "args", "output"}``; an argument equal to ``"$prev"``
    refers to the previous step's output.  ``sources`` names the certificate
    files behind the chain; without them the report is "unverified".
    """

    target: str
    value: object = None
    steps: list = field(default_factory=list)
    sources: list = field(default_factory=list)

    def apply(self, op: str, *args) -> "BoundReport":
        prev = self.value
        vals = [prev if a == "$prev" else a for a in args]
        out = _STEPS[op](*vals)
        self.steps.append({"op": op, "args": list(args), "output": out})
        self.value = out
        return self

    @property
    def status(self) -> str:
        return "verified" if self.sources else "unverified"

    def replay(self):
        """Recompute the value from the steps alone."""
        value = None
        for s in self.steps:
            vals = [value if a == "$prev" else a for a in s["args"]]
            value = _STEPS[s["op"]](*vals)
        return value

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "value": _encode(self.value),
            "status": self.status,
            "sources": list(self.sources),
            "steps": [{"op": s["op"], "args": [_encode(a) for a in s["args"]],
                       "output": _encode(s["output"])} for s in self.steps],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


# -- small-n table ------------------------------------------------------------------------

@dataclass(frozen=True)
class Table1Row:
    n: int
    maxcut: int | None
    c4: int
    nu2: int
    zeta: int
    nodes: int = 0
    status: str = "exact"
    seconds: float = 0.0

    @classmethod
    def from_result(cls, res) -> "Table1Row":
        mc = res.maxcut
        return cls(res.n, mc.optimum if mc else None, math.comb(res.n, 4), res.value,
                   zeta_complete(res.n), mc.nodes_explored if mc else 0, res.proof_status,
                   mc.seconds if mc else 0.0)

    def as_tuple(self) -> tuple:
        return self.maxcut, self.c4, self.nu2, self.zeta


def table1_text(rows) -> str:
    head = f"{'n':>4} {'maxcut':>8} {'C(n,4)':>8} {'nu2':>6} {'Z(n)':>6} {'nodes':>6} {'status':>10}"
    lines = [head]
    for r in rows:
        mc = "-" if r.maxcut is None else str(r.maxcut)
        lines.append(f"{r.n:>4} {mc:>8} {r.c4:>8} {r.nu2:>6} {r.zeta:>6} {r.nodes:>6} {r.status:>10}")
    return "\n".join(lines)


def large_n_check(n: int, gw_value: str, claimed: int) -> bool:
    """C(n,4) - GW >= claimed, with the GW value given as a decimal string."""
    return math.comb(n, 4) - Fraction(gw_value) >= claimed
