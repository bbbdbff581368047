"""JSON files for GW and Zarankiewicz certificates.

Floats are written with ``repr`` precision (json does this), so a file
reloads to bit-identical arrays.  A sha256 digest of the canonical payload
catches accidental edits; the mathematical checks are always rerun on load.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .hermitian import EIG_RTOL

SCHEMA = 1


class CertificateError(ValueError):
    """Malformed certificate file."""


def _digest(payload: dict) -> str:
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def _seal(payload: dict) -> dict:
    payload = {"schema": SCHEMA, **payload, "tolerance": EIG_RTOL}
    payload["digest"] = _digest(payload)
    return payload


def gw_to_dict(cert, config: dict | None = None) -> dict:
    from .gw import verify_gw_certificate

    res = verify_gw_certificate(cert)
    payload = {"kind": "gw", "n": int(cert.n), "y": [float(v) for v in cert.y],
               "margin": float(cert.margin), "converged": bool(cert.converged),
               "claimed_bound": res.nu2_lower}
    if config:
        payload["config"] = config
    return _seal(payload)


def zar_to_dict(cert, config: dict | None = None) -> dict:
    payload = {"kind": "zar", "m": int(cert.m), "t": float(cert.t), "path": cert.path,
               "margin": float(cert.margin), "converged": bool(cert.converged)}
    if cert.x_blocks is not None:
        payload["x_blocks"] = np.asarray(cert.x_blocks, dtype=float).tolist()
    if cert.s1 is not None:
        payload["s1"] = np.asarray(cert.s1, dtype=float).tolist()
    if config:
        payload["config"] = config
    return _seal(payload)


def dump(payload: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(payload) + "\n")


def _require(obj: dict, key: str, kind):
    if key not in obj:
        raise CertificateError(f"missing field {key!r}")
    v = obj[key]
    if not isinstance(v, kind) or isinstance(v, bool) and kind is not bool:
        raise CertificateError(f"field {key!r} has type {type(v).__name__}")
    return v


def parse(text: str) -> dict:
    try:
        obj = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CertificateError(f"not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise CertificateError("top level is not an object")
    if obj.get("schema") != SCHEMA:
        raise CertificateError(f"unsupported schema {obj.get('schema')!r}")
    if obj.get("kind") not in ("gw", "zar"):
        raise CertificateError(f"unknown kind {obj.get('kind')!r}")
    return obj


def gw_from_dict(obj: dict):
    from .gw import GwCertificate

    n = _require(obj, "n", int)
    y = np.array(_require(obj, "y", list), dtype=float)
    return GwCertificate(n, y, float(obj.get("margin", math.nan)), n * float(y.sum()),
                         bool(obj.get("converged", True)))


def zar_from_dict(obj: dict):
    from .bipartite import ZarCertificate

    m = _require(obj, "m", int)
    t = _require(obj, "t", (int, float))
    x = np.array(obj["x_blocks"], dtype=float) if "x_blocks" in obj else None
    s1 = np.array(obj["s1"], dtype=float) if "s1" in obj else None
    return ZarCertificate(m, float(t), x, s1, float(obj.get("margin", math.nan)),
                          bool(obj.get("converged", True)), obj.get("path", "reduced"))


@dataclass
class CheckResult:
    valid: bool
    kind: str | None
    reason: str
    summary: dict = field(default_factory=dict)


def check(text: str) -> CheckResult:
    """Parse, check the digest, and re-verify the mathematics of a certificate file."""
    try:
        obj = parse(text)
    except CertificateError as exc:
        return CheckResult(False, None, str(exc))
    kind = obj["kind"]
    body = {k: v for k, v in obj.items() if k != "digest"}
    if obj.get("digest") != _digest(body):
        return CheckResult(False, kind, "digest mismatch: file was modified after it was written")
    try:
        return _check_gw(obj) if kind == "gw" else _check_zar(obj)
    except (CertificateError, ValueError) as exc:
        return CheckResult(False, kind, str(exc))


def _check_gw(obj: dict) -> CheckResult:
    from .gw import verify_gw_certificate

    res = verify_gw_certificate(gw_from_dict(obj))
    if not res.valid:
        return CheckResult(False, "gw", res.reason)
    claimed = _require(obj, "claimed_bound", int)
    if claimed > res.nu2_lower:
        return CheckResult(False, "gw", f"claimed bound {claimed} exceeds verified {res.nu2_lower}")
    return CheckResult(True, "gw", "ok", {"n": obj["n"], "gw_upper": str(res.gw_upper),
                                          "gw_upper_float": float(res.gw_upper),
                                          "nu2_lower": res.nu2_lower, "margin": res.margin})


def _check_zar(obj: dict) -> CheckResult:
    from .bipartite import MAX_M, build_q_matrix, build_type_table, verify_zar_certificate
    from .bounds import genbound

    cert = zar_from_dict(obj)
    if not 2 <= cert.m <= MAX_M:
        return CheckResult(False, "zar", f"m={cert.m} out of range")
    res = verify_zar_certificate(cert, build_q_matrix(build_type_table(cert.m)))
    if not res.valid:
        return CheckResult(False, "zar", res.reason)
    poly = genbound(cert.m, res.certified_t)
    return CheckResult(True, "zar", "ok", {"m": cert.m, "certified_t": float(res.certified_t),
                                           "bound": str(poly), "margin": res.margin})


def check_file(path: str | Path) -> CheckResult:
    try:
        text = Path(path).read_bytes().decode("utf-8")
    except UnicodeDecodeError:
        return CheckResult(False, None, "file is not UTF-8 text")
    return check(text)
