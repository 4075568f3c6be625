"""Canonical JSON forms for tensors, restrictions, certificates and reports.

Scalars are written as text (``"n"`` or ``"n/d"``), indices are 1-based and
entries are sorted lexicographically, so equal inputs serialize to equal bytes.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .asymptotic import AxiomResult, FeketeReport, IntervalEstimate, Radical
from .certify import CertBundle, FlushResult, SubrankCertificate
from .errors import ParseError, TensorLabError
from .field import FieldSpec
from .rank import ConciseResult, Decomposition
from .tensor import LegMap, Restriction, Tensor, make_tensor


def dumps(obj, pretty: bool = False) -> str:
    if pretty:
        return json.dumps(obj, sort_keys=True, indent=2) + "\n"
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


def _num(x: Fraction):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else str(x)


# -- tensors --------------------------------------------------------------------


def tensor_to_json(t: Tensor) -> dict:
    return {
        "field": t.spec.to_json(),
        "dims": list(t.dims),
        "entries": [{"idx": list(idx), "val": str(v)} for idx, v in t.items()],
    }


def tensor_from_json(obj, spec: FieldSpec | None = None) -> Tensor:
    """Parse a tensor; ``spec`` overrides the stored field."""
    try:
        spec = spec or FieldSpec.from_json(obj["field"])
        dims = obj["dims"]
        entries = [(tuple(e["idx"]), spec.parse(e["val"])) for e in obj["entries"]]
        if not isinstance(dims, list) or not all(isinstance(d, int) for d in dims):
            raise ParseError("dims must be a list of integers")
        return make_tensor(spec, dims, entries)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed tensor JSON: {exc}") from exc
    except TensorLabError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"invalid tensor: {exc}") from exc


def legmap_to_json(m: LegMap) -> dict:
    return {"rows": m.rows, "cols": m.cols, "data": [[str(x) for x in row] for row in m.data]}


def legmap_from_json(obj, spec: FieldSpec) -> LegMap:
    try:
        m = LegMap(spec, [[spec.parse(x) for x in row] for row in obj["data"]])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed leg map: {exc}") from exc
    if (m.rows, m.cols) != (obj.get("rows", m.rows), obj.get("cols", m.cols)):
        raise ParseError("leg map rows/cols disagree with data")
    return m


def restriction_to_json(r: Restriction) -> dict:
    return {"legs": [legmap_to_json(m) for m in r.legs]}


def restriction_from_json(obj, spec: FieldSpec) -> Restriction:
    try:
        return Restriction([legmap_from_json(m, spec) for m in obj["legs"]])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed restriction: {exc}") from exc


def decomposition_to_json(d: Decomposition) -> dict:
    return {
        "field": d.spec.to_json(),
        "terms": [[[str(x) for x in vec] for vec in term] for term in d.terms],
    }


def decomposition_from_json(obj, spec: FieldSpec | None = None) -> Decomposition:
    try:
        spec = spec or FieldSpec.from_json(obj["field"])
        return Decomposition.build(spec, [[[spec.parse(x) for x in vec] for vec in term] for term in obj["terms"]])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed decomposition: {exc}") from exc


# -- certificates -----------------------------------------------------------------


def cert_to_json(c: SubrankCertificate) -> dict:
    return {"i": c.i, "j": c.j, "r": c.r, "restriction": restriction_to_json(c.restriction)}


def cert_from_json(obj, spec: FieldSpec) -> SubrankCertificate:
    try:
        return SubrankCertificate(obj["i"], obj["j"], obj["r"], restriction_from_json(obj["restriction"], spec))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed certificate: {exc}") from exc


def bundle_to_json(b: CertBundle) -> dict:
    return {
        "I": list(b.I),
        "R_I": b.flattening,
        "certs": {
            f"{i},{j}": {"r": c.r, "restriction": restriction_to_json(c.restriction)}
            for (i, j), c in b.certs.items()
        },
        "product": b.certified_product,
        "guaranteed": b.guaranteed,
        "seed": b.seed,
    }


def bundle_from_json(obj, spec: FieldSpec) -> CertBundle:
    try:
        certs = {}
        for key, c in obj["certs"].items():
            i, j = (int(x) for x in key.split(","))
            certs[(i, j)] = SubrankCertificate(i, j, c["r"], restriction_from_json(c["restriction"], spec))
        return CertBundle(
            tuple(obj["I"]), certs, obj["product"], obj["R_I"], obj["guaranteed"], obj["seed"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed certificate bundle: {exc}") from exc


def flush_to_json(f: FlushResult) -> dict:
    return {"U": legmap_to_json(f.U), "block_ranks": list(f.block_ranks), "attempts": f.attempts}


def concise_to_json(c: ConciseResult) -> dict:
    return {
        "concise": tensor_to_json(c.concise),
        "forward": restriction_to_json(c.forward),
        "backward": restriction_to_json(c.backward),
    }


# -- reports ------------------------------------------------------------------------


def radical_to_json(r: Radical) -> dict:
    return {
        "base": _num(r.base),
        "exp_num": r.exponent.numerator,
        "exp_den": r.exponent.denominator,
        "decimal": r.decimal(),
    }


def fekete_to_json(rep: FeketeReport) -> dict:
    levels = []
    for lv in rep.levels:
        item = {"n": lv.n, "value": _num(lv.value), "root": radical_to_json(lv.root)}
        if lv.provenance:
            item["provenance"] = lv.provenance
        levels.append(item)
    return {
        "tensor": rep.tensor_id,
        "functional": rep.functional,
        "levels": levels,
        "running_bound": radical_to_json(rep.running_bound),
    }


def interval_to_json(iv: IntervalEstimate) -> dict:
    return {
        "lower": radical_to_json(iv.lower),
        "upper": radical_to_json(iv.upper),
        "lower_witness": list(iv.lower_witness),
        "upper_witness": list(iv.upper_witness),
        "levels": fekete_to_json(iv.report)["levels"],
    }


def _witness_to_json(item):
    if isinstance(item, Tensor):
        return tensor_to_json(item)
    if isinstance(item, Restriction):
        return restriction_to_json(item)
    return item


def axiom_report_to_json(report: dict[str, AxiomResult]) -> dict:
    return {
        name: {
            "checked": res.checked,
            "inconclusive": res.inconclusive,
            "passed": res.ok,
            "violations": [[_witness_to_json(w) for w in v] for v in res.violations],
        }
        for name, res in report.items()
    }
