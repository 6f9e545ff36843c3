"""JSON serialization for fields and reports.

Exact-mode coefficients travel as rational strings so round-trips are
lossless; float-mode coefficients travel as JSON numbers. Coefficient
lists are sorted, and report dumps use sorted keys, so identical inputs
produce byte-identical files.
"""

import json
from fractions import Fraction

from .harmonic import HarmonicField
from .scalars import Pi2Multiple, QQi, rat_from_str, rat_to_str


def field_to_json(field):
    coeffs = []
    for (p, q, m) in sorted(field.coeffs):
        c = field.coeffs[(p, q, m)]
        if field.mode == "exact":
            entry = {"p": p, "q": q, "m": m,
                     "re": rat_to_str(c.re), "im": rat_to_str(c.im)}
        else:
            entry = {"p": p, "q": q, "m": m, "re": c.real, "im": c.imag}
        coeffs.append(entry)
    return {"truncation": field.truncation, "mode": field.mode,
            "coefficients": coeffs}


def field_from_json(doc):
    if not isinstance(doc, dict):
        raise ValueError("field document must be an object")
    try:
        n = int(doc["truncation"])
    except (KeyError, TypeError, ValueError):
        raise ValueError("field document needs an integer 'truncation'")
    mode = doc.get("mode", "exact")
    if mode not in ("exact", "float"):
        raise ValueError("mode must be 'exact' or 'float', got %r" % (mode,))
    raw = doc.get("coefficients", [])
    if not isinstance(raw, list):
        raise ValueError("'coefficients' must be a list")
    out = HarmonicField(n, None, mode=mode)
    for i, entry in enumerate(raw):
        try:
            p, q, m = int(entry["p"]), int(entry["q"]), int(entry["m"])
            re, im = entry["re"], entry["im"]
        except (KeyError, TypeError, ValueError):
            raise ValueError("coefficient %d: need integer p,q,m and re,im" % i)
        try:
            if mode == "exact":
                val = QQi(rat_from_str(str(re)), rat_from_str(str(im)))
            else:
                val = complex(float(re), float(im))
            out._set((p, q, m), val)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError("coefficient %d (p=%s,q=%s,m=%s): %s"
                             % (i, p, q, m, exc))
    return out


def load_field(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError("%s: line %d column %d: %s"
                             % (path, exc.lineno, exc.colno, exc.msg))
    try:
        return field_from_json(doc)
    except ValueError as exc:
        raise ValueError("%s: %s" % (path, exc))


def save_field(path, field):
    dump_report(field_to_json(field), path)


def jsonable(x):
    """Recursively convert report values to JSON-safe structures."""
    if isinstance(x, HarmonicField):
        return field_to_json(x)
    if isinstance(x, Pi2Multiple):
        return {"pi2_multiple": {"re": rat_to_str(x.coef.re),
                                 "im": rat_to_str(x.coef.im)}}
    if isinstance(x, QQi):
        return {"re": rat_to_str(x.re), "im": rat_to_str(x.im)}
    if isinstance(x, Fraction):
        return rat_to_str(x)
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (bool, int, float, str)) or x is None:
        return x
    return repr(x)


def dump_report(obj, path=None):
    text = json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
