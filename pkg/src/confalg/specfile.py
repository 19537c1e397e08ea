"""Load structure descriptions from JSON and validate them on the way in.

A description names a carrier, a derivation, a construction, and optional
named elements, generators, and ideal generators. Loading refuses anything
it cannot verify: derivations must satisfy Leibniz and be locally nilpotent
on a degree window, subalgebra spans must be closed, and every name must
resolve. Errors carry the best position available: exact line and column
for syntax errors, the key's first occurrence for semantic ones.
"""

import json

from .algebra import (
    AlgebraError,
    Derivation,
    DirectSum,
    MatrixAlgebra,
    MatrixPolyAlgebra,
    PolynomialAlgebra,
    ScalarAlgebra,
    Subalgebra,
)
from .constructions import make_cend, make_current, make_differential

_TOP_KEYS = {
    "name",
    "description",
    "base",
    "derivation",
    "construction",
    "elements",
    "base_elements",
    "generators",
    "ideals",
    "validate",
}


class SpecError(Exception):
    def __init__(self, message, path=None, line=None, col=None, invariant=None):
        self.path = path
        self.line = line
        self.col = col
        self.invariant = invariant
        where = []
        if path:
            where.append("at %s" % path)
        if line is not None:
            where.append("line %d" % line)
        if col is not None:
            where.append("column %d" % col)
        if where:
            message = "%s (%s)" % (message, ", ".join(where))
        super().__init__(message)


def _locate(text, token):
    """Line and column of the first occurrence of a quoted key."""
    if text is None or token is None:
        return None, None
    pos = text.find('"%s"' % token)
    if pos < 0:
        return None, None
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


class _Ctx:
    def __init__(self, text):
        self.text = text

    def fail(self, message, path=None, token=None, invariant=None):
        line, col = _locate(self.text, token)
        raise SpecError(message, path=path, line=line, col=col, invariant=invariant)


def _want(node, path, ctx, kind=dict):
    if not isinstance(node, kind):
        ctx.fail("expected %s" % kind.__name__, path=path)
    return node


def _build_base(node, path, ctx, allow_sub=True):
    _want(node, path, ctx)
    kind = node.get("kind")
    if kind == "scalar":
        return ScalarAlgebra()
    if kind == "poly":
        return PolynomialAlgebra()
    if kind in ("matrix", "matrix_poly"):
        n = node.get("n")
        if not isinstance(n, int):
            ctx.fail("%s needs an integer n" % kind, path=path + ".n", token="n")
        try:
            return MatrixAlgebra(n) if kind == "matrix" else MatrixPolyAlgebra(n)
        except AlgebraError as exc:
            ctx.fail(str(exc), path=path + ".n", token="n")
    if kind == "direct_sum":
        summands = node.get("summands")
        if not isinstance(summands, list) or not summands:
            ctx.fail("direct_sum needs a summand list", path=path + ".summands", token="summands")
        return DirectSum(
            [
                _build_base(s, "%s.summands[%d]" % (path, i), ctx, allow_sub=False)
                for i, s in enumerate(summands)
            ]
        )
    if kind == "subalgebra":
        if not allow_sub:
            ctx.fail("subalgebra cannot nest here", path=path)
        parent = _build_base(
            node.get("parent", {}), path + ".parent", ctx, allow_sub=False
        )
        spanning_node = node.get("spanning")
        if not isinstance(spanning_node, list) or not spanning_node:
            ctx.fail("subalgebra needs a spanning list", path=path + ".spanning", token="spanning")
        spanning = []
        for i, m in enumerate(spanning_node):
            spanning.append(
                _parse_base_element(parent, m, "%s.spanning[%d]" % (path, i), ctx)
            )
        degree = node.get("degree", 4)
        if not isinstance(degree, int) or degree < 0:
            ctx.fail("degree must be a nonnegative integer", path=path + ".degree", token="degree")
        try:
            sub = Subalgebra(parent, spanning, unital=node.get("unital", False), degree=degree)
            sub.check_closure()
        except AlgebraError as exc:
            ctx.fail(str(exc), path=path + ".spanning", token="spanning", invariant="closure")
        return sub
    ctx.fail("unknown base kind %r" % kind, path=path + ".kind", token="kind")


def _parse_base_element(alg, mapping, path, ctx):
    _want(mapping, path, ctx)
    try:
        return alg.parse_element(mapping)
    except (AlgebraError, ValueError, TypeError) as exc:
        ctx.fail(str(exc), path=path)


def _parse_celement(conf, mapping, path, ctx):
    _want(mapping, path, ctx)
    try:
        return conf.from_map(mapping)
    except (AlgebraError, ValueError, TypeError) as exc:
        ctx.fail(str(exc), path=path)


def _build_derivation(node, alg, path, ctx):
    if node is None:
        return Derivation.zero(alg)
    _want(node, path, ctx)
    kind = node.get("kind")
    try:
        if kind == "zero":
            return Derivation.zero(alg)
        if kind == "ddx":
            return Derivation.ddx(alg)
        if kind == "ad":
            r = _parse_base_element(alg, node.get("r", {}), path + ".r", ctx)
            return Derivation.ad(r)
        if kind == "table":
            degree = node.get("degree")
            if not isinstance(degree, int):
                ctx.fail("table derivation needs a degree", path=path + ".degree", token="degree")
            images_node = _want(node.get("images", {}), path + ".images", ctx)
            images = {}
            for name, m in images_node.items():
                key = alg.parse_key(name)
                images[key] = _parse_base_element(alg, m, "%s.images.%s" % (path, name), ctx)
            for key in alg.basis_upto(degree):
                if key not in images:
                    ctx.fail(
                        "table derivation misses basis symbol %s" % alg.key_name(key),
                        path=path + ".images",
                        token="images",
                    )
            return Derivation.table(alg, images, degree)
    except AlgebraError as exc:
        ctx.fail(str(exc), path=path)
    ctx.fail("unknown derivation kind %r" % kind, path=path + ".kind", token="kind")


class SpecData:
    """Everything a description defines, built and validated."""

    __slots__ = (
        "name",
        "conformal",
        "carrier",
        "sub",
        "derivation",
        "elements",
        "base_elements",
        "generators",
        "ideals",
        "validate_degree",
        "nilpotency_cap",
    )

    def __init__(self, **kw):
        for slot in self.__slots__:
            setattr(self, slot, kw[slot])


def load_spec(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecError("cannot read %s: %s" % (path, exc))
    return load_spec_text(text)


def load_spec_text(text):
    ctx = _Ctx(text)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError("invalid JSON: %s" % exc.msg, line=exc.lineno, col=exc.colno)
    _want(doc, "$", ctx)
    for key in doc:
        if key not in _TOP_KEYS:
            ctx.fail("unknown top-level key %r" % key, path="$.%s" % key, token=key)

    vnode = _want(doc.get("validate", {}), "$.validate", ctx)
    vdegree = vnode.get("degree", 8)
    cap = vnode.get("cap", 12)
    if not isinstance(vdegree, int) or vdegree < 0:
        ctx.fail("validate.degree must be a nonnegative integer", path="$.validate.degree")
    if not isinstance(cap, int) or cap < 1:
        ctx.fail("validate.cap must be a positive integer", path="$.validate.cap")

    if "base" not in doc:
        ctx.fail("missing base", path="$.base")
    base = _build_base(doc["base"], "$.base", ctx)
    sub = base if isinstance(base, Subalgebra) else None
    carrier = base.parent if sub is not None else base

    der = _build_derivation(doc.get("derivation"), carrier, "$.derivation", ctx)
    try:
        der.validate(degree=vdegree, cap=cap)
    except AlgebraError as exc:
        ctx.fail(str(exc), path="$.derivation", token="derivation", invariant="derivation")

    construction = doc.get("construction")
    if construction is None:
        construction = "current" if der.kind == "zero" else "differential"
    if construction == "current":
        if der.kind != "zero":
            ctx.fail(
                "current construction cannot carry a nonzero derivation",
                path="$.construction",
                token="construction",
            )
        conf = make_current(carrier)
    elif construction == "differential":
        conf = make_differential(carrier, der)
    elif construction == "cend":
        if carrier.kind != "matrix_poly":
            ctx.fail(
                "cend needs a matrix_poly carrier", path="$.base.kind", token="kind"
            )
        if der.kind not in ("zero", "ddx"):
            ctx.fail(
                "cend fixes its own derivation", path="$.derivation", token="derivation"
            )
        conf = make_cend(carrier.n)
    else:
        ctx.fail(
            "unknown construction %r" % construction,
            path="$.construction",
            token="construction",
        )

    base_elements = {}
    for name, m in _want(doc.get("base_elements", {}), "$.base_elements", ctx).items():
        base_elements[name] = _parse_base_element(
            carrier, m, "$.base_elements.%s" % name, ctx
        )

    elements = {}
    for name, m in _want(doc.get("elements", {}), "$.elements", ctx).items():
        elements[name] = _parse_celement(conf, m, "$.elements.%s" % name, ctx)

    generators = []
    gen_node = doc.get("generators", [])
    if not isinstance(gen_node, list):
        ctx.fail("generators must be a list", path="$.generators", token="generators")
    for i, name in enumerate(gen_node):
        if not isinstance(name, str):
            ctx.fail("generator names must be strings", path="$.generators[%d]" % i)
        if name in elements:
            generators.append((name, elements[name]))
            continue
        try:
            generators.append((name, conf.named_element(name)))
        except AlgebraError:
            ctx.fail("unresolvable generator %r" % name, path="$.generators[%d]" % i, token=name)

    ideals = {}
    for iname, gen_list in _want(doc.get("ideals", {}), "$.ideals", ctx).items():
        if not isinstance(gen_list, list) or not gen_list:
            ctx.fail("ideal %r needs a generator list" % iname, path="$.ideals.%s" % iname, token=iname)
        gens = []
        for i, entry in enumerate(gen_list):
            if isinstance(entry, str):
                if entry not in base_elements:
                    ctx.fail(
                        "unknown base element %r" % entry,
                        path="$.ideals.%s[%d]" % (iname, i),
                        token=entry,
                    )
                gens.append(base_elements[entry])
            else:
                gens.append(
                    _parse_base_element(carrier, entry, "$.ideals.%s[%d]" % (iname, i), ctx)
                )
        ideals[iname] = gens

    return SpecData(
        name=doc.get("name"),
        conformal=conf,
        carrier=carrier,
        sub=sub,
        derivation=der,
        elements=elements,
        base_elements=base_elements,
        generators=generators,
        ideals=ideals,
        validate_degree=vdegree,
        nilpotency_cap=cap,
    )


__all__ = ["SpecError", "SpecData", "load_spec", "load_spec_text"]
