"""
Description: Body definition files (JSON) and report serialization for the command line.
             A file lists the dimension, named bodies of kind zonotope, vpolytope or ball, and
             optionally default multiplicities.
Date created: October 19th, 2026
Date last modified: October 19th, 2026
"""

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from bodies import UnitBall, VPolytope, Zonotope
from errors import BodyFileError, ContractError

logger = logging.getLogger(__name__)

KINDS = ("zonotope", "vpolytope", "ball")


@dataclass(frozen=True)
class BodyFile:
    dimension: int
    names: tuple
    bodies: tuple
    multiplicities: tuple = None

    def entries(self, multiplicities=None):
        """
        Desc: (body, multiplicity) pairs, dropping bodies with multiplicity 0.
        Parameters:
            multiplicities (list of int): Overrides the file's defaults when given.
        returns:
        (list): Entries in file order.
        raises:
        BodyFileError: If no multiplicities are known or their count is wrong.
        """
        mults = multiplicities if multiplicities is not None else self.multiplicities
        if mults is None:
            raise BodyFileError("no multiplicities: pass --mult or add \"multiplicities\" to the file")
        if len(mults) != len(self.bodies):
            raise BodyFileError(f"{len(mults)} multiplicities given for {len(self.bodies)} bodies")
        if any(int(m) < 0 for m in mults):
            raise BodyFileError(f"multiplicities must be nonnegative, got {list(mults)}")
        return [(body, int(m)) for body, m in zip(self.bodies, mults) if int(m) > 0]


def _numbers(value, where, length):
    if not isinstance(value, list) or len(value) != length:
        raise BodyFileError(f"{where}: expected an array of {length} numbers")
    for k, x in enumerate(value):
        if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
            raise BodyFileError(f"{where}[{k}]: expected a finite number, got {x!r}")
    return [float(x) for x in value]


def _points(value, where, n, allow_empty):
    if not isinstance(value, list) or (not value and not allow_empty):
        raise BodyFileError(f"{where}: expected a {'possibly empty ' if allow_empty else ''}array of points")
    return [_numbers(p, f"{where}[{k}]", n) for k, p in enumerate(value)]


def _parse_body(raw, index, n):
    where = f"$.bodies[{index}]"
    if not isinstance(raw, dict):
        raise BodyFileError(f"{where}: expected an object")
    name = raw.get("name")
    if not isinstance(name, str) or not name:
        raise BodyFileError(f"{where}.name: expected a nonempty string")
    kind = raw.get("kind")
    if kind not in KINDS:
        raise BodyFileError(f"{where}.kind: expected one of {', '.join(KINDS)}, got {kind!r}")
    try:
        if kind == "zonotope":
            gens = _points(raw.get("generators"), f"{where}.generators", n, allow_empty=True)
            offset = raw.get("offset")
            offset = _numbers(offset, f"{where}.offset", n) if offset is not None else None
            return name, Zonotope(np.array(gens).reshape(-1, n), offset, ambient_dim=n)
        if kind == "vpolytope":
            return name, VPolytope(_points(raw.get("vertices"), f"{where}.vertices", n, allow_empty=False), n)
    except ContractError as exc:
        raise BodyFileError(f"{where}: {exc}") from exc
    radius = raw.get("radius", 1)
    if radius != 1:
        raise BodyFileError(f"{where}.radius: only the unit ball (radius 1) is supported in exact paths, "
                            f"got {radius!r}")
    return name, UnitBall(n)


def parse_body_file(text, source="<string>"):
    """
    Desc: Parses and validates the JSON text of a body file.
    Parameters:
        text (str): File contents.
        source (str): Name used in error messages.
    returns:
    (BodyFile): The bodies.
    raises:
    BodyFileError: With the line/column of a JSON syntax error or the path of a bad field.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BodyFileError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise BodyFileError(f"{source}: $: expected an object")
    n = data.get("dimension")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise BodyFileError(f"{source}: $.dimension: expected an integer >= 1, got {n!r}")
    raw_bodies = data.get("bodies")
    if not isinstance(raw_bodies, list) or not raw_bodies:
        raise BodyFileError(f"{source}: $.bodies: expected a nonempty array")
    names, bodies = [], []
    try:
        for index, raw in enumerate(raw_bodies):
            name, body = _parse_body(raw, index, n)
            if name in names:
                raise BodyFileError(f"$.bodies[{index}].name: duplicate name {name!r}")
            names.append(name)
            bodies.append(body)
    except BodyFileError as exc:
        raise BodyFileError(f"{source}: {exc}") from None
    if sum(isinstance(b, UnitBall) for b in bodies) > 1:
        raise BodyFileError(f"{source}: $.bodies: at most one ball may be listed; "
                            "use its multiplicity for several copies")
    mults = data.get("multiplicities")
    if mults is not None:
        if (not isinstance(mults, list) or len(mults) != len(bodies)
                or any(isinstance(m, bool) or not isinstance(m, int) or m < 0 for m in mults)):
            raise BodyFileError(f"{source}: $.multiplicities: expected {len(bodies)} nonnegative integers")
        mults = tuple(mults)
    logger.debug("loaded %d bodies in R^%d from %s", len(bodies), n, source)
    return BodyFile(n, tuple(names), tuple(bodies), mults)


def load_body_file(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise BodyFileError(f"{path}: cannot read: {exc.strerror}") from exc
    except UnicodeDecodeError as exc:
        raise BodyFileError(f"{path}: not UTF-8: {exc.reason}") from exc
    return parse_body_file(text, str(path))


def body_to_json(name, body):
    if isinstance(body, Zonotope):
        data = {"name": name, "kind": "zonotope", "generators": body.generators.tolist()}
        if np.any(body.offset):
            data["offset"] = body.offset.tolist()
        return data
    if isinstance(body, VPolytope):
        return {"name": name, "kind": "vpolytope", "vertices": body.vertices.tolist()}
    return {"name": name, "kind": "ball", "radius": 1}


def _builtin(value):
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if hasattr(value, "to_json"):
        return value.to_json()
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(record):
    """Stable JSON text: insertion-ordered keys, shortest round-trip floats, no NaN."""
    return json.dumps(record, indent=2, default=_builtin, allow_nan=False)


def format_number(value):
    """Text output number: 12 significant digits."""
    if value is None:
        return "n/a"
    return f"{value:.12g}"


def format_agreement(value):
    """Compact scientific notation without exponent padding, e.g. 0.0e0 or 3.1e-16."""
    mantissa, exponent = f"{abs(value):.1e}".split("e")
    return f"{mantissa}e{int(exponent)}"
