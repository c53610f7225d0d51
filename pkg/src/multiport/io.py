"""JSON formats for networks, schemes, graphs and cached connections."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .cascade import CascadeCache
from .connection import ConnectionScheme
from .graph import Graph
from .network import NetworkSystem, PortPartition
from .reduction import build_global, build_reduced, make_plan


class ParseError(ValueError):
    """Malformed input file; the message names the file and field."""


def _load(path) -> object:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _complex(x, where: str) -> complex:
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return complex(x[0], x[1])
    raise ParseError(f"{where}: expected a number or [re, im], got {x!r}")


def matrix_from_json(data, where: str = "matrix") -> np.ndarray:
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise ParseError(f"{where}: expected a list of rows")
    rows = [[_complex(v, f"{where}[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(data)]
    if rows and len({len(r) for r in rows}) != 1:
        raise ParseError(f"{where}: rows have different lengths")
    return np.array(rows, dtype=complex).reshape(len(rows), len(rows[0]) if rows else 0)


def matrix_to_json(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def vector_to_json(v) -> list:
    return [[float(x.real), float(x.imag)] for x in np.asarray(v, dtype=complex).ravel()]


def vector_from_json(data, where: str = "vector") -> np.ndarray:
    if not isinstance(data, list):
        raise ParseError(f"{where}: expected a list")
    return np.array([_complex(v, f"{where}[{i}]") for i, v in enumerate(data)], dtype=complex)


def network_from_json(data: dict, where: str = "network", name: str = "") -> NetworkSystem:
    if not isinstance(data, dict):
        raise ParseError(f"{where}: expected an object")
    for key in ("ports", "matrix"):
        if key not in data:
            raise ParseError(f"{where}: missing field {key!r}")
    m = matrix_from_json(data["matrix"], f"{where}.matrix")
    n = data["ports"]
    if not isinstance(n, int) or m.shape != (n, n):
        raise ParseError(f"{where}.matrix: expected {n}x{n}, got {m.shape}")
    sets = data.get("sets", {"N": list(range(n))})
    if not isinstance(sets, dict):
        raise ParseError(f"{where}.sets: expected an object")
    z0 = data.get("z0")
    if isinstance(z0, list):
        z0 = [_complex(v, f"{where}.z0[{i}]") for i, v in enumerate(z0)]
    try:
        part = PortPartition(n, sets)
        return NetworkSystem(m, part, data.get("representation", "S"), z0,
                             data.get("name", name))
    except (ValueError, KeyError) as exc:
        raise ParseError(f"{where}: {exc}") from None


def network_to_json(sys: NetworkSystem) -> dict:
    z0 = sys.reference
    return {
        "name": sys.name,
        "representation": sys.representation.value,
        "ports": sys.n_ports,
        "sets": sys.partition.as_dict(),
        "matrix": matrix_to_json(sys.matrix),
        "z0": float(z0[0].real) if np.all(z0 == z0[0]) and np.all(z0.imag == 0) and z0.size
        else vector_to_json(z0),
    }


def load_network(path) -> NetworkSystem:
    return network_from_json(_load(path), str(path), Path(path).stem)


def load_matrix(path) -> np.ndarray:
    """A bare matrix or the matrix of a network file."""
    data = _load(path)
    if isinstance(data, dict):
        return network_from_json(data, str(path)).matrix
    return matrix_from_json(data, str(path))


def scheme_from_json(data: dict, networks: dict[str, NetworkSystem], where="scheme"):
    if not isinstance(data, dict) or "systems" not in data:
        raise ParseError(f"{where}: missing field 'systems'")
    names = data["systems"]
    missing = [n for n in names if n not in networks]
    if missing:
        raise ParseError(f"{where}.systems: no network given for {missing}")
    joins = data.get("joins", [])
    for i, j in enumerate(joins):
        if not (isinstance(j, list) and len(j) == 4):
            raise ParseError(f"{where}.joins[{i}]: expected [sysA, setA, sysB, setB]")
    try:
        return ConnectionScheme({n: networks[n] for n in names}, [tuple(j) for j in joins],
                                data.get("embedded", []))
    except (ValueError, KeyError) as exc:
        raise ParseError(f"{where}: {exc}") from None


def scheme_to_json(scheme: ConnectionScheme) -> dict:
    return {
        "systems": list(scheme.names),
        "joins": [[j.sys_a, j.set_a, j.sys_b, j.set_b] for j in scheme.joins],
        "embedded": list(scheme.embedded),
    }


def load_graph(path) -> Graph:
    data = _load(path)
    try:
        return Graph.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: invalid graph ({exc})") from None


def save_cache(path, cache: CascadeCache, scheme: ConnectionScheme, embedded=()):
    """Persist a cache with everything needed to rebuild it."""
    meta = {
        "scheme": scheme_to_json(scheme),
        "embedded": list(embedded),
        "networks": {n: network_to_json(s) for n, s in scheme.systems.items()},
        "n_updates": cache.n_updates,
    }
    with open(path, "wb") as fh:
        np.savez(fh, sbar=cache.sbar, result=cache.result, meta=np.array(json.dumps(meta)))


def load_cache(path):
    """Returns ``(cache, scheme, embedded)``."""
    try:
        with np.load(path, allow_pickle=False) as z:
            sbar, result, meta = z["sbar"], z["result"], json.loads(str(z["meta"]))
    except (OSError, KeyError, ValueError) as exc:
        raise ParseError(f"{path}: not a cache file ({exc})") from None
    networks = {n: network_from_json(d, f"{path}:{n}") for n, d in meta["networks"].items()}
    scheme = scheme_from_json(meta["scheme"], networks)
    embedded = meta["embedded"]
    if embedded:
        sup, con = build_reduced(scheme, make_plan(scheme, embedded))
    else:
        sup, con = build_global(scheme)
    return CascadeCache(sbar, sup, con, result, meta["n_updates"]), scheme, embedded
