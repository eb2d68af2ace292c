"""JSON file schemas for states, local operators and verdicts.

* state: ``{"n": n, "amplitudes": [[re, im], ...]}`` — qubit 0 is the most
  significant bit of the amplitude index.
* SLOCC operator: ``{"locals": [[[[re, im], [re, im]], [[re, im], [re, im]]], ...]}``
  with one row-major 2×2 matrix per site.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

from .errors import FormatError
from .state import SloccOperator, StateVector


def read_text(path: str | Path) -> str:
    """Read a file, or standard input when ``path`` is ``-``."""
    if str(path) == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _load_json(text: str, what: str) -> dict:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid {what} JSON: {exc.msg} (at position {exc.pos})") from None
    if not isinstance(obj, dict):
        raise FormatError(f"{what} JSON must be an object")
    return obj


def _complex(v, where: str) -> complex:
    if (not isinstance(v, (list, tuple)) or len(v) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)):
        raise FormatError(f"{where} must be a [re, im] pair")
    return complex(v[0], v[1])


def _pair(z: complex) -> list[float]:
    return [float(z.real) + 0.0, float(z.imag) + 0.0]


def state_to_record(psi: StateVector) -> dict:
    return {"n": psi.n, "amplitudes": [_pair(a) for a in psi.amp]}


def state_from_record(obj: dict) -> StateVector:
    if "n" not in obj or "amplitudes" not in obj:
        raise FormatError("state JSON needs keys 'n' and 'amplitudes'")
    n = obj["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise FormatError("'n' must be a positive integer")
    amps = obj["amplitudes"]
    if not isinstance(amps, list) or len(amps) != 1 << n:
        raise FormatError(f"'amplitudes' must list {1 << n} entries for n={n}")
    amp = np.array([_complex(a, f"amplitude #{k}") for k, a in enumerate(amps)])
    if not np.all(np.isfinite(amp)):
        raise FormatError("amplitudes must be finite")
    if not np.any(amp):
        raise FormatError("the zero vector is not a state")
    return StateVector(n, amp)


def slocc_to_record(s: SloccOperator) -> dict:
    return {"locals": [[[_pair(v) for v in row] for row in m] for m in s.locals]}


def slocc_from_record(obj: dict) -> SloccOperator:
    locs = obj.get("locals")
    if not isinstance(locs, list) or not locs:
        raise FormatError("SLOCC JSON needs a non-empty 'locals' list")
    mats = []
    for k, m in enumerate(locs):
        if not isinstance(m, list) or len(m) != 2 or not all(isinstance(r, list) and len(r) == 2 for r in m):
            raise FormatError(f"local #{k} must be a 2x2 matrix")
        mats.append([[_complex(v, f"local #{k} entry") for v in row] for row in m])
    return SloccOperator(np.array(mats))


def load_state(path: str | Path) -> StateVector:
    return state_from_record(_load_json(read_text(path), "state"))


def load_slocc(path: str | Path) -> SloccOperator:
    return slocc_from_record(_load_json(read_text(path), "SLOCC"))


def load_record(path: str | Path, what: str = "record") -> dict:
    return _load_json(read_text(path), what)


def dumps(obj) -> str:
    """Compact, key-order-preserving JSON (one line)."""
    return json.dumps(obj, separators=(", ", ": "))
