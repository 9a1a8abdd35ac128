"""Config, instance and table formats used by the command line front end.

Config files hold one ``key = value`` per line; instance files one prosumer
per line as ``id alpha1 alpha2 beta1 beta2 p_min p_max d_min d_max``. ``#``
starts a comment in both. Tables are comma separated with a header row and
floats printed with 9 significant digits.
"""
import csv
from pathlib import Path

import numpy as np

from .equilibrium import MarketInstance
from .exceptions import ParameterError
from .prosumer import Prosumer, QuadraticCurves

FLOAT_FORMAT = "{:.9g}"


def _strip(line):
    return line.split("#", 1)[0].strip()


def read_config(path):
    """Parse a flat ``key = value`` file into a dict of strings."""
    out = {}
    for n, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"{path}:{n}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ParameterError(f"{path}:{n}: empty key")
        out[key.lower().replace("-", "_")] = value
    return out


def read_instance(path, a):
    prosumers = []
    for n, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        parts = line.split()
        if len(parts) != 9:
            raise ParameterError(f"{path}:{n}: expected 9 fields, got {len(parts)}")
        try:
            pid = int(parts[0])
            vals = [float(x) for x in parts[1:]]
        except ValueError as exc:
            raise ParameterError(f"{path}:{n}: {exc}") from None
        prosumers.append(Prosumer.quadratic(pid, *vals))
    if not prosumers:
        raise ParameterError(f"{path}: no prosumers")
    return MarketInstance(prosumers, a)


def write_instance(path, instance):
    lines = ["# id alpha1 alpha2 beta1 beta2 p_min p_max d_min d_max"]
    for pr in instance.prosumers:
        c = pr.curves
        if not isinstance(c, QuadraticCurves):
            raise ParameterError("only quadratic prosumers can be written")
        vals = [c.alpha1, c.alpha2, c.beta1, c.beta2, pr.p_min, pr.p_max, pr.d_min, pr.d_max]
        lines.append(" ".join([str(pr.id)] + [repr(float(v)) for v in vals]))
    Path(path).write_text("\n".join(lines) + "\n")


def fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT.format(float(value))
    if value is None:
        return ""
    return str(value)


def write_table(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def read_table(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
