"""Line-oriented text cache for solved Theta images.

Layout (tab separated, one record per line)::

    qaffine-cache<TAB>1
    family<TAB>B
    ...header fields, one eta<TAB><index><TAB><coords> line per weight...
    theta<TAB><key><TAB><nnz>
    <row><TAB><col><TAB><canonical scalar>
    T<TAB><dim>
    <index><TAB><canonical scalar>
    sha256<TAB><hex digest of every preceding byte>

Writes go to a temporary file in the target directory and are renamed into
place, so readers never observe a partial cache.
"""

from __future__ import annotations

import hashlib
import os
import tempfile
from fractions import Fraction

from .qfield import QScalarParseError, parse_qscalar, to_canonical_string
from .rootdata import AffineType, build_datum
from .rsolver import RArtifact
from .sparse import SMat

MAGIC = "qaffine-cache"
VERSION = 1


class CacheError(Exception):
    exit_code = 3


class CacheVersionError(CacheError):
    exit_code = 4


class CacheParseError(CacheError):
    exit_code = 5


class CacheChecksumError(CacheError):
    exit_code = 6


def _key_str(key) -> str:
    return ",".join(str(k) for k in key)


def dumps(art: RArtifact) -> str:
    d = art.datum
    N2 = art.N ** 2
    lines = [f"{MAGIC}\t{VERSION}",
             f"family\t{d.atype.family}",
             f"rank\t{d.atype.rank}",
             f"D\t{d.D}",
             f"N\t{d.N}"]
    lines += [f"eta\t{a}\t{_key_str(eta.coords)}" for a, eta in enumerate(d.eta)]
    lines += [f"K\t{art.K}",
             f"convention\t{art.convention}",
             f"ybe_variant\t{art.ybe_variant or 'unchecked'}"]
    for key in sorted(art.theta):
        X = art.theta[key]
        ents = list(X.entries())
        lines.append(f"theta\t{_key_str(key)}\t{len(ents)}")
        lines.extend(f"{i}\t{j}\t{to_canonical_string(v)}" for i, j, v in ents)
    T = art.T_diag(1)
    lines.append(f"T\t{N2}")
    lines.extend(f"{i}\t{to_canonical_string(v)}" for i, v in enumerate(T))
    body = "\n".join(lines) + "\n"
    digest = hashlib.sha256(body.encode()).hexdigest()
    return body + f"sha256\t{digest}\n"


def loads(text: str) -> RArtifact:
    lines = text.split("\n")
    first = lines[0].split("\t") if lines else []
    if len(first) != 2 or first[0] != MAGIC:
        raise CacheParseError("missing cache header")
    if first[1] != str(VERSION):
        raise CacheVersionError(f"cache version {first[1]!r}, expected {VERSION}")
    if not text.endswith("\n") or len(lines) < 3 or not lines[-2].startswith("sha256\t"):
        raise CacheParseError("missing checksum line (truncated file?)")
    body = "\n".join(lines[:-2]) + "\n"
    if hashlib.sha256(body.encode()).hexdigest() != lines[-2].split("\t", 1)[1]:
        raise CacheChecksumError("checksum mismatch")
    try:
        return _parse_body(lines[1:-2])
    except (ValueError, IndexError, KeyError, QScalarParseError) as exc:
        raise CacheParseError(f"malformed cache body: {exc}") from None


def _parse_body(lines) -> RArtifact:
    pos = 0

    def field(name):
        nonlocal pos
        k, v = lines[pos].split("\t", 1)
        if k != name:
            raise ValueError(f"expected {name!r}, found {k!r} on body line {pos + 1}")
        pos += 1
        return v

    family, rank = field("family"), int(field("rank"))
    D, N = int(field("D")), int(field("N"))
    eta = []
    for a in range(N):
        idx, coords = field("eta").split("\t")
        if int(idx) != a:
            raise ValueError(f"eta index {idx} out of sequence")
        eta.append(tuple(Fraction(c) for c in coords.split(",")))
    K = int(field("K"))
    convention, variant = field("convention"), field("ybe_variant")
    datum = build_datum(AffineType(family, rank))
    if (datum.D, datum.N) != (D, N):
        raise ValueError(f"header D={D}, N={N} do not match the root datum")
    if eta != [tuple(x.coords) for x in datum.eta]:
        raise ValueError("header weights do not match the root datum")
    theta = {}
    N2 = N * N
    while lines[pos].startswith("theta\t"):
        _, key, nnz = lines[pos].split("\t")
        pos += 1
        ents = []
        for _ in range(int(nnz)):
            i, j, v = lines[pos].split("\t")
            ents.append((int(i), int(j), parse_qscalar(v)))
            pos += 1
        theta[tuple(int(k) for k in key.split(","))] = SMat.from_entries(N2, N2, ents)
    _, dim = lines[pos].split("\t")
    pos += 1
    T = []
    for idx in range(int(dim)):
        i, v = lines[pos].split("\t")
        if int(i) != idx:
            raise ValueError(f"T index {i} out of sequence")
        T.append(parse_qscalar(v))
        pos += 1
    if pos != len(lines):
        raise ValueError("trailing lines after T")
    art = RArtifact(datum=datum, K=K, theta=theta, convention=convention,
                    ybe_variant=None if variant == "unchecked" else variant)
    if T != art.T_diag(1):
        raise ValueError("stored T does not match the root datum")
    return art


def save(path, art: RArtifact) -> None:
    data = dumps(art).encode()
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qaf-", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load(path) -> RArtifact:
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        text = raw.decode()
    except UnicodeDecodeError:
        raise CacheParseError("cache is not valid UTF-8") from None
    return loads(text)
