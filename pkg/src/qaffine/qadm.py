"""qadm: command line driver for the solver and the verification checks.

    qadm --family A --rank 1 --order 3 --checks all
    qadm --family C --rank 2 --order 2 --checks solve --out c2.qaf

Prints one ``CHECK ...`` line per check and exits 0 iff none of them FAILs.
Solved artifacts are cached in ``--cache-dir`` (default: $QADM_CACHE_DIR)
when a directory is configured.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import cache
from .drinfeld import (DrinfeldError, check_congruence, check_drinfeld_relations,
                       check_gauss, extract_currents, extract_h, gauss_decompose)
from .evalrep import build_rep, invariant_vector, selfcheck
from .lops import (LOperatorError, build_evalL, check_constant_terms, check_diagonal_products,
                   check_G_relation, check_qdet, check_rll, check_w_relation)
from .report import FAIL, PASS, SKIPPED, CheckResult
from .rootdata import FAMILIES, AffineType, RootDataError
from .rsolver import (SolverError, anchor_mismatches, assemble_R, check_classical_limit,
                      check_structure, check_ybe, classical_oracle, solve_theta)

CHECKS = ("selfcheck", "solve", "structure", "classical", "ybe", "rll", "wrel", "qdet", "gauss", "drinfeld")
CACHE_ENV = "QADM_CACHE_DIR"


@dataclass
class RunConfig:
    family: str
    rank: int
    K: int
    checks: tuple
    out: str | None = None
    cache_dir: str | None = None
    jobs: int = 1

    @property
    def atype(self) -> AffineType:
        return AffineType(self.family, self.rank)


def expand_checks(text: str, atype: AffineType) -> tuple:
    names = [c.strip() for c in text.split(",") if c.strip()]
    if "all" in names:
        out = [c for c in CHECKS
               if not (c == "qdet" and atype.family != "A")
               and not (c == "drinfeld" and atype.twisted)]
        return tuple(out)
    unknown = [c for c in names if c not in CHECKS]
    if unknown:
        raise ValueError(f"unknown checks: {', '.join(unknown)}")
    return tuple(c for c in CHECKS if c in names)


class Runner:
    """Runs checks in dependency order and collects report lines."""

    def __init__(self, cfg: RunConfig, emit=print):
        self.cfg = cfg
        self.label = cfg.atype.label
        self.emit = emit
        self.lines = []
        self.failed = False
        self.cache_code = None

    def report(self, res: CheckResult):
        line = res.line(self.label, self.cfg.K)
        self.lines.append(line)
        if res.status == FAIL:
            self.failed = True
        self.emit(line)

    def skip(self, names, why):
        for n in names:
            self.report(CheckResult(n, SKIPPED, 0, f"needs {why}"))

    def _artifact(self, rep):
        cfg = self.cfg
        path = None
        if cfg.cache_dir:
            path = os.path.join(cfg.cache_dir, f"{self.label}_K{cfg.K}.qaf")
            if os.path.exists(path):
                art = cache.load(path)
                if art.K != cfg.K:
                    raise cache.CacheParseError(f"{path}: K={art.K}, expected {cfg.K}")
                return art, path
        art = solve_theta(rep, cfg.K)
        return art, path

    def run(self) -> int:
        cfg = self.cfg
        want = set(cfg.checks)
        t = cfg.atype
        rep = build_rep(t)
        inv = invariant_vector(t)

        sc = selfcheck(rep, inv)
        if "selfcheck" in want:
            for r in sc:
                self.report(r)
        downstream = [c for c in CHECKS[1:] if c in want]
        if not all(r.ok for r in sc):
            self.skip(downstream, "selfcheck")
            return self.exit_code()
        if not downstream:
            return self.exit_code()

        try:
            art, cpath = self._artifact(rep)
        except (SolverError, cache.CacheError) as exc:
            if isinstance(exc, cache.CacheError):
                self.cache_code = exc.exit_code
            self.report(CheckResult("solve", FAIL, 0, str(exc)))
            self.skip([c for c in downstream if c != "solve"], "solve")
            return self.exit_code()
        bad = anchor_mismatches(art, rep)
        solve_res = CheckResult("solve", FAIL if bad else PASS, 0 if bad else art.K,
                                f"convention={art.convention}" + (f" anchor mismatch at {bad}" if bad else ""))
        if "solve" in want:
            self.report(solve_res)
        if bad:
            self.skip([c for c in downstream if c != "solve"], "solve")
            return self.exit_code()

        groups = [g for g in (_r_group, _l_group, _g_group) if g.names & want]
        args = (art, cfg.family, cfg.rank, cfg.K, tuple(sorted(want)))
        if cfg.jobs > 1 and len(groups) > 1:
            with ProcessPoolExecutor(max_workers=min(cfg.jobs, len(groups))) as pool:
                outcomes = list(pool.map(_run_group, groups, [args] * len(groups)))
        else:
            memo = {}
            outcomes = [g(*args, memo=memo) for g in groups]
        for results, variant in outcomes:
            if variant is not None:
                art.ybe_variant = variant
            for r in results:
                self.report(r)
        if cfg.out or cpath:
            for p in sorted(filter(None, {cfg.out, cpath})):
                cache.save(p, art)
        return self.exit_code()

    def exit_code(self) -> int:
        if self.cache_code is not None:
            return self.cache_code
        return 1 if self.failed else 0


# ---------------------------------------------------------------------------
# independent check groups; each returns (results, ybe_variant or None)


def _context(family, rank):
    t = AffineType(family, rank)
    return t, build_rep(t), invariant_vector(t)


def _evalL(art, memo):
    if "L" not in memo:
        try:
            memo["L"] = build_evalL(art)
        except LOperatorError as exc:
            memo["L"] = exc
    return memo["L"]


def _r_group(art, family, rank, K, want, memo=None):
    _, rep, inv = _context(family, rank)
    out = []
    if "structure" in want:
        out += check_structure(art, assemble_R(art))
    if "classical" in want:
        out.append(check_classical_limit(art, classical_oracle(rep, K, inv)))
    if "ybe" in want:
        out.append(check_ybe(art, K))
    return out, art.ybe_variant


_r_group.names = {"structure", "classical", "ybe"}


def _l_group(art, family, rank, K, want, memo=None):
    t, rep, inv = _context(family, rank)
    L = _evalL(art, {} if memo is None else memo)
    mine = [c for c in ("rll", "wrel", "qdet") if c in want]
    if isinstance(L, Exception):
        later = [c for c in ("gauss", "drinfeld") if c in want]
        return ([CheckResult("lops", FAIL, 0, str(L))]
                + [CheckResult(c, SKIPPED, 0, "needs lops") for c in mine + later]), None
    out = []
    if "rll" in want:
        out.append(check_constant_terms(L, art, rep))
        out.append(check_diagonal_products(L, art))
        out.append(check_rll(L, art, K))
        if rep.G is not None:
            out.append(check_G_relation(L, rep, K))
    if "wrel" in want:
        out.append(check_w_relation(L, inv, K))
    if "qdet" in want:
        if t.family != "A":
            out.append(CheckResult("qdet", FAIL, 0, "quantum determinant is defined for family A only"))
        else:
            out.append(check_qdet(L, art, K))
    return out, None


_l_group.names = {"rll", "wrel", "qdet"}


def _g_group(art, family, rank, K, want, memo=None):
    t, rep, _ = _context(family, rank)
    L = _evalL(art, {} if memo is None else memo)
    if isinstance(L, Exception):
        if _l_group.names & set(want):
            return [], None          # reported by the L group
        return ([CheckResult("lops", FAIL, 0, str(L))]
                + [CheckResult(c, SKIPPED, 0, "needs lops") for c in ("gauss", "drinfeld") if c in want]), None
    out = []
    g = gauss_decompose(L)
    gres = check_gauss(L, g)
    if "gauss" in want:
        out.append(gres)
    if "drinfeld" not in want:
        return out, None
    if t.twisted:
        out.append(CheckResult("drinfeld", FAIL, 0, "out of scope: Drinfeld currents are "
                               "only extracted for untwisted A, B, C, D"))
        return out, None
    if not gres.ok:
        out.append(CheckResult("drinfeld", SKIPPED, 0, "needs gauss"))
        return out, None
    try:
        cur = extract_currents(g, rep, K)
        extract_h(cur, rep, K)
    except DrinfeldError as exc:
        out.append(CheckResult("drinfeld.extract", FAIL, 0, str(exc)))
        return out, None
    out.append(CheckResult("drinfeld.extract", PASS, K, cur.notes[-1]))
    out.append(check_congruence(g, cur, rep, K))
    out += check_drinfeld_relations(cur, rep, K)
    return out, None


_g_group.names = {"gauss", "drinfeld"}


def _run_group(group, args):
    return group(*args)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qadm", description=__doc__.split("\n\n")[0])
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--rank", required=True, type=int)
    p.add_argument("--order", type=int, default=2, help="truncation order K in z (default 2)")
    p.add_argument("--checks", default="all",
                   help="comma separated subset of " + ",".join(CHECKS) + " or 'all'")
    p.add_argument("--out", help="write the solved artifact to this cache file")
    p.add_argument("--cache-dir", default=os.environ.get(CACHE_ENV),
                   help=f"reuse/store solved artifacts here (default: ${CACHE_ENV})")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker processes for independent check groups (default 1)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        atype = AffineType(args.family, args.rank)
        checks = expand_checks(args.checks, atype)
    except (RootDataError, ValueError) as exc:
        print(f"qadm: {exc}", file=sys.stderr)
        return 2
    if args.order < 0 or args.jobs < 1:
        print("qadm: --order must be >= 0 and --jobs >= 1", file=sys.stderr)
        return 2
    cfg = RunConfig(args.family, args.rank, args.order, checks, args.out, args.cache_dir, args.jobs)
    try:
        return Runner(cfg).run()
    except cache.CacheError as exc:
        print(f"qadm: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
