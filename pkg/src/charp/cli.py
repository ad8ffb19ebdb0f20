"""Command-line front end.

    charp curvature FILE          charp stratify FILE --level N
    charp pcurvature FILE         charp horizontal FILE
    charp cartier FILE            charp theta-check [FILE] --prime P --level N
    charp rees FILE               charp deform FILE --exponent E
    charp selftest --seed S

Exit status: 0 all verdicts pass, 1 some verdict failed, 2 parse error,
3 precondition violated, 4 internal error.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import selftest as _selftest
from .arith import PolyRing
from .connections import (
    DOL,
    DR,
    bracket_closure,
    cocycle_check,
    curvature,
    horizontal_fields,
    is_integrable,
    p_curvature,
    p_power_closure,
    taylor_stratification,
)
from .errors import CharPError, FlatSectionError, InfeasibleError, NonLinearPCurvature, ParseError, PreconditionError
from .frobenius import OneForm, cartier_descend, cartier_operator, cartier_splitting, theta_coalgebra_check
from .problem import Problem, load, serialize
from .rees import (
    NEITHER,
    PRESERVES,
    ConjTriple,
    FilteredModule,
    associated_higgs,
    conj_deform,
    griffiths_check,
    mconj_member,
    rees_build,
    rees_connection,
    rees_fiber,
    theta_rees_compat,
)
from .report import FAIL, INFO, PASS, Report, digest

__all__ = [
    "main",
    "cmd_curvature",
    "cmd_pcurvature",
    "cmd_stratify",
    "cmd_horizontal",
    "cmd_cartier",
    "cmd_theta_check",
    "cmd_rees",
    "cmd_deform",
    "cmd_selftest",
]

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_PRECONDITION, EXIT_INTERNAL = 0, 1, 2, 3, 4


def _max_level() -> int | None:
    raw = os.environ.get("CHARP_MAX_LEVEL")
    if not raw:
        return None
    try:
        return int(raw)
    except ValueError:
        raise PreconditionError(f"CHARP_MAX_LEVEL={raw!r} is not an integer") from None


def _check_level(level: int):
    cap = _max_level()
    if level < 0:
        raise PreconditionError("level must be nonnegative")
    if cap is not None and level > cap:
        raise PreconditionError(f"level {level} exceeds CHARP_MAX_LEVEL={cap}")


def _report(command, pr: Problem | None, extra: str = "", timing=False) -> Report:
    text = serialize(pr) if pr is not None else ""
    return Report(command, digest(text + extra), timing)


def _dname(i):
    return f"D{i + 1}"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_curvature(pr: Problem, timing=False) -> Report:
    c = pr.connection()
    rep = _report("curvature", pr, timing=timing)
    m = c.ring.nvars
    lines = []
    for i in range(m):
        for j in range(i + 1, m):
            lines.append(f"K({_dname(i)},{_dname(j)}) = {curvature(c, i, j)}")
    flat = is_integrable(c)
    rep.add("curvature", INFO, {"integrable": flat}, lines + [f"integrable: {'yes' if flat else 'no'}"])
    if c.mode == DR:
        rep.add("bracket-closure agrees with curvature", bracket_closure(horizontal_fields(c)) == flat)
    return rep


def cmd_pcurvature(pr: Problem, timing=False) -> Report:
    c = pr.connection()
    rep = _report("pcurvature", pr, timing=timing)
    try:
        psi = p_curvature(c)
    except NonLinearPCurvature as e:
        rep.add("p-curvature is O-linear", False, {"error": e})
        return rep
    lines = [f"psi({_dname(i)}) = {m}" for i, m in enumerate(psi)]
    zero = all(m.is_zero() for m in psi)
    rep.add("p-curvature", INFO, {f"psi({_dname(i)})": m for i, m in enumerate(psi)}, lines)
    rep.add("p-curvature is O-linear", PASS)
    if c.mode == DR and not c.ring.param:
        rep.add("p-power closure agrees with p-curvature", p_power_closure(horizontal_fields(c)) == zero)
    if pr.mode == "conj":
        tr = ConjTriple(c, pr.psi)
        member = mconj_member(tr) if is_integrable(c) else False
        rep.add("conjugate condition", INFO, {"member": member}, [f"p-curvature = t^p psi: {'yes' if member else 'no'}"])
    return rep


def cmd_stratify(pr: Problem, level: int, timing=False) -> Report:
    _check_level(level)
    c = pr.connection()
    rep = _report("stratify", pr, f"level={level}", timing)
    s = taylor_stratification(c, level)
    lines = [f"epsilon[{i + 1},{j + 1}] = {s.entry(i, j)}" for i in range(c.rank) for j in range(c.rank)]
    rep.add("stratification", INFO, {"level": level}, lines)
    rep.add("cocycle condition", cocycle_check(s))
    if level >= 1:
        rep.add("level-1 truncation recovers the connection", s.connection() == c)
    if level >= c.p:
        zero = all(m.is_zero() for m in p_curvature(c))
        ident = s.quotient_is_identity()
        rep.add(
            "image in P/I is the identity iff p-curvature vanishes",
            ident == zero,
            {"identity_mod_I": ident, "psi_zero": zero},
        )
    return rep


def cmd_horizontal(pr: Problem, timing=False) -> Report:
    c = pr.connection()
    rep = _report("horizontal", pr, timing=timing)
    h = horizontal_fields(c)
    lines = [f"H{k + 1} = {f}" for k, f in enumerate(h.fields)]
    br, pp = bracket_closure(h), p_power_closure(h)
    rep.add("horizontal fields", INFO, {"bracket_closed": br, "p_closed": pp}, lines)
    rep.add("bracket closure iff integrable", br == is_integrable(c))
    try:
        zero = all(m.is_zero() for m in p_curvature(c))
        rep.add("p-power closure iff p-curvature vanishes", pp == zero)
    except NonLinearPCurvature as e:
        rep.add("p-power closure iff p-curvature vanishes", False, {"error": e})
    return rep


def cmd_cartier(pr: Problem, degree_bound: int | None = None, timing=False) -> Report:
    rep = _report("cartier", pr, f"bound={degree_bound}", timing)
    base = pr.ring.without_param()
    tw = base.twisted()
    if pr.form is not None:
        omega = OneForm(base, pr.form)
        co = cartier_operator(omega, degree_bound)
        rep.add("cartier operator", INFO, {"input": omega, "output": co}, [f"C({omega}) = {co}"])
    if pr.lifts is not None:
        z = cartier_splitting(pr.lifts)
        lines = [f"zeta(d{tw.names[i]}) = {f}" for i, f in enumerate(z.images)]
        rep.add("splitting of Cartier", INFO, {f"zeta{i + 1}": f for i, f in enumerate(z.images)}, lines)
        rep.add("splitting is closed and a section of Cartier", z.is_section())
    if pr.mode is not None:
        c = pr.connection()
        if c.mode != DR or c.ring.param:
            raise PreconditionError("descent needs a DR connection over F_p[x]")
        integ = is_integrable(c)
        zero = integ and all(m.is_zero() for m in p_curvature(c))
        try:
            d = cartier_descend(c, degree_bound)
        except FlatSectionError as e:
            rep.add("descent", INFO, {"found": e.found, "rank": e.rank}, [f"descent failed: {e}"])
            rep.add("descent exists iff p-curvature vanishes", not zero, {"psi_zero": zero})
        else:
            rep.add("descent", INFO, {"frame": d.frame}, [f"flat frame = {d.frame}"])
            rep.add("descent exists iff p-curvature vanishes", zero, {"psi_zero": zero})
    if len(rep.records) == 0:
        raise PreconditionError("nothing to do: provide [form], [lift] or [connection]")
    return rep


def cmd_theta_check(ring: PolyRing, level: int, r_max: int = 3, pr: Problem | None = None, timing=False) -> Report:
    _check_level(level)
    rep = _report("theta-check", pr, f"p={ring.p};m={ring.nvars};level={level}", timing)
    res = theta_coalgebra_check(ring, level)
    rep.add("counit diagram", res.counit)
    rep.add("source/target diagram", res.source_target)
    rep.add("comultiplication diagram", res.comultiplication)
    tr = theta_rees_compat(ring, r_max)
    rep.add(f"theta maps P^<pr into F_r for r <= {r_max}", tr.ok, {"checked": tr.checked})
    return rep


def cmd_rees(pr: Problem, timing=False) -> Report:
    if pr.filtration is None:
        raise PreconditionError("rees needs a [filtration] section")
    c = pr.connection()
    rep = _report("rees", pr, timing=timing)
    v = FilteredModule.from_steps(pr.p, c.rank, pr.filtration)
    r = rees_build(v)
    f0, f1 = rees_fiber(r, 0), rees_fiber(r, 1)
    rep.add(
        "rees module",
        INFO,
        {"generators": r, "weights": list(v.weights)},
        [f"rees generators: {r}", f"fibre t=0: {f0}", f"fibre t=1: {f1}"],
    )
    rep.add("rees module is free", r.is_free() and sum(len(b) for b in f0.values()) == c.rank and len(f1) == c.rank)
    if c.mode == DOL:
        h = associated_higgs(v, c)
        rep.add("associated higgs", INFO, {"higgs": h}, [f"associated higgs: {h}"])
        return rep
    g = griffiths_check(v, c)
    rep.add("griffiths", INFO, {"class": g}, [f"class: {g}"])
    rep.add("rees criterion agrees", (rees_connection(v, c, 0) is not None) == (g == PRESERVES)
            and (rees_connection(v, c, 1) is not None) == (g != NEITHER))
    if g != NEITHER:
        h = associated_higgs(v, c)
        rep.add("associated higgs", INFO, {"higgs": h, "zero": h.is_zero()}, [f"associated higgs: {h}"])
        rep.add("preserves iff associated higgs vanishes", h.is_zero() == (g == PRESERVES))
    return rep


def cmd_deform(pr: Problem, exponent: int | None = None, timing=False) -> Report:
    if pr.higgs is None:
        raise PreconditionError("deform needs a [higgs] section")
    base = pr.ring.without_param()
    lifts = pr.lifts if pr.lifts is not None else tuple(base.zero() for _ in base.names)
    e = exponent if exponent is not None else pr.option("exponent", base.p)
    rep = _report("deform", pr, f"exponent={e}", timing)
    res = conj_deform(pr.higgs, cartier_splitting(lifts), e)
    lines = [f"A{j + 1} = {m}" for j, m in enumerate(res.triple.connection.matrices)]
    lines += [f"psi({_dname(i)}) = {m}" for i, m in enumerate(res.p_curvature)]
    lines += [
        f"kappa = {res.kappa}",
        f"measured t-exponent = {res.measured_exponent}",
        f"raw match (t^e F*psi): {'yes' if res.raw_match else 'no'}",
        f"normalized match (t^e kappa F*psi): {'yes' if res.normalized_match else 'no'}",
        f"conjugate condition (t^p kappa F*psi): {'yes' if res.member else 'no'}",
    ]
    rep.add(
        "deformation",
        INFO,
        {
            "exponent": e,
            "kappa": res.kappa,
            "measured_exponent": res.measured_exponent,
            "raw_match": res.raw_match,
            "member": res.member,
        },
        lines,
    )
    rep.add("deformed connection is integrable", res.integrable)
    rep.add("p-curvature equals t^e kappa F*psi", res.normalized_match)
    if e == base.p:
        rep.add("conjugate condition holds", res.member)
    return rep


def cmd_selftest(seed: int = 0, size: int = 10, timing=False) -> Report:
    rep = Report("selftest", digest(f"seed={seed};size={size}"), timing)
    for name, ok, witness in _selftest.run(seed, size):
        rep.add(name, ok, witness)
    return rep


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", type=int, help="override the prime of the problem file")
    common.add_argument("--level", type=int, help="truncation level")
    common.add_argument("--degree-bound", type=int, help="polynomial degree bound for linear solves")
    common.add_argument("--seed", type=int, default=0, help="64-bit seed for randomized checks")
    common.add_argument("--exponent", type=int, help="t-exponent of the deformation")
    common.add_argument("--json", metavar="PATH", help="write newline-delimited JSON records to PATH")
    common.add_argument("-q", "--quiet", action="store_true", help="suppress the human summary")
    common.add_argument("--timing", action="store_true", help="record per-check timings")

    ap = argparse.ArgumentParser(prog="charp", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("curvature", "pcurvature", "stratify", "horizontal", "cartier", "rees", "deform"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("file")
    sp = sub.add_parser("theta-check", parents=[common])
    sp.add_argument("file", nargs="?")
    sp.add_argument("--vars", type=int, default=1, help="number of variables when no file is given")
    sp = sub.add_parser("selftest", parents=[common])
    sp.add_argument("--size", type=int, default=10, help="instances per randomized check")
    return ap


def _dispatch(args) -> Report:
    if args.seed < 0 or args.seed >= 2 ** 64:
        raise PreconditionError("seed must fit in 64 bits")
    if args.command == "selftest":
        return cmd_selftest(args.seed, args.size, args.timing)
    if args.command == "theta-check":
        pr = load(args.file, args.prime) if args.file else None
        if pr is not None:
            ring = pr.ring.without_param()
        else:
            if args.prime is None:
                raise PreconditionError("theta-check needs --prime or a problem file")
            ring = PolyRing(args.prime, tuple(f"x{i + 1}" for i in range(args.vars)) if args.vars > 1 else ("x",))
        level = args.level if args.level is not None else (pr.option("level") if pr else None)
        level = ring.p ** 2 if level is None else level
        return cmd_theta_check(ring, level, pr=pr, timing=args.timing)
    pr = load(args.file, args.prime)
    if args.command == "curvature":
        return cmd_curvature(pr, args.timing)
    if args.command == "pcurvature":
        return cmd_pcurvature(pr, args.timing)
    if args.command == "stratify":
        level = args.level if args.level is not None else pr.option("level", pr.p)
        return cmd_stratify(pr, level, args.timing)
    if args.command == "horizontal":
        return cmd_horizontal(pr, args.timing)
    if args.command == "cartier":
        bound = args.degree_bound if args.degree_bound is not None else pr.option("degree_bound")
        return cmd_cartier(pr, bound, args.timing)
    if args.command == "rees":
        return cmd_rees(pr, args.timing)
    if args.command == "deform":
        return cmd_deform(pr, args.exponent, args.timing)
    raise AssertionError(args.command)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rep = _dispatch(args)
    except ParseError as e:
        where = getattr(args, "file", None) or "<input>"
        print(f"{where}:{e}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (PreconditionError, InfeasibleError, ValueError) as e:
        print(f"precondition: {e}", file=sys.stderr)
        return EXIT_PRECONDITION
    except CharPError as e:
        print(f"internal: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as e:  # noqa: BLE001
        print(f"internal: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    if not args.quiet:
        sys.stdout.write(rep.human())
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(rep.ndjson())
    return EXIT_OK if rep.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
