"""ordkit command line front end."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Sequence

from . import circular as circ
from .groups import B3Group, Group, PSL2ZGroup, TararinGroup, ball_enumerate, enumerate_until, get_group
from .orders import (
    BudgetExceeded,
    OracleError,
    SignOracle,
    dd_order,
    dsum_order,
    enumerate_partial_cones,
    isolation_evidence,
    check_order_axioms,
    rational_order,
    tararin_orders,
    z2_irrational,
    z2_lex,
    z_natural,
)
from .realization import build_realization, gap_spectrum
from .svg import circle_svg, orbit_svg

SCHEMA = "ordkit/1"


class DomainError(Exception):
    pass


def _eps(text: str) -> tuple[int, ...]:
    if not text or any(c not in "+-" for c in text):
        raise DomainError(f"epsilon signature must be a string of + and -, got {text!r}")
    return tuple(1 if c == "+" else -1 for c in text)


def make_order(G: Group, name: str, eps: str | None = None) -> SignOracle:
    gname = G.name
    if isinstance(G, B3Group):
        if name in ("dd", "lambda3"):
            return dd_order(G)
        if name in ("geometric", "pi1"):
            return circ.braid_lift(circ.build_rep(), 1).oracle(G)
        if name in ("lambda5", "pi5"):
            return circ.braid_lift(circ.build_rep(), 5).oracle(G)
    elif isinstance(G, TararinGroup):
        if name == "tararin":
            orders = tararin_orders(G)
            key = _eps(eps or "+" * (G.spec.n + 1))
            if key not in orders:
                raise DomainError(f"signature needs {G.spec.n + 1} signs")
            return orders[key]
    elif gname == "z":
        if name in ("natural", "reciprocal"):
            return z_natural(name == "reciprocal")
    elif gname == "z2":
        if name == "lex":
            return z2_lex()
        if name == "irrational":
            return z2_irrational()
    elif gname == "dsum":
        if name == "top":
            return dsum_order(G)
    elif gname == "dyadic":
        if name in ("rational", "reciprocal"):
            return rational_order(G, name == "reciprocal")
    if isinstance(G, PSL2ZGroup):
        raise DomainError("PSL(2,Z) has torsion and carries no left order; use the circular commands")
    raise DomainError(f"unknown order {name!r} for group {gname!r}")


DEFAULT_ORDER = {"b3": "dd", "z": "natural", "z2": "lex", "klein": "tararin", "tararin2": "tararin", "dsum": "top", "dyadic": "rational"}


def _group(args) -> Group:
    try:
        return get_group(args.group)
    except ValueError as exc:
        raise DomainError(str(exc)) from None


def _order(args, G: Group) -> SignOracle:
    return make_order(G, args.order or DEFAULT_ORDER.get(G.name, ""), getattr(args, "eps", None))


def _parse(G: Group, text: str):
    if text in ("e", "1", ""):
        return G.identity()
    try:
        return G.parse(text)
    except (ValueError, KeyError) as exc:
        raise DomainError(f"cannot parse {text!r}: {exc}") from None


def _emit(args, payload, text: str | None = None) -> None:
    if isinstance(payload, dict):
        payload = {"schema": SCHEMA, **payload}
    out = text if text is not None else json.dumps(payload, indent=2, sort_keys=False) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def _frac(q: Fraction) -> dict:
    return {"num": q.numerator, "den": q.denominator}


# ---------------------------------------------------------------------------


def cmd_compare(args) -> None:
    G = _group(args)
    lam = _order(args, G)
    f, g = _parse(G, args.word1), _parse(G, args.word2)
    c = lam.compare(f, g)
    sys.stdout.write(f"{args.word1} {'<' if c < 0 else '=' if c == 0 else '>'} {args.word2}\n")


def cmd_ball(args) -> None:
    G = _group(args)
    els = ball_enumerate(G, args.radius)
    _emit(args, {"group": G.name, "radius": args.radius, "elements": [G.to_json(g)["normal_form"] for g in els]})


def cmd_realize(args) -> None:
    G = _group(args)
    lam = _order(args, G)
    R = build_realization(lam, enumerate_until(G, args.n))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "word", "numerator", "exponent"])
    for i, (g, v) in enumerate(R.entries):
        w.writerow([i, G.format(g), v.numerator, v.exponent])
    _emit(args, None, buf.getvalue())
    if args.svg:
        values = [v.to_fraction() for _, v in R.entries]
        gap = None
        try:
            rep = gap_spectrum(R)
            gap = rep.base_gap
        except ValueError:
            pass
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(orbit_svg(values, R.x0.to_fraction(), gap))


def _required(G: Group, text: str | None) -> list:
    if not text:
        return []
    return [_parse(G, w) for w in text.split(",") if w]


def cmd_cones(args) -> None:
    G = _group(args)
    req = _required(G, args.require)
    cones = enumerate_partial_cones(G, args.radius, req, limit=args.limit)
    survivors = [{"assignment": {G.format(g): s for g, s in c.assignment.items()}} for c in cones]
    _emit(args, {"group": G.name, "radius": args.radius, "survivors": survivors})


def cmd_isolation(args) -> None:
    G = _group(args)
    if G.name == "b3" and args.alphabet:
        G = B3Group(args.alphabet)
    lam = _order(args, G)
    S = _required(G, args.require)
    traj = [isolation_evidence(lam, S, r, limit=args.limit) for r in range(1, args.radius + 1) if _in_ball(G, S, r)]
    _emit(args, {"group": G.name, "order": lam.label, "trajectory": traj})


def _in_ball(G: Group, S, r) -> bool:
    ball = set(ball_enumerate(G, r))
    return all(s in ball for s in S)


def cmd_tararin(args) -> None:
    G = _group(args)
    if not isinstance(G, TararinGroup):
        raise DomainError("tararin needs a Tararin group (klein, tararin2)")
    out = []
    gens = [G.level_generator(i) for i in range(G.spec.n + 1)]
    for eps, lam in tararin_orders(G).items():
        rep = check_order_axioms(lam, args.radius)
        out.append({
            "eps": "".join("+" if e > 0 else "-" for e in eps),
            "generator_signs": [lam.sign(s) for s in gens],
            "violations": len(rep["violations"]),
        })
    _emit(args, {"group": G.name, "count": len(out), "orders": out})


def _rep(args) -> circ.Rep:
    if args.rep == "modular":
        return circ.build_rep("modular")
    if args.c is not None:
        return circ.build_rep("deformed", Fraction(args.c), Fraction(args.d))
    return circ.default_rep()


def cmd_circular(args) -> None:
    rep = _rep(args)
    els = ball_enumerate(PSL2ZGroup(), args.ball)
    cfg = circ.orbit_config(rep, els)
    _emit(args, {"rep": rep.metadata(), "ball": args.ball, "cyclic_order": cfg.to_json()})


def cmd_pingpong(args) -> None:
    rep = _rep(args) if args.rep == "modular" or args.c is not None else circ.build_rep("deformed")
    res = circ.ping_pong_verify(rep, circ.guardian_intervals(rep))
    _emit(args, {"rep": rep.metadata(), "pass": res["ok"], "witness": res["witness"]})


def cmd_rot(args) -> None:
    rep = _rep(args)
    g = _parse(PSL2ZGroup(), args.element)
    r = circ.kfold_rotation(rep, args.k, g, args.max_period)
    _emit(args, {"k": args.k, "element": args.element, "rot": _frac(r)})


def cmd_lift(args) -> None:
    rep = _rep(args)
    G = B3Group()
    g = _parse(G, args.element)
    L = circ.braid_lift(rep, args.k)
    w, p = L.lift_eval(g)
    sign = 0 if g.is_identity() else L.sign_of(g)
    _emit(args, {"k": args.k, "t_sign": L.sign, "element": args.element, "winding": w,
                 "point": circ.point_json(p), "sign": sign})


def cmd_reconstruct(args) -> None:
    rep = _rep(args)
    first = circ.orbit_config(rep, circ.FIRST_GENERATION).elements()
    order = circ.reconstruct_by_generations(first, args.depth, rep)
    direct = circ.orbit_config(rep, order).cyclic_elements(circ.E)
    _emit(args, {"rep": rep.metadata(), "depth": args.depth, "count": len(order),
                 "cyclic_order": [str(g) for g in order], "matches_direct_evaluation": order == direct})


def cmd_svg_circle(args) -> None:
    rep = _rep(args)
    pts = [(str(g), rep.point(g)) for g in circ.FIRST_GENERATION]
    arcs = [(gd.J.left, gd.J.right) for gd in circ.guardian_intervals(rep).values()]
    _emit(args, None, circle_svg(pts, arcs))


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", default="b3")
    common.add_argument("--order", default=None)
    common.add_argument("--radius", type=int, default=3)
    common.add_argument("--seed", type=int, default=0, help="accepted for reproducibility; commands are deterministic")
    common.add_argument("--out", default=None)
    common.add_argument("--format", choices=["json", "csv", "svg", "text"], default=None)

    rep = argparse.ArgumentParser(add_help=False)
    rep.add_argument("--rep", choices=["deformed", "modular"], default="deformed")
    rep.add_argument("--c", default=None, help="deformation parameter c (with --d); default 5/4")
    rep.add_argument("--d", default=None)

    p = argparse.ArgumentParser(prog="ordkit", description="Left and circular orders: exact computations.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("compare", parents=[common], help="compare two words under an order")
    s.add_argument("--eps", default=None)
    s.add_argument("word1")
    s.add_argument("word2")
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("ball", parents=[common], help="list the ball of a radius")
    s.set_defaults(func=cmd_ball)

    s = sub.add_parser("realize", parents=[common], help="dynamical realization as CSV")
    s.add_argument("-n", type=int, default=200)
    s.add_argument("--eps", default=None)
    s.add_argument("--svg", default=None)
    s.set_defaults(func=cmd_realize)

    s = sub.add_parser("cones", parents=[common], help="partial cones on a ball")
    s.add_argument("--require", default=None, help="comma separated words forced positive")
    s.add_argument("--limit", type=int, default=None)
    s.set_defaults(func=cmd_cones)

    s = sub.add_parser("isolation", parents=[common], help="survivor trajectory up to --radius")
    s.add_argument("--require", default=None)
    s.add_argument("--eps", default=None)
    s.add_argument("--alphabet", default=None, help="B3 generating letters, e.g. yYzZ")
    s.add_argument("--limit", type=int, default=5000)
    s.set_defaults(func=cmd_isolation)

    s = sub.add_parser("tararin", parents=[common], help="all orders of a Tararin group")
    s.set_defaults(func=cmd_tararin, group="klein")

    s = sub.add_parser("circular", parents=[common, rep], help="cyclic order of an orbit")
    s.add_argument("--ball", type=int, default=2)
    s.set_defaults(func=cmd_circular)

    s = sub.add_parser("pingpong", parents=[common, rep], help="certify the ping-pong inclusions")
    s.set_defaults(func=cmd_pingpong)

    s = sub.add_parser("rot", parents=[common, rep], help="rotation number on the k-fold lift")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--element", default="al.be")
    s.add_argument("--max-period", type=int, default=12)
    s.set_defaults(func=cmd_rot)

    s = sub.add_parser("lift", parents=[common, rep], help="position of g x0 on the line")
    s.add_argument("--k", type=int, default=1)
    s.add_argument("element")
    s.set_defaults(func=cmd_lift)

    s = sub.add_parser("reconstruct", parents=[common, rep], help="cyclic order by generations")
    s.add_argument("--depth", type=int, default=2)
    s.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("svg-circle", parents=[common, rep], help="circle diagram of the first generation")
    s.set_defaults(func=cmd_svg_circle)
    return p


DOMAIN_ERRORS = (
    DomainError,
    OracleError,
    BudgetExceeded,
    circ.NoLift,
    circ.LiftError,
    circ.FreenessError,
    circ.DegenerateInterval,
    circ.PingPongFailed,
    ValueError,
)


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except DOMAIN_ERRORS as exc:
        err = {"schema": SCHEMA, "error": type(exc).__name__, "message": str(exc)}
        sys.stderr.write(json.dumps(err) + "\n")
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
