"""Command-line front door.

Subcommands: mint, serve, verify, attack, game, bounds. Every subcommand
is deterministic given --seed (env QM_SEED is the fallback); outputs are
byte-identical across reruns. Exit codes: 0 success/valid, 1
counterfeit/violation, 2 usage error, 3 protocol abort.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from .adversary import ATTACK_NAMES, attack_both_pass_rate
from .games import game_gh, physical_value_search, product_game_win_rate, selective_value
from .money import BankDb, VerParams, dump_coin, dump_db, load_coin, load_db, mint
from .protocol import HolderSession, InsufficientUnmarked, ProtocolAbort, WireError
from .seeding import spawn_rng
from .transport import BankServer, LocalBank, RemoteBank, TransportError, run_ver

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_ABORT = 3


def _default_seed() -> int:
    env = os.environ.get("QM_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            pass
    return 0


def _add_seed(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--seed", type=int, default=None, help="master seed (fallback: QM_SEED, then 0)"
    )


def _resolve_seed(args) -> int:
    return args.seed if args.seed is not None else _default_seed()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmoney")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mint", help="mint a coin and update the bank database")
    p.add_argument("--k", type=int, required=True, help="registers per coin")
    p.add_argument("--t", type=int, default=6, help="challenge size (default 6)")
    p.add_argument("--db", required=True, help="bank database file")
    p.add_argument("--out", required=True, help="coin output file")
    _add_seed(p)

    p = sub.add_parser("serve", help="serve verification sessions over TCP")
    p.add_argument("--port", type=int, required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--db", required=True)
    p.add_argument("--t", type=int, default=6)
    _add_seed(p)

    p = sub.add_parser("verify", help="verify a coin against a database or a remote bank")
    p.add_argument("--coin", required=True)
    p.add_argument("--db", help="bank database file (in-process verification)")
    p.add_argument("--connect", help="host:port of a running bank server")
    p.add_argument("--t", type=int, default=6)
    p.add_argument("--transcript", help="transcript output file (default: <coin>.transcript)")
    _add_seed(p)

    p = sub.add_parser("attack", help="run a counterfeiting attack and report both-pass rate")
    p.add_argument("--strategy", required=True, choices=ATTACK_NAMES)
    p.add_argument("--k", type=int, default=24)
    p.add_argument("--t", type=int, default=6)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--budget", type=int, default=0, help="auxiliary-instance budget U")
    p.add_argument("--out", help="CSV output file (default: stdout)")
    _add_seed(p)

    p = sub.add_parser("game", help="retrieval-game values")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--selective", action="store_true", help="exact selective value")
    mode.add_argument("--physical", action="store_true", help="seesaw physical-value search")
    mode.add_argument("--product", action="store_true", help="product-game Monte Carlo")
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--k", type=int, default=3, help="product-game instance count")
    p.add_argument("--trials", type=int, default=100_000)
    _add_seed(p)

    p = sub.add_parser("bounds", help="randomized lemma checks and tail comparisons")
    p.add_argument("--check", required=True, choices=("sets", "mutinfo", "chernoff"))
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--samples", type=int, default=100_000, help="samples per chernoff grid point")
    _add_seed(p)

    return parser


def _load_db_file(path: str, t: int) -> BankDb:
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"database {path} is empty")
    k = len(lines[0].split()[1]) // 4
    return load_db(text, VerParams(k, t))


def cmd_mint(args) -> int:
    seed = _resolve_seed(args)
    db_path = Path(args.db)
    try:
        params = VerParams(args.k, args.t)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if db_path.exists() and db_path.read_text(encoding="utf-8").strip():
        db = _load_db_file(args.db, args.t)
        if db.params.k != params.k:
            print(f"error: database has k={db.params.k}, requested k={params.k}", file=sys.stderr)
            return EXIT_USAGE
    else:
        db = BankDb(params)
    rng = spawn_rng(seed, "mint", db._next_id)
    coin = mint(db, rng)
    try:
        db_path.write_text(dump_db(db), encoding="utf-8")
        Path(args.out).write_text(dump_coin(coin), encoding="utf-8")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"minted coin {coin.id} (k={params.k}) -> {args.out}")
    return EXIT_OK


def cmd_serve(args) -> int:
    seed = _resolve_seed(args)
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    try:
        db = _load_db_file(args.db, args.t)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        server = BankServer(db, seed, host=args.host, port=args.port)
    except OSError as exc:
        print(f"error: cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return 1
    print(f"serving bank on {args.host}:{server.port}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.shutdown()
        server.server_close()
    return EXIT_OK


def cmd_verify(args) -> int:
    seed = _resolve_seed(args)
    if bool(args.db) == bool(args.connect):
        print("error: give exactly one of --db or --connect", file=sys.stderr)
        return EXIT_USAGE
    try:
        coin = load_coin(Path(args.coin).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        print(f"error: bad coin file: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if coin.is_retired():
        print("error: coin is retired and must be returned to the bank", file=sys.stderr)
        return EXIT_ABORT

    if args.db:
        try:
            db = _load_db_file(args.db, args.t)
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        bank = LocalBank(db, seed)
    else:
        host, _, port = args.connect.rpartition(":")
        if not host or not port.isdigit():
            print(f"error: --connect needs host:port, got {args.connect!r}", file=sys.stderr)
            return EXIT_USAGE
        bank = RemoteBank(host, int(port))

    holder_rng = spawn_rng(seed, "holder", 0)
    try:
        valid, transcript = run_ver(bank, lambda: HolderSession(coin, holder_rng))
    except (TransportError, ProtocolAbort, WireError, InsufficientUnmarked) as exc:
        print(f"error: protocol aborted: {exc}", file=sys.stderr)
        return EXIT_ABORT

    transcript_path = args.transcript or (args.coin + ".transcript")
    Path(transcript_path).write_text(transcript.to_text(), encoding="utf-8")
    Path(args.coin).write_text(dump_coin(coin), encoding="utf-8")
    print("valid" if valid else "counterfeit")
    return EXIT_OK if valid else EXIT_INVALID


def cmd_attack(args) -> int:
    seed = _resolve_seed(args)
    try:
        params = VerParams(args.k, args.t)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    db = BankDb(params)
    rate, stderr = attack_both_pass_rate(
        args.strategy, db, args.trials, seed, budget_u=args.budget
    )
    lines = [
        "strategy,k,t,U,trials,both_pass_rate,stderr,seed",
        f"{args.strategy},{args.k},{args.t},{args.budget},{args.trials},"
        f"{rate:.17g},{stderr:.17g},{seed}",
    ]
    text = "".join(line + "\n" for line in lines)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_game(args) -> int:
    seed = _resolve_seed(args)
    game = game_gh()
    if args.selective:
        print(f"selective_value {selective_value(game):.9f}")
        return EXIT_OK
    if args.physical:
        rng = spawn_rng(seed, "game-physical")
        value, strat = physical_value_search(game, args.restarts, rng)
        print(f"physical_value {value:.17g} restarts={args.restarts}")
        for o, vec in enumerate(strat.basis.vectors):
            amps = " ".join(
                f"{a.real:.17g} {a.imag:.17g}" for a in vec.amplitudes
            )
            print(f"outcome {o} answer {strat.answers[o]} basis {amps}")
        return EXIT_OK
    rng = spawn_rng(seed, "game-product")
    _, strat = physical_value_search(game, args.restarts, rng)
    rate = product_game_win_rate(args.k, strat, args.trials, rng)
    stderr = float(np.sqrt(rate * (1.0 - rate) / args.trials))
    print(
        f"product_game k={args.k} trials={args.trials} "
        f"win_rate={rate:.17g} stderr={stderr:.17g}"
    )
    return EXIT_OK


def cmd_bounds(args) -> int:
    seed = _resolve_seed(args)
    rng = spawn_rng(seed, "bounds", args.check)
    if args.check == "sets":
        violations = 0
        for _ in range(args.trials):
            family = bounds_mod.random_set_family(rng)
            holds, report = bounds_mod.check_set_lemma(family)
            if not holds:
                violations += 1
                print(f"VIOLATION: {report}", file=sys.stderr)
                print(f"family: {family}", file=sys.stderr)
        print(f"sets violations={violations} trials={args.trials}")
        return EXIT_OK if violations == 0 else EXIT_INVALID
    if args.check == "mutinfo":
        violations = 0
        for _ in range(args.trials):
            joint = bounds_mod.random_joint(rng)
            condition = bounds_mod.random_condition(rng, joint)
            report = bounds_mod.check_mut_lemma(joint, condition)
            if not report.holds:
                violations += 1
                print(f"VIOLATION: {report}", file=sys.stderr)
                print(f"joint: {joint.probabilities.tolist()}", file=sys.stderr)
                print(f"condition: {condition}", file=sys.stderr)
        print(f"mutinfo violations={violations} trials={args.trials}")
        return EXIT_OK if violations == 0 else EXIT_INVALID
    checks = bounds_mod.empirical_tail_checks(rng, samples=args.samples)
    violations = 0
    for c in checks:
        ok = "true" if c.ok else "false"
        print(
            f"chernoff {c.kind} n={c.n} p={c.p:g} lam={c.lam:g} "
            f"empirical={c.empirical:.17g} bound={c.bound:.17g} ok={ok}"
        )
        if not c.ok:
            violations += 1
    print(f"chernoff violations={violations} points={len(checks)}")
    return EXIT_OK if violations == 0 else EXIT_INVALID


_COMMANDS = {
    "mint": cmd_mint,
    "serve": cmd_serve,
    "verify": cmd_verify,
    "attack": cmd_attack,
    "game": cmd_game,
    "bounds": cmd_bounds,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
