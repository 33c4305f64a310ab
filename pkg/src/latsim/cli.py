"""Command-line front end.

Commands: ingest, generate, attack, vulnerability, defend, report.
Exit codes: 0 success, 1 usage error, 2 data error, 3 non-convergence.

Every output file embeds the resolved configuration (JSON outputs under a
"config" key, CSV/edge-list outputs as a '#'-prefixed comment line), and
no output contains wall-clock state, so re-running a command with the same
inputs and seed reproduces its artifacts byte for byte.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import asdict
from pathlib import Path

from . import attack as attack_mod
from . import defense as defense_mod
from . import generate as generate_mod
from . import lanl as lanl_mod
from . import vulnerability as vuln_mod
from .config import HYGIENE_LABELS, RunConfig, build_config, load_toml
from .errors import ConvergenceError, DataError, GenerationError
from .graph import read_edge_list, stats, undirected_view, write_edge_list
from .spectral import centralities

logger = logging.getLogger(__name__)

_ATTACK_TOKENS = tuple(s.value for s in attack_mod.AttackStrategy)
_DEFENSE_TOKENS = tuple(s.value for s in defense_mod.DefenseStrategy)


class UsageError(Exception):
    """Bad invocation detected after argparse (exit code 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        raise SystemExit(self._usage_exit(message))

    def _usage_exit(self, message) -> int:
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        return 1


def _config_comment(cfg: RunConfig, **extra) -> str:
    payload = dict(cfg.resolved(), **extra)
    return "config: " + json.dumps(payload, sort_keys=True)


def _stats_line(g, label: str) -> str:
    s = stats(g)
    return (
        f"{label}: n={s.n} m={s.m} density={s.density:.6f} "
        f"clustering={s.clustering:.4f} mean_out_degree={s.mean_out_degree:.4f}"
    )


def _resolve_config(args) -> RunConfig:
    file_values = load_toml(args.config) if getattr(args, "config", None) else None
    keys = RunConfig().resolved().keys()
    overrides = {k: getattr(args, k, None) for k in keys}
    return build_config(file_values, overrides)


def _require_seed(cfg: RunConfig) -> int:
    if cfg.seed is None:
        raise UsageError("a --seed is required (no wall-clock default)")
    return cfg.seed


def _json_cell(x):
    if isinstance(x, float) and math.isnan(x):
        return None
    return x


# ---------------------------------------------------------------- commands


def cmd_ingest(args) -> int:
    cfg = _resolve_config(args)
    window = cfg.window_days if cfg.window_days > 0 else None
    ingest_cfg = lanl_mod.LanlIngestConfig(
        window_days=window, include_failures=cfg.include_failures
    )
    g, report = lanl_mod.ingest_lanl_auth(lanl_mod.iter_lines(args.input), ingest_cfg)
    comment = _config_comment(cfg, command="ingest", input=Path(args.input).name)
    comment += "\ningest: " + json.dumps(report.to_dict(), sort_keys=True)
    write_edge_list(g, args.out, comment=comment)
    print(_stats_line(g, Path(args.out).name))
    return 0


def cmd_generate(args) -> int:
    cfg = _resolve_config(args)
    seed = _require_seed(cfg)
    g = generate_mod.generate_synthetic(cfg.n, cfg.density, cfg.clustering, seed)
    write_edge_list(g, args.out, comment=_config_comment(cfg, command="generate"))
    print(_stats_line(g, Path(args.out).name))
    return 0


def cmd_attack(args) -> int:
    cfg = _resolve_config(args)
    seed = _require_seed(cfg)
    g = read_edge_list(args.graph)
    cents = centralities(g, teleport=cfg.teleport)
    collections = []
    for strat_token in cfg.attacks:
        strategy = attack_mod.AttackStrategy.parse(strat_token)
        for hygiene in cfg.hygienes:
            collections.append(
                attack_mod.collect_paths(
                    g,
                    hygiene,
                    strategy,
                    seed,
                    n_paths=cfg.n_paths,
                    n_dists=cfg.n_dists,
                    fail_cap=cfg.fail_cap,
                    fail_cap_scope=cfg.fail_cap_scope,
                    dc_policy=cfg.dc_policy,
                    cents=cents,
                )
            )
    meta = {
        "config": cfg.resolved(),
        "graph": Path(args.graph).name,
        "collections": [
            {
                "strategy": c.strategy,
                "hygiene": c.hygiene,
                "attempts": c.attempts,
                "successes": c.successes,
                "failures": c.failures,
                "unique_paths": c.unique_paths,
                "fail_cap_hit": c.fail_cap_hit,
            }
            for c in collections
        ],
    }
    attack_mod.write_corpus(collections, args.out, meta=meta)
    ledger_path = args.ledger or str(args.out) + ".ledger.csv"
    _write_ledger(collections, ledger_path, cfg)
    for c in collections:
        print(
            f"{c.strategy}/{c.hygiene}: {c.unique_paths} unique paths "
            f"({c.successes} successes in {c.attempts} attempts)"
            + (" [fail cap hit]" if c.fail_cap_hit else "")
        )
    return 0


def _write_ledger(collections, path, cfg: RunConfig) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("# " + _config_comment(cfg, command="attack") + "\n")
        fh.write("strategy,hygiene,dist_index,trial_index,success,path_len,termination\n")
        for c in collections:
            for e in c.ledger:
                fh.write(
                    f"{c.strategy},{c.hygiene},{e.dist_index},{e.trial_index},"
                    f"{int(e.success)},{e.path_len},{e.termination}\n"
                )


def cmd_vulnerability(args) -> int:
    cfg = _resolve_config(args)
    seed = _require_seed(cfg)
    g = read_edge_list(args.graph)
    cents = centralities(g, teleport=cfg.teleport)
    results = []
    for strat_token in cfg.attacks:
        strategy = attack_mod.AttackStrategy.parse(strat_token)
        for hygiene in cfg.hygienes:
            results.append(
                vuln_mod.vulnerability_h(
                    g,
                    hygiene,
                    strategy,
                    seed,
                    n_dists=cfg.n_dists,
                    n_starts=cfg.n_starts,
                    dc_policy=cfg.dc_policy,
                    cents=cents,
                )
            )
    totals = {}
    if set(HYGIENE_LABELS) <= set(cfg.hygienes):
        for strat_token in cfg.attacks:
            per_h = {
                r.hygiene: r.estimate
                for r in results
                if r.strategy == strat_token and r.hygiene in HYGIENE_LABELS
            }
            totals[strat_token] = vuln_mod.vulnerability_total(per_h)

    out = Path(args.out)
    json_path = out if out.suffix == ".json" else out.with_suffix(".json")
    csv_path = json_path.with_suffix(".csv")
    payload = {
        "config": cfg.resolved(),
        "graph": Path(args.graph).name,
        "results": [
            {k: _json_cell(v) for k, v in asdict(r).items()} for r in results
        ],
        "totals": totals,
    }
    json_path.write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("# " + _config_comment(cfg, command="vulnerability") + "\n")
        fh.write(
            "hygiene,strategy,trials,successes,estimate,ci_low,ci_high,"
            "mean_path_len,l_g\n"
        )
        for r in results:
            l_g = totals.get(r.strategy)
            fh.write(
                f"{r.hygiene},{r.strategy},{r.trials},{r.successes},"
                f"{r.estimate:.6f},{r.ci_low:.6f},{r.ci_high:.6f},"
                f"{r.mean_path_len:.4f},"
                + (f"{l_g:.6f}" if l_g is not None else "")
                + "\n"
            )
    for r in results:
        print(
            f"{r.strategy}/{r.hygiene}: L={r.estimate:.4f} "
            f"[{r.ci_low:.4f}, {r.ci_high:.4f}] "
            f"({r.successes}/{r.trials} trials)"
        )
    for strat_token, total in sorted(totals.items()):
        print(f"{strat_token}: L(G)={total:.4f}")
    return 0


def cmd_defend(args) -> int:
    cfg = _resolve_config(args)
    seed = _require_seed(cfg)
    g = read_edge_list(args.graph)
    g_und = undirected_view(g)
    meta, records = attack_mod.read_corpus(args.corpus)
    if not records:
        raise DataError(f"{args.corpus}: empty path corpus")

    groups: dict[tuple[str, str], list[tuple[int, ...]]] = {}
    for rec in records:
        groups.setdefault((rec.strategy, rec.hygiene), []).append(rec.path)

    graph_label = Path(args.graph).name
    rows = []
    for (attack_token, hygiene), paths in sorted(groups.items()):
        for defense_token in cfg.defenses:
            strategy = defense_mod.DefenseStrategy.parse(defense_token)
            res = defense_mod.evaluate_defense(
                paths,
                g,
                strategy,
                i_s=cfg.interval,
                seed=seed,
                k=cfg.k,
                decay_factor=cfg.decay,
                g_und=g_und,
            )
            if res.n_paths_skipped:
                logger.warning(
                    "%s/%s vs %s: %d of %d paths shorter than one interval; skipped",
                    attack_token, hygiene, defense_token,
                    res.n_paths_skipped, len(paths),
                )
            rows.append(
                (
                    graph_label, attack_token, defense_token, cfg.k,
                    cfg.interval, hygiene,
                    res.mean_hits, res.mean_normalized, res.n_paths_evaluated,
                )
            )

    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write("# " + _config_comment(cfg, command="defend") + "\n")
        fh.write(
            "graph,attack_strategy,defense_strategy,k,i_s,hygiene,"
            "mean_hits,normalized_hits,n_paths\n"
        )
        for row in rows:
            g_lbl, att, dfn, k, i_s, hyg, mh, nh, np_ = row
            fh.write(
                f"{g_lbl},{att},{dfn},{k},{i_s},{hyg},{mh:.6f},{nh:.6f},{np_}\n"
            )
    for row in rows:
        _, att, dfn, _, _, hyg, mh, nh, np_ = row
        print(f"{att}/{hyg} vs {dfn}: mean_hits={mh:.4f} normalized={nh:.4f} ({np_} paths)")
    return 0


def cmd_report(args) -> int:
    if bool(args.vulnerability) == bool(args.defense):
        raise UsageError("pass either --vulnerability files or --defense files")
    if args.vulnerability:
        _report_vulnerability(args.vulnerability, args.out)
    else:
        _report_defense(args.defense, args.out)
    print(f"wrote {args.out}")
    return 0


def _report_vulnerability(paths, out) -> None:
    """Pivot vulnerability JSON artifacts to one wide per-hygiene table."""
    rows: dict[str, dict[str, dict]] = {}
    totals: dict[str, float] = {}
    strategies: list[str] = []
    for path in paths:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        for r in payload["results"]:
            rows.setdefault(r["hygiene"], {})[r["strategy"]] = r
            if r["strategy"] not in strategies:
                strategies.append(r["strategy"])
        totals.update(payload.get("totals", {}))
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write("# sources: " + json.dumps([Path(p).name for p in paths]) + "\n")
        header = ["hygiene"]
        header += [f"mean_path_len_{s}" for s in strategies]
        header += [f"l_g_h_{s}" for s in strategies]
        fh.write(",".join(header) + "\n")
        for hygiene in sorted(rows):
            cells = [hygiene]
            for s in strategies:
                r = rows[hygiene].get(s)
                mpl = r.get("mean_path_len") if r else None
                cells.append(f"{mpl:.4f}" if mpl is not None else "")
            for s in strategies:
                r = rows[hygiene].get(s)
                cells.append(f"{r['estimate']:.6f}" if r else "")
            fh.write(",".join(cells) + "\n")
        if totals:
            cells = ["L(G)"] + ["" for _ in strategies]
            cells += [
                f"{totals[s]:.6f}" if s in totals else "" for s in strategies
            ]
            fh.write(",".join(cells) + "\n")


def _report_defense(paths, out) -> None:
    """Concatenate defense CSVs into one tidy table (single header)."""
    header = None
    body: list[str] = []
    for path in paths:
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                if line.startswith("graph,"):
                    if header is None:
                        header = line
                    elif line != header:
                        raise DataError(f"{path}: header differs from first input")
                    continue
                body.append(line)
    if header is None:
        raise DataError("no defense rows found in inputs")
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write("# sources: " + json.dumps([Path(p).name for p in paths]) + "\n")
        fh.write(header + "\n")
        for line in body:
            fh.write(line + "\n")


# ------------------------------------------------------------------ parser


def _add_config_flag(p) -> None:
    p.add_argument("--config", help="TOML config file (flags override it)")


def _add_seed_flag(p) -> None:
    p.add_argument("--seed", type=int, help="top-level RNG seed (required)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="latsim", description=__doc__.splitlines()[0])
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="log progress to stderr"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build a graph from a LANL auth log")
    p.add_argument("--input", required=True, help="auth events CSV (may be .gz)")
    p.add_argument("--out", required=True, help="edge-list CSV to write")
    p.add_argument("--window-days", type=int, dest="window_days",
                   help="keep events with t < days*86400; <=0 keeps all (default 30)")
    p.add_argument("--include-failures", action="store_true", default=None,
                   dest="include_failures",
                   help="keep failed authentication events too")
    _add_config_flag(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("generate", help="generate a calibrated synthetic graph")
    p.add_argument("--n", type=int, help="node count (default 100)")
    p.add_argument("--density", type=float, help="directed density target")
    p.add_argument("--clustering", type=float, help="avg clustering target")
    p.add_argument("--out", required=True, help="edge-list CSV to write")
    _add_seed_flag(p)
    _add_config_flag(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("attack", help="collect attack paths into a corpus")
    p.add_argument("--graph", required=True, help="edge-list CSV")
    p.add_argument("--attack", nargs="+", choices=_ATTACK_TOKENS, dest="attacks",
                   help="strategies to run (default rwe)")
    p.add_argument("--hygiene", nargs="+", choices=HYGIENE_LABELS, dest="hygienes",
                   help="hygiene profiles (default h2)")
    p.add_argument("--n-paths", type=int, dest="n_paths")
    p.add_argument("--n-dists", type=int, dest="n_dists")
    p.add_argument("--fail-cap", type=int, dest="fail_cap")
    p.add_argument("--fail-cap-scope", choices=("config", "distribution"),
                   dest="fail_cap_scope")
    p.add_argument("--dc-policy", choices=("force_c4", "sampled"), dest="dc_policy")
    p.add_argument("--out", required=True, help="corpus JSONL to write")
    p.add_argument("--ledger", help="attempt ledger CSV (default <out>.ledger.csv)")
    _add_seed_flag(p)
    _add_config_flag(p)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("vulnerability", help="estimate graph vulnerability")
    p.add_argument("--graph", required=True, help="edge-list CSV")
    p.add_argument("--attack", nargs="+", choices=_ATTACK_TOKENS, dest="attacks")
    p.add_argument("--hygiene", nargs="+", choices=HYGIENE_LABELS, dest="hygienes",
                   help="profiles to estimate (all three give L(G))")
    p.add_argument("--n-dists", type=int, dest="n_dists")
    p.add_argument("--n-starts", type=int, dest="n_starts")
    p.add_argument("--dc-policy", choices=("force_c4", "sampled"), dest="dc_policy")
    p.add_argument("--out", required=True,
                   help="output stem or .json path (writes .json and .csv)")
    _add_seed_flag(p)
    _add_config_flag(p)
    p.set_defaults(func=cmd_vulnerability)

    p = sub.add_parser("defend", help="replay a corpus against defenses")
    p.add_argument("--graph", required=True, help="edge-list CSV")
    p.add_argument("--corpus", required=True, help="attack corpus JSONL")
    p.add_argument("--defense", nargs="+", choices=_DEFENSE_TOKENS, dest="defenses",
                   help="defense strategies (default as)")
    p.add_argument("--k", type=int, help="monitoring budget (default 8)")
    p.add_argument("--interval", type=int, help="alert interval length i_s")
    p.add_argument("--decay", type=float, help="anomaly decay factor (default 0.5)")
    p.add_argument("--out", required=True, help="results CSV to write")
    _add_seed_flag(p)
    _add_config_flag(p)
    p.set_defaults(func=cmd_defend)

    p = sub.add_parser("report", help="merge run artifacts into one table")
    p.add_argument("--vulnerability", nargs="+",
                   help="vulnerability JSON files to pivot")
    p.add_argument("--defense", nargs="+", help="defense CSVs to concatenate")
    p.add_argument("--out", required=True, help="merged CSV to write")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"latsim: error: {exc}", file=sys.stderr)
        return 1
    except (DataError, GenerationError) as exc:
        print(f"latsim: data error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"latsim: data error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"latsim: failed to converge: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"latsim: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
