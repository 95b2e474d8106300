"""Command-line interface: batch generation and the HTTP service launcher.

Exit codes: 0 success, 1 validation error (bad flags or bad input documents),
2 I/O error. Warnings go to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .captions import CachedHttpTermProvider
from .chart_model import parse_ensemble
from .compose import compose
from .distance import CostTable
from .document import EngineParams, StyleConfig, export_json, STYLE_PRESETS
from .errors import ComicForgeError
from .layout import parse_pattern_table
from .rational import to_fraction
from .render import export_html

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; the CLI contract wants 1 for validation.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_VALIDATION)


def _build_parser() -> _Parser:
    parser = _Parser(prog="comicforge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a comic from an ensemble file")
    gen.add_argument("--ensemble", required=True, help="ensemble JSON file")
    gen.add_argument("--data", help="dataset file (CSV with header, or JSON rows)")
    gen.add_argument("--out", help="output comic JSON path (default: stdout)")
    gen.add_argument("--html", help="also write a self-contained HTML export here")
    gen.add_argument("--alpha", type=str)
    gen.add_argument("--beta", type=str)
    gen.add_argument("--gamma", type=str)
    gen.add_argument("--delta", type=str)
    gen.add_argument("--tau", type=str, help="clustering threshold (default: mean distance)")
    gen.add_argument("--max-piece-size", type=int, dest="max_piece_size")
    gen.add_argument("--cost-table", dest="cost_table", help="JSON file of operation costs")
    gen.add_argument("--offline", action="store_true", help="skip term-context lookups")
    gen.add_argument(
        "--seedless-check",
        action="store_true",
        dest="seedless_check",
        help="compose twice and fail unless the outputs are byte-identical",
    )
    gen.add_argument(
        "--style-preset",
        dest="style_preset",
        help=f"named style preset ({', '.join(sorted(STYLE_PRESETS))}, or one from the presets file)",
    )
    gen.add_argument("--config", help="comicforge.json defaults file")

    srv = sub.add_parser("serve", help="run the HTTP service")
    srv.add_argument("--bind", help="host:port (default $COMICFORGE_BIND_ADDR or 127.0.0.1:8765)")
    srv.add_argument("--data-dir", dest="data_dir", help="persistence directory")
    srv.add_argument("--offline", action="store_true")
    srv.add_argument("--config", help="comicforge.json defaults file")
    return parser


def _load_config(path: str | None) -> dict:
    candidates = [path] if path else ["comicforge.json"]
    for candidate in candidates:
        if candidate and Path(candidate).exists():
            try:
                return json.loads(Path(candidate).read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                print(f"warning: ignoring config {candidate}: {exc}", file=sys.stderr)
    return {}


def _setting(args, config: dict, name: str, env: str | None = None):
    value = getattr(args, name, None)
    if value not in (None, False):
        return value
    if env and os.environ.get(env):
        return os.environ[env]
    return config.get(name)


def _params_from(args, config: dict) -> EngineParams:
    kwargs = {}
    for name in ("alpha", "beta", "gamma", "delta", "tau"):
        value = _setting(args, config, name)
        if value is not None:
            kwargs[name] = to_fraction(value)
    max_size = _setting(args, config, "max_piece_size")
    if max_size is not None:
        kwargs["max_size"] = int(max_size)
    cost_path = _setting(args, config, "cost_table")
    if cost_path is not None:
        if isinstance(cost_path, dict):
            kwargs["cost_table"] = CostTable.from_dict(cost_path)
        else:
            kwargs["cost_table"] = CostTable.from_dict(
                json.loads(Path(cost_path).read_text(encoding="utf-8"))
            )
    return EngineParams(**kwargs)


def _style_from(args, config: dict) -> StyleConfig:
    presets = dict(STYLE_PRESETS)
    presets_path = config.get("style_presets_path")
    if presets_path:
        loaded = json.loads(Path(presets_path).read_text(encoding="utf-8"))
        presets.update({name: StyleConfig.from_dict(d) for name, d in loaded.items()})
    name = _setting(args, config, "style_preset")
    if name:
        if name not in presets:
            raise ValueError(
                f"unknown style preset {name!r} (have: {', '.join(sorted(presets))})"
            )
        base = presets[name]
    else:
        base = StyleConfig()
    overrides = config.get("style", {})
    if overrides:
        return StyleConfig.from_dict({**base.to_dict(), **overrides})
    return base


def _cmd_generate(args) -> int:
    config = _load_config(args.config)
    try:
        ensemble_text = Path(args.ensemble).read_text(encoding="utf-8")
        data_text = Path(args.data).read_text(encoding="utf-8") if args.data else None
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO

    offline = bool(args.offline or os.environ.get("COMICFORGE_OFFLINE") or config.get("offline"))
    try:
        ensemble = parse_ensemble(
            ensemble_text, data_doc=data_text, base_dir=Path(args.ensemble).parent
        )
        for warning in ensemble.warnings:
            print(f"warning: {warning}", file=sys.stderr)
        params = _params_from(args, config)
        style = _style_from(args, config)
        pattern_table = None
        if config.get("pattern_table"):
            pattern_table = parse_pattern_table(config["pattern_table"])
        provider = None
        if not offline:
            provider = CachedHttpTermProvider(
                url_template=config.get(
                    "term_url_template",
                    "https://en.wikipedia.org/api/rest_v1/page/summary/{term}",
                ),
                cache_path=config.get("term_cache", "term_cache.json"),
            )
        doc = compose(
            ensemble,
            params=params,
            style=style,
            term_provider=provider,
            pattern_table=pattern_table,
        )
        payload = export_json(doc)
        if args.seedless_check:
            again = export_json(
                compose(
                    ensemble,
                    params=params,
                    style=style,
                    term_provider=provider,
                    pattern_table=pattern_table,
                )
            )
            if again != payload:
                print("error: non-deterministic output detected", file=sys.stderr)
                return EXIT_VALIDATION
            print("determinism check passed: outputs byte-identical", file=sys.stderr)
    except ComicForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    try:
        if args.out:
            Path(args.out).write_text(payload, encoding="utf-8")
        else:
            print(payload)
        if args.html:
            Path(args.html).write_text(export_html(doc, ensemble), encoding="utf-8")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _cmd_serve(args) -> int:
    from .service import main_serve

    config = _load_config(args.config)
    bind = _setting(args, config, "bind", env="COMICFORGE_BIND_ADDR")
    data_dir = _setting(args, config, "data_dir", env="COMICFORGE_DATA_DIR")
    offline = bool(args.offline or os.environ.get("COMICFORGE_OFFLINE") or config.get("offline"))
    try:
        pattern_table = None
        if config.get("pattern_table"):
            pattern_table = parse_pattern_table(config["pattern_table"])
        main_serve(
            bind=bind,
            data_dir=data_dir,
            offline=offline,
            term_url_template=config.get("term_url_template"),
            pattern_table=pattern_table,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_VALIDATION
    if args.command == "generate":
        return _cmd_generate(args)
    return _cmd_serve(args)


if __name__ == "__main__":
    sys.exit(main())
