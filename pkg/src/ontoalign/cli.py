"""Command-line entry point wiring every stage into one batch run.

Configuration precedence is flags over config file over built-in
defaults. The config file is JSON whose keys mirror the long flag
names (dashes as underscores); see DEFAULTS for the full key set and
the README for the documented schema. For the remote provider the
endpoint resolves as: --endpoint flag, then the ONTOALIGN_EMBED_ENDPOINT
environment variable, then the config file.

Exit codes: 0 success, 2 configuration error, 3 input parse error
(ontology or gold file), 4 embedding provider error, 1 anything
unexpected. Reruns with identical inputs write byte-identical
alignment XML.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .embedding import EmbeddingError, ProviderConfig, ProviderKind
from .evaluation import (
    EmptyGold,
    GoldAlignment,
    GoldFormat,
    MalformedAlignment,
    Metrics,
    UnknownArm,
    ablation_jsonl,
    check_arms,
    format_metrics_table,
    load_gold,
    run_ablation,
    score,
    score_ranked,
    with_ranked,
)
from .matching import AnnConfig, MatcherConfig
from .oaei import write_alignment_xml
from .parsing import ParseError, RdfFormat, parse_ontology
from .pipeline import PipelineConfig, SideConfig, run_pipeline
from .verbalize import Template, VerbalizerConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_PARSE = 3
EXIT_PROVIDER = 4

ENDPOINT_ENV = "ONTOALIGN_EMBED_ENDPOINT"

#: Built-in defaults; config file keys and flag names both map onto
#: this flat key set.
DEFAULTS: Dict[str, object] = {
    "source": None,
    "target": None,
    "format": "turtle",
    "src_lang": "en",
    "tgt_lang": "en",
    "provider": "hash",
    "dim": 256,
    "vectors_file": None,
    "endpoint": None,
    "batch_size": 32,
    "timeout": 30.0,
    "k": 5,
    "theta": 0.5,
    "no_verbalization": False,
    "no_type_filter": False,
    "no_mutual_topk": False,
    "no_one_to_one": False,
    "ann": False,
    "ann_m": 8,
    "ann_kc": 256,
    "ann_cells": 4_000_000,
    "ann_oversample": 4,
    "out": None,
    "gold": None,
    "ablation": None,
    "seed": 0,
}


class ConfigError(Exception):
    """A problem with flags, the config file, or referenced paths."""


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved settings for one batch run."""

    source_path: Path
    target_path: Path
    format: RdfFormat
    source_languages: Tuple[str, ...]
    target_languages: Tuple[str, ...]
    provider: ProviderConfig
    matcher: MatcherConfig
    verbalizer: VerbalizerConfig
    ann: Optional[AnnConfig]
    output_path: Optional[Path]
    gold_path: Optional[Path]
    ablation: Optional[Tuple[str, ...]]
    seed: int
    dry_run: bool


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ontoalign",
        description="Align entities across two RDF/OWL ontologies.",
        epilog=(
            "Defaults: format turtle, provider hash (dim 256), k 5, "
            "theta 0.5, seed 0, languages en/en. A JSON config file "
            "(--config) supplies the same keys as the long flags; flags win."
        ),
    )
    parser.add_argument("--config", metavar="FILE", help="JSON config file")
    parser.add_argument("--source", help="source ontology file")
    parser.add_argument("--target", help="target ontology file")
    parser.add_argument("--format", choices=["turtle", "ntriples"], help="input format (default turtle)")
    parser.add_argument("--src-lang", dest="src_lang", help="comma-separated source label languages (default en)")
    parser.add_argument("--tgt-lang", dest="tgt_lang", help="comma-separated target label languages (default en)")
    parser.add_argument("--provider", choices=["hash", "file", "remote"], help="embedding provider (default hash)")
    parser.add_argument("--dim", type=int, help="hash provider dimension (default 256)")
    parser.add_argument("--vectors-file", dest="vectors_file", help="vector file for the file provider")
    parser.add_argument("--endpoint", help="embedding service URL for the remote provider")
    parser.add_argument("--k", type=int, help="top-k candidate depth (default 5)")
    parser.add_argument("--theta", type=float, help="confidence threshold (default 0.5)")
    parser.add_argument("--no-verbalization", dest="no_verbalization", action="store_true", default=None,
                        help="embed bare labels instead of contextual sentences")
    parser.add_argument("--no-type-filter", dest="no_type_filter", action="store_true", default=None,
                        help="skip the kind-compatibility filter")
    parser.add_argument("--no-mutual-topk", dest="no_mutual_topk", action="store_true", default=None,
                        help="one-sided candidates instead of mutual top-k")
    parser.add_argument("--no-one-to-one", dest="no_one_to_one", action="store_true", default=None,
                        help="skip the one-to-one assignment stage")
    parser.add_argument("--ann", action="store_true", default=None,
                        help="enable the approximate candidate path for large inputs")
    parser.add_argument("--out", help="alignment XML output path")
    parser.add_argument("--gold", help="gold alignment (.xml or .tsv) for evaluation")
    parser.add_argument("--ablation", help="comma-separated ablation arms (requires --gold)")
    parser.add_argument("--seed", type=int, help="seed for hash embeddings and the index build (default 0)")
    parser.add_argument("--dry-run", dest="dry_run", action="store_true",
                        help="validate config and parse inputs, then stop")
    return parser


def _load_config_file(path: str) -> Dict[str, object]:
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    try:
        values = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(values, dict):
        raise ConfigError("config file must hold a JSON object")
    unknown = sorted(set(values) - set(DEFAULTS))
    if unknown:
        raise ConfigError(f"unknown config file keys: {', '.join(unknown)}")
    return values


def _merge(args: argparse.Namespace) -> Dict[str, object]:
    values = dict(DEFAULTS)
    if args.config:
        values.update(_load_config_file(args.config))
    env_endpoint = os.environ.get(ENDPOINT_ENV)
    if env_endpoint:
        values["endpoint"] = env_endpoint
    for key in DEFAULTS:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            values[key] = flag_value
    return values


def _require_file(value: object, name: str) -> Path:
    if not value:
        raise ConfigError(f"{name} is required")
    path = Path(str(value))
    if not path.is_file():
        raise ConfigError(f"{name} does not exist: {path}")
    return path


def _languages(value: object) -> Tuple[str, ...]:
    parts = tuple(part.strip() for part in str(value).split(",") if part.strip())
    if not parts:
        raise ConfigError("language preference list is empty")
    return parts


def build_run_config(args: argparse.Namespace) -> RunConfig:
    values = _merge(args)
    dry_run = bool(getattr(args, "dry_run", False))

    source_path = _require_file(values["source"], "--source")
    target_path = _require_file(values["target"], "--target")
    format = RdfFormat(str(values["format"]))

    provider_name = str(values["provider"])
    try:
        kind = ProviderKind(provider_name)
    except ValueError as exc:
        raise ConfigError(f"unknown provider: {provider_name}") from exc
    try:
        if kind is ProviderKind.FILE_VECTORS:
            vectors = _require_file(values["vectors_file"], "--vectors-file")
            provider = ProviderConfig(kind=kind, path=str(vectors), seed=int(values["seed"]))
        elif kind is ProviderKind.REMOTE_SERVICE:
            endpoint = values["endpoint"]
            if not endpoint:
                raise ConfigError(
                    f"remote provider needs --endpoint or {ENDPOINT_ENV}"
                )
            provider = ProviderConfig(
                kind=kind,
                endpoint=str(endpoint),
                batch_size=int(values["batch_size"]),
                timeout=float(values["timeout"]),
                seed=int(values["seed"]),
            )
        else:
            provider = ProviderConfig(
                kind=kind, dimension=int(values["dim"]), seed=int(values["seed"])
            )
        matcher = MatcherConfig(
            k=int(values["k"]),
            theta=float(values["theta"]),
            enforce_types=not bool(values["no_type_filter"]),
            enforce_one_to_one=not bool(values["no_one_to_one"]),
            mutual=not bool(values["no_mutual_topk"]),
        )
        ann = (
            AnnConfig(
                m=int(values["ann_m"]),
                kc=int(values["ann_kc"]),
                seed=int(values["seed"]),
                activation_cells=int(values["ann_cells"]),
                oversample=int(values["ann_oversample"]),
            )
            if values["ann"]
            else None
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    template = Template.LABEL_ONLY if values["no_verbalization"] else Template.FULL
    verbalizer = VerbalizerConfig(template=template)

    ablation: Optional[Tuple[str, ...]] = None
    if values["ablation"]:
        arms = tuple(
            arm.strip() for arm in str(values["ablation"]).split(",") if arm.strip()
        )
        try:
            ablation = check_arms(arms)
        except UnknownArm as exc:
            raise ConfigError(str(exc)) from exc

    output_path = Path(str(values["out"])) if values["out"] else None
    gold_path = _require_file(values["gold"], "--gold") if values["gold"] else None
    if ablation and gold_path is None:
        raise ConfigError("--ablation requires --gold")
    if output_path is None and not dry_run and not ablation:
        raise ConfigError("--out is required")

    return RunConfig(
        source_path=source_path,
        target_path=target_path,
        format=format,
        source_languages=_languages(values["src_lang"]),
        target_languages=_languages(values["tgt_lang"]),
        provider=provider,
        matcher=matcher,
        verbalizer=verbalizer,
        ann=ann,
        output_path=output_path,
        gold_path=gold_path,
        ablation=ablation,
        seed=int(values["seed"]),
        dry_run=dry_run,
    )


def _pipeline_config(config: RunConfig) -> PipelineConfig:
    return PipelineConfig(
        source=SideConfig(config.source_path, config.format, config.source_languages),
        target=SideConfig(config.target_path, config.format, config.target_languages),
        provider=config.provider,
        matcher=config.matcher,
        verbalizer=config.verbalizer,
        ann=config.ann,
    )


def _load_gold(config: RunConfig) -> GoldAlignment:
    assert config.gold_path is not None
    suffix = config.gold_path.suffix.lower()
    format = GoldFormat.TSV if suffix == ".tsv" else GoldFormat.ALIGNMENT_XML
    return load_gold(config.gold_path, format)


def _evaluate(result, gold: GoldAlignment) -> Metrics:
    """Set metrics on the final alignment; ranked metrics on the matrix,
    restricted to gold pairs whose entities were actually loaded."""
    metrics = score(result.alignment, gold)
    sources = set(result.matrix.source_keys)
    targets = set(result.matrix.target_keys)
    present = frozenset(
        (s, t) for s, t in gold.pairs if s in sources and t in targets
    )
    dropped = len(gold.pairs) - len(present)
    if dropped:
        logger.warning(
            "%d gold pair(s) reference entities outside the inputs; "
            "ranked metrics cover the remaining %d",
            dropped,
            len(present),
        )
    if present:
        p1, mrr = score_ranked(result.matrix, GoldAlignment(pairs=present))
        metrics = with_ranked(metrics, p1, mrr)
    else:
        logger.warning("no gold pairs refer to loaded entities; ranked metrics skipped")
    return metrics


def _metrics_path(config: RunConfig) -> Optional[Path]:
    if config.output_path is None:
        return None
    return config.output_path.with_name(config.output_path.name + ".metrics.jsonl")


def run(config: RunConfig) -> int:
    """Execute one resolved run; returns the process exit code."""
    try:
        if config.dry_run:
            for name, path in (("source", config.source_path), ("target", config.target_path)):
                onto = parse_ontology(path, config.format)
                logger.info("%s: %d entities parsed from %s", name, len(onto.entities), path)
            if config.gold_path is not None:
                logger.info("gold: %d pairs", len(_load_gold(config)))
            return EXIT_OK

        gold = _load_gold(config) if config.gold_path else None

        if config.ablation:
            assert gold is not None
            rows = run_ablation(_pipeline_config(config), config.ablation, gold)
            print(format_metrics_table(rows))
            if config.output_path is not None:
                config.output_path.write_bytes(ablation_jsonl(rows).encode("utf-8"))
                logger.info("ablation records written to %s", config.output_path)
            return EXIT_OK

        result = run_pipeline(_pipeline_config(config))
        assert config.output_path is not None
        document = write_alignment_xml(result.alignment)
        config.output_path.write_bytes(document.encode("utf-8"))
        logger.info(
            "%d correspondence(s) written to %s", len(result.alignment), config.output_path
        )
        if gold is not None:
            metrics = _evaluate(result, gold)
            rows = [("full", metrics)]
            print(format_metrics_table(rows))
            metrics_path = _metrics_path(config)
            if metrics_path is not None:
                metrics_path.write_bytes(ablation_jsonl(rows).encode("utf-8"))
                logger.info("metrics written to %s", metrics_path)
        return EXIT_OK
    except (ParseError, MalformedAlignment) as exc:
        logger.error("input parse failed: %s", exc)
        return EXIT_PARSE
    except EmbeddingError as exc:
        logger.error("embedding provider failed: %s", exc)
        return EXIT_PROVIDER
    except EmptyGold as exc:
        logger.error("gold alignment unusable: %s", exc)
        return EXIT_CONFIG


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(
        level=logging.INFO, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = build_run_config(args)
    except ConfigError as exc:
        logger.error("configuration error: %s", exc)
        return EXIT_CONFIG
    try:
        return run(config)
    except Exception:  # pragma: no cover - last-resort diagnostics
        logger.exception("unexpected failure")
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
