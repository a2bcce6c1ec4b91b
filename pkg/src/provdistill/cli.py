"""Command-line pipeline: synth -> ingest -> featurize -> distill -> train -> detect -> eval.

Every stage reads its inputs from the work directory, writes its outputs next
to a ``manifest.json`` holding their SHA-256 checksums, and records the
checksums of the upstream manifests it consumed. A stage whose manifest is
missing raises ``MissingArtifact``; a file that no longer matches its manifest
raises ``ChecksumMismatch``.

Layout of a work directory::

    synth/      train.jsonl eval.jsonl ground_truth.json
    ingest/     {train,eval}/{entities,events,errors}.jsonl + graph/
    featurize/  embedding.bin scaler.bin train_features.bin eval_features.bin
    distill/<run>/   features.bin labels.jsonl adjacency.csr provenance.json
    train/<run>/     model.bin trace.json meta.json (+ timing.json, unchecksummed)
    detect/<run>/    verdicts.jsonl
    eval/<run>/metrics.json, eval/comparison.{csv,txt}

Run ids are ``full`` for the undistilled baseline and ``<method>_r<r>`` otherwise.
"""
from __future__ import annotations

import argparse
import copy
import json
import logging
import os
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import distill as dst
from . import evalkit, featurize, gnn, graph, ingest, synthgen
from .binio import canonical_json, read_feature_matrix, sha256_file, write_feature_matrix
from .errors import ChecksumMismatch, MissingArtifact, ProvDistillError, StrategyNotImplemented

logger = logging.getLogger("provdistill")

ENV_WORKDIR = "PROVDISTILL_WORKDIR"
FULL = "full"

DEFAULT_CONFIG = {
    "seed": 0,
    "workdir": None,
    "logs": {"train": None, "eval": None},
    "synth": {**synthgen.config_to_dict(synthgen.SynthConfig()), "seed": None, "boundary_fraction": 0.6},
    "ingest": {"dangling_policy": "drop"},
    "featurize": {"dim": 32, "window": 5, "negatives": 5, "epochs": 5, "lr": 0.025,
                  "max_tokens": featurize.MAX_TOKENS, "standardize": True, "seed": None},
    "distill": {
        "methods": list(dst.METHODS),
        "r": [0.05],
        **{k: v for k, v in asdict(dst.DistillConfig()).items() if k not in ("r", "method", "seed")},
        "seed": None,
    },
    "gnn": {**{k: v for k, v in asdict(gnn.TrainConfig()).items() if k != "seed"}, "seed": None},
    "eval": {"ground_truth": None, "timing": True},
}


class UsageError(Exception):
    """Bad flags or config file; exit code 2."""


# -- config ------------------------------------------------------------------------------


def _merge(base: dict, over: dict, where: str = "") -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if k not in base:
            raise UsageError(f"unknown config key {where + k!r}")
        if isinstance(base[k], dict) and k != "class_mix":
            if not isinstance(v, dict):
                raise UsageError(f"config key {where + k!r} must be an object")
            out[k] = _merge(base[k], v, f"{where}{k}.")
        else:
            out[k] = v
    return out


def load_config(path: Optional[str] = None, overrides: Optional[dict] = None) -> dict:
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if path is not None:
        try:
            user = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {path} is not valid JSON: {exc}") from None
        if not isinstance(user, dict):
            raise UsageError("config must be a JSON object")
        cfg = _merge(cfg, user)
    if overrides:
        cfg = _merge(cfg, overrides)
    if cfg["workdir"] is None:
        cfg["workdir"] = os.environ.get(ENV_WORKDIR)
    if not cfg["workdir"]:
        raise UsageError(f"no work directory: pass --workdir, set 'workdir' in the config or {ENV_WORKDIR}")
    return cfg


def _seed(cfg: dict, section: str) -> int:
    s = cfg[section].get("seed")
    return int(cfg["seed"] if s is None else s)


def synth_config(cfg: dict) -> synthgen.SynthConfig:
    params = {k: v for k, v in cfg["synth"].items() if k != "boundary_fraction"}
    params["seed"] = int(cfg["seed"]) if params.get("seed") is None else params["seed"]
    return synthgen.config_from_dict(params)


def distill_config(cfg: dict, method: str, r: float) -> dst.DistillConfig:
    params = {k: v for k, v in cfg["distill"].items() if k not in ("methods", "r", "seed")}
    try:
        return dst.DistillConfig(r=float(r), method=method, seed=_seed(cfg, "distill"), **params)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def train_config(cfg: dict) -> gnn.TrainConfig:
    params = {k: v for k, v in cfg["gnn"].items() if k != "seed"}
    try:
        return gnn.TrainConfig(seed=_seed(cfg, "gnn"), **params)
    except TypeError as exc:
        raise UsageError(str(exc)) from None


def run_id(method: str, r: Optional[float] = None) -> str:
    if method == FULL:
        return FULL
    if r is None:
        raise UsageError(f"method {method!r} needs a reduction rate --r")
    return f"{method}_r{float(r):g}"


def parse_run_id(rid: str) -> tuple[str, Optional[float]]:
    if rid == FULL:
        return FULL, None
    method, _, r = rid.rpartition("_r")
    return method, float(r)


# -- manifests ---------------------------------------------------------------------------


def _files_under(directory: Path, exclude: Sequence[str] = ()) -> dict[str, str]:
    out = {}
    for p in sorted(directory.rglob("*")):
        rel = p.relative_to(directory).as_posix()
        if p.is_file() and rel != "manifest.json" and rel not in exclude:
            out[rel] = sha256_file(p)
    return out


def write_manifest(directory: Path, stage: str, params: dict, inputs: dict,
                   exclude: Sequence[str] = ()) -> dict:
    manifest = {
        "stage": stage,
        "params": params,
        "inputs": inputs,
        "outputs": _files_under(directory, exclude),
    }
    (directory / "manifest.json").write_text(canonical_json(manifest), encoding="utf-8")
    return manifest


def require(directory: Path) -> str:
    """Verify a stage directory against its manifest; returns the manifest checksum."""
    mpath = directory / "manifest.json"
    if not mpath.exists():
        raise MissingArtifact(f"{mpath} (run the producing stage first)")
    manifest = json.loads(mpath.read_text(encoding="utf-8"))
    for rel, digest in manifest["outputs"].items():
        p = directory / rel
        if not p.exists():
            raise MissingArtifact(str(p))
        if sha256_file(p) != digest:
            raise ChecksumMismatch(f"{p} no longer matches {mpath}")
    return sha256_file(mpath)


def _fresh(directory: Path, params: dict, inputs: dict) -> bool:
    """True when a previous run with identical params and inputs is still intact."""
    mpath = directory / "manifest.json"
    if not mpath.exists():
        return False
    old = json.loads(mpath.read_text(encoding="utf-8"))
    if old.get("params") != json.loads(json.dumps(params)) or old.get("inputs") != inputs:
        return False
    try:
        require(directory)
    except ProvDistillError:
        return False
    return True


def _reset(directory: Path) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    for p in sorted(directory.rglob("*"), reverse=True):
        if p.is_file():
            p.unlink()
        else:
            p.rmdir()


class Workdir:
    def __init__(self, root):
        self.root = Path(root)

    def stage(self, name: str, rid: Optional[str] = None) -> Path:
        return self.root / name if rid is None else self.root / name / rid


# -- stages ------------------------------------------------------------------------------


def cmd_synth(cfg: dict, force: bool = False) -> Path:
    wd = Workdir(cfg["workdir"])
    out = wd.stage("synth")
    sc = synth_config(cfg)
    sc.validate()
    boundary = int(sc.duration_ns * float(cfg["synth"]["boundary_fraction"]))
    params = {"config": synthgen.config_to_dict(sc), "boundary_ts": boundary}
    if not force and _fresh(out, params, {}):
        logger.info("synth: up to date")
        return out
    _reset(out)
    lines, truth = synthgen.generate(sc)
    train, evals = synthgen.split(lines, boundary)
    for name, part in (("train.jsonl", train), ("eval.jsonl", evals)):
        with open(out / name, "w", encoding="utf-8", newline="\n") as fh:
            fh.writelines(line + "\n" for line in part)
    (out / "ground_truth.json").write_text(canonical_json(truth.to_json()), encoding="utf-8")
    write_manifest(out, "synth", params, {})
    logger.info("synth: %d train / %d eval lines, %d malicious", len(train), len(evals), len(truth.malicious))
    return out


def _log_paths(cfg: dict, wd: Workdir) -> tuple[Path, Path, dict]:
    logs = cfg["logs"]
    if logs["train"] or logs["eval"]:
        if not (logs["train"] and logs["eval"]):
            raise UsageError("give both logs.train and logs.eval, or neither to use synth output")
        paths = Path(logs["train"]), Path(logs["eval"])
        for p in paths:
            if not p.exists():
                raise MissingArtifact(str(p))
        return paths[0], paths[1], {"train_log": sha256_file(paths[0]), "eval_log": sha256_file(paths[1])}
    synth = wd.stage("synth")
    inputs = {"synth": require(synth)}
    return synth / "train.jsonl", synth / "eval.jsonl", inputs


def cmd_ingest(cfg: dict, force: bool = False) -> Path:
    wd = Workdir(cfg["workdir"])
    out = wd.stage("ingest")
    train_log, eval_log, inputs = _log_paths(cfg, wd)
    params = dict(cfg["ingest"])
    if not force and _fresh(out, params, inputs):
        logger.info("ingest: up to date")
        return out
    _reset(out)
    policy = params["dangling_policy"]
    res_tr = ingest.ingest_file(train_log)
    res_ev = ingest.ingest_file(eval_log)
    g_tr = graph.build_graph(res_tr, policy)
    # eval events may touch entities declared only during training
    g_ev = graph.build_graph(res_ev, policy, entity_pool=res_tr.entities)
    for part, res, g in (("train", res_tr, g_tr), ("eval", res_ev, g_ev)):
        ingest.write_ingest(res, out / part)
        graph.write_graph(g, out / part / "graph")
        logger.info("ingest %s: %d nodes, %d edges, %d bad lines", part, g.n_nodes, g.n_edges, len(res.errors))
    write_manifest(out, "ingest", params, inputs)
    return out


def cmd_featurize(cfg: dict, force: bool = False) -> Path:
    wd = Workdir(cfg["workdir"])
    src = wd.stage("ingest")
    out = wd.stage("featurize")
    inputs = {"ingest": require(src)}
    params = {**cfg["featurize"], "seed": _seed(cfg, "featurize")}
    if not force and _fresh(out, params, inputs):
        logger.info("featurize: up to date")
        return out
    _reset(out)
    g_tr = graph.read_graph(src / "train" / "graph")
    g_ev = graph.read_graph(src / "eval" / "graph")
    s_tr = featurize.build_sentences(g_tr, params["max_tokens"])
    s_ev = featurize.build_sentences(g_ev, params["max_tokens"])
    emb = featurize.train_skipgram(s_tr, dim=params["dim"], window=params["window"],
                                   negatives=params["negatives"], epochs=params["epochs"],
                                   lr=params["lr"], seed=params["seed"])
    X_tr = featurize.featurize_sentences(emb, s_tr).X
    X_ev = featurize.featurize_sentences(emb, s_ev).X
    scaler = featurize.fit_scaler(X_tr) if params["standardize"] else featurize.identity_scaler(emb.dim)
    featurize.save_embedding(emb, out / "embedding.bin")
    featurize.save_scaler(scaler, out / "scaler.bin")
    write_feature_matrix(out / "train_features.bin", scaler.transform(X_tr))
    write_feature_matrix(out / "eval_features.bin", scaler.transform(X_ev))
    write_manifest(out, "featurize", params, inputs)
    logger.info("featurize: vocab %d, %d train / %d eval rows", len(emb.vocab), len(X_tr), len(X_ev))
    return out


def load_train_dataset(wd: Workdir) -> tuple[dst.GraphDataset, dict]:
    ing, fea = wd.stage("ingest"), wd.stage("featurize")
    inputs = {"ingest": require(ing), "featurize": require(fea)}
    g = graph.read_graph(ing / "train" / "graph")
    X = read_feature_matrix(fea / "train_features.bin")
    labels = graph.node_labels(g)
    return dst.GraphDataset(X, graph.adjacency(g).to_scipy(), labels.y, labels.class_names), inputs


def cmd_distill(cfg: dict, method: str, r: float, force: bool = False) -> Path:
    if method in dst.DECLARED_SLOTS:
        raise StrategyNotImplemented(method)
    if method not in dst.METHODS:
        raise UsageError(f"unknown method {method!r}; choose from {', '.join(dst.METHODS)}")
    wd = Workdir(cfg["workdir"])
    dc = distill_config(cfg, method, r)
    rid = run_id(method, r)
    out = wd.stage("distill", rid)
    T, inputs = load_train_dataset(wd)
    params = asdict(dc)
    if not force and _fresh(out, params, inputs):
        logger.info("distill %s: up to date", rid)
        return out
    _reset(out)
    S = dst.distill(T, dc)
    dst.write_distilled(S, out)
    write_manifest(out, "distill", params, inputs)
    logger.info("distill %s: %d -> %d nodes", rid, T.n_nodes, S.n_nodes)
    return out


def cmd_train(cfg: dict, rid: str, force: bool = False) -> Path:
    wd = Workdir(cfg["workdir"])
    out = wd.stage("train", rid)
    tc = train_config(cfg)
    params = {"run": rid, **asdict(tc), "rare_class_threshold": cfg["distill"]["rare_class_threshold"]}
    if rid == FULL:
        T, inputs = load_train_dataset(wd)
    else:
        src = wd.stage("distill", rid)
        inputs = {"distill": require(src)}
    if not force and _fresh(out, params, inputs):
        logger.info("train %s: up to date", rid)
        return out
    if rid == FULL:
        data, removed = dst.filter_rare_classes(T, params["rare_class_threshold"])
    else:
        data = dst.read_distilled(src)
        removed = list(data.provenance.get("removed_classes", []))
    _reset(out)
    model, trace, seconds = gnn.train(None, data, config=tc)
    gnn.save_model(model, out / "model.bin")
    (out / "trace.json").write_text(canonical_json({"loss": trace}), encoding="utf-8")
    meta = {"run": rid, "train_nodes": int(data.X.shape[0]), "removed_classes": removed}
    (out / "meta.json").write_text(canonical_json(meta), encoding="utf-8")
    # wall-clock varies between runs, so it stays out of the checksummed outputs
    (out / "timing.json").write_text(canonical_json({"train_seconds": seconds}), encoding="utf-8")
    write_manifest(out, "train", params, inputs, exclude=("timing.json",))
    logger.info("train %s: %d nodes, loss %.4f -> %.4f in %.2fs", rid, meta["train_nodes"], trace[0], trace[-1], seconds)
    return out


def cmd_detect(cfg: dict, rid: str, force: bool = False) -> Path:
    wd = Workdir(cfg["workdir"])
    src = wd.stage("train", rid)
    ing, fea = wd.stage("ingest"), wd.stage("featurize")
    inputs = {"train": require(src), "ingest": require(ing), "featurize": require(fea)}
    out = wd.stage("detect", rid)
    params = {"run": rid}
    if not force and _fresh(out, params, inputs):
        logger.info("detect %s: up to date", rid)
        return out
    model = gnn.load_model(src / "model.bin")
    meta = json.loads((src / "meta.json").read_text(encoding="utf-8"))
    g = graph.read_graph(ing / "eval" / "graph")
    X = read_feature_matrix(fea / "eval_features.bin")
    data = dst.GraphDataset(X, graph.adjacency(g).to_scipy(), np.zeros(g.n_nodes, dtype=np.int64), {0: "_"})
    pred = gnn.predict(model, data)
    report = gnn.detect(pred, [nd.ntype for nd in g.nodes], model.class_names,
                        meta["removed_classes"], [nd.nid for nd in g.nodes])
    _reset(out)
    with open(out / "verdicts.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for v in report.verdicts:
            fh.write(json.dumps(asdict(v), separators=(",", ":"), ensure_ascii=False) + "\n")
    write_manifest(out, "detect", params, inputs)
    logger.info("detect %s: %d of %d nodes flagged", rid, len(report.flagged_ids()), len(report.verdicts))
    return out


def _ground_truth(cfg: dict, wd: Workdir) -> tuple[set, dict]:
    path = cfg["eval"]["ground_truth"]
    if path is None:
        synth = wd.stage("synth")
        inputs = {"synth": require(synth)}
        path = synth / "ground_truth.json"
    else:
        path = Path(path)
        if not path.exists():
            raise MissingArtifact(str(path))
        inputs = {"ground_truth": sha256_file(path)}
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    return set(obj["malicious"]), inputs


def _read_verdicts(path: Path) -> tuple[list[str], list[bool]]:
    ids, flags = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            o = json.loads(line)
            ids.append(o["nid"])
            flags.append(o["malicious"])
    return ids, flags


def cmd_eval(cfg: dict, runs: Optional[Sequence[str]] = None) -> evalkit.ComparisonTable:
    """Score detect outputs against ground truth and write the comparison table.

    With ``runs=None`` every run found under ``detect/`` is scored.
    """
    wd = Workdir(cfg["workdir"])
    if runs is None:
        root = wd.stage("detect")
        runs = sorted(p.name for p in root.iterdir() if p.is_dir()) if root.is_dir() else []
        if not runs:
            raise MissingArtifact(f"{root}: no detect runs to evaluate")
    malicious, gt_inputs = _ground_truth(cfg, wd)
    timing = bool(cfg["eval"]["timing"])
    results = []
    for rid in runs:
        det = wd.stage("detect", rid)
        inputs = {"detect": require(det), **gt_inputs}
        ids, flags = _read_verdicts(det / "verdicts.jsonl")
        counts = evalkit.confusion(flags, [n in malicious for n in ids])
        m = evalkit.metrics(counts)
        out = wd.stage("eval", rid)
        _reset(out)
        (out / "metrics.json").write_text(canonical_json({
            "run": rid, "counts": asdict(counts), "metrics": asdict(m), "rounded": asdict(m.rounded(2)),
        }), encoding="utf-8")
        write_manifest(out, "eval", {"run": rid}, inputs)
        seconds = None
        tpath = wd.stage("train", rid) / "timing.json"
        if timing and tpath.exists():
            seconds = json.loads(tpath.read_text(encoding="utf-8"))["train_seconds"]
        method, r = parse_run_id(rid)
        results.append(evalkit.RunResult(method, r, m, seconds, counts))
    table = evalkit.compare_runs(results)
    root = wd.stage("eval")
    (root / "comparison.csv").write_text(table.to_csv(), encoding="utf-8")
    (root / "comparison.txt").write_text(table.to_text(), encoding="utf-8")
    return table


def pipeline_runs(cfg: dict) -> list[tuple[str, Optional[float]]]:
    rates = cfg["distill"]["r"]
    rates = [rates] if isinstance(rates, (int, float)) else list(rates)
    cells = [(m, float(r)) for m in cfg["distill"]["methods"] for r in rates]
    return cells + [(FULL, None)]


def cmd_pipeline(cfg: dict, force: bool = False) -> evalkit.ComparisonTable:
    for m in cfg["distill"]["methods"]:
        if m in dst.DECLARED_SLOTS:
            raise StrategyNotImplemented(m)
        if m not in dst.METHODS:
            raise UsageError(f"unknown method {m!r}")
    uses_synth = not (cfg["logs"]["train"] or cfg["logs"]["eval"])
    if uses_synth:
        cmd_synth(cfg, force)
    cmd_ingest(cfg, force)
    cmd_featurize(cfg, force)
    rids = []
    for method, r in pipeline_runs(cfg):
        rid = run_id(method, r)
        if method != FULL:
            cmd_distill(cfg, method, r, force)
        cmd_train(cfg, rid, force)
        cmd_detect(cfg, rid, force)
        rids.append(rid)
    return cmd_eval(cfg, rids)


# -- argument parsing ----------------------------------------------------------------------


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--config", metavar="PATH", default=d, help="JSON pipeline config")
    p.add_argument("--workdir", metavar="PATH", default=d, help=f"artifact directory (default ${ENV_WORKDIR})")
    p.add_argument("--seed", type=int, metavar="N", default=d, help="default seed for every stage")
    p.add_argument("--verbose", "-v", action="store_true", default=d)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="provdistill", description="Provenance-graph distillation pipeline.")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        _global_flags(p, suppress=True)
        p.add_argument("--force", action="store_true", help="rerun even if outputs are up to date")
        return p

    p = add("synth", "generate synthetic train/eval logs with ground truth")
    p.add_argument("--attack-chains", type=int, dest="synth.attack_chains")
    p.add_argument("--chain-length", type=int, dest="synth.chain_length")

    p = add("ingest", "parse logs and build train/eval provenance graphs")
    p.add_argument("--train-log", metavar="PATH", dest="logs.train")
    p.add_argument("--eval-log", metavar="PATH", dest="logs.eval")
    p.add_argument("--dangling-policy", choices=("drop", "synthesize"), dest="ingest.dangling_policy")

    p = add("featurize", "train token embeddings and compute node features")
    p.add_argument("--dim", type=int, dest="featurize.dim")
    p.add_argument("--no-standardize", action="store_const", const=False, dest="featurize.standardize")

    p = add("distill", "condense the training graph")
    p.add_argument("--method", required=True)
    p.add_argument("--r", type=float, required=True, help="reduction rate in (0, 1]")
    p.add_argument("--iterations", type=int, dest="distill.iterations")

    for name, help_ in (("train", "train the node-type classifier"),
                        ("detect", "flag eval nodes whose predicted type differs from their own")):
        p = add(name, help_)
        p.add_argument("--method", required=True, help=f"distillation method or '{FULL}'")
        p.add_argument("--r", type=float)
        if name == "train":
            p.add_argument("--epochs", type=int, dest="gnn.epochs")

    p = add("eval", "score detections and write the comparison table")
    p.add_argument("--method", help="score one run (default: every detect run)")
    p.add_argument("--r", type=float)
    p.add_argument("--ground-truth", metavar="PATH", dest="eval.ground_truth")

    p = add("pipeline", "run every stage for methods x reduction rates plus the full baseline")
    p.add_argument("--methods", type=lambda s: [x for x in s.split(",") if x], dest="distill.methods")
    p.add_argument("--r", type=_floats, dest="distill.r")
    p.add_argument("--ground-truth", metavar="PATH", dest="eval.ground_truth")
    p.add_argument("--no-timing", action="store_const", const=False, dest="eval.timing",
                   help="leave train_seconds as NA so reruns give identical tables")
    return parser


def _overrides(ns: argparse.Namespace) -> dict:
    out: dict = {}
    for key, value in vars(ns).items():
        if value is None:
            continue
        if key in ("workdir", "seed"):
            out[key] = value
        elif "." in key:
            section, name = key.split(".", 1)
            out.setdefault(section, {})[name] = value
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = load_config(ns.config, _overrides(ns))
        force = getattr(ns, "force", False)
        cmd = ns.command
        if cmd == "synth":
            cmd_synth(cfg, force)
        elif cmd == "ingest":
            cmd_ingest(cfg, force)
        elif cmd == "featurize":
            cmd_featurize(cfg, force)
        elif cmd == "distill":
            cmd_distill(cfg, ns.method, ns.r, force)
        elif cmd == "train":
            cmd_train(cfg, run_id(ns.method, ns.r), force)
        elif cmd == "detect":
            cmd_detect(cfg, run_id(ns.method, ns.r), force)
        elif cmd == "eval":
            table = cmd_eval(cfg, None if ns.method is None else [run_id(ns.method, ns.r)])
            sys.stdout.write(table.to_text())
        elif cmd == "pipeline":
            sys.stdout.write(cmd_pipeline(cfg, force).to_text())
    except UsageError as exc:
        print(f"provdistill: usage error: {exc}", file=sys.stderr)
        return 2
    except ProvDistillError as exc:
        print(f"provdistill: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
