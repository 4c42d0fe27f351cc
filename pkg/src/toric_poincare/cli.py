"""Command-line front end.

Exit codes: 0 success, 1 mathematical disagreement, 2 input error,
3 internal assertion, 4 resource cap.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from .constellation import (
    Constellation,
    ConstellationError,
    StructuralClaimError,
    degeneracy_report,
    poincare_factored,
    regularity_check,
    to_semigroup_spec,
    valuation_matrix,
)
from .fibers import DEFAULT_CAP, fiber_report, support_from_exponents
from .semigroup import ResourceCapError, SemigroupSpec, SpecError, poincare_by_definition, pushforward_Q
from .series import TruncationBox, expand_factored
from .verify import VerifyConfig, replay
from .verify import run_verify as run_verify_suite

EXIT_OK, EXIT_DISAGREE, EXIT_INPUT, EXIT_INTERNAL, EXIT_CAP = 0, 1, 2, 3, 4
MODES = ("constellation", "semigroup", "fibers", "verify")


class InputError(Exception):
    pass


@dataclass
class JobConfig:
    mode: str
    input_path: Optional[str] = None
    box: Optional[TruncationBox] = None
    query_v: Optional[tuple[int, ...]] = None
    output_format: str = "text"
    seed: int = 42
    cap: int = DEFAULT_CAP
    support: Optional[list[tuple[int, ...]]] = None
    constellations: int = 50
    semigroups: int = 20
    replay_out: Optional[str] = None


def _int_vector(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _support(text: str) -> list[tuple[int, ...]]:
    return [_int_vector(chunk) for chunk in text.split(";") if chunk.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="toric-poincare",
        description="Poincare series of affine toric varieties and toric constellations.",
    )
    p.add_argument("--mode", required=True, choices=MODES)
    p.add_argument("--input", help="JSON input (semigroup spec, constellation, or verify replay record)")
    p.add_argument("--box", type=_int_vector, help="truncation box v1,...,vr")
    p.add_argument("--v", type=_int_vector, help="value vector for fibers mode")
    p.add_argument("--json", action="store_true", help="emit canonical JSON instead of text")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="support-size cap for stratification")
    p.add_argument("--support", type=_support, help="fibers mode: support exponents 'e1;e2;...' (each comma-separated)")
    p.add_argument("--constellations", type=int, default=50, help="verify mode: random constellations")
    p.add_argument("--semigroups", type=int, default=20, help="verify mode: random semigroup specs")
    p.add_argument("--replay-out", help="verify mode: write failure records to this file")
    return p


def config_from_args(ns: argparse.Namespace) -> JobConfig:
    return JobConfig(
        mode=ns.mode,
        input_path=ns.input,
        box=TruncationBox(ns.box) if ns.box is not None else None,
        query_v=ns.v,
        output_format="json" if ns.json else "text",
        seed=ns.seed,
        cap=ns.cap,
        support=ns.support,
        constellations=ns.constellations,
        semigroups=ns.semigroups,
        replay_out=ns.replay_out,
    )


def load_input(path: Optional[str]):
    if path is None:
        raise InputError("--input is required for this mode")
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON: {exc}") from None
    if isinstance(obj, dict) and "points" in obj:
        return Constellation.from_json(obj)
    if isinstance(obj, dict) and "generators" in obj:
        spec = SemigroupSpec.from_json(obj)
        if not spec.report.ok:
            raise SpecError("invalid semigroup spec: " + "; ".join(spec.report.problems))
        return spec
    raise InputError(f"{path}: expected a constellation ('points') or semigroup ('generators') document")


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _check_box(box: TruncationBox, r: int) -> None:
    if box.rank != r:
        raise InputError(f"--box has {box.rank} entries but there are {r} valuations")


def run_constellation(cfg: JobConfig) -> tuple[int, str]:
    c = load_input(cfg.input_path)
    if not isinstance(c, Constellation):
        raise InputError("constellation mode needs a constellation document")
    m = valuation_matrix(c)
    rep = degeneracy_report(m, c)
    cert = regularity_check(m)
    fact = poincare_factored(m, rep)
    expansion = None
    if cfg.box is not None:
        _check_box(cfg.box, m.r)
        expansion = expand_factored(fact, cfg.box)
    report = {
        "distinct_columns": [list(x) for x in rep.distinct_columns],
        "repeated_column": list(rep.repeated_column) if rep.repeated_column else None,
        "k": rep.k,
        "distinct_weights": rep.distinct_weights,
        "degenerate": rep.degenerate,
        "regular": cert.regular,
        "elementary_divisors": list(cert.elementary_divisors),
    }
    if cfg.output_format == "json":
        out = {"matrix": m.to_json(), "report": report, "poincare": fact.to_json(), "poincare_text": str(fact)}
        if expansion is not None:
            out["expansion"] = expansion.to_json()
        return EXIT_OK, _dump(out)
    lines = [f"# constellation d={c.dimension} r={c.size}", "valuation matrix:"]
    lines += ["  " + " ".join(f"{x:>3}" for x in row) for row in m.rows]
    lines.append("distinct columns: " + " ".join(str(x) for x in rep.distinct_columns))
    if rep.degenerate:
        lines.append(
            f"degenerate: yes (repeated column {rep.repeated_column}, k={rep.k}, "
            f"{rep.distinct_weights} distinct weights)"
        )
    else:
        lines.append(f"degenerate: no ({rep.distinct_weights} distinct weights)")
    lines.append(
        f"regular: {'yes' if cert.regular else 'no'} (elementary divisors "
        + " ".join(map(str, cert.elementary_divisors))
        + ")"
    )
    lines.append(f"P(t) = {fact}")
    text = "\n".join(lines) + "\n"
    if expansion is not None:
        text += "expansion:\n" + expansion.to_text()
    return EXIT_OK, text


def run_semigroup(cfg: JobConfig) -> tuple[int, str]:
    obj = load_input(cfg.input_path)
    fact = None
    if isinstance(obj, Constellation):
        m = valuation_matrix(obj)
        fact = poincare_factored(m, degeneracy_report(m, obj))
        spec = to_semigroup_spec(obj)
    else:
        spec = obj
    if cfg.box is None:
        raise InputError("semigroup mode requires --box")
    _check_box(cfg.box, spec.rank)
    q = pushforward_Q(spec, cfg.box)
    p = poincare_by_definition(spec, cfg.box)
    diff = q.diff(p)
    fdiff = q.diff(expand_factored(fact, cfg.box)) if fact is not None else {}
    code = EXIT_DISAGREE if diff or fdiff else EXIT_OK
    if cfg.output_format == "json":
        out = {
            "spec": spec.to_json(),
            "pushforward_Q": q.to_json(),
            "by_definition": p.to_json(),
            "diff": [{"exponent": list(e), "Q": a, "P": b} for e, (a, b) in diff.items()],
        }
        if fact is not None:
            out["factored"] = fact.to_json()
            out["factored_diff"] = [{"exponent": list(e), "Q": a, "F": b} for e, (a, b) in fdiff.items()]
        return code, _dump(out)
    text = "# pushforward_Q\n" + q.to_text() + "# by_definition\n" + p.to_text()
    text += "# diff\n" + "".join(f"{a} {b}  {' '.join(map(str, e))}\n" for e, (a, b) in diff.items())
    if fact is not None:
        text += f"# factored {fact}\n# factored_diff\n"
        text += "".join(f"{a} {b}  {' '.join(map(str, e))}\n" for e, (a, b) in fdiff.items())
    text += f"result: {'agree' if code == EXIT_OK else 'DISAGREE'}\n"
    return code, text


def run_fibers(cfg: JobConfig) -> tuple[int, str]:
    obj = load_input(cfg.input_path)
    spec = to_semigroup_spec(obj) if isinstance(obj, Constellation) else obj
    if cfg.query_v is None:
        raise InputError("fibers mode requires --v")
    if len(cfg.query_v) != spec.rank:
        raise InputError(f"--v has {len(cfg.query_v)} entries but there are {spec.rank} valuations")
    if any(x < 0 for x in cfg.query_v):
        raise InputError("--v must be nonnegative")
    support = None
    if cfg.support is not None:
        try:
            support = support_from_exponents(spec, cfg.query_v, cfg.support)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    rep = fiber_report(spec, cfg.query_v, support, cfg.cap)
    code = EXIT_OK if rep["chi_PF"] == rep["N"] else EXIT_DISAGREE
    if cfg.output_format == "json":
        return code, _dump(rep)
    lines = [
        f"v = {rep['v']}",
        f"support ({len(rep['support'])}): " + " ".join(str(tuple(e)) for e in rep["support"]),
        f"chi(PF_v) = {rep['chi_PF']}" + ("" if rep["stratified"] else " (fallback: support exceeds cap)"),
        f"N(v) = {rep['N']}",
    ]
    if rep["lambda"] is None:
        lines.append("lambda: support does not have valuation vector v")
    else:
        for j, mons in rep["lambda"].items():
            lines.append(f"Lambda_{j} = " + " ".join(str(tuple(e)) for e in mons))
        for pr in rep["pairs"]:
            lines.append(
                f"pair ({pr['a']},{pr['b']}): lemma3={pr['lemma3']} splitting={pr['splitting']}"
                + (f" D={pr['witness_D']}" if pr["witness_D"] else "")
            )
    return code, "\n".join(lines) + "\n"


def run_verify(cfg: JobConfig) -> tuple[int, str]:
    vcfg = VerifyConfig(seed=cfg.seed, constellations=cfg.constellations, semigroups=cfg.semigroups)
    if cfg.input_path is not None:
        try:
            with open(cfg.input_path) as fh:
                records = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot load replay file: {exc}") from None
        if isinstance(records, dict) and "failures" in records:
            records = records["failures"]
        if isinstance(records, dict):
            records = [records]
        report = None
        for rec in records:
            try:
                one = replay(rec, vcfg)
            except (KeyError, TypeError) as exc:
                raise InputError(f"malformed replay record: {exc!r}") from None
            if report is None:
                report = one
            else:
                report.merge(one)
        if report is None:
            raise InputError("replay file holds no records")
    else:
        report = run_verify_suite(vcfg)
    if cfg.replay_out and report.failures:
        with open(cfg.replay_out, "w") as fh:
            fh.write(_dump(report.failures))
    code = EXIT_OK if report.ok else EXIT_DISAGREE
    if cfg.output_format == "json":
        return code, _dump(report.to_json())
    text = report.to_text()
    for f in report.failures:
        text += "replay: " + json.dumps(f, sort_keys=True) + "\n"
    return code, text


DISPATCH = {
    "constellation": run_constellation,
    "semigroup": run_semigroup,
    "fibers": run_fibers,
    "verify": run_verify,
}


def execute(cfg: JobConfig) -> tuple[int, str, str]:
    """Run one job; returns (exit code, stdout text, stderr text)."""
    try:
        code, out = DISPATCH[cfg.mode](cfg)
        return code, out, ""
    except ConstellationError as exc:
        return EXIT_INPUT, "", "".join(f"error: {v}\n" for v in exc.violations)
    except (SpecError, InputError) as exc:
        return EXIT_INPUT, "", f"error: {exc}\n"
    except StructuralClaimError as exc:
        return EXIT_INTERNAL, "", f"internal assertion failed: {exc}\n"
    except ResourceCapError as exc:
        return EXIT_CAP, "", f"resource cap: {exc}\n"


def main(argv: Optional[Sequence[str]] = None) -> int:
    ns = build_parser().parse_args(argv)
    code, out, err = execute(config_from_args(ns))
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
