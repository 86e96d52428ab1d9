"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import acceptance, analyzer, cluster, config, fermion, tables
from . import qstate as qs

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _emit(args, report: dict, text_lines: list[str]) -> None:
    body = _dump(report) if args.format == "json" else "\n".join(text_lines) + "\n"
    if args.output:
        Path(args.output).write_text(body, encoding="utf-8")
    else:
        sys.stdout.write(body)


def _mode(args):
    if args.mode == "sample":
        if args.seed is None:
            raise UsageError("--seed is required with --mode sample")
        if args.seed < 0:
            raise UsageError("--seed must be a non-negative integer")
        return qs.Sample(args.seed)
    if args.seed is not None:
        raise UsageError("--seed only applies to --mode sample")
    return qs.Enumerate()


def cmd_prepare(args) -> int:
    if args.n < 2:
        raise UsageError("prepare needs --n >= 2")
    if args.n > config.tol().n_max:
        raise UsageError(f"--n exceeds N_max={config.tol().n_max}")
    if args.forced is not None:
        if args.mode == "sample" or args.seed is not None:
            raise UsageError("--forced cannot be combined with sampling")
        if len(args.forced) != args.n - 1 or set(args.forced) - set("01"):
            raise UsageError(f"--forced needs {args.n - 1} bits (one per detector)")
        mode = qs.Forced(cluster.pattern_to_outcomes(args.forced, args.n))
        mode_name = "forced"
    else:
        mode = _mode(args)
        mode_name = args.mode
    records = cluster.prepare_cluster(args.n, mode)
    with_states = args.states or mode_name != "enumerate"
    ok = all(r.passed for r in records)
    report = {
        "schema": 1,
        "command": "prepare",
        "n": args.n,
        "mode": mode_name,
        "seed": args.seed,
        "records": [r.to_json(include_state=with_states) for r in records],
        "pass": ok,
    }
    lines = [f"prepare n={args.n} mode={mode_name} branches={len(records)}"]
    lines += [
        f"  {r.outcomes:>{args.n - 1}}  p={r.probability:.6f}  "
        f"corrections={' '.join(f'{p}{q}' for p, q in r.corrections) or '-':<12} pass={r.passed}"
        for r in records
    ]
    lines.append(f"result: {'PASS' if ok else 'FAIL'}")
    _emit(args, report, lines)
    return EXIT_OK if ok else EXIT_FAIL


def parse_state_spec(text: str, n_qubits: int) -> tuple[qs.StateVector, analyzer.EntangledLabel | None]:
    text = text.strip()
    if text.startswith("["):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"malformed amplitude list: {exc}") from None
        try:
            amps = np.array([complex(a[0], a[1]) if isinstance(a, list) else complex(a) for a in raw])
        except (TypeError, ValueError, IndexError):
            raise UsageError("amplitudes must be numbers or [re, im] pairs") from None
        if amps.size != 1 << n_qubits:
            raise UsageError(f"expected {1 << n_qubits} amplitudes, got {amps.size}")
        try:
            return qs.StateVector(amps), None
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    try:
        label = analyzer.EntangledLabel.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if analyzer.FAMILY_QUBITS[label.family] != n_qubits:
        raise UsageError(f"{label} has {analyzer.FAMILY_QUBITS[label.family]} qubits, analyzer needs {n_qubits}")
    return analyzer.basis_state(label), label


def cmd_analyze(args) -> int:
    tree = analyzer.ANALYZERS[args.family]()
    mode = _mode(args)
    state, label = parse_state_spec(args.input, tree.n_qubits)
    rep = analyzer.classify(tree, state, mode, true_label=label)
    report = rep.to_json()
    report.update({"command": "analyze", "mode": args.mode, "seed": args.seed})
    if label is None:
        report["input"] = "explicit"
    lines = [f"analyze family={args.family} input={report['input']} mode={args.mode}"]
    for br in rep.branches:
        outs = " ".join(f"{k}={v}" for k, v in br.outcomes.items())
        lines.append(f"  {outs:<40} p={br.probability:.6f}  {br.label}")
    lines.append(f"deterministic: {rep.deterministic}")
    _emit(args, report, lines)
    if label is not None and not rep.deterministic:
        return EXIT_FAIL
    return EXIT_OK


def cmd_tables(args) -> int:
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t1 = tables.table1(range(2, config.tol().n_table + 1))
    t2 = tables.table2()
    (out_dir / "table1_derived.json").write_text(_dump(t1), encoding="utf-8")
    (out_dir / "table2_derived.json").write_text(_dump(t2), encoding="utf-8")
    ok = t1["verified"] and t2["verified"]
    lines = [
        f"table1_derived.json: N=2..{config.tol().n_table}, verified={t1['verified']}",
        f"table2_derived.json: verified={t2['verified']}",
    ]
    for key, classes in t2["quad"]["P1P2"].items():
        lines.append(f"  quad P1P2={key}: {{{', '.join(classes)}}}")
    report = {"schema": 1, "command": "tables", "table1_verified": t1["verified"], "table2_verified": t2["verified"]}
    _emit(args, report, lines)
    return EXIT_OK if ok else EXIT_FAIL


def corrupted_scattering() -> np.ndarray:
    """Negative control: a spin-blind 50:50 path splitter instead of the PBS."""
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    # mode order (A_up, A_down, B_up, B_down): mix path, keep spin
    return np.kron(h, np.eye(2))


def cmd_fermion_check(args) -> int:
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    scattering = corrupted_scattering() if args.corrupt_pbs else None
    report = fermion.verify_parity_povm(samples=args.samples, seed=args.seed, scattering=scattering)
    report["command"] = "fermion-check"
    lines = [
        f"fermion-check samples={args.samples} seed={args.seed}",
        f"  P(One) on |++>   {report['plus_plus']['p_one']:.12f}",
        f"  max prob dev     {report['max_prob_dev']:.3e}",
        f"  max state dev    {report['max_state_dev']:.3e}",
        f"  phase sweep      {'pass' if report['phase_sweep_pass'] else 'FAIL'}",
        f"result: {'PASS' if report['pass'] else 'FAIL'}",
    ]
    _emit(args, report, lines)
    return EXIT_OK if report["pass"] else EXIT_FAIL


def cmd_verify(args) -> int:
    results = acceptance.run_all(echo=None)
    report = {
        "schema": 1,
        "command": "verify",
        "criteria": [{"number": r.number, "name": r.name, "pass": r.passed, "detail": r.detail} for r in results],
        "pass": all(r.passed for r in results),
    }
    _emit(args, report, [r.line() for r in results])
    return EXIT_OK if report["pass"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--eps-norm", type=float, help="normalization tolerance (default 1e-12)")
    common.add_argument("--eps-prune", type=float, help="branch pruning threshold (default 1e-12)")

    sampling = argparse.ArgumentParser(add_help=False)
    sampling.add_argument("--mode", choices=("enumerate", "sample"), default="enumerate")
    sampling.add_argument("--seed", type=int)

    p = argparse.ArgumentParser(prog="fermicluster", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("prepare", parents=[common, sampling], help="prepare a linear cluster state")
    sp.add_argument("--n", type=int, required=True, help="number of qubits in the chain")
    sp.add_argument("--forced", help="detector outcomes P1..P(n-1) as bits, 1 = even")
    sp.add_argument("--states", action="store_true", help="include amplitudes when enumerating")
    sp.set_defaults(func=cmd_prepare)

    sa = sub.add_parser("analyze", parents=[common, sampling], help="run an entanglement analyzer")
    sa.add_argument("--family", choices=tuple(analyzer.ANALYZERS), required=True)
    sa.add_argument("--input", required=True, help="label like quad:vii- or a JSON amplitude list")
    sa.set_defaults(func=cmd_analyze)

    st = sub.add_parser("tables", parents=[common], help="derive and re-verify the correction and grouping tables")
    st.add_argument("--output-dir", default=".")
    st.set_defaults(func=cmd_tables)

    sf = sub.add_parser("fermion-check", parents=[common], help="validate the fermionic encoder model")
    sf.add_argument("--samples", type=int, default=1000)
    sf.add_argument("--seed", type=int, default=0)
    sf.add_argument("--corrupt-pbs", action="store_true", help=argparse.SUPPRESS)
    sf.set_defaults(func=cmd_fermion_check)

    sv = sub.add_parser("verify", parents=[common], help="run every acceptance criterion")
    sv.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    overrides = {k: v for k, v in (("eps_norm", args.eps_norm), ("eps_prune", args.eps_prune)) if v is not None}
    saved = config.tol()
    if overrides:
        config.set_tolerances(**overrides)
    try:
        return args.func(args)
    except (UsageError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        config.set_tolerances(**vars(saved))


if __name__ == "__main__":
    sys.exit(main())
