"""Reconstructed feedforward and grouping tables, with re-verification."""

from __future__ import annotations

from . import analyzer, cluster


def table1(n_values=range(2, 7)) -> dict:
    """Deferred Pauli corrections per detector pattern for chains of each length."""
    tables = {}
    verified = True
    for n in n_values:
        rules = cluster.derive_correction_table(n)
        verified &= cluster.verify_correction_table(n, rules)
        tables[str(n)] = [r.to_json() for r in rules]
    return {
        "schema": 1,
        "derived": True,
        "description": (
            "pattern bits are detectors P1..P(n-1), 1 = even; 'correction' is applied after the "
            "last gadget as [factor, qubit] with XZ meaning Z then X; 'inline_equivalent' is the "
            "X applied to the fresh qubit before its Hadamard"
        ),
        "tables": tables,
        "verified": bool(verified),
    }


def table2() -> dict:
    """Analyzer grouping tables from simulation, checked against the parity oracle."""
    out = {"schema": 1, "derived": True, "verified": True}
    for family in ("ghz3", "quad"):
        derived = analyzer.derived_group_table(family)
        oracle = analyzer.oracle_group_table(family)
        out[family] = derived
        out["verified"] &= derived == oracle
    return out
