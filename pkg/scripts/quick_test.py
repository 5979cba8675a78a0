#!/usr/bin/env python3
"""
Quick smoke run of the ncft services
Run with: poetry run python scripts/quick_test.py
"""
import sys
from pathlib import Path

import numpy as np

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent))

from ncft.models.space import OperatorSpaceDesc
from ncft.models.verdict import EstimateKind
from ncft.services.bounds import best_bound
from ncft.services.estimation import ConstantEstimator
from ncft.services.fourier import forward, inverse, random_function
from ncft.services.groups import build_group
from ncft.services.representations import compute_irreps, validate_irreps
from ncft.services.verification import InequalityVerifier


def main():
    print("🚀 ncft smoke run...")

    for spec in ["Z6", "D4", "Q8", "S4"]:
        print(f"\n📊 Group: {spec}")
        print("-" * 60)

        group = build_group(spec)
        table = compute_irreps(group)
        report = validate_irreps(table)
        print(f"✅ Order {group.order}, {len(group.classes)} classes, degrees {table.degrees}")
        if not report.passed:
            print(f"❌ Irrep validation failed: {report.failures[0]}")
            continue

        space = OperatorSpaceDesc.schatten(2, 2)
        f = random_function(group, space, np.random.default_rng(0))
        error = np.max(np.abs(inverse(forward(f, table)).values - f.values))
        print(f"🔁 Round-trip error: {error:.2e}")

        verifier = InequalityVerifier(restarts=0)
        verdicts = verifier.check_hausdorff_young(group, table, 4 / 3, OperatorSpaceDesc.scalar(), trials=20)
        result = verifier.summarize("hy", verdicts, group.label, "scalar", 4 / 3)
        print(f"📐 Hausdorff-Young p=4/3: {result.counts}, worst margin {result.worst_margin:.3e}")

        estimate = ConstantEstimator(hill_steps=10).estimate(
            EstimateKind.type, group, table, 2.0, OperatorSpaceDesc.schatten(2, 1), level=1, trials=4,
        )
        bound = best_bound(EstimateKind.type, OperatorSpaceDesc.schatten(2, 1), 2.0)
        print(f"📈 Type constant, Schatten(2,1), p=2: >= {estimate.value:.4f} (bound {bound:.4f})")


if __name__ == "__main__":
    main()
