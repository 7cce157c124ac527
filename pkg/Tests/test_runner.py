#!/usr/bin/env python3
"""
Affine Quiver Test Runner

Runs every tool suite and prints a per-suite summary.
"""

import sys
import unittest
from pathlib import Path

# Add parent directory to path for imports
sys.path.append(str(Path(__file__).parent.parent))
sys.path.append(str(Path(__file__).parent))

SUITES = [
    "test_exact_linear_algebra",
    "test_quiver_structure",
    "test_representation_theory",
    "test_reflection_functors",
    "test_tube_analysis",
    "test_canonical_basis",
    "test_hall_algebra",
    "test_cli",
    "test_server",
]


class TestRunner:
    """Runs one unittest module at a time and keeps the tallies."""

    def __init__(self):
        self.total_tests = 0
        self.failed_tests = 0
        self.test_results = []

    def run_suite(self, name):
        print(f"\n{'='*60}")
        print(f"Running {name}")
        print(f"{'='*60}")
        suite = unittest.defaultTestLoader.loadTestsFromName(name)
        result = unittest.TextTestRunner(verbosity=1).run(suite)
        failed = len(result.failures) + len(result.errors)
        passed = result.testsRun - failed
        self.total_tests += result.testsRun
        self.failed_tests += failed
        self.test_results.append((name, passed, result.testsRun, len(result.skipped)))

    def print_summary(self):
        print(f"\n{'='*60}")
        print("FINAL TEST SUMMARY")
        print(f"{'='*60}")
        for name, passed, total, skipped in self.test_results:
            note = f" ({skipped} skipped)" if skipped else ""
            print(f"{name:<30} {passed:>3}/{total:<3}{note}")
        print(f"\nTotal Tests: {self.total_tests}")
        print(f"Failed: {self.failed_tests}")
        if self.failed_tests == 0:
            print("✅ All tests passed")
        else:
            print(f"❌ {self.failed_tests} tests failed")
        return self.failed_tests == 0


def main():
    runner = TestRunner()
    for name in SUITES:
        runner.run_suite(name)
    sys.exit(0 if runner.print_summary() else 1)


if __name__ == "__main__":
    main()
