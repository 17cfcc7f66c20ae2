import unittest

import ddt
import mock
from basis_speed_limits import checks
from basis_speed_limits import models


@ddt.ddt
class TestChecks(unittest.TestCase):
    @ddt.data(
        "saturation",
        "two_qubit",
        "constraint",
        "rotated_basis",
        "permutation",
        "fidelity_curve",
        "classifier",
        "coherence",
    )
    def test_check_passes(self, name):
        """Test that each closed-form check passes."""
        results = checks.run_checks(only=[name])
        self.assertTrue(results)
        for result in results:
            self.assertTrue(result.passed, msg=f"{result.name}: {result.error} {result.detail}")

    def test_check_general_bound(self):
        """Test the oracle check restricted to one dimension."""
        results = checks.run_checks(only=["general_bound"], d=4)
        self.assertEqual([r.name for r in results], ["general_bound d=4"])
        self.assertTrue(results[0].passed)

    def test_check_d6(self):
        """Test the six-dimensional refinement check."""
        results = checks.run_checks(only=["d6"])
        self.assertTrue(all(r.passed for r in results))

    def test_check_sampling(self):
        """Test that sampling never undercuts the qutrit bounds."""
        results = checks.run_checks(only=["sampling"], samples=2000, seed=3)
        self.assertEqual(len(results), 2)
        self.assertTrue(all(r.passed for r in results))

    def test_saturation_tolerance(self):
        """Test that an impossible tolerance makes the saturation check fail."""
        results = checks.run_checks(only=["saturation"], tol=-1.0)
        self.assertFalse(any(r.passed for r in results))

    def test_run_checks_options(self):
        """Test that the options reach every check in order."""
        first = mock.Mock(return_value=[models.CheckResult("a", True, 0.0, "")])
        second = mock.Mock(return_value=[models.CheckResult("b", False, 1.0, "")])
        with mock.patch.dict(checks.CHECKS, {"first": first, "second": second}, clear=True):
            results = checks.run_checks(d=5, samples=10, seed=7, tol=0.5)
        options = models.CheckOptions(d=5, samples=10, seed=7, tol=0.5)
        first.assert_called_once_with(options)
        second.assert_called_once_with(options)
        self.assertEqual([r.name for r in results], ["a", "b"])

    def test_run_checks_alias(self):
        """Test that aliases resolve to the check they name."""
        check = mock.Mock(return_value=[])
        with mock.patch.dict(checks.CHECKS, {"general_bound": check}):
            checks.run_checks(only=["theorem4"], d=3)
        check.assert_called_once()
        self.assertEqual(check.call_args[0][0].d, 3)

    def test_run_checks_unknown(self):
        """Test that unknown check names are rejected."""
        with self.assertRaises(KeyError):
            checks.run_checks(only=["nonexistent"])


if __name__ == "__main__":
    unittest.main()
