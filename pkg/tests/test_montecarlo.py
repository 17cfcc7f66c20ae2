import configparser
import io
import itertools
import unittest

import ddt
import mock
import numpy as np
from basis_speed_limits import bounds
from basis_speed_limits import errors
from basis_speed_limits import linalg
from basis_speed_limits import models
from basis_speed_limits import montecarlo
from basis_speed_limits import states
from numpy import testing


def _in_process(func, items, workers=1):
    return [func(item) for item in items]


def _conf(**kwargs) -> configparser.ConfigParser:
    conf = configparser.ConfigParser()
    conf.read_dict({"montecarlo": {k: str(v) for k, v in kwargs.items()}})
    return conf


def _reference_et(phases):
    """Smallest spread, ties kept by the first assignment in (popcount, lexicographic) order."""
    assignments = sorted(itertools.product((False, True), repeat=len(phases)), key=sum)
    best, best_bits = None, None
    for bits in assignments:
        energies = phases + 2 * np.pi * np.array(bits)
        spread = energies.mean() - energies.min()
        if best is None or spread < best - montecarlo.TIE_TOL:
            best, best_bits = spread, bits
    return best, best_bits


@ddt.ddt
class TestBranchMasks(unittest.TestCase):
    def test_branch_masks_order(self):
        """Test that masks are ordered by popcount, then lexicographically."""
        testing.assert_array_equal(
            montecarlo.branch_masks(2),
            [[False, False], [False, True], [True, False], [True, True]],
        )

    @ddt.data(1, 3, 8)
    def test_branch_masks_count(self, d):
        """Test that all assignments are listed once."""
        masks = montecarlo.branch_masks(d)
        self.assertEqual(masks.shape, (2**d, d))
        self.assertEqual(len({tuple(row) for row in masks}), 2**d)

    @ddt.data(3, 4, 6)
    def test_branch_masks_popcount_then_lexicographic(self, d):
        """Test that masks with equal popcount follow each other in lexicographic order."""
        rows = [tuple(bool(b) for b in row) for row in montecarlo.branch_masks(d)]
        keys = [(sum(row), row) for row in rows]
        self.assertEqual(keys, sorted(keys))
        self.assertEqual(rows[0], (False,) * d)
        self.assertEqual(rows[-1], (True,) * d)

    def test_branch_masks_too_large(self):
        """Test that very large dimensions are rejected."""
        with self.assertRaises(errors.DimTooLargeError):
            montecarlo.branch_masks(21)


@ddt.ddt
class TestEtFromUnitary(unittest.TestCase):
    @ddt.data(
        ([0.0, 0.0, 0.0], 0.0, (False, False, False)),
        ([-np.pi / 2, np.pi / 2], np.pi / 2, (False, False)),
        ([-3.0, 3.0], np.pi - 3.0, (True, False)),
    )
    def test_batch_et(self, args):
        """Test the 'batch_et' function on hand-picked eigenphases."""
        phases, expected, bits = args
        ets, index = montecarlo.batch_et(np.array([phases]))
        self.assertAlmostEqual(float(ets[0]), expected, places=12)
        self.assertEqual(tuple(montecarlo.branch_masks(len(phases))[index[0]]), bits)

    @ddt.data(
        ([-np.pi / 2, np.pi / 2 + 1e-13], (np.pi + 1e-13) / 2, (False, False)),
        ([-np.pi / 2, np.pi / 2 + 1e-6], (np.pi - 1e-6) / 2, (True, False)),
        ([0.3, 0.3, 0.3], 0.0, (False, False, False)),
        ([-2 * np.pi / 3, 0.0, 2 * np.pi / 3], 2 * np.pi / 3, (False, False, False)),
    )
    def test_batch_et_ties(self, args):
        """Test that near-ties within TIE_TOL keep the earliest mask and larger gaps do not."""
        phases, expected, bits = args
        ets, index = montecarlo.batch_et(np.array([phases]))
        self.assertAlmostEqual(float(ets[0]), expected, places=12)
        chosen = montecarlo.branch_masks(len(phases))[index[0]]
        self.assertEqual(tuple(bool(b) for b in chosen), bits)

    @ddt.data(2, 3, 4)
    def test_batch_et_matches_reference(self, d):
        """Test the vectorized branch search against a plain loop over ordered assignments."""
        rng = np.random.default_rng(30 + d)
        rows = np.sort(rng.uniform(-np.pi, np.pi, (1000, d)), axis=1)
        ets, index = montecarlo.batch_et(rows)
        masks = montecarlo.branch_masks(d)
        for row, et, i in zip(rows, ets, index):
            expected, bits = _reference_et(row)
            self.assertAlmostEqual(float(et), expected, places=12)
            self.assertEqual(tuple(bool(b) for b in masks[i]), bits)

    def test_et_from_unitary_identity(self):
        """Test that the identity costs nothing."""
        et, bits = montecarlo.et_from_unitary(linalg.unitary_eigphases(np.eye(3)))
        self.assertEqual(et, 0.0)
        self.assertEqual(bits, (False, False, False))

    def test_et_for_phases_plus(self):
        """Test the unitary with zero phases onto the plus basis."""
        record = montecarlo.et_for_phases(states.standard_basis("qutrit_plus", 3), [0, 0, 0])
        self.assertAlmostEqual(record.et, 2 * np.pi / 9, places=9)

    def test_et_for_phases_tilde(self):
        """Test the optimal phases onto the tilde basis."""
        record = montecarlo.et_for_phases(
            states.standard_basis("qutrit_tilde", 3), [0, 0, 2 * np.pi / 3]
        )
        self.assertAlmostEqual(record.et, 4 * np.pi / 9, places=9)

    def test_et_matches_saturating_hamiltonian(self):
        """Test that the minimal Et of the optimal evolution equals the bound."""
        h, t, _, _ = bounds.saturation_case("two_qubit")
        et, _ = montecarlo.et_from_unitary(linalg.mat_exp(h, t))
        self.assertLessEqual(et, np.pi / 4 + 1e-9)

    def test_hamiltonian_from_unitary(self):
        """Test that the branch Hamiltonian generates the unitary with mean energy Et."""
        rng = np.random.default_rng(12)
        dst = states.standard_basis("qutrit_tilde", 3)
        for _ in range(1000):
            record = montecarlo.et_for_phases(dst, rng.uniform(0, 2 * np.pi, 3))
            u = linalg.unitary_eigphases(montecarlo.phase_unitary(dst, record.phases))
            h = montecarlo.hamiltonian_from_unitary(u, record.branch_bits)
            testing.assert_allclose(linalg.mat_exp(h, 1.0).matrix, u.matrix, atol=1e-9)
            self.assertAlmostEqual(bounds.mean_energy(h), record.et, places=9)

    def test_phase_unitary_convention(self):
        """Test that column n of the unitary is e^{+i phi_n} dst_n."""
        dst = states.standard_basis("qutrit_tilde", 3)
        phases = [np.pi / 2, 0.0, -np.pi / 3]
        u = montecarlo.phase_unitary(dst, phases)
        for n, phase in enumerate(phases):
            testing.assert_allclose(u[:, n], np.exp(1j * phase) * dst.element(n), atol=1e-12)

    def test_phase_unitary_dim_mismatch(self):
        """Test that the number of phases must match the basis."""
        with self.assertRaises(errors.DimMismatchError):
            montecarlo.phase_unitary(states.standard_basis("qutrit_plus", 3), [0, 0])

    def test_evaluate_phases_matches_single(self):
        """Test that the vectorized evaluation agrees with the one-at-a-time one."""
        rng = np.random.default_rng(13)
        dst = states.standard_basis("qutrit_plus", 3)
        phases = rng.uniform(0, 2 * np.pi, (1000, 3))
        eigenphases, ets, _ = montecarlo.evaluate_phases(dst.columns, phases)
        for row in range(1000):
            record = montecarlo.et_for_phases(dst, phases[row])
            self.assertAlmostEqual(float(ets[row]), record.et, places=9)
            testing.assert_allclose(eigenphases[row], record.eigenphases, atol=1e-9)


@ddt.ddt
class TestSamplers(unittest.TestCase):
    def test_block_phases_prefix(self):
        """Test that a shorter block is a prefix of a longer one."""
        testing.assert_array_equal(
            montecarlo.block_phases(7, 2, 10, 3), montecarlo.block_phases(7, 2, 50, 3)[:10]
        )
        other_block = montecarlo.block_phases(7, 1, 10, 3)
        self.assertFalse(np.array_equal(other_block, montecarlo.block_phases(7, 2, 10, 3)))

    @ddt.data("plus", "tilde")
    def test_sample_is_deterministic(self, target):
        """Test that a seed always gives the same histogram."""
        sampler = montecarlo.SAMPLERS[target](configparser.ConfigParser())
        h1 = sampler.sample(2000, 42)
        h2 = sampler.sample(2000, 42)
        testing.assert_array_equal(h1.counts, h2.counts)
        self.assertEqual(h1.min_et, h2.min_et)
        self.assertEqual(int(np.sum(h1.counts)), 2000)
        self.assertEqual(len(h1.bin_edges), montecarlo.DEFAULT_BINS + 1)

    def test_sample_prefix_stable(self):
        """Test that more samples extend the sequence of fewer ones."""
        sampler = montecarlo.PlusBasisSampler(configparser.ConfigParser(), block_size=64)
        testing.assert_array_equal(
            sampler.sample_ets(100, 5), sampler.sample_ets(300, 5)[:100]
        )

    def test_sample_workers(self):
        """Test that the result does not depend on the number of processes."""
        one = montecarlo.TildeBasisSampler(configparser.ConfigParser(), workers=1, block_size=256)
        two = montecarlo.TildeBasisSampler(configparser.ConfigParser(), workers=2, block_size=256)
        testing.assert_array_equal(one.sample_ets(1000, 3), two.sample_ets(1000, 3))

    @ddt.data(
        (2, 64, 1000),
        (3, 100, 1001),
        (4, 7, 150),
    )
    def test_sample_independent_of_workers(self, args):
        """Test that histograms are identical for one worker and for several."""
        workers, block_size, n_samples = args
        conf = configparser.ConfigParser()
        one = montecarlo.TildeBasisSampler(conf, workers=1, block_size=block_size)
        many = montecarlo.TildeBasisSampler(conf, workers=workers, block_size=block_size)
        h1, h2 = one.sample(n_samples, 19, bins=50), many.sample(n_samples, 19, bins=50)
        testing.assert_array_equal(h1.counts, h2.counts)
        testing.assert_array_equal(h1.bin_edges, h2.bin_edges)
        self.assertEqual(h1.min_et, h2.min_et)

    def test_sample_ets_follows_block_streams(self):
        """Test that samples concatenate the per-block streams, block b at counter b."""
        sampler = montecarlo.PlusBasisSampler(configparser.ConfigParser(), block_size=16)
        blocks = enumerate([16, 16, 8])
        phases = np.vstack([montecarlo.block_phases(1, b, n, 3) for b, n in blocks])
        columns = states.standard_basis("qutrit_plus", 3).columns
        testing.assert_array_equal(
            sampler.sample_ets(40, 1), montecarlo.evaluate_phases(columns, phases)[1]
        )

    @ddt.data(
        ("plus", 2 * np.pi / 9),
        ("tilde", 4 * np.pi / 9),
    )
    def test_sample_respects_bound(self, args):
        """Test that no sample undercuts the qutrit bound."""
        target, bound = args
        sampler = montecarlo.SAMPLERS[target](configparser.ConfigParser())
        self.assertGreaterEqual(sampler.sample(5000, 0).min_et, bound - 1e-9)

    @mock.patch("basis_speed_limits.parallel_map", side_effect=_in_process)
    def test_sample_reads_configuration(self, parallel_map):
        """Test that block size and workers are read from the configuration."""
        sampler = montecarlo.PlusBasisSampler(_conf(block_size=16, workers=3))
        sampler.sample_ets(40, 1)
        _, tasks, workers = parallel_map.call_args[0]
        self.assertEqual([task[3] for task in tasks], [16, 16, 8])
        self.assertEqual(workers, 3)

    def test_sampler_bad_configuration(self):
        """Test that a non-positive block size is rejected."""
        with self.assertRaises(ValueError):
            montecarlo.PlusBasisSampler(_conf(block_size=0))

    def test_sampler_bad_arguments(self):
        """Test that non-positive counts and negative seeds are rejected."""
        sampler = montecarlo.PlusBasisSampler(configparser.ConfigParser())
        with self.assertRaises(ValueError):
            sampler.sample_ets(0, 1)
        with self.assertRaises(ValueError):
            sampler.sample_ets(10, -1)
        with self.assertRaises(ValueError):
            sampler.sample(10, 1, bins=0)

    def test_iter_records_matches_sample_ets(self):
        """Test that per-sample records follow the sampled order."""
        sampler = montecarlo.TildeBasisSampler(configparser.ConfigParser(), block_size=32)
        records = list(sampler.iter_records(70, 9))
        testing.assert_allclose([r.et for r in records], sampler.sample_ets(70, 9))
        self.assertTrue(all(len(r.branch_bits) == 3 for r in records))

    def test_ordered_basis_sampler(self):
        """Test sampling onto an arbitrary basis."""
        basis = states.standard_basis("fourier", 4)
        sampler = montecarlo.OrderedBasisSampler(configparser.ConfigParser(), basis)
        histogram = sampler.sample(500, 11, bins=20)
        self.assertEqual(int(np.sum(histogram.counts)), 500)
        self.assertGreaterEqual(histogram.min_et, np.pi / 4 - 1e-9)

    def test_ordered_basis_sampler_too_large(self):
        """Test that unsupported dimensions are rejected up front."""
        basis = models.OrderedBasis(columns=np.eye(21, dtype=complex))
        with self.assertRaises(errors.DimTooLargeError):
            montecarlo.OrderedBasisSampler(configparser.ConfigParser(), basis)

    def test_sample_wrappers(self):
        """Test the module-level sampling functions."""
        plus = montecarlo.sample_plus(300, 4, bins=10)
        tilde = montecarlo.sample_tilde(300, 4, bins=10)
        self.assertEqual(len(plus.counts), 10)
        self.assertGreaterEqual(tilde.min_et, 4 * np.pi / 9 - 1e-9)
        self.assertEqual(plus.seed, 4)


class TestHistogramCsv(unittest.TestCase):
    def test_histogram_csv(self):
        """Test that a written histogram reads back unchanged."""
        histogram = montecarlo.sample_tilde(500, 17, bins=25)
        content = montecarlo.histogram_to_csv(histogram)
        self.assertTrue(content.startswith(montecarlo.CSV_HEADER + "\n"))
        self.assertIn("# seed=17\n", content)
        parsed = montecarlo.read_histogram_csv(io.StringIO(content))
        testing.assert_array_equal(parsed.counts, histogram.counts)
        testing.assert_array_equal(parsed.bin_edges, histogram.bin_edges)
        self.assertEqual(parsed.min_et, histogram.min_et)
        self.assertEqual(parsed.n_samples, 500)

    def test_read_histogram_csv_malformed(self):
        """Test that missing headers and trailers are rejected."""
        with self.assertRaises(ValueError):
            montecarlo.read_histogram_csv("0,1,2\n")
        with self.assertRaises(ValueError):
            montecarlo.read_histogram_csv(montecarlo.CSV_HEADER + "\n0,1,2\n")


if __name__ == "__main__":
    unittest.main()
