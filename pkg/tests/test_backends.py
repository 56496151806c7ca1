"""Agreement between the compiled kernels and the pure-python fallback."""

import os
import subprocess
import sys

import numpy as np
import pytest

from gvbopt._kernels import COMPILED, _pykernels

if COMPILED:
    from gvbopt._kernels import _core
else:
    _core = None

needs_compiled = pytest.mark.skipif(not COMPILED, reason="compiled backend missing")


def random_partitions(rng, count, max_slugs=12):
    out = []
    for _ in range(count):
        n = int(rng.integers(1, max_slugs + 1))
        cuts = np.sort(rng.uniform(0.02, 0.98, size=n - 1))[::-1]
        out.append(np.concatenate(([1.0], cuts, [0.0])))
    return out


@needs_compiled
class TestPairwiseAgreement:
    def test_every_kernel_code_pair(self):
        # exercises the inline viscosity and flux evaluators of the
        # compiled module through the time formulas
        c = np.array([1.0, 0.7, 0.4, 0.1, 0.0])
        for vcode, p0, p1 in ((0, 1.0, 9.0), (1, 1.0, 2.302585), (2, 1.0, 1.5)):
            for fcode, fpar in ((0, 0.22), (1, 2.0 / 3.0), (1, 1.0)):
                a = np.asarray(_core.times_gk(fcode, fpar, vcode, p0, p1, 1.0, c))
                b = _pykernels.times_gk(fcode, fpar, vcode, p0, p1, 1.0, c)
                np.testing.assert_allclose(a, b, rtol=1e-14, atol=1e-15)

    def test_mobility_integral(self):
        for vcode, p0, p1 in ((0, 1.0, 9.0), (1, 1.0, 2.302585), (2, 1.0, 1.5)):
            a = _core.mobility_integral(vcode, p0, p1, 1.0, 0.1, 0.9)
            b = _pykernels.mobility_integral(vcode, p0, p1, 1.0, 0.1, 0.9)
            assert a == pytest.approx(b, rel=1e-13)

    def test_times_and_volumes(self):
        rng = np.random.default_rng(7)
        for c in random_partitions(rng, 40):
            for vcode, p0, p1 in ((0, 1.0, 9.0), (1, 1.0, 2.302585)):
                ta = np.asarray(_core.times_tfe(vcode, p0, p1, 1.0, c))
                tb = _pykernels.times_tfe(vcode, p0, p1, 1.0, c)
                np.testing.assert_allclose(ta, tb, atol=1e-13)
                va = _core.partition_volume_tfe(vcode, p0, p1, 1.0, c)
                vb = _pykernels.partition_volume_tfe(vcode, p0, p1, 1.0, c)
                assert va == pytest.approx(vb, abs=1e-13)
                for fcode, fpar in ((0, 0.22), (1, 2.0 / 3.0)):
                    ga = np.asarray(
                        _core.times_gk(fcode, fpar, vcode, p0, p1, 1.0, c)
                    )
                    gb = _pykernels.times_gk(fcode, fpar, vcode, p0, p1, 1.0, c)
                    np.testing.assert_allclose(ga, gb, atol=1e-13)
                    wa = _core.partition_volume_gk(fcode, fpar, vcode, p0, p1, 1.0, c)
                    wb = _pykernels.partition_volume_gk(
                        fcode, fpar, vcode, p0, p1, 1.0, c
                    )
                    assert wa == pytest.approx(wb, abs=1e-13)

    def test_scans_identical(self):
        grid = np.linspace(1.0, 0.0, 201)
        prefix = np.array(
            [_pykernels.mobility_integral(0, 1.0, 9.0, 1.0, 0.0, g) for g in grid]
        )
        m_top = 1.0 / 10.0
        va = np.asarray(_core.scan_two_tfe(grid, prefix, m_top))
        vb = _pykernels.scan_two_tfe(grid, prefix, m_top)
        np.testing.assert_array_equal(va, vb)
        v3a, ia, ja = _core.scan_three_tfe(grid, prefix, m_top)
        v3b, ib, jb = _pykernels.scan_three_tfe(grid, prefix, m_top)
        assert (v3a, ia, ja) == (pytest.approx(v3b, abs=1e-15), ib, jb)

        # gk scans accumulate in a different order in the fused loop, so
        # they match to rounding noise rather than bit for bit
        mob = 1.0 / np.asarray(
            _pykernels.viscosity_values(0, 1.0, 9.0, grid)
        )
        ga = np.asarray(_core.scan_two_gk(0, 0.22, grid, mob))
        gb = _pykernels.scan_two_gk(0, 0.22, grid, mob)
        np.testing.assert_allclose(ga, gb, rtol=1e-13)
        g3a = _core.scan_three_gk(1, 2.0 / 3.0, grid, mob)
        g3b = _pykernels.scan_three_gk(1, 2.0 / 3.0, grid, mob)
        assert g3a[1:] == g3b[1:]
        assert g3a[0] == pytest.approx(g3b[0], rel=1e-13)

    def test_readonly_arrays_accepted(self):
        c = np.array([1.0, 0.5, 0.0])
        c.setflags(write=False)
        assert _core.partition_volume_tfe(0, 1.0, 9.0, 1.0, c) > 0


class TestBackendSelection:
    def test_reported_name_matches_flag(self):
        import gvbopt

        assert gvbopt.backend_name() == ("compiled" if COMPILED else "python")

    def test_env_forces_python(self):
        env = dict(os.environ, GVBOPT_PURE_PYTHON="1")
        out = subprocess.run(
            [sys.executable, "-c", "import gvbopt; print(gvbopt.backend_name())"],
            capture_output=True,
            text=True,
            env=env,
            check=True,
        )
        assert out.stdout.strip() == "python"

    @needs_compiled
    def test_optimum_identical_across_backends(self):
        script = (
            "import gvbopt, json\n"
            "v = gvbopt.LinearViscosity(1.0, 9.0)\n"
            "r = gvbopt.optimize(gvbopt.TFE, v, 3,"
            " gvbopt.OptimizerOptions(multi_starts=2))\n"
            "print(json.dumps([r.volume, list(r.concentrations)]))\n"
        )
        runs = {}
        for force in ("0", "1"):
            env = dict(os.environ, GVBOPT_PURE_PYTHON=force)
            out = subprocess.run(
                [sys.executable, "-c", script],
                capture_output=True,
                text=True,
                env=env,
                check=True,
            )
            runs[force] = out.stdout.strip()
        import json as _json

        va, ca = _json.loads(runs["0"])
        vb, cb = _json.loads(runs["1"])
        assert va == pytest.approx(vb, abs=1e-10)
        np.testing.assert_allclose(ca, cb, atol=1e-7)
