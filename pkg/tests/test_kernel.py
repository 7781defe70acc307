import os
import subprocess
import sys

import numpy as np
import pytest

from lifshitz import GeometryThermal, LayeredBody, PerfectReflector, casimir_pressure, free_energy
from lifshitz import _kernel_py
from lifshitz.kernel import BACKEND, _compiled, integrate_term, transparent
from lifshitz.layered import ConductivityProvider
from lifshitz.materials import Vacuum, library

needs_compiled = pytest.mark.skipif(_compiled is None, reason="compiled extension not built")

BODIES = [
    ("gold", library.gold_drude(), library.gold_drude()),
    ("plasma-nickel", library.nickel_plasma(), library.gold_plasma()),
    ("silica", library.fused_silica(), library.fused_silica()),
    ("stack", library.nickel_drude(), LayeredBody(library.nickel_drude(),
                                                  ((library.gold_drude(), 30e-9),))),
    ("ideal", PerfectReflector(), PerfectReflector()),
]


def test_kronrod_tables_integrate_polynomials_exactly():
    x = _kernel_py._NODES
    for degree in range(23):
        exact = (1 - (-1) ** (degree + 1)) / (degree + 1)
        assert np.dot(_kernel_py._WK, x**degree) == pytest.approx(exact, abs=1e-15)
    for degree in range(14):
        exact = (1 - (-1) ** (degree + 1)) / (degree + 1)
        assert np.dot(_kernel_py._WG, x**degree) == pytest.approx(exact, abs=1e-15)


def test_gauss_nodes_match_legendre_roots():
    nodes, weights = np.polynomial.legendre.leggauss(7)
    assert np.allclose(np.sort(_kernel_py._NODES[_kernel_py._WG > 0]), nodes, atol=1e-15)
    assert np.allclose(_kernel_py._WG[_kernel_py._WG > 0], weights[np.argsort(nodes)], atol=1e-15)


@needs_compiled
@pytest.mark.parametrize("name, b1, b2", BODIES, ids=[b[0] for b in BODIES])
@pytest.mark.parametrize("fn", [free_energy, casimir_pressure])
def test_backends_agree(name, b1, b2, fn):
    for a, T in [(150e-9, 300.0), (800e-9, 77.0)]:
        g = GeometryThermal(a, T)
        c = fn(b1, b2, g, backend="compiled")
        p = fn(b1, b2, g, backend="python")
        assert c.value == pytest.approx(p.value, rel=1e-13)
        assert c.l_max == p.l_max


@needs_compiled
def test_per_term_decisions_agree():
    b = library.gold_drude()
    for l in (0, 1, 30):
        from lifshitz import matsubara_frequency
        from lifshitz.constants import C

        xi = matsubara_frequency(l, 300.0)
        args = (0, 4e-7 * xi / C, 4e-7, b, b, l, 300.0, xi, 1e-9, 20_000)
        vc, ec, nc, okc = integrate_term(*args, backend="compiled")
        vp, ep, np_, okp = integrate_term(*args, backend="python")
        assert (nc, okc) == (np_, okp)
        assert vc == pytest.approx(vp, rel=1e-14)


def test_graphene_bodies_use_python_path():
    coated = LayeredBody(library.silicon(), graphene=ConductivityProvider())
    g = GeometryThermal(300e-9, 300.0)
    assert free_energy(coated, coated, g).value == free_energy(coated, coated, g,
                                                               backend="python").value


def test_transparent_bodies():
    assert transparent(Vacuum())
    assert transparent(LayeredBody(Vacuum(), ((Vacuum(), 1e-8),)))
    assert not transparent(LayeredBody(Vacuum(), ((library.gold_drude(), 1e-8),)))
    assert not transparent(LayeredBody(Vacuum(), graphene=ConductivityProvider()))


def test_pure_python_fallback_selected_by_environment():
    env = dict(os.environ, LIFSHITZ_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import lifshitz; print(lifshitz.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    assert BACKEND in ("compiled", "python")
