import io

import numpy as np
import pytest

from trcopt.encoding import LayerStack, Material
from trcopt.errors import IngestionError, OpticsError
from trcopt.optics import (
    MaterialTable,
    constant_tables,
    builtin_tables,
    default_grid,
    load_material_table,
    transmittance,
)

SPAN = np.array([300.0, 2500.0])


def flat_table(material, n, kappa=0.0):
    return MaterialTable(material, SPAN, np.full(2, float(n)), np.full(2, float(kappa)))


def test_bare_interface_fresnel():
    # air | n=1.5 substrate: T = 1 - ((n-1)/(n+1))^2 = 0.96 exactly
    tables = {Material.SIO2: flat_table(Material.SIO2, 1.5)}
    stack = LayerStack(layers=())
    spec = transmittance(stack, tables, default_grid())
    assert np.allclose(spec.values, 0.96, atol=1e-12)


def test_embedded_layer_in_matched_media_is_transparent():
    # n=2 layer between n=2 superstrate and substrate: no interfaces, T = 1
    tables = {
        Material.SIO2: flat_table(Material.SIO2, 2.0),
        Material.TIO2: flat_table(Material.TIO2, 2.0),
    }
    stack = LayerStack(
        layers=((Material.TIO2, 137.0),), superstrate=Material.SIO2, substrate=Material.SIO2
    )
    spec = transmittance(stack, tables, default_grid())
    assert np.allclose(spec.values, 1.0, atol=1e-12)


def test_quarter_wave_antireflection_coating():
    # n_s = 2.25 substrate, n = 1.5 quarter-wave layer at 600 nm: T(600) = 1
    tables = {
        Material.SIO2: flat_table(Material.SIO2, 2.25),
        Material.SI3N4: flat_table(Material.SI3N4, 1.5),
    }
    stack = LayerStack(layers=((Material.SI3N4, 100.0),))
    grid = np.array([600.0])
    spec = transmittance(stack, tables, grid)
    assert spec.values[0] == pytest.approx(1.0, abs=1e-12)
    bare = transmittance(LayerStack(layers=()), tables, grid)
    assert bare.values[0] < 0.9


def test_sublayer_splitting_invariance():
    tables = constant_tables()
    grid = default_grid()
    whole = LayerStack(layers=((Material.TIO2, 200.0), (Material.SIO2, 150.0)))
    split = LayerStack(
        layers=(
            (Material.TIO2, 80.0),
            (Material.TIO2, 120.0),
            (Material.SIO2, 75.0),
            (Material.SIO2, 75.0),
        )
    )
    a = transmittance(whole, tables, grid)
    b = transmittance(split, tables, grid)
    assert np.max(np.abs(a.values - b.values)) <= 1e-12


def test_reciprocity_reversed_stack_with_swapped_media():
    # includes an absorbing layer; transmittance is reciprocal when the
    # semi-infinite media are exchanged along with the layer order
    tables = {
        Material.SIO2: flat_table(Material.SIO2, 1.45),
        Material.TIO2: flat_table(Material.TIO2, 2.4, kappa=0.05),
        Material.SI3N4: flat_table(Material.SI3N4, 2.0),
    }
    grid = default_grid()
    forward = LayerStack(
        layers=((Material.TIO2, 90.0), (Material.SI3N4, 140.0), (Material.SIO2, 60.0)),
        superstrate=Material.AIR,
        substrate=Material.SIO2,
    )
    backward = LayerStack(
        layers=tuple(reversed(forward.layers)),
        superstrate=Material.SIO2,
        substrate=Material.AIR,
    )
    a = transmittance(forward, tables, grid)
    b = transmittance(backward, tables, grid)
    assert np.max(np.abs(a.values - b.values)) <= 1e-9


def test_absorption_reduces_transmittance():
    grid = default_grid()
    lossless = {Material.TIO2: flat_table(Material.TIO2, 2.4), Material.SIO2: flat_table(Material.SIO2, 1.45)}
    lossy = {Material.TIO2: flat_table(Material.TIO2, 2.4, kappa=0.2), Material.SIO2: flat_table(Material.SIO2, 1.45)}
    stack = LayerStack(layers=((Material.TIO2, 300.0),))
    t0 = transmittance(stack, lossless, grid)
    t1 = transmittance(stack, lossy, grid)
    # extinction also shifts the fringes, so compare band-integrated throughput
    assert np.trapz(t1.values, grid) < 0.95 * np.trapz(t0.values, grid)
    assert np.all((t1.values >= 0.0) & (t1.values <= 1.0))


def test_values_always_clamped():
    tables = constant_tables()
    grid = default_grid()
    rng = np.random.default_rng(0)
    materials = [Material.SIO2, Material.SI3N4, Material.AL2O3, Material.TIO2]
    for _ in range(5):
        layers = tuple(
            (materials[rng.integers(4)], float(rng.uniform(10, 400))) for _ in range(8)
        )
        spec = transmittance(LayerStack(layers=layers), tables, grid)
        assert np.all((spec.values >= 0.0) & (spec.values <= 1.0))


def test_missing_table_raises():
    with pytest.raises(OpticsError):
        transmittance(LayerStack(layers=((Material.TIO2, 100.0),)), {}, default_grid())


def test_no_extrapolation_outside_table():
    table = MaterialTable(Material.SIO2, np.array([400.0, 700.0]), np.full(2, 1.45), np.zeros(2))
    with pytest.raises(OpticsError):
        table.refractive_index(default_grid())


def test_interpolation_midpoint():
    table = MaterialTable(
        Material.SIO2, np.array([400.0, 600.0]), np.array([1.4, 1.6]), np.array([0.0, 0.2])
    )
    index = table.refractive_index(np.array([500.0]))
    assert index[0] == pytest.approx(1.5 + 0.1j)


def test_load_material_table_from_stream_and_bytes():
    text = "wavelength_nm,n,k\n300,1.5,0\n2500,1.5,0\n"
    a = load_material_table(io.StringIO(text), Material.SIO2)
    b = load_material_table(text.encode(), Material.SIO2)
    assert np.array_equal(a.wavelengths_nm, b.wavelengths_nm)
    assert np.array_equal(a.n, b.n)


@pytest.mark.parametrize(
    "text",
    [
        "",
        "wavelength_nm,n,k\n",
        "wavelength_nm,n,k\n300,abc,0\n",
        "wavelength_nm,n,k\n500,1.5,0\n400,1.5,0\n",
        "wavelength_nm,n,k\n300,-1.0,0\n400,1.5,0\n",
        "wavelength_nm,n,k\n300,1.5,-0.1\n400,1.5,0\n",
    ],
)
def test_load_material_table_rejects_malformed(text):
    with pytest.raises(IngestionError):
        load_material_table(io.StringIO(text), Material.SIO2)


def test_builtin_tables_cover_default_grid():
    tables = builtin_tables()
    grid = default_grid()
    assert set(tables) == {
        Material.SIO2,
        Material.SI3N4,
        Material.AL2O3,
        Material.TIO2,
        Material.PDMS,
    }
    for table in tables.values():
        index = table.refractive_index(grid)
        assert np.all(index.real > 0)
        assert np.all(index.imag >= 0)


def test_builtin_index_ordering_at_visible():
    tables = builtin_tables()
    at550 = {
        m: tables[m].refractive_index(np.array([550.0]))[0].real
        for m in (Material.SIO2, Material.AL2O3, Material.SI3N4, Material.TIO2)
    }
    assert (
        at550[Material.SIO2]
        < at550[Material.AL2O3]
        < at550[Material.SI3N4]
        < at550[Material.TIO2]
    )
