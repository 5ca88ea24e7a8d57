import math

import numpy as np
import pytest

import covmech


def test_catalog_names():
    assert set(covmech.system_names()) == {"flat-plane", "kerr", "quantum-dot", "su2-plane"}
    assert covmech.default_params("kerr") == {"M": 1.0, "a": 0.8}


def test_flat_plane_brackets():
    sys = covmech.build_system("flat-plane", {"B": 0.5, "q": 2.0})
    x, pi = np.array([0.3, -0.2]), np.array([0.7, 0.1])
    assert sys.bracket("pi_x", "pi_y", x, pi) == pytest.approx(1.0)
    assert sys.bracket("x", "pi_x", x, pi) == 1.0
    assert sys.bracket("J", "H", x, pi) == pytest.approx(0.0, abs=1e-14)
    assert sys.evaluate("H", x, pi) == pytest.approx(0.5 * (0.49 + 0.01))


def test_kerr_orbit_conserves_carter():
    sys = covmech.build_system("kerr")
    out = covmech.integrate(sys, 500.0, monitors=["H", "carter"])
    assert out["status"] == "completed"
    assert out["x"].shape[1] == 4
    carter0 = sys.evaluate("carter", *sys.initial[:2])
    assert np.max(np.abs(out["drift"]["carter"])) <= 1e-7 * abs(carter0)


def test_su2_charge_precession_keeps_casimir():
    sys = covmech.build_system("su2-plane")
    out = covmech.integrate(sys, 50.0)
    norms = np.linalg.norm(out["t"], axis=1)
    assert np.allclose(norms, norms[0], rtol=1e-9)


def test_equations_of_motion_shape():
    sys = covmech.build_system("quantum-dot")
    x, pi, t = sys.initial
    dx, dpi, dt = sys.equations_of_motion(x, pi)
    assert dx.shape == (3,) and dpi.shape == (3,) and dt.shape == (0,)
    assert dx[2] == pytest.approx(pi[2] / x[0] ** 2)


def test_errors_map_to_python():
    with pytest.raises(covmech.ExtremalParams):
        covmech.build_system("kerr", {"a": 1.2})
    with pytest.raises(covmech.ConfigError):
        covmech.build_system("kerr", {"spin": 0.1})
    detuned = covmech.build_system("quantum-dot", {"omegaL": 1.0})
    x, pi, _ = detuned.initial
    with pytest.raises(covmech.DetunedParameters):
        detuned.evaluate("G4", x, pi)
    with pytest.raises(covmech.CovmechError):
        covmech.build_system("sphere")


def test_verify_command_and_determinism():
    cfg = {"system": "su2-plane", "points": 20, "negative_controls": True}
    code, report = covmech.verify(cfg)
    assert code == 0
    assert report["negative_controls"]["J_stripped"]["failed_as_expected"]
    code2, report2 = covmech.verify(cfg)
    assert report == report2
    code, table = covmech.bracket_table({"system": "kerr", "points": 10, "observables": ["p_t", "p_phi", "carter"]})
    assert code == 0
    assert all(all(row) for row in table["commuting"])


def test_config_error_code():
    with pytest.raises(covmech.ConfigError):
        covmech.verify({"system": "kerr", "bogus": 1})
    assert math.isfinite(covmech.verify({"system": "flat-plane", "points": 5})[1]["conserved"]["H"]["max_relative"])
