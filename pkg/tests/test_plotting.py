import ast

import numpy as np

from ntype_eit import plotting
from ntype_eit.atom import SystemParams
from ntype_eit.spectra import SweepSpec, gamma_c_scan, sweep

PNG = b"\x89PNG"


def test_spectra_png(tmp_path):
    spec = sweep(SweepSpec(SystemParams(2, 0.2, 10), n_points=101))
    out = plotting.plot_spectra([("a", spec), ("b", spec)], tmp_path / "s.png", title="t", logy=True)
    assert out.read_bytes()[:4] == PNG


def test_gamma_scan_png_without_fit(tmp_path):
    scan = gamma_c_scan(SystemParams(2, 0.2, 10), [0.1, 0.2], at_detuning=5.0)
    assert scan.slope is None
    assert plotting.plot_gamma_scan(scan, tmp_path / "g.png").read_bytes()[:4] == PNG


def test_script_is_valid_python():
    src = plotting.plot_script([("x=1", "dir/a-x=1.csv")], "a.png", axis_name="gamma_c", title="demo")
    tree = ast.parse(src)
    assert any(isinstance(n, ast.Assign) and n.targets[0].id == "FILES" for n in tree.body)
    # only file names are embedded so the script can move with its CSVs
    assert "dir/" not in src


def test_golden_ratio_default():
    fig, _ = plotting.figure(5.0)
    w, h = fig.get_size_inches()
    assert np.isclose(w / h, (1 + 5**0.5) / 2)
    plotting.plt.close(fig)
