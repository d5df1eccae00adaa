"""File formats for every artifact the lab emits.

All writers are deterministic byte-for-byte for identical inputs:

* metadata:        ``key = value`` lines, keys in insertion order
* far-field matrix CSV: header ``mode,obs_index,inc_index,re,im``
* multi-frequency CSV:  header ``mode,obs_index,freq_index,re,im``
* phaseless CSV (one file per (tau, q) slice): ``obs_index,second_index,value``
* indicator CSV:   ``x,y,value`` row-major (y outer, x inner)
* indicator PGM:   ASCII P2, min-max normalized to 0..255, top row = y_max

Floats are written with repr (shortest round-trip) so regeneration with the
same seed is byte-identical.
"""

from __future__ import annotations

import os

import numpy as np

from elscat.data import NOISE_GENERATOR, PhaselessDataset
from elscat.grids import IndicatorField
from elscat.obstacle import FarFieldMatrix, MODE_PAIRS


def _fmt(x) -> str:
    if isinstance(x, (np.floating, float)):
        return repr(float(x))
    if isinstance(x, (np.complexfloating, complex)):
        return repr(complex(x))
    if isinstance(x, (list, tuple, np.ndarray)):
        return " ".join(_fmt(v) for v in x)
    return str(x)


def write_metadata(path: str, entries: dict) -> None:
    with open(path, "w") as fh:
        for key, value in entries.items():
            fh.write(f"{key} = {_fmt(value)}\n")


def write_far_field_matrix(path: str, ffm: FarFieldMatrix, meta_path: str | None = None,
                           extra_meta: dict | None = None) -> None:
    with open(path, "w") as fh:
        fh.write("mode,obs_index,inc_index,re,im\n")
        for key in MODE_PAIRS:
            arr = ffm.data[key]
            for j in range(ffm.n_directions):
                for l in range(ffm.n_directions):
                    fh.write(f"{key},{j},{l},{arr[j, l].real!r},{arr[j, l].imag!r}\n")
    if meta_path:
        meta = {
            "format": "far-field-matrix",
            "n_directions": ffm.n_directions,
            "direction_convention": "theta_l = 2*pi*l/N",
            "omega": ffm.wave.omega,
            "lam": ffm.wave.lam,
            "mu": ffm.wave.mu,
        }
        meta.update(extra_meta or {})
        write_metadata(meta_path, meta)


def write_multifreq_far_field(path: str, values: np.ndarray, mode: str,
                              theta_angles, freq_nodes, meta_path: str | None = None,
                              extra_meta: dict | None = None) -> None:
    """``values`` complex, shape (n_theta, n_freq)."""
    with open(path, "w") as fh:
        fh.write("mode,obs_index,freq_index,re,im\n")
        for i in range(values.shape[0]):
            for j in range(values.shape[1]):
                fh.write(f"{mode},{i},{j},{values[i, j].real!r},{values[i, j].imag!r}\n")
    if meta_path:
        meta = {
            "format": "multifreq-far-field",
            "theta_angles": list(theta_angles),
            "frequency_nodes": list(freq_nodes),
        }
        meta.update(extra_meta or {})
        write_metadata(meta_path, meta)


def phaseless_slice_name(basename: str, tau_index: int, q_index: int) -> str:
    return f"{basename}_tau{tau_index}_q{q_index}.csv"


def write_phaseless_dataset(out_dir: str, ds: PhaselessDataset, basename: str) -> list[str]:
    """One CSV per (tau, q) slice plus a metadata file; returns written names."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    n_obs, n_second, n_tau, n_q = ds.values.shape
    for it in range(n_tau):
        for iq in range(n_q):
            name = phaseless_slice_name(basename, it, iq)
            with open(os.path.join(out_dir, name), "w") as fh:
                fh.write("obs_index,second_index,value\n")
                sl = ds.values[:, :, it, iq]
                for i in range(n_obs):
                    for j in range(n_second):
                        fh.write(f"{i},{j},{sl[i, j]!r}\n")
            written.append(name)

    meta = {
        "format": "phaseless-dataset",
        "kind": ds.kind,
        "z": ds.z,
        "taus": list(ds.taus),
        "q_angles": list(ds.q_angles),
        "lam": ds.wave.lam,
        "mu": ds.wave.mu,
        "provenance": ds.provenance,
    }
    if ds.kind == "obstacle":
        meta["omega"] = ds.wave.omega
        meta["n_directions"] = ds.n_directions
    else:
        meta["theta_angles"] = list(ds.theta_angles)
        meta["frequency_nodes"] = list(ds.freq_grid.nodes)
        meta["frequency_dk"] = ds.freq_grid.dk
    if ds.noise is not None:
        meta["noise_kind"] = ds.noise.kind
        meta["noise_delta"] = ds.noise.delta
        meta["noise_seed"] = ds.noise.seed
        meta["noise_generator"] = NOISE_GENERATOR
    else:
        meta["noise_kind"] = "none"
    name = f"{basename}_meta.txt"
    write_metadata(os.path.join(out_dir, name), meta)
    written.append(name)
    return written


def write_indicator_csv(path: str, field: IndicatorField) -> None:
    xs, ys = field.grid.xs, field.grid.ys
    with open(path, "w") as fh:
        fh.write("x,y,value\n")
        for i, y in enumerate(ys):
            for j, x in enumerate(xs):
                fh.write(f"{x!r},{y!r},{field.values[i, j]!r}\n")


def write_indicator_pgm(path: str, field: IndicatorField) -> None:
    v = field.values
    lo, hi = float(v.min()), float(v.max())
    scale = 255.0 / (hi - lo) if hi > lo else 0.0
    pix = np.round((v - lo) * scale).astype(int)
    ny, nx = pix.shape
    with open(path, "w") as fh:
        fh.write(f"P2\n{nx} {ny}\n255\n")
        for row in pix[::-1]:  # top row of the image = largest y
            fh.write(" ".join(str(int(p)) for p in row) + "\n")


def write_indicator(out_dir: str, field: IndicatorField, basename: str,
                    pgm: bool = True) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    written = [f"{basename}.csv"]
    write_indicator_csv(os.path.join(out_dir, f"{basename}.csv"), field)
    if pgm:
        write_indicator_pgm(os.path.join(out_dir, f"{basename}.pgm"), field)
        written.append(f"{basename}.pgm")
    meta = {
        "format": "indicator-field",
        "indicator": field.name,
        "x_min": field.grid.x_min, "x_max": field.grid.x_max,
        "y_min": field.grid.y_min, "y_max": field.grid.y_max,
        "spacing": field.grid.spacing,
    }
    meta.update({f"param_{k}": v for k, v in sorted(field.params.items())})
    write_metadata(os.path.join(out_dir, f"{basename}_meta.txt"), meta)
    written.append(f"{basename}_meta.txt")
    return written
