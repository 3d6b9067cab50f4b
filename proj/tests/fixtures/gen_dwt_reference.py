"""Regenerates dwt_reference_*.csv with PyWavelets (symmetric mode).

    python3 gen_dwt_reference.py

Signals are seeded so the output is stable; the C++ test reads both files.
"""
import numpy as np
import pywt

LENGTHS = [64, 100, 128, 257, 500, 1440, 33, 16, 720, 1000]
CASES = [("haar", 3), ("db2", 3), ("db4", 3)]

rng = np.random.default_rng(20230601)
with open("dwt_reference_signals.csv", "w") as sig, open("dwt_reference_coeffs.csv", "w") as out:
    sig.write("signal_id,index,value\n")
    out.write("signal_id,wavelet,levels,band,index,value\n")
    for sid, n in enumerate(LENGTHS):
        x = rng.normal(size=n) + np.sin(np.linspace(0, 6 * np.pi, n))
        for i, v in enumerate(x):
            sig.write(f"{sid},{i},{float(v)!r}\n")
        for name, want in CASES:
            w = pywt.Wavelet(name)
            levels = min(want, pywt.dwt_max_level(n, w.dec_len))
            if levels < 1:
                continue
            coeffs = pywt.wavedec(x, name, mode="symmetric", level=levels)
            bands = [f"a{levels}"] + [f"d{j}" for j in range(levels, 0, -1)]
            for band, c in zip(bands, coeffs):
                for i, v in enumerate(c):
                    out.write(f"{sid},{name},{levels},{band},{i},{float(v)!r}\n")
