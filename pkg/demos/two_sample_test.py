"""Two-sample testing with a variance-calibrated squared MMD.

Draws two samples that differ in their mean, computes the unbiased squared
MMD and its unbiased variance estimate for several kernels, and prints the
studentised statistic next to the same quantities under the null (second
sample redrawn from the first distribution).
"""

import numpy as np

from mmdvar import KernelSpec, build_gram_pack, full_report

rng = np.random.default_rng(7)
m, d = 200, 3

x = rng.normal(size=(m, d))
y_alt = rng.normal(loc=0.35, size=(m, d))    # shifted alternative
y_null = rng.normal(size=(m, d))             # same distribution as x

kernels = {
    "linear": KernelSpec.linear(),
    "rbf (median bandwidth)": KernelSpec.rbf("median"),
    "polynomial deg 2": KernelSpec.polynomial(2, coef0=1.0),
}

print(f"m = {m}, d = {d}, mean shift 0.35 under the alternative\n")
print(f"{'kernel':<26} {'case':<6} {'mmd2':>10} {'sd est':>10} {'z':>8}")
for name, spec in kernels.items():
    for case, y in (("alt", y_alt), ("null", y_null)):
        rep = full_report(build_gram_pack(x, y, spec=spec))
        sd = np.sqrt(rep.vhat_floored)
        print(f"{name:<26} {case:<6} {rep.mmd2_xy:>10.5f} {sd:>10.5f} {rep.z_stat:>8.2f}")
    print()

print("The variance estimate is unbiased, so under the null it can come out")
print("slightly negative; the studentised z uses the floored copy.")
