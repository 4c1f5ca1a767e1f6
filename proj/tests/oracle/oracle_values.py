#!/usr/bin/env python3
# Copyright 2026 The logit-refine Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Reference values for the unit tests, evaluated at 50 significant digits.

Every quantity is computed straight from its definition (exp, sums, logs) with
no stabilisation tricks, so it shares no code path with the C++ library. The
printed constants are pasted into tests/unit/*_test.cpp.
"""

from mpmath import mp, mpf, exp, log

mp.dps = 50


def softmax(z, tau=1, support=None):
    idx = range(len(z)) if support is None else support
    w = [exp(mpf(z[i]) / tau) for i in idx]
    s = sum(w)
    return [x / s for x in w]


def kl(p, q):
    return sum(pi * log(pi / qi) for pi, qi in zip(p, q) if pi != 0)


def ce(z, y):
    return -log(softmax(z)[y])


def binary(z, k, tau):
    p = softmax(z, tau)
    return [p[k], 1 - p[k]]


def scd(zt, zs, y, tau):
    t = softmax(zt, tau)
    head = max(t)
    return tau**2 * kl([head, 1 - head], binary(zs, y, tau))


def mcd(zt, zs, complement, tau):
    return tau**2 * kl(softmax(zt, tau, complement), softmax(zs, tau, complement))


def ge_complement(zt, y):
    return [i for i in range(len(zt)) if not zt[i] >= zt[y]]


def kd(zt, zs, tau):
    return tau**2 * kl(softmax(zt, tau), softmax(zs, tau))


def show(name, value):
    if isinstance(value, list):
        print(f"{name}: " + ", ".join(mp.nstr(v, 20) for v in value))
    else:
        print(f"{name}: {mp.nstr(value, 20)}")


show("softmax_support_pair", softmax([1.0, 2.0, 3.0, 0.5], 2, [1, 3]))
show("log_softmax_123_tau2", [log(p) for p in softmax([1, 2, 3], 2)])
show("kl_half_vs_0.9", kl([mpf("0.5"), mpf("0.5")], [mpf("0.9"), mpf("0.1")]))
show("ce_10_m10", ce([10, -10], 0))
show("ce_123_y2", ce([1, 2, 3], 2))
show("teacher_head_210", max(softmax([2, 1, 0])))
show("student_head_123_y0", softmax([1, 2, 3])[0])
show("student_head_50", softmax([5, 0])[0])
show("masked_2_1_3_05", softmax([2.0, 1.0, 3.0, 0.5], 1, [1, 3]))

show("scd_020_000", scd([0, 2, 0], [0, 0, 0], 0, 1))
h = exp(2) / (exp(2) + 2)
q = mpf(1) / 3
show("grad_scd_020_000", [q - h, -(q - h) / 2, -(q - h) / 2])
zt = [2.0, 1.0, 3.0, 0.5]
show("mcd_ge_example", mcd(zt, [0, 0, 0, 0], ge_complement(zt, 0), 1))

show("kd_10_01", kd([1, 0], [0, 1], 1))
show("kd_10m1_tau1", kd([1, 0, -1], [0, 0, 0], 1))
show("kd_10m1_tau2", kd([1, 0, -1], [0, 0, 0], 2))

# Teacher wrong: target-class teacher probability versus teacher max.
zt, zs = [0, 2, 0], [1, 1, 1]
show("p_true_T_020", softmax(zt)[0])
show("p_max_T_020", max(softmax(zt)))
show("tckd_020_111", kl(binary(zt, 0, 1), binary(zs, 0, 1)))
show("nckd_020_111", kl(softmax(zt, 1, [1, 2]), softmax(zs, 1, [1, 2])))
show("scd_020_111", scd(zt, zs, 0, 1))

# Ten-class RLD instance, alpha = 1, beta = 2, tau = 4, label 3.
zt10 = [0.7, -1.2, 2.5, 1.9, 0.0, -0.4, 3.1, -2.2, 0.9, 1.1]
zs10 = [0.3, 0.8, -0.5, 1.4, -1.0, 0.2, 0.6, -0.7, 1.0, -0.1]
y10, tau10 = 3, 4
comp = ge_complement(zt10, y10)
total = ce(zs10, y10) + 1 * scd(zt10, zs10, y10, tau10) + 2 * mcd(zt10, zs10, comp, tau10)
show("rld10_complement", [mpf(c) for c in comp])
show("rld10_total", total)

# Corrections on z^T=(1,3,2), z^S=(0.5,-1,2), y=0, tau=4, kd_weight 1.
zt, zs, y, tau = [1, 3, 2], [0.5, -1, 2], 0, 4
la = [3, 1, 2]
rc = [1 + 2, 3, 2]
soft = softmax(zt, tau)
lr = [mpf("0.5") * s + (mpf("0.5") if i == y else 0) for i, s in enumerate(soft)]
show("la_total", ce(zs, y) + kd(la, zs, tau))
show("rc_total", ce(zs, y) + kd(rc, zs, tau))
show("lr_target", lr)
show("lr_total", ce(zs, y) + tau**2 * kl(lr, softmax(zs, tau)))
