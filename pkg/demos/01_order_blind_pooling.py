"""
Why order-blind pooling fails
=============================

Average pooling keeps a signal's mean, max pooling keeps its peak.  Two
signals that rise and fall in opposite directions share both, so neither
statistic can tell them apart.  A tiny learned filter that looks at local
evolution can.
"""

import numpy as np

from oacpool import (
    FeatureSequence,
    FilterBank,
    FilterBankSet,
    PyramidConfig,
    average_pool,
    conv_dim_forward,
    max_pool,
    oacp_forward,
)

#%%
# Two 1D signals with identical value multisets: a rising ramp and its
# reversal.  Mean and max agree exactly.

rising = FeatureSequence(np.linspace(0.0, 1.0, 8)[:, None])
falling = FeatureSequence(rising.frames[::-1])

print("average(rising) :", average_pool(rising))
print("average(falling):", average_pool(falling))
print("max(rising)     :", max_pool(rising))
print("max(falling)    :", max_pool(falling))

#%%
# Shuffling frames changes nothing either -- these pools are permutation
# invariant by construction (bit-for-bit, not just approximately).

rng = np.random.default_rng(0)
shuffled = FeatureSequence(rising.frames[rng.permutation(8)])
print("average invariant under shuffle:",
      average_pool(rising).tobytes() == average_pool(shuffled).tobytes())

#%%
# A single two-tap filter w = [-1, 1] responds to local increases.  After
# ReLU it fires along the rising ramp and stays silent on the falling one.

detector = FilterBank([[-1.0, 1.0]], [0.0])
print("responses on rising :", conv_dim_forward(rising.frames[:, 0], detector).responses.ravel())
print("responses on falling:", conv_dim_forward(falling.frames[:, 0], detector).responses.ravel())

#%%
# Pool those responses and the two signals get different fixed-length
# representations -- order is now part of the feature.

banks = FilterBankSet.from_banks([detector])
cfg = PyramidConfig((1,))
print("pooled conv features, rising :", oacp_forward(rising, banks, cfg))
print("pooled conv features, falling:", oacp_forward(falling, banks, cfg))
