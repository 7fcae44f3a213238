"""
Temporal pyramid pooling
========================

A pyramid splits the timeline into progressively finer segments and
max-pools each one.  Level 1 is always the whole timeline; level i adds
m_i segments.  The pooled vector keeps coarse order information (what
happened early vs late) at a fixed output length.
"""

import numpy as np

from oacpool import FeatureSequence, PyramidConfig, max_pool, temporal_pyramid_pool
from oacpool.pooling import partition_segments, segment_ranges

#%%
# Segment boundaries follow floor(j*T/m): near-equal, contiguous, covering.

for t, m in [(10, 2), (7, 2), (9, 4)]:
    print(f"T={t}, m={m} ->", partition_segments(t, m))

#%%
# A one-level pyramid is exactly max pooling.

seq = FeatureSequence(np.array([0.0, 1.0, 2.0, 3.0])[:, None])
print("pyramid [1]   :", temporal_pyramid_pool(seq, PyramidConfig((1,))))
print("max pool      :", max_pool(seq))

#%%
# A two-level pyramid sees that the maximum of the first half differs
# between a ramp and its reversal, even though the global max agrees.

cfg = PyramidConfig((1, 2))
ramp = FeatureSequence(np.array([0.0, 1.0, 2.0, 3.0])[:, None])
rev = FeatureSequence(ramp.frames[::-1])
print("segments for T=4:", segment_ranges(4, cfg))
print("pyramid(ramp)    :", temporal_pyramid_pool(ramp, cfg))
print("pyramid(reversed):", temporal_pyramid_pool(rev, cfg))

#%%
# Output layout is dimension-major: all of dimension 0's slots (level 1,
# then level 2 segment by segment), then dimension 1's, and so on.
# Length is always K * (m_1 + ... + m_L).

frames = np.array([[0.0, 10.0], [1.0, 11.0], [2.0, 12.0], [3.0, 13.0]])
pooled = temporal_pyramid_pool(FeatureSequence(frames), cfg)
print("K=2, M=3 ->", pooled, "length", pooled.shape[0])
