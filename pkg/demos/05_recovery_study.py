# %% [markdown]
# # How noise affects breakpoint recovery
#
# Synthetic series with a known breakpoint let us measure the detector
# directly.  Noise is scaled to the mean of the linear stretch so the same
# fraction means the same difficulty at any base level.

# %%
import numpy as np

from earlywarn.detect import DetectorConfig, detect_informal_outbreak
from earlywarn.synth import SynthSpec, generate_tweets

cfg = DetectorConfig()
rng = np.random.default_rng(2020)

# %%
for frac in (0.0, 0.1, 0.2, 0.4):
    errors = []
    for seed in range(30):
        length = int(rng.integers(105, 141))
        b = int(rng.integers(int(np.ceil(0.2 * length)), int(0.8 * length) + 1))
        base, slope = rng.uniform(5, 50), rng.uniform(0.05, 0.2)
        spec = SynthSpec(length, b, base, slope, rng.uniform(0.1, 0.3),
                         frac * (base + slope * (b - 1) / 2), seed=seed)
        res = detect_informal_outbreak(generate_tweets(spec), None, cfg)
        errors.append(np.inf if res is None else abs(res.breakpoint_index - b))
    errors = np.array(errors)
    print(f"noise {frac:4.0%}: exact {np.mean(errors == 0):5.0%}, within 2 days {np.mean(errors <= 2):5.0%}, "
          f"median error {np.median(errors):.0f} days")
