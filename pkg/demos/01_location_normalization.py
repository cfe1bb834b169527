# %% [markdown]
# # Turning free-text locations into state tokens
#
# Tweet profiles carry whatever the user typed as a location.  Counting by
# state needs every variant folded onto one token such as `New_York, USA`,
# which is also how the case-count file names its states.

# %%
from earlywarn.geonorm import default_gazetteer, miss_report, normalize_all, normalize_location

g = default_gazetteer()
print(f"{len(g)} rules in the bundled gazetteer")

# %% [markdown]
# Matching runs in three passes: the whole string, then a trailing
# comma-separated part (so any `..., NY` lands in New York), then any single
# part.  The rule that fired is reported alongside the token.

# %%
for raw in ["nyc", "Brooklyn, New York, USA", "Queens, NY", "Boston", "Fresno, CA",
            "Southern California", "Harlem, somewhere", "Gotham City", ""]:
    o = normalize_location(raw, g)
    print(f"{raw!r:30} -> {o.state_token!s:22} via {o.matched_rule!r}")

# %% [markdown]
# Bare city names that exist in several states (Springfield, Portland) are
# deliberately absent, so they miss instead of landing in the wrong state.
# Misses are tallied rather than silently dropped.

# %%
outcomes = normalize_all(["Springfield", "Portland", "Springfield", "Portland, OR", "Atlantis"], g)
for raw, n in miss_report(outcomes):
    print(f"unmatched {raw!r}: {n}")
