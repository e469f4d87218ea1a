"""
The ablation matrix
===================

All ten strategies on a small synthetic set, with reduced network sizes so
it runs in well under a minute. ``uwbsnn run --synthetic`` does the full
version.
"""

# %%
from uwbsnn.config import config_from_dict
from uwbsnn.pipeline import format_table, run_all

print(format_table())

# %%
cfg = config_from_dict({
    "encoder": {"steps": 100},
    "liquid": {"rf": {"n_neurons": 150}, "cir": {"n_neurons": 200}},
    "som": {"grid": [6, 6], "steps": 60, "epochs": 1},
    "run": {"seeds": [0], "synthetic_samples": 280},
})
manifest = run_all(cfg, synthetic=True)
print(format_table(manifest["results"]), end="")
print(f"{manifest['_timings']['total_s']:.1f} s")
