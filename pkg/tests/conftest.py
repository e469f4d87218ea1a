import numpy as np
import pytest

from uwbsnn.dataset import Sample


def make_sample(label=1, fp_idx=5, cir=None, uid=0, **regs):
    rf = {
        "RANGE": 3.2,
        "FP_IDX": float(fp_idx),
        "FP_AMP1": 100.0,
        "FP_AMP2": 200.0,
        "FP_AMP3": 300.0,
        "STDEV_NOISE": 40.0,
        "CIR_PWR": 9000.0,
        "MAX_NOISE": 1200.0,
        "RXPACC": 1000.0,
    }
    rf.update(regs)
    if cir is None:
        cir = np.arange(1016, dtype=float)
    return Sample(label=label, rf_raw=rf, cir=cir, fp_idx=fp_idx, uid=uid)


@pytest.fixture
def sample_factory():
    return make_sample
