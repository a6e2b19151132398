"""Schema-compatible stand-in for the AI4I 2020 table.

The public file is produced by a documented simulation; this module follows
the same recipe (random-walk temperatures, torque/speed coupling, per-type
tool wear, rule-based failure modes) so the full pipeline can run where the
original CSV is unavailable. It is a stand-in, not a copy: row values and
failure counts differ from the public file.
"""

from __future__ import annotations

import numpy as np

from .dataio import CanonicalDataset, RawRecord

TYPE_SHARE = {"L": 0.5, "M": 0.3, "H": 0.2}
WEAR_PER_RUN = {"L": 2, "M": 3, "H": 5}
OVERSTRAIN_LIMIT = {"L": 11000.0, "M": 12000.0, "H": 13000.0}


def _random_walk(rng, n, sd, center):
    walk = np.cumsum(rng.normal(size=n))
    walk = (walk - walk.mean()) / walk.std()
    return center + sd * walk


def generate(n=10000, seed=2020) -> CanonicalDataset:
    rng = np.random.default_rng(seed)
    types = rng.choice(list(TYPE_SHARE), size=n, p=list(TYPE_SHARE.values()))
    air = np.round(_random_walk(rng, n, 2.0, 300.0), 1)
    process = np.round(air + 10.0 + _random_walk(rng, n, 0.9, 0.0), 1)

    torque = rng.normal(40.0, 9.0, size=n)
    while np.any(torque < 3.8):
        bad = torque < 3.8
        torque[bad] = rng.normal(40.0, 9.0, size=int(bad.sum()))
    speed = 1538.0 - 14.0 * (torque - 40.0) + rng.normal(0.0, 80.0, size=n)
    speed = np.clip(speed, 1168.0, 2886.0)
    torque = np.round(torque, 1)
    speed = np.round(speed)

    wear = np.zeros(n)
    twf = np.zeros(n, dtype=np.int64)
    current, life = 0.0, rng.uniform(200, 240)
    for i, t in enumerate(types):
        current += WEAR_PER_RUN[t]
        wear[i] = current
        if current >= life:
            # roughly 51 of 120 tool changes in the public data were failures
            twf[i] = int(rng.random() < 51 / 120)
            current, life = 0.0, rng.uniform(200, 240)

    hdf = ((process - air) < 8.6) & (speed < 1380)
    power = torque * speed * 2.0 * np.pi / 60.0
    pwf = (power < 3500) | (power > 9000)
    osf = wear * torque > np.array([OVERSTRAIN_LIMIT[t] for t in types])
    rnf = rng.random(n) < 0.001
    failure = (twf.astype(bool) | hdf | pwf | osf | rnf).astype(np.int64)

    serial = rng.permutation(np.arange(10000, 10000 + n * 5))[:n]
    records = tuple(
        RawRecord(
            udi=i + 1,
            product_id=f"{types[i]}{serial[i]}",
            type_code=str(types[i]),
            air_temp=float(air[i]),
            process_temp=float(process[i]),
            rot_speed=float(speed[i]),
            torque=float(torque[i]),
            tool_wear=float(wear[i]),
            machine_failure=int(failure[i]),
            twf=int(twf[i]),
            hdf=int(hdf[i]),
            pwf=int(pwf[i]),
            osf=int(osf[i]),
            rnf=int(rnf[i]),
        )
        for i in range(n)
    )
    return CanonicalDataset(records, source_digest=f"replica:n={n}:seed={seed}")
