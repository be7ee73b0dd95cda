"""Binary snapshots of plate states and tabulated stress series.

A record is a 64-byte little-endian header followed by float64 payload::

    magic  b'PLP1'
    ny, nx, layers, kind   int32
    step                   int64
    time                   float64
    (zero padding up to 64 bytes)

``kind`` 0 is a state: a nodal block (ny, nx, 3) holding (ū₁, ū₂, u₃)
followed by a layered block (ny, nx, layers, 6) holding (σ, p). ``kind``
1 is a stress sample (ny, nx, layers, 3); a stress table is a file of
consecutive kind-1 records. Every state file has a JSON ``.meta``
sidecar with the grid geometry and the run parameters.
"""
import csv
import json
import os.path as osp
import struct
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from plastiplate.structures import KLDisplacement, PlateState
from plastiplate.utils import SnapshotError, check_file_exist, mkdir_or_exist

MAGIC = b'PLP1'
HEADER_FORMAT = '<4s4iqd'
HEADER_SIZE = 64
KIND_STATE = 0
KIND_STRESS = 1
STATE_COMPONENTS = ('u1', 'u2', 'u3', 's11', 's22', 's12', 'p11', 'p22',
                    'p12')


class SnapshotHeader(NamedTuple):
    ny: int
    nx: int
    layers: int
    kind: int
    step: int
    time: float

    def pack(self) -> bytes:
        raw = struct.pack(HEADER_FORMAT, MAGIC, self.ny, self.nx, self.layers,
                          self.kind, self.step, self.time)
        return raw.ljust(HEADER_SIZE, b'\0')

    @classmethod
    def unpack(cls, raw: bytes) -> 'SnapshotHeader':
        if len(raw) < HEADER_SIZE:
            raise SnapshotError(
                f'truncated header: {len(raw)} of {HEADER_SIZE} bytes')
        magic, ny, nx, layers, kind, step, time = struct.unpack_from(
            HEADER_FORMAT, raw)
        if magic != MAGIC:
            raise SnapshotError(f'bad magic {magic!r}, expected {MAGIC!r}')
        if min(ny, nx, layers) < 1 or kind not in (KIND_STATE, KIND_STRESS):
            raise SnapshotError(
                f'invalid header ny={ny} nx={nx} layers={layers} '
                f'kind={kind}')
        return cls(ny, nx, layers, kind, step, time)

    @property
    def payload_size(self) -> int:
        nodes = self.ny * self.nx
        if self.kind == KIND_STATE:
            values = nodes * 3 + nodes * self.layers * 6
        else:
            values = nodes * self.layers * 3
        return 8 * values


class Snapshot(NamedTuple):
    header: SnapshotHeader
    u: KLDisplacement
    sigma: np.ndarray
    p: np.ndarray
    meta: dict

    @property
    def step(self) -> int:
        return self.header.step

    @property
    def time(self) -> float:
        return self.header.time


def meta_path(path: str) -> str:
    """``snap_000010.plp`` -> ``snap_000010.meta``."""
    return osp.splitext(path)[0] + '.meta'


def write_snapshot(path: str, state: PlateState,
                   meta: Optional[dict] = None) -> None:
    """Write ``state`` to ``path`` and its ``.meta`` sidecar next to it."""
    mkdir_or_exist(osp.dirname(osp.abspath(path)))
    sigma = np.asarray(state.sigma.values, dtype='<f8')
    p = np.asarray(state.p.values, dtype='<f8')
    ny, nx, layers, _ = sigma.shape
    header = SnapshotHeader(ny, nx, layers, KIND_STATE, int(state.step),
                            float(state.time))
    nodal = np.concatenate([state.u.ubar, state.u.u3[..., None]],
                           axis=-1).astype('<f8')
    layered = np.concatenate([sigma, p], axis=-1)
    with open(path, 'wb') as f:
        f.write(header.pack())
        f.write(nodal.tobytes())
        f.write(layered.tobytes())
    sidecar = dict(components=list(STATE_COMPONENTS))
    sidecar.update(meta or {})
    with open(meta_path(path), 'w') as f:
        json.dump(sidecar, f, indent=2)


def _read_record(f, path: str) -> Optional[Tuple[SnapshotHeader, bytes]]:
    raw = f.read(HEADER_SIZE)
    if not raw:
        return None
    header = SnapshotHeader.unpack(raw)
    payload = f.read(header.payload_size)
    if len(payload) != header.payload_size:
        raise SnapshotError(
            f'{path}: payload has {len(payload)} bytes, header announces '
            f'{header.payload_size}')
    return header, payload


def read_snapshot(path: str) -> Snapshot:
    """Read a state snapshot and, when present, its sidecar.

    Raises:
        SnapshotError: On a malformed header or a truncated payload.
    """
    check_file_exist(path)
    with open(path, 'rb') as f:
        record = _read_record(f, path)
        if record is None:
            raise SnapshotError(f'{path} is empty')
        header, payload = record
        if f.read(1):
            raise SnapshotError(f'{path} has trailing bytes')
    if header.kind != KIND_STATE:
        raise SnapshotError(f'{path} holds a stress table, not a state')
    ny, nx, layers = header.ny, header.nx, header.layers
    values = np.frombuffer(payload, dtype='<f8')
    nodal = values[:ny * nx * 3].reshape(ny, nx, 3)
    layered = values[ny * nx * 3:].reshape(ny, nx, layers, 6)
    u = KLDisplacement(ubar=nodal[..., :2].copy(), u3=nodal[..., 2].copy())
    meta = {}
    if osp.isfile(meta_path(path)):
        with open(meta_path(path)) as f:
            meta = json.load(f)
    return Snapshot(header, u, layered[..., :3].copy(),
                    layered[..., 3:].copy(), meta)


def write_stress_table(path: str, times: Sequence[float],
                       samples: Sequence[np.ndarray]) -> None:
    """Write layered stress samples (ny, nx, layers, 3) at ``times``."""
    assert len(times) == len(samples) and len(times) > 0, \
        'need one sample per time and at least one sample'
    mkdir_or_exist(osp.dirname(osp.abspath(path)))
    with open(path, 'wb') as f:
        for step, (t, sample) in enumerate(zip(times, samples)):
            sample = np.asarray(sample, dtype='<f8')
            assert sample.ndim == 4 and sample.shape[-1] == 3, \
                f'sample {step} has shape {sample.shape}'
            ny, nx, layers, _ = sample.shape
            f.write(
                SnapshotHeader(ny, nx, layers, KIND_STRESS, step,
                               float(t)).pack())
            f.write(sample.tobytes())


def read_stress_table(path: str) -> Tuple[np.ndarray, np.ndarray]:
    """Times (m,) and samples (m, ny, nx, layers, 3) of a stress table."""
    check_file_exist(path)
    times: List[float] = []
    samples: List[np.ndarray] = []
    with open(path, 'rb') as f:
        while True:
            record = _read_record(f, path)
            if record is None:
                break
            header, payload = record
            if header.kind != KIND_STRESS:
                raise SnapshotError(f'{path}: record {len(times)} is not a '
                                    'stress sample')
            shape = (header.ny, header.nx, header.layers, 3)
            if samples and samples[0].shape != shape:
                raise SnapshotError(f'{path}: record {len(times)} changes '
                                    f'shape to {shape}')
            times.append(header.time)
            samples.append(np.frombuffer(payload, dtype='<f8').reshape(shape))
    if not times:
        raise SnapshotError(f'{path} holds no stress sample')
    times = np.asarray(times)
    if np.any(np.diff(times) <= 0):
        raise SnapshotError(f'{path}: sample times are not increasing')
    return times, np.stack(samples)


def export_csv(snapshot: Snapshot, path: str) -> int:
    """One row per (node, layer); returns the number of rows written."""
    mkdir_or_exist(osp.dirname(osp.abspath(path)))
    h = snapshot.header
    meta = snapshot.meta
    Lx, Ly = meta.get('Lx', h.nx - 1), meta.get('Ly', h.ny - 1)
    x3 = meta.get('x3', [float('nan')] * h.layers)
    xs = np.linspace(0.0, Lx, h.nx)
    ys = np.linspace(0.0, Ly, h.ny)
    u = snapshot.u
    rows = 0
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f)
        writer.writerow(['iy', 'ix', 'x', 'y', 'layer', 'x3'] +
                        list(STATE_COMPONENTS))
        for iy in range(h.ny):
            for ix in range(h.nx):
                nodal = [u.ubar[iy, ix, 0], u.ubar[iy, ix, 1], u.u3[iy, ix]]
                for layer in range(h.layers):
                    writer.writerow(
                        [iy, ix, xs[ix], ys[iy], layer, x3[layer]] +
                        [repr(float(v)) for v in nodal] + [
                            repr(float(v))
                            for v in snapshot.sigma[iy, ix, layer]
                        ] + [repr(float(v)) for v in snapshot.p[iy, ix,
                                                                  layer]])
                    rows += 1
    return rows


def snapshot_name(step: int) -> str:
    return f'snap_{step:06d}.plp'


def write_trajectory(out_dir: str, states, meta: Optional[dict] = None
                     ) -> List[str]:
    """Write every state of a trajectory as ``snap_<step>.plp``."""
    paths = []
    for state in states:
        path = osp.join(out_dir, snapshot_name(int(state.step)))
        write_snapshot(path, state, meta)
        paths.append(path)
    return paths
