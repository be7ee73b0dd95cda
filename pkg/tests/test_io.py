import csv
import struct

import numpy as np
import pytest

from plastiplate.io import (HEADER_SIZE, STATE_COMPONENTS, SnapshotHeader,
                            export_csv, read_snapshot, read_stress_table,
                            snapshot_name, write_snapshot, write_stress_table,
                            write_trajectory)
from plastiplate.ops.sym2 import random_sym2
from plastiplate.structures import KLDisplacement, make_state
from plastiplate.utils import SnapshotError


@pytest.fixture
def state(grid, rng):
    u = KLDisplacement(
        ubar=rng.standard_normal(grid.shape + (2, )),
        u3=rng.standard_normal(grid.shape))
    sigma = random_sym2(rng, grid.layered_shape[:3])
    p = random_sym2(rng, grid.layered_shape[:3], 0.1)
    return make_state(7, 0.35, u, sigma, sigma - p, p, u.u3, u.u3, u.u3)


class TestHeader:

    def test_layout(self):
        raw = SnapshotHeader(5, 7, 4, 0, 12, 0.5).pack()
        assert len(raw) == HEADER_SIZE
        assert raw[:4] == b'PLP1'
        assert struct.unpack_from('<4i', raw, 4) == (5, 7, 4, 0)
        assert SnapshotHeader.unpack(raw) == (5, 7, 4, 0, 12, 0.5)

    def test_payload_size(self):
        assert SnapshotHeader(5, 7, 4, 0, 0, 0.0).payload_size == \
            8 * (35 * 3 + 35 * 4 * 6)
        assert SnapshotHeader(5, 7, 4, 1, 0, 0.0).payload_size == \
            8 * 35 * 4 * 3

    @pytest.mark.parametrize('raw', [
        b'PLP1' + bytes(10),
        b'XXXX' + bytes(HEADER_SIZE - 4),
        SnapshotHeader(5, 7, 4, 0, 0, 0.0).pack()[:4] + bytes(HEADER_SIZE - 4),
        struct.pack('<4s4iqd', b'PLP1', 5, 7, 4, 3, 0, 0.0).ljust(
            HEADER_SIZE, b'\0'),
    ])
    def test_rejects_malformed(self, raw):
        with pytest.raises(SnapshotError):
            SnapshotHeader.unpack(raw)


class TestSnapshot:

    def test_write_read(self, state, tmp_path):
        path = str(tmp_path / snapshot_name(7))
        assert path.endswith('snap_000007.plp')
        write_snapshot(path, state, dict(Lx=1.0, Ly=1.0, N=6))
        snap = read_snapshot(path)
        assert snap.step == 7 and snap.time == 0.35
        np.testing.assert_array_equal(snap.u.ubar, state.u.ubar)
        np.testing.assert_array_equal(snap.u.u3, state.u.u3)
        np.testing.assert_array_equal(snap.sigma, state.sigma.values)
        np.testing.assert_array_equal(snap.p, state.p.values)
        assert snap.meta['N'] == 6
        assert snap.meta['components'] == list(STATE_COMPONENTS)
        assert (tmp_path / 'snap_000007.meta').is_file()

    def test_truncated_and_trailing(self, state, tmp_path):
        path = tmp_path / 'snap.plp'
        write_snapshot(str(path), state)
        data = path.read_bytes()
        path.write_bytes(data[:-8])
        with pytest.raises(SnapshotError):
            read_snapshot(str(path))
        path.write_bytes(data + b'\0')
        with pytest.raises(SnapshotError):
            read_snapshot(str(path))
        path.write_bytes(b'')
        with pytest.raises(SnapshotError):
            read_snapshot(str(path))

    def test_stress_table_is_not_a_state(self, grid, tmp_path, rng):
        path = str(tmp_path / 'table.plp')
        write_stress_table(path, [0.0],
                           [random_sym2(rng, grid.layered_shape[:3])])
        with pytest.raises(SnapshotError):
            read_snapshot(path)

    def test_export_csv(self, grid, state, tmp_path):
        path = str(tmp_path / 'snap.plp')
        write_snapshot(path, state, dict(Lx=grid.Lx, Ly=grid.Ly,
                                         x3=grid.x3.tolist()))
        out = str(tmp_path / 'out' / 'snap.csv')
        rows = export_csv(read_snapshot(path), out)
        assert rows == grid.ny * grid.nx * grid.num_layers
        with open(out) as f:
            records = list(csv.DictReader(f))
        assert len(records) == rows
        first = records[1]
        assert int(first['layer']) == 1
        assert float(first['x3']) == pytest.approx(grid.x3[1])
        assert float(first['s12']) == state.sigma.values[0, 0, 1, 2]

    def test_write_trajectory(self, state, tmp_path):
        later = make_state(9, 0.45, state.u, state.sigma.values,
                           state.e.values, state.p.values, state.u3_prev,
                           state.u3_prev2, state.v3)
        paths = write_trajectory(str(tmp_path), [state, later])
        assert [p.rsplit('/', 1)[-1] for p in paths] == [
            'snap_000007.plp', 'snap_000009.plp'
        ]


class TestStressTable:

    def test_round_trip_values(self, grid, tmp_path, rng):
        samples = [random_sym2(rng, grid.layered_shape[:3]) for _ in range(3)]
        path = str(tmp_path / 'rho.plp')
        write_stress_table(path, [0.0, 0.5, 1.0], samples)
        times, values = read_stress_table(path)
        np.testing.assert_array_equal(times, [0.0, 0.5, 1.0])
        np.testing.assert_array_equal(values, np.stack(samples))

    def test_rejects_unordered_times(self, grid, tmp_path, rng):
        samples = [random_sym2(rng, grid.layered_shape[:3]) for _ in range(2)]
        path = str(tmp_path / 'rho.plp')
        write_stress_table(path, [1.0, 1.0], samples)
        with pytest.raises(SnapshotError):
            read_stress_table(path)

    def test_rejects_state_records(self, state, tmp_path):
        path = str(tmp_path / 'snap.plp')
        write_snapshot(path, state)
        with pytest.raises(SnapshotError):
            read_stress_table(path)
