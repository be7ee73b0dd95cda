from .snapshot import (HEADER_SIZE, STATE_COMPONENTS, Snapshot,
                       SnapshotHeader, export_csv, read_snapshot,
                       read_stress_table, snapshot_name, write_snapshot,
                       write_stress_table, write_trajectory)

__all__ = [
    'HEADER_SIZE', 'STATE_COMPONENTS', 'Snapshot', 'SnapshotHeader',
    'export_csv', 'read_snapshot', 'read_stress_table', 'snapshot_name',
    'write_snapshot', 'write_stress_table', 'write_trajectory'
]
