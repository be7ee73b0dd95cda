import math
import os.path as osp
from typing import List, Optional, Sequence, Tuple

import numpy as np

from plastiplate.utils import mkdir_or_exist
from .utils import img_from_canvas

# field name -> (block, component); nodal fields have no layer axis
FIELDS = {
    'u1': ('u', 0),
    'u2': ('u', 1),
    'u3': ('u', 2),
    's11': ('sigma', 0),
    's22': ('sigma', 1),
    's12': ('sigma', 2),
    'p11': ('p', 0),
    'p22': ('p', 1),
    'p12': ('p', 2),
    'sigma_r': ('sigma', None),
    'p_r': ('p', None),
}


class FieldVisualizer:
    """Renders ω-fields of a snapshot as a panel of colour maps, using the
    Agg canvas of ``Matplotlib`` so no display is needed.

    Args:
        cmap (str): Colour map. Defaults to ``'viridis'``.
        panel_size (float): Edge length of one panel in inches.
            Defaults to 3.
        fig_cfg (dict): Keyword parameters of the figure.

    Examples:
        >>> vis = FieldVisualizer()
        >>> vis.draw_snapshot(read_snapshot('snap_000010.plp'),
        ...                   fields=['u3', 'sigma_r'], layer=0)
        >>> vis.save('snap_000010.png')
    """

    def __init__(self,
                 cmap: str = 'viridis',
                 panel_size: float = 3.0,
                 fig_cfg=dict(dpi=100)) -> None:
        self.cmap = cmap
        self.panel_size = panel_size
        self.fig_cfg = fig_cfg
        self.fig = None
        self.canvas = None

    def _initialize_fig(self, rows: int, cols: int):
        from matplotlib.backends.backend_agg import FigureCanvasAgg
        from matplotlib.figure import Figure
        fig = Figure(
            figsize=(self.panel_size * cols * 1.25, self.panel_size * rows),
            **self.fig_cfg)
        canvas = FigureCanvasAgg(fig)
        axes = [fig.add_subplot(rows, cols, k + 1) for k in range(rows * cols)]
        return canvas, fig, axes

    @staticmethod
    def field_values(snapshot, name: str, layer: int = 0) -> np.ndarray:
        """The (ny, nx) array of a named field at one layer."""
        from plastiplate.ops.sym2 import norm_r
        assert name in FIELDS, \
            f'unknown field {name!r}, expected one of {sorted(FIELDS)}'
        block, comp = FIELDS[name]
        if block == 'u':
            nodal = np.concatenate(
                [snapshot.u.ubar, snapshot.u.u3[..., None]], axis=-1)
            return nodal[..., comp]
        values = getattr(snapshot, block)
        assert 0 <= layer < values.shape[2], \
            f'layer {layer} out of range [0, {values.shape[2]})'
        if comp is None:
            return norm_r(values[:, :, layer])
        return values[:, :, layer, comp]

    def draw_field(self, ax, values: np.ndarray, title: str,
                   extent: Tuple[float, float, float, float]) -> None:
        image = ax.imshow(
            values, origin='lower', extent=extent, cmap=self.cmap,
            aspect='equal')
        ax.set_title(title, fontsize=9)
        ax.set_xlabel('x')
        ax.set_ylabel('y')
        self.fig.colorbar(image, ax=ax, shrink=0.8)

    def draw_snapshot(self,
                      snapshot,
                      fields: Optional[Sequence[str]] = None,
                      layer: int = 0,
                      cols: int = 3) -> 'FieldVisualizer':
        """Draw one panel per field; returns ``self`` for chaining."""
        fields = list(fields) if fields else ['u3', 'sigma_r', 'p_r']
        rows = math.ceil(len(fields) / cols)
        cols = min(cols, len(fields))
        self.canvas, self.fig, axes = self._initialize_fig(rows, cols)
        meta = snapshot.meta
        h = snapshot.header
        extent = (0.0, meta.get('Lx', h.nx - 1), 0.0, meta.get('Ly', h.ny - 1))
        for ax, name in zip(axes, fields):
            title = name
            if FIELDS[name][0] != 'u':
                title = f'{name} [layer {layer}]'
            self.draw_field(ax, self.field_values(snapshot, name, layer),
                            title, extent)
        for ax in axes[len(fields):]:
            ax.axis(False)
        self.fig.suptitle(f'step {snapshot.step}, t = {snapshot.time:.4g}')
        self.fig.tight_layout()
        return self

    def get_image(self) -> np.ndarray:
        assert self.canvas is not None, 'call `draw_snapshot` first'
        return img_from_canvas(self.canvas)

    def save(self, out_file: str) -> str:
        assert self.fig is not None, 'call `draw_snapshot` first'
        mkdir_or_exist(osp.dirname(osp.abspath(out_file)))
        self.fig.savefig(out_file)
        return out_file

    def close(self) -> None:
        self.fig, self.canvas = None, None


def render_snapshot(snapshot,
                    out_file: str,
                    fields: Optional[List[str]] = None,
                    layer: int = 0) -> str:
    vis = FieldVisualizer()
    try:
        return vis.draw_snapshot(snapshot, fields, layer).save(out_file)
    finally:
        vis.close()
