import numpy as np


def img_from_canvas(canvas) -> np.ndarray:
    """RGB uint8 array of shape (height, width, 3) from a drawn Agg canvas."""
    canvas.draw()
    rgba = np.asarray(canvas.buffer_rgba())
    return np.ascontiguousarray(rgba[..., :3], dtype=np.uint8)
