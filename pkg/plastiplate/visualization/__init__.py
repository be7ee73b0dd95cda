from .field_visualizer import FIELDS, FieldVisualizer, render_snapshot

__all__ = ['FIELDS', 'FieldVisualizer', 'render_snapshot']
