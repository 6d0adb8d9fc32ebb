from .file import FieldFile

__all__ = ("FieldFile",)
