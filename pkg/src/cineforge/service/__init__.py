"""HTTP/JSON API for the interactive editor: scene CRUD, keyframe edits,
and on-demand depth/ID frame previews."""

from .app import create_app

__all__ = ["create_app"]
