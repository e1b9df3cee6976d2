"""In-memory scene sessions with optimistic concurrency and crash-safe
file persistence (one JSON file per scene, written atomically on every
accepted mutation)."""

from __future__ import annotations

import json
import os
import threading
import uuid
from collections import OrderedDict
from dataclasses import dataclass

from ..formats.scene_json import SceneDocument, atomic_write_text, scene_from_dict, scene_to_dict
from ..scene import Scene


class UnknownScene(KeyError):
    pass


class RevisionConflict(ValueError):
    def __init__(self, expected: int, got: int):
        self.expected = expected
        self.got = got
        super().__init__(f"revision is {expected}, If-Match said {got}")


@dataclass
class SceneSession:
    scene_id: str
    scene: Scene
    extras: dict
    revision: int


class SceneStore:
    """Single-writer-per-scene store. Readers take an immutable snapshot;
    mutations are serialized by a per-scene lock and bump the revision by 1."""

    def __init__(self, data_dir: str, preview_cache_size: int = 256):
        self._data_dir = data_dir
        self._sessions: dict[str, SceneSession] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._global = threading.Lock()
        self._cache: OrderedDict[tuple, bytes] = OrderedDict()
        self._cache_size = preview_cache_size
        os.makedirs(data_dir, exist_ok=True)
        self._load_existing()

    def _path(self, scene_id: str) -> str:
        return os.path.join(self._data_dir, f"{scene_id}.json")

    def _load_existing(self):
        for name in sorted(os.listdir(self._data_dir)):
            if not name.endswith(".json"):
                continue
            with open(os.path.join(self._data_dir, name)) as fh:
                wrapper = json.load(fh)
            doc = scene_from_dict(wrapper["document"])
            sid = wrapper["id"]
            self._sessions[sid] = SceneSession(
                scene_id=sid, scene=doc.scene, extras=doc.extras,
                revision=wrapper["revision"],
            )
            self._locks[sid] = threading.Lock()

    def _persist(self, session: SceneSession):
        wrapper = {
            "id": session.scene_id,
            "revision": session.revision,
            "document": scene_to_dict(session.scene, session.extras),
        }
        atomic_write_text(self._path(session.scene_id), json.dumps(wrapper, indent=2) + "\n")

    def create(self, document: SceneDocument) -> SceneSession:
        sid = uuid.uuid4().hex[:12]
        session = SceneSession(scene_id=sid, scene=document.scene,
                               extras=document.extras, revision=0)
        with self._global:
            self._sessions[sid] = session
            self._locks[sid] = threading.Lock()
        self._persist(session)
        return session

    def get(self, scene_id: str) -> SceneSession:
        with self._global:
            session = self._sessions.get(scene_id)
        if session is None:
            raise UnknownScene(scene_id)
        return session

    def lock(self, scene_id: str) -> threading.Lock:
        with self._global:
            lock = self._locks.get(scene_id)
        if lock is None:
            raise UnknownScene(scene_id)
        return lock

    def mutate(self, scene_id: str, if_match: int, fn) -> SceneSession:
        """Apply fn(scene) -> (scene', extras') under the scene lock; the
        mutation is accepted only when if_match equals the current revision."""
        lock = self.lock(scene_id)
        with lock:
            session = self.get(scene_id)
            if session.revision != if_match:
                raise RevisionConflict(session.revision, if_match)
            new_scene, new_extras = fn(session.scene)
            new_session = SceneSession(
                scene_id=scene_id,
                scene=new_scene,
                extras=new_extras if new_extras is not None else session.extras,
                revision=session.revision + 1,
            )
            with self._global:
                self._sessions[scene_id] = new_session
            self._persist(new_session)
            return new_session

    def preview_cached(self, key: tuple, render) -> bytes:
        """LRU cache keyed by (id, revision, frame, kind, w, h);
        byte-identical responses for identical keys."""
        with self._global:
            if key in self._cache:
                self._cache.move_to_end(key)
                return self._cache[key]
        data = render()
        with self._global:
            self._cache[key] = data
            self._cache.move_to_end(key)
            while len(self._cache) > self._cache_size:
                self._cache.popitem(last=False)
        return data
