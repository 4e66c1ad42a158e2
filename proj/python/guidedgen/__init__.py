# Copyright 2026 The guidedgen Authors
# SPDX-License-Identifier: Apache-2.0
"""Guided decoding with keyword and control-embedding steering."""

import os as _os

_presets = _os.path.join(_os.path.dirname(__file__), "presets")
if _os.path.isdir(_presets):
    _os.environ.setdefault("GUIDEDGEN_PRESET_DIR", _presets)

from ._core import *  # noqa: E402,F401,F403
from ._core import __version__  # noqa: E402,F401
