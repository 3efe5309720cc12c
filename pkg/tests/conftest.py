from __future__ import annotations

from pathlib import Path

import pytest

from facepulse import ConstantProfile, SynthConfig, render_session


@pytest.fixture(scope="session")
def tiny_session(tmp_path_factory) -> Path:
    """Small noiseless gray-free session for fast frame-io tests:
    16x16 rgb8, 10 fps, 2 s."""
    out = tmp_path_factory.mktemp("tiny")
    render_session(SynthConfig(width=16, height=16, fps=10.0, duration=2.0), out)
    return out


@pytest.fixture(scope="session")
def clean72_session(tmp_path_factory) -> Path:
    """Noiseless constant 72 bpm session at defaults (64x64, 30 fps, 60 s)."""
    out = tmp_path_factory.mktemp("clean72")
    render_session(SynthConfig(hr_profile=ConstantProfile(72.0)), out)
    return out
