# Copyright 2026 The vmsim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Coupled vehicle and hydraulic manipulator simulation."""

import json

from vmsim._vmsim import (
    ConfigError,
    IntegrationError,
    forward_kinematics,
    jacobian,
    solve_lq,
    tire_slip,
    velocity_ik,
)
from vmsim import _vmsim

__all__ = [
    "ConfigError",
    "IntegrationError",
    "default_config",
    "forward_kinematics",
    "jacobian",
    "load_config",
    "run_scenario",
    "solve_lq",
    "tire_slip",
    "velocity_ik",
]


def default_config():
    """Default configuration as a dict."""
    return json.loads(_vmsim.default_config())


def load_config(source):
    """Validates a config given as a dict, JSON text or a path; returns the full dict."""
    if isinstance(source, dict):
        text = json.dumps(source)
    elif isinstance(source, str) and source.lstrip().startswith("{"):
        text = source
    else:
        with open(source, encoding="utf-8") as f:
            text = f.read()
    return json.loads(_vmsim.normalize_config(text))


def run_scenario(mode="cooperative", duration=0.0, config=None):
    """Runs the validation drive and returns metrics plus telemetry columns.

    The result holds "metrics" (dict), "columns" (name -> numpy array) and
    run statistics.
    """
    text = None if config is None else json.dumps(load_config(config))
    result = _vmsim.run_scenario(mode, duration, text)
    result["metrics"] = json.loads(result["metrics"])
    return result
