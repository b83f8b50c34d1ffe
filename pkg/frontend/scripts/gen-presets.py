#!/usr/bin/env python3
"""Regenerate src/presets.ts from the repository preset JSON files."""

import json
from pathlib import Path

NAMES = [
    "gamma-setting-1a",
    "gamma-setting-2a",
    "gamma-setting-1c",
    "weibull-setting-1a",
    "bernoulli-setting-1a",
    "bernoulli-setting-2a",
]

root = Path(__file__).resolve().parent.parent
presets_dir = root.parent / "presets"

entries = []
for name in NAMES:
    doc = json.loads((presets_dir / f"{name}.json").read_text())
    entries.append(f"  {json.dumps(name)}: {json.dumps(doc, indent=2)},")

body = "\n".join(entries)
out = f"""/**
 * Bundled copies of the repository preset designs for the preset
 * picker (kept in sync with presets/*.json by scripts/gen-presets.py).
 */

import type {{ DesignSpec }} from "./types.js";

export const PRESETS: Record<string, DesignSpec> = {{
{body}
}};

export const PRESET_NAMES = Object.keys(PRESETS);
"""
(root / "src" / "presets.ts").write_text(out)
print(f"wrote {root / 'src' / 'presets.ts'}")
