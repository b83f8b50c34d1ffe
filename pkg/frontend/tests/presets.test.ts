import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { PRESETS, PRESET_NAMES } from "../src/presets.js";

const presetsDir = join(__dirname, "..", "..", "presets");

describe("bundled presets", () => {
  it("stay in sync with the repository preset files", () => {
    for (const name of PRESET_NAMES) {
      const onDisk = JSON.parse(readFileSync(join(presetsDir, `${name}.json`), "utf-8"));
      expect(PRESETS[name], `${name} drifted - rerun scripts/gen-presets.py`).toEqual(onDisk);
    }
  });

  it("include the documented demo scenarios", () => {
    expect(PRESET_NAMES).toContain("gamma-setting-1a");
    expect(PRESET_NAMES).toContain("bernoulli-setting-1a");
    expect(PRESET_NAMES.length).toBeGreaterThanOrEqual(5);
  });
});
