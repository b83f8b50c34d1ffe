/**
 * Live round trip against a running service: submitting the
 * gamma-setting-1a preset through the UI client must produce the same
 * recommendation as the command-line tool for the same seed.
 *
 * Skipped unless BAYESPOWER_URL points at a running service (then the
 * CLI is invoked in-process via the installed console script).
 */

import { execFileSync } from "node:child_process";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { PRESETS } from "../src/presets.js";

const baseUrl = process.env.BAYESPOWER_URL ?? "";

describe.skipIf(!baseUrl)("UI round trip against a live service", () => {
  it(
    "matches the CLI recommendation for the gamma-setting-1a preset",
    { timeout: 120_000 },
    async () => {
      const presetPath = join(__dirname, "..", "..", "presets", "gamma-setting-1a.json");
      const cliOut = execFileSync("bayespower", ["curve", "--spec", presetPath], {
        encoding: "utf-8",
      });
      const cliRec = JSON.parse(cliOut.trim().split("\n").pop()!).recommendation as number;

      const client = new ApiClient({ baseUrl, pollMs: 250 });
      const sessionId = await client.submitDesign(PRESETS["gamma-setting-1a"]);
      const done = await client.waitForResult(sessionId);
      expect(done.status).toBe("done");
      expect(done.result?.recommendation).toBe(cliRec);
    },
  );
});
