// Round-trip against the real Python labeling service: uvicorn is spawned on
// a scratch data directory and the UI's own client drives the documented API
// over localhost.  Skipped when the service cannot be started here.

import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { LabelClient } from "../src/api.js";

const PORT = 8731;
const BASE = `http://127.0.0.1:${PORT}`;

const SEED_SCRIPT = `
import sys
import numpy as np
from boneline.features import GradientReference, extract_features, features_to_csv
from boneline.fileio import write_image, write_text
from boneline.hough import segments_to_json

data_dir = sys.argv[1]
lines = np.array([[10, 10, 30, 12], [40, 40, 60, 42], [5, 18, 28, 18]])
img = np.zeros((64, 128), dtype=np.uint8)
img[20:40, 30:90] = 200
write_image(data_dir + "/images/demo.png", img)
write_text(data_dir + "/lines/demo.json", segments_to_json(lines))
feats = extract_features(lines, GradientReference(0.0), ["leg"] * 3)
write_text(data_dir + "/features/demo.csv", features_to_csv(feats, ["demo"] * 3, range(3)))
`;

function pythonReady(): boolean {
  const probe = spawnSync("python3", ["-c", "import boneline, uvicorn"], { timeout: 20000 });
  return probe.status === 0;
}

async function waitForServer(): Promise<boolean> {
  for (let i = 0; i < 50; i++) {
    try {
      const resp = await fetch(`${BASE}/images`);
      if (resp.ok) return true;
    } catch {
      await new Promise((r) => setTimeout(r, 200));
    }
  }
  return false;
}

const available = pythonReady();

describe.skipIf(!available)("against the real service", () => {
  let proc: ChildProcess;
  let dataDir: string;

  beforeAll(async () => {
    dataDir = mkdtempSync(join(tmpdir(), "boneline-ui-"));
    const seed = spawnSync("python3", ["-c", SEED_SCRIPT, dataDir], { timeout: 60000 });
    expect(seed.status).toBe(0);
    proc = spawn("python3", ["-m", "boneline.cli", "label-serve",
                             "--data-dir", dataDir, "--port", String(PORT)],
                 { stdio: "ignore" });
    expect(await waitForServer()).toBe(true);
  }, 60000);

  afterAll(() => {
    proc?.kill();
    rmSync(dataDir, { recursive: true, force: true });
  });

  it("performs the full region/deselect/export round trip", async () => {
    const client = new LabelClient(BASE);
    const images = await client.listImages();
    expect(images[0]).toMatchObject({ id: "demo", line_count: 3 });

    const lines = await client.fetchLines("demo");
    expect(lines[0]).toEqual([10, 10, 30, 12]);

    // rectangle over line 0's start point only
    let labels = await client.submitRegion("demo", { x: 8, y: 8, width: 6, height: 6 });
    expect(labels["0"]).toBe("fracture");
    expect(labels["1"]).toBe("non-fracture");
    expect(labels["2"]).toBe("non-fracture");

    labels = await client.deselect("demo", 0);
    expect(labels["0"]).toBe("non-fracture");

    const csv = await client.exportCsv();
    const targets = csv.trim().split(/\r?\n/).slice(1).map((row) => row.split(",").at(-1));
    expect(targets).toEqual(["-1", "-1", "-1"]);
  }, 30000);
});
