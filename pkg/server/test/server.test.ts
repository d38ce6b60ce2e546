import type { AddressInfo } from "node:net";
import type { Server } from "node:http";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import {
  PROMPT_PREFIX,
  PROMPT_SUFFIX,
  clampCandidates,
  extractMethod,
  normalize,
} from "../src/protocol";
import { StubBackend, defaultFixturesPath } from "../src/stub";
import { createApp } from "../src/server";

const UUID_METHOD = `public String create() {
    String token = UUID.randomUUID().toString();
    return token;
}
`;

function promptFor(method: string): string {
  return `${PROMPT_PREFIX}${method}${PROMPT_SUFFIX}`;
}

describe("prompt parsing", () => {
  it("extracts the method between prefix and suffix", () => {
    expect(extractMethod(promptFor("void f() {}"))).toBe("void f() {}");
  });

  it("is lenient about missing template pieces", () => {
    expect(extractMethod("void f() {}")).toBe("void f() {}");
    expect(extractMethod(PROMPT_PREFIX + "void f() {}")).toBe("void f() {}");
  });

  it("uses the last suffix occurrence so method bodies may contain commas", () => {
    const method = "void f(int a, int b) {}";
    expect(extractMethod(promptFor(method))).toBe(method);
  });
});

describe("clamping", () => {
  it("orders scores non-increasing and truncates to beam size", () => {
    const out = clampCandidates(
      [
        { text: "a", score: 0.2 },
        { text: "b", score: 0.9 },
        { text: "c", score: 0.5 },
      ],
      2,
      512,
    );
    expect(out.map((c) => c.score)).toEqual([0.9, 0.5]);
  });

  it("drops candidates over the length cap", () => {
    const out = clampCandidates([{ text: "one two three four", score: 1 }], 5, 3);
    expect(out).toEqual([]);
  });
});

describe("stub backend", () => {
  const stub = StubBackend.fromFile(defaultFixturesPath());

  it("loads the canned fixtures", () => {
    expect(stub.size()).toBeGreaterThanOrEqual(6);
  });

  it("matches methods up to whitespace", () => {
    const squashed = UUID_METHOD.replace(/\s+/g, " ");
    expect(normalize(squashed)).toBe(normalize(UUID_METHOD));
    const hits = stub.generate(squashed);
    expect(hits.length).toBeGreaterThan(0);
    expect(hits[0].text).toContain("return UUID.randomUUID().toString();");
  });

  it("yields zero candidates for unknown methods", () => {
    expect(stub.generate("void unknown() {}")).toEqual([]);
  });
});

describe("http endpoint", () => {
  let server: Server;
  let base: string;

  beforeAll(async () => {
    const { app, markReady } = createApp({ mode: "stub" });
    markReady();
    await new Promise<void>((resolve) => {
      server = app.listen(0, "127.0.0.1", () => resolve());
    });
    const { port } = server.address() as AddressInfo;
    base = `http://127.0.0.1:${port}`;
  });

  afterAll(() => {
    server.close();
  });

  async function generate(body: unknown): Promise<Response> {
    return fetch(`${base}/v1/generate`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: typeof body === "string" ? body : JSON.stringify(body),
    });
  }

  it("reports healthy after startup", async () => {
    const res = await fetch(`${base}/healthz`);
    expect(res.status).toBe(200);
    expect(await res.json()).toMatchObject({ status: "ok", mode: "stub" });
  });

  it("answers the worked-example prompt with its simplified body first", async () => {
    const res = await generate({
      prompt: promptFor(UUID_METHOD),
      beam_size: 10,
      max_len: 512,
    });
    expect(res.status).toBe(200);
    const body = (await res.json()) as { candidates: { text: string; score: number }[] };
    expect(body.candidates.length).toBeGreaterThan(0);
    expect(body.candidates[0].text).toContain("return UUID.randomUUID().toString();");
    const scores = body.candidates.map((c) => c.score);
    expect([...scores].sort((a, b) => b - a)).toEqual(scores);
  });

  it("respects beam_size", async () => {
    for (const beam of [1, 2, 3]) {
      const res = await generate({
        prompt: promptFor(UUID_METHOD),
        beam_size: beam,
        max_len: 512,
      });
      const body = (await res.json()) as { candidates: unknown[] };
      expect(body.candidates.length).toBeLessThanOrEqual(beam);
    }
  });

  it("is deterministic across repeated requests", async () => {
    const payload = { prompt: promptFor(UUID_METHOD), beam_size: 10, max_len: 512 };
    const bodies: string[] = [];
    for (let i = 0; i < 3; i++) {
      const res = await generate(payload);
      bodies.push(await res.text());
    }
    expect(bodies[0]).toBe(bodies[1]);
    expect(bodies[1]).toBe(bodies[2]);
  });

  it("returns schema-valid empty candidates for unknown prompts", async () => {
    const res = await generate({
      prompt: promptFor("void unknown() {}"),
      beam_size: 5,
      max_len: 512,
    });
    expect(res.status).toBe(200);
    expect(await res.json()).toEqual({ candidates: [] });
  });

  it("rejects malformed JSON with 400", async () => {
    const res = await generate("{not json");
    expect(res.status).toBe(400);
  });

  it("rejects schema violations with 400", async () => {
    const res = await generate({ prompt: "x", beam_size: 0, max_len: 512 });
    expect(res.status).toBe(400);
    const missing = await generate({ beam_size: 3 });
    expect(missing.status).toBe(400);
  });

  it("returns 503 before the app is marked ready", async () => {
    const { app } = createApp({ mode: "stub" });
    const pending = await new Promise<Server>((resolve) => {
      const s = app.listen(0, "127.0.0.1", () => resolve(s));
    });
    const { port } = pending.address() as AddressInfo;
    const res = await fetch(`http://127.0.0.1:${port}/healthz`);
    expect(res.status).toBe(503);
    pending.close();
  });
});

describe("checkpoint mode", () => {
  it("wraps an external command and clamps its output", async () => {
    const script =
      "const fs=require('fs');" +
      "JSON.parse(fs.readFileSync(0,'utf-8'));" +
      "console.log(JSON.stringify({candidates:[" +
      "{text:'void a() {}',score:0.2},{text:'void b() {}',score:0.8}]}))";
    const { app, markReady } = createApp({
      mode: "checkpoint",
      checkpointCmd: ["node", "-e", script],
    });
    markReady();
    const server = await new Promise<Server>((resolve) => {
      const s = app.listen(0, "127.0.0.1", () => resolve(s));
    });
    const { port } = server.address() as AddressInfo;
    const res = await fetch(`http://127.0.0.1:${port}/v1/generate`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ prompt: "x", beam_size: 1, max_len: 512 }),
    });
    const body = (await res.json()) as { candidates: { text: string; score: number }[] };
    expect(body.candidates).toEqual([{ text: "void b() {}", score: 0.8 }]);
    server.close();
  });
});
