import type { AddressInfo } from "node:net";
import { afterEach, describe, expect, it } from "vitest";

import { buildApp, type AppOptions } from "../src/app";
import { hashModel, type EmbedModel } from "../src/model";

interface RunningApp {
  url: string;
  close: () => Promise<void>;
}

const running: RunningApp[] = [];

async function startApp(
  modelPromise: Promise<EmbedModel>,
  options: AppOptions = {},
): Promise<RunningApp> {
  const app = buildApp(modelPromise, options);
  const server = app.listen(0, "127.0.0.1");
  await new Promise<void>((resolve) => server.once("listening", resolve));
  const { port } = server.address() as AddressInfo;
  const handle = {
    url: `http://127.0.0.1:${port}`,
    close: () => new Promise<void>((resolve) => server.close(() => resolve())),
  };
  running.push(handle);
  return handle;
}

afterEach(async () => {
  while (running.length > 0) {
    await running.pop()!.close();
  }
});

async function get(url: string, path: string): Promise<{ status: number; json: any }> {
  const res = await fetch(`${url}${path}`);
  return { status: res.status, json: await res.json() };
}

async function postEmbed(url: string, body: unknown): Promise<{ status: number; json: any }> {
  const res = await fetch(`${url}/embed`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
  return { status: res.status, json: await res.json() };
}

async function postRaw(url: string, raw: string): Promise<{ status: number; json: any }> {
  const res = await fetch(`${url}/embed`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: raw,
  });
  return { status: res.status, json: await res.json() };
}

async function waitHealthy(url: string): Promise<any> {
  for (let attempt = 0; attempt < 100; attempt += 1) {
    const { status, json } = await get(url, "/health");
    if (status === 200) {
      return json;
    }
    await new Promise((resolve) => setTimeout(resolve, 10));
  }
  throw new Error(`service at ${url} never became healthy`);
}

function l2(row: number[]): number {
  return Math.sqrt(row.reduce((acc, value) => acc + value * value, 0));
}

describe("GET /health", () => {
  it("reports the model name, dimension, and ok status once loaded", async () => {
    const { url } = await startApp(Promise.resolve(hashModel(32)));
    const body = await waitHealthy(url);
    expect(body).toEqual({ model: "hash-3gram", dim: 32, status: "ok" });
  });

  it("returns 503 while the model is still loading", async () => {
    const never = new Promise<EmbedModel>(() => {});
    const { url } = await startApp(never);
    const { status, json } = await get(url, "/health");
    expect(status).toBe(503);
    expect(json.error).toMatch(/loading/);
  });

  it("returns 503 with the load error after a failed load", async () => {
    const { url } = await startApp(Promise.reject(new Error("weights not found")));
    // Give the rejection handler a tick to record the failure.
    await new Promise((resolve) => setTimeout(resolve, 20));
    const { status, json } = await get(url, "/health");
    expect(status).toBe(503);
    expect(json.error).toMatch(/weights not found/);
  });
});

describe("POST /embed", () => {
  it("returns one unit vector per text, in request order", async () => {
    const { url } = await startApp(Promise.resolve(hashModel(24)));
    await waitHealthy(url);
    const { status, json } = await postEmbed(url, { texts: ["offer", "product"] });
    expect(status).toBe(200);
    expect(json.dim).toBe(24);
    expect(json.vectors).toHaveLength(2);
    for (const row of json.vectors) {
      expect(row).toHaveLength(24);
      expect(Math.abs(l2(row) - 1)).toBeLessThan(1e-4);
    }
    const swapped = await postEmbed(url, { texts: ["product", "offer"] });
    expect(swapped.json.vectors[0]).toEqual(json.vectors[1]);
    expect(swapped.json.vectors[1]).toEqual(json.vectors[0]);
  });

  it("embeds duplicate texts identically within one batch", async () => {
    const { url } = await startApp(Promise.resolve(hashModel(16)));
    await waitHealthy(url);
    const { json } = await postEmbed(url, { texts: ["museum", "museum"] });
    expect(json.vectors[0]).toEqual(json.vectors[1]);
  });

  it("is batch transparent: one request equals the concatenation of two", async () => {
    const { url } = await startApp(Promise.resolve(hashModel(16)));
    await waitHealthy(url);
    const texts = ["a offer", "b product", "c service", "d museum"];
    const whole = await postEmbed(url, { texts });
    const first = await postEmbed(url, { texts: texts.slice(0, 2) });
    const second = await postEmbed(url, { texts: texts.slice(2) });
    expect(whole.json.vectors).toEqual([...first.json.vectors, ...second.json.vectors]);
  });

  it("keeps /health dim equal to /embed dim", async () => {
    const { url } = await startApp(Promise.resolve(hashModel(48)));
    const health = await waitHealthy(url);
    const { json } = await postEmbed(url, { texts: ["check"] });
    expect(json.dim).toBe(health.dim);
    expect(json.vectors[0]).toHaveLength(health.dim);
  });

  it("rejects malformed JSON with 400", async () => {
    const { url } = await startApp(Promise.resolve(hashModel(16)));
    await waitHealthy(url);
    const { status, json } = await postRaw(url, "{not json");
    expect(status).toBe(400);
    expect(json.error).toMatch(/JSON/);
  });

  it("rejects bodies without a texts array with 400", async () => {
    const { url } = await startApp(Promise.resolve(hashModel(16)));
    await waitHealthy(url);
    for (const body of [{}, { texts: "hello" }, { texts: 7 }, { wrong: ["x"] }]) {
      const { status } = await postEmbed(url, body);
      expect(status).toBe(400);
    }
  });

  it("rejects empty batches and empty or non-string entries with 400", async () => {
    const { url } = await startApp(Promise.resolve(hashModel(16)));
    await waitHealthy(url);
    const emptyBatch = await postEmbed(url, { texts: [] });
    expect(emptyBatch.status).toBe(400);
    expect(emptyBatch.json.error).toMatch(/at least one/);
    const emptyText = await postEmbed(url, { texts: ["ok", ""] });
    expect(emptyText.status).toBe(400);
    expect(emptyText.json.error).toMatch(/non-empty/);
    const numberEntry = await postEmbed(url, { texts: ["ok", 5] });
    expect(numberEntry.status).toBe(400);
  });

  it("rejects batches over the configured limit with 413", async () => {
    const { url } = await startApp(Promise.resolve(hashModel(16)), { maxBatch: 3 });
    await waitHealthy(url);
    const atLimit = await postEmbed(url, { texts: ["a1", "b2", "c3"] });
    expect(atLimit.status).toBe(200);
    const overLimit = await postEmbed(url, { texts: ["a1", "b2", "c3", "d4"] });
    expect(overLimit.status).toBe(413);
    expect(overLimit.json.error).toMatch(/limit of 3/);
  });

  it("returns 503 before the model has loaded", async () => {
    const never = new Promise<EmbedModel>(() => {});
    const { url } = await startApp(never);
    const { status, json } = await postEmbed(url, { texts: ["hello"] });
    expect(status).toBe(503);
    expect(json.error).toMatch(/loading/);
  });

  it("answers concurrent requests independently and identically", async () => {
    const { url } = await startApp(Promise.resolve(hashModel(16)));
    await waitHealthy(url);
    const responses = await Promise.all(
      Array.from({ length: 8 }, () => postEmbed(url, { texts: ["parallel probe"] })),
    );
    for (const response of responses) {
      expect(response.status).toBe(200);
      expect(response.json.vectors).toEqual(responses[0].json.vectors);
    }
  });
});
