import { buildApp } from "./app";
import { loadModel } from "./model";

function parseLimit(raw: string | undefined, fallback: number): number {
  if (raw === undefined || raw === "") {
    return fallback;
  }
  const value = Number(raw);
  if (!Number.isInteger(value) || value <= 0) {
    throw new Error(`EMBED_MAX_BATCH must be a positive integer, got ${JSON.stringify(raw)}`);
  }
  return value;
}

const port = Number(process.env.PORT ?? 8080);
const host = process.env.HOST ?? "127.0.0.1";
const maxBatch = parseLimit(process.env.EMBED_MAX_BATCH, 256);

const app = buildApp(loadModel(), { maxBatch });
const server = app.listen(port, host, () => {
  const address = server.address();
  const boundPort = typeof address === "object" && address !== null ? address.port : port;
  // PORT=0 asks the OS for a free port, so report the one actually bound.
  console.log(`embed-service listening on http://${host}:${boundPort}`);
});
