import express, { type Express, type NextFunction, type Request, type Response } from "express";
import { z } from "zod";

import type { EmbedModel } from "./model";

export interface AppOptions {
  /** Largest accepted batch; requests with more texts get 413. */
  maxBatch?: number;
  /** Byte cap for request bodies, passed through to the JSON parser. */
  bodyLimit?: string;
}

export const DEFAULT_MAX_BATCH = 256;

const requestSchema = z.object({
  texts: z
    .array(z.string().min(1, "texts entries must be non-empty strings"))
    .min(1, "texts must contain at least one entry"),
});

function firstIssue(error: z.ZodError): string {
  const issue = error.issues[0];
  const path = issue.path.length > 0 ? `${issue.path.join(".")}: ` : "";
  return `${path}${issue.message}`;
}

/**
 * Build the service around a model that may still be loading. Requests that
 * arrive before the promise settles (or after it rejects) get 503 with the
 * load error, matching the health endpoint, so clients can retry.
 */
export function buildApp(modelPromise: Promise<EmbedModel>, options: AppOptions = {}): Express {
  const maxBatch = options.maxBatch ?? DEFAULT_MAX_BATCH;
  const state: { model: EmbedModel | null; loadError: string | null } = {
    model: null,
    loadError: null,
  };
  modelPromise.then(
    (model) => {
      state.model = model;
      console.log(`model ready: ${model.name} (dim=${model.dim})`);
    },
    (err) => {
      state.loadError = err instanceof Error ? err.message : String(err);
      console.error(`model failed to load: ${state.loadError}`);
    },
  );

  // Inference runs one batch at a time; each request chains onto the tail of
  // this promise so concurrent requests never interleave inside the model.
  let inference: Promise<unknown> = Promise.resolve();

  const app = express();
  app.use(express.json({ limit: options.bodyLimit ?? "8mb" }));

  app.get("/health", (_req: Request, res: Response) => {
    if (state.model === null) {
      res.status(503).json({ error: state.loadError ?? "model is still loading" });
      return;
    }
    res.json({ model: state.model.name, dim: state.model.dim, status: "ok" });
  });

  app.post("/embed", (req: Request, res: Response, next: NextFunction) => {
    const model = state.model;
    if (model === null) {
      res.status(503).json({ error: state.loadError ?? "model is still loading" });
      return;
    }
    const parsed = requestSchema.safeParse(req.body);
    if (!parsed.success) {
      res.status(400).json({ error: firstIssue(parsed.error) });
      return;
    }
    const texts = parsed.data.texts;
    if (texts.length > maxBatch) {
      res.status(413).json({
        error: `batch of ${texts.length} texts exceeds the limit of ${maxBatch}`,
      });
      return;
    }
    const run = inference.then(() => model.embed(texts));
    inference = run.catch(() => undefined);
    run
      .then((vectors) => res.json({ dim: model.dim, vectors }))
      .catch(next);
  });

  // Body-parser failures and anything escaping a handler end up here; the
  // client always sees a JSON body with an "error" field.
  app.use((err: any, _req: Request, res: Response, _next: NextFunction) => {
    if (err?.type === "entity.parse.failed") {
      res.status(400).json({ error: "request body is not valid JSON" });
      return;
    }
    if (err?.type === "entity.too.large") {
      res.status(413).json({ error: "request body exceeds the size limit" });
      return;
    }
    const message = err instanceof Error ? err.message : String(err);
    console.error(`request failed: ${message}`);
    res.status(500).json({ error: "internal error" });
  });

  return app;
}
