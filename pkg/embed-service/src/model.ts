import { createHash } from "node:crypto";

/** A loaded embedding model: maps a batch of texts to unit-length vectors. */
export interface EmbedModel {
  readonly name: string;
  readonly dim: number;
  embed(texts: string[]): Promise<number[][]>;
}

/** Default encoder when EMBED_MODEL is unset; needs the optional transformer runtime. */
export const DEFAULT_MODEL = "sentence-transformers/LaBSE";

/** Name of the deterministic stub model used by CI and the engine's conformance suite. */
export const HASH_MODEL = "hash-3gram";

const TRANSFORMER_PACKAGE = "@xenova/transformers";

/** Lowercase and collapse all whitespace runs to single spaces. */
export function collapse(text: string): string {
  return text
    .toLowerCase()
    .split(/\s+/)
    .filter((part) => part.length > 0)
    .join(" ");
}

/**
 * Character trigrams over Unicode code points. Strings shorter than three
 * code points contribute themselves as a single gram so no input maps to
 * the zero vector.
 */
export function trigrams(collapsed: string): string[] {
  const points = Array.from(collapsed);
  if (points.length < 3) {
    return [collapsed];
  }
  const grams: string[] = [];
  for (let i = 0; i + 3 <= points.length; i += 1) {
    grams.push(points.slice(i, i + 3).join(""));
  }
  return grams;
}

/**
 * Deterministic hash embedder: each trigram is hashed with SHA-256 (salted
 * by the seed as an 8-byte big-endian integer) and the first 8 digest bytes,
 * read big-endian, pick a bucket modulo the dimension. Bucket counts are
 * then L2-normalized. The same construction is used by the matching engine's
 * built-in test provider, so both sides produce identical vectors.
 */
export function hashModel(dim: number, seed = 0): EmbedModel {
  if (!Number.isInteger(dim) || dim <= 0) {
    throw new Error(`dim must be a positive integer, got ${dim}`);
  }
  if (!Number.isInteger(seed)) {
    throw new Error(`seed must be an integer, got ${seed}`);
  }
  const seedBytes = Buffer.alloc(8);
  seedBytes.writeBigInt64BE(BigInt(seed));
  const bigDim = BigInt(dim);

  const embedOne = (text: string): number[] => {
    const counts = new Float64Array(dim);
    for (const gram of trigrams(collapse(text))) {
      const digest = createHash("sha256")
        .update(seedBytes)
        .update(Buffer.from(gram, "utf8"))
        .digest();
      const index = Number(digest.readBigUInt64BE(0) % bigDim);
      counts[index] += 1;
    }
    let sumSquares = 0;
    for (const value of counts) {
      sumSquares += value * value;
    }
    const norm = Math.sqrt(sumSquares);
    return Array.from(counts, (value) => value / norm);
  };

  return {
    name: HASH_MODEL,
    dim,
    embed: async (texts) => texts.map(embedOne),
  };
}

function parsePositiveInt(raw: string | undefined, fallback: number, label: string): number {
  if (raw === undefined || raw === "") {
    return fallback;
  }
  const value = Number(raw);
  if (!Number.isInteger(value) || value <= 0) {
    throw new Error(`${label} must be a positive integer, got ${JSON.stringify(raw)}`);
  }
  return value;
}

function parseIntWithDefault(raw: string | undefined, fallback: number, label: string): number {
  if (raw === undefined || raw === "") {
    return fallback;
  }
  const value = Number(raw);
  if (!Number.isInteger(value)) {
    throw new Error(`${label} must be an integer, got ${JSON.stringify(raw)}`);
  }
  return value;
}

function l2Normalize(row: number[]): number[] {
  let sumSquares = 0;
  for (const value of row) {
    sumSquares += value * value;
  }
  const norm = Math.sqrt(sumSquares);
  if (norm === 0) {
    throw new Error("encoder produced a zero vector");
  }
  return row.map((value) => value / norm);
}

/**
 * Wrap a real multilingual sentence encoder behind the same interface as the
 * stub. The transformer runtime is an optional dependency: when it is not
 * installed (or model weights cannot be fetched) this rejects with a clear
 * message and the service stays in its 503 "model not loaded" state.
 */
async function loadTransformerModel(name: string): Promise<EmbedModel> {
  let pipeline: (task: string, model: string) => Promise<any>;
  try {
    ({ pipeline } = await import(TRANSFORMER_PACKAGE));
  } catch (err) {
    const reason = err instanceof Error ? err.message : String(err);
    throw new Error(
      `model "${name}" requires the optional ${TRANSFORMER_PACKAGE} package ` +
        `(npm install ${TRANSFORMER_PACKAGE}): ${reason}`,
    );
  }
  const extractor = await pipeline("feature-extraction", name);
  const encode = async (texts: string[]): Promise<number[][]> => {
    const output = await extractor(texts, { pooling: "mean", normalize: true });
    const rows: number[][] = output.tolist();
    // Renormalize defensively; some pooling configurations return vectors
    // that are only approximately unit length.
    return rows.map(l2Normalize);
  };
  const probe = await encode(["probe"]);
  const dim = probe[0].length;
  return { name, dim, embed: encode };
}

/**
 * Pick and load the model named by EMBED_MODEL. "hash-3gram" selects the
 * deterministic stub (EMBED_DIM, default 256; EMBED_SEED, default 0); any
 * other value is treated as a sentence-encoder model id for the optional
 * transformer runtime. Unset selects the default multilingual encoder.
 */
export async function loadModel(env: NodeJS.ProcessEnv = process.env): Promise<EmbedModel> {
  const name = env.EMBED_MODEL ?? DEFAULT_MODEL;
  if (name === HASH_MODEL) {
    const dim = parsePositiveInt(env.EMBED_DIM, 256, "EMBED_DIM");
    const seed = parseIntWithDefault(env.EMBED_SEED, 0, "EMBED_SEED");
    return hashModel(dim, seed);
  }
  return loadTransformerModel(name);
}
