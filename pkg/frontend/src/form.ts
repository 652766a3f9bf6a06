/** Schema-driven experiment configuration form model.
 *
 * The form is generated from the service's published config schema; the
 * client-side checks mirror the server's validation so most mistakes are
 * caught inline before submission, and server 422 errors map back onto the
 * same fields.
 */

import { WEIGHT_LEVELS, type FieldError, type WeightLevel } from "./types.js";

export interface FormField {
  path: string;
  schema: Record<string, unknown>;
  required: boolean;
}

export interface FormModel {
  fields: FormField[];
  weightLevels: readonly WeightLevel[];
}

interface JSONSchema {
  properties?: Record<string, JSONSchema & Record<string, unknown>>;
  required?: string[];
  [key: string]: unknown;
}

export function buildFormModel(schema: JSONSchema): FormModel {
  const fields: FormField[] = [];
  const walk = (node: JSONSchema, prefix: string, required: string[]) => {
    for (const [name, child] of Object.entries(node.properties ?? {})) {
      const path = prefix ? `${prefix}.${name}` : name;
      fields.push({ path, schema: child, required: required.includes(name) });
      if (child.properties) walk(child, path, (child.required as string[]) ?? []);
    }
  };
  walk(schema, "", schema.required ?? []);
  return { fields, weightLevels: WEIGHT_LEVELS };
}

/** Default submission payload: schema defaults plus all-Medium weights. */
export function defaultPayload(schema: JSONSchema): Record<string, unknown> {
  const metricProps = schema.properties?.weights?.properties ?? {};
  const weights = Object.fromEntries(
    Object.keys(metricProps).map((metric) => [metric, "Medium"]),
  );
  return {
    datasets: ["naturalquestions"],
    weights,
  };
}

export interface ConfigPayload {
  datasets?: unknown[];
  sample_size?: number | string;
  grid?: {
    chunk_sizes?: number[];
    chunk_overlaps?: number[];
    [key: string]: unknown;
  };
  weights?: Record<string, string>;
  [key: string]: unknown;
}

/** Inline checks mirroring the server's validation rules. */
export function validatePayload(payload: ConfigPayload): FieldError[] {
  const errors: FieldError[] = [];
  if (!payload.datasets || payload.datasets.length === 0) {
    errors.push({ field: "datasets", message: "select at least one dataset" });
  }
  const size = payload.sample_size;
  if (size !== undefined && size !== "all" && (!Number.isInteger(size) || (size as number) < 1)) {
    errors.push({
      field: "sample_size",
      message: 'sample size must be a positive integer or "all"',
    });
  }
  const sizes = payload.grid?.chunk_sizes;
  const overlaps = payload.grid?.chunk_overlaps;
  if (sizes && overlaps) {
    const minSize = Math.min(...sizes);
    const maxOverlap = Math.max(...overlaps);
    if (maxOverlap >= minSize) {
      errors.push({
        field: "grid.chunk_overlaps",
        message: `every overlap must be smaller than every chunk size (${maxOverlap} >= ${minSize})`,
      });
    }
  }
  for (const [metric, level] of Object.entries(payload.weights ?? {})) {
    if (!(WEIGHT_LEVELS as readonly string[]).includes(level)) {
      errors.push({
        field: `weights.${metric}`,
        message: `unknown weight level ${level}; expected one of ${WEIGHT_LEVELS.join(", ")}`,
      });
    }
  }
  return errors;
}

/** Map a server 422 body onto per-field inline messages. */
export function applyServerErrors(errors: FieldError[]): Record<string, string> {
  const byField: Record<string, string> = {};
  for (const error of errors) {
    byField[error.field] ??= error.message;
  }
  return byField;
}
