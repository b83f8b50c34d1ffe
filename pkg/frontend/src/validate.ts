/**
 * Client-side validation of design-spec form state against the JSON
 * schema served by the backend at GET /schema.
 *
 * Implements the schema subset the served document actually uses:
 * type / enum / const / required / properties / additionalProperties /
 * items / minItems / maxItems / oneOf and the four numeric bounds.
 * Returns dotted-path error messages; an empty list means valid.
 */

export interface SchemaError {
  path: string;
  message: string;
}

type Schema = Record<string, any>;

function typeOf(value: unknown): string {
  if (value === null) return "null";
  if (Array.isArray(value)) return "array";
  if (typeof value === "number" && Number.isInteger(value)) return "integer";
  return typeof value;
}

function typeMatches(expected: string, value: unknown): boolean {
  const actual = typeOf(value);
  if (expected === "number") return actual === "number" || actual === "integer";
  return actual === expected;
}

function resolveRef(ref: string, root: Schema): Schema {
  // local refs only: "#/$defs/name"
  const parts = ref.replace(/^#\//, "").split("/");
  let node: any = root;
  for (const part of parts) node = node?.[part];
  if (!node) throw new Error(`unresolvable $ref: ${ref}`);
  return node;
}

export function validateAgainstSchema(
  value: unknown,
  schema: Schema,
  root?: Schema,
  path = "",
): SchemaError[] {
  const top = root ?? schema;
  if (schema.$ref) {
    return validateAgainstSchema(value, resolveRef(schema.$ref, top), top, path);
  }
  const errors: SchemaError[] = [];
  const here = path || "(root)";

  if (schema.oneOf) {
    const branches: SchemaError[][] = schema.oneOf.map((branch: Schema) =>
      validateAgainstSchema(value, branch, top, path),
    );
    const okCount = branches.filter((b) => b.length === 0).length;
    if (okCount !== 1) {
      const detail = okCount === 0 ? "matches no allowed variant" : "matches several variants";
      errors.push({ path: here, message: detail });
    }
    return errors;
  }

  if (schema.const !== undefined && value !== schema.const) {
    errors.push({ path: here, message: `must equal ${JSON.stringify(schema.const)}` });
    return errors;
  }
  if (schema.enum && !schema.enum.includes(value)) {
    errors.push({ path: here, message: `must be one of ${schema.enum.join(", ")}` });
    return errors;
  }

  if (schema.type) {
    const types: string[] = Array.isArray(schema.type) ? schema.type : [schema.type];
    if (!types.some((t) => typeMatches(t, value))) {
      errors.push({ path: here, message: `expected ${types.join(" or ")}, got ${typeOf(value)}` });
      return errors;
    }
  }

  if (typeof value === "number") {
    if (schema.minimum !== undefined && value < schema.minimum)
      errors.push({ path: here, message: `must be >= ${schema.minimum}` });
    if (schema.exclusiveMinimum !== undefined && value <= schema.exclusiveMinimum)
      errors.push({ path: here, message: `must be > ${schema.exclusiveMinimum}` });
    if (schema.maximum !== undefined && value > schema.maximum)
      errors.push({ path: here, message: `must be <= ${schema.maximum}` });
    if (schema.exclusiveMaximum !== undefined && value >= schema.exclusiveMaximum)
      errors.push({ path: here, message: `must be < ${schema.exclusiveMaximum}` });
  }

  if (Array.isArray(value)) {
    if (schema.minItems !== undefined && value.length < schema.minItems)
      errors.push({ path: here, message: `needs at least ${schema.minItems} items` });
    if (schema.maxItems !== undefined && value.length > schema.maxItems)
      errors.push({ path: here, message: `allows at most ${schema.maxItems} items` });
    if (schema.items) {
      value.forEach((item, i) => {
        errors.push(...validateAgainstSchema(item, schema.items, top, `${path}[${i}]`));
      });
    }
  }

  if (value !== null && typeof value === "object" && !Array.isArray(value)) {
    const obj = value as Record<string, unknown>;
    for (const req of schema.required ?? []) {
      if (!(req in obj)) errors.push({ path: here, message: `missing required field ${req}` });
    }
    const props: Record<string, Schema> = schema.properties ?? {};
    for (const [key, sub] of Object.entries(obj)) {
      if (key in props) {
        errors.push(
          ...validateAgainstSchema(sub, props[key], top, path ? `${path}.${key}` : key),
        );
      } else if (schema.additionalProperties === false) {
        errors.push({ path: here, message: `unknown field ${key}` });
      }
    }
  }

  return errors;
}
