/** Wire schema for the tracking service socket.
 *
 * One JSON object per message. Inbound frames are validated with zod before
 * anything touches the view model; unknown extra keys are tolerated so the
 * server can grow the protocol.
 */

import { z } from "zod";

export const PointSchema = z.tuple([z.number(), z.number()]);
export type Point = [number, number];

export const HelloFrameSchema = z.object({
  type: z.literal("hello"),
  t: z.number().int(),
  t_s: z.number().positive(),
  running: z.boolean(),
  speed: z.number().positive(),
  grid: z.object({
    rows: z.number().int().positive(),
    cols: z.number().int().positive(),
    bounds: z.tuple([z.number(), z.number(), z.number(), z.number()]),
  }),
  sensors: z.array(z.object({
    id: z.string(),
    altitude: z.number(),
    station: z.tuple([z.number(), z.number()]),
  })),
  operators: z.array(z.string()),
});
export type HelloFrame = z.infer<typeof HelloFrameSchema>;

export const ReliabilitySchema = z.object({
  alpha: z.number().positive(),
  beta: z.number().positive(),
  mean: z.number().min(0).max(1),
  q_s: z.number().min(0).max(1).optional(),
});
export type Reliability = z.infer<typeof ReliabilitySchema>;

export const AppliedSketchSchema = z.object({
  operator_id: z.string(),
  m: z.number().int().nonnegative(),
  vertices: z.array(PointSchema),
});
export type AppliedSketch = z.infer<typeof AppliedSketchSchema>;

export const StateFrameSchema = z.object({
  type: z.literal("state"),
  t: z.number().int(),
  // A slow client may have the heat field dropped by server backpressure.
  heat: z.array(z.number()).optional(),
  heat_rows: z.number().int().positive(),
  heat_cols: z.number().int().positive(),
  mmse: PointSchema,
  map: PointSchema,
  truth: PointSchema.optional(),
  rmse_running: z.number().nonnegative(),
  degenerate: z.boolean(),
  applied_sketches: z.array(AppliedSketchSchema),
  reliabilities: z.record(z.string(), ReliabilitySchema),
});
export type StateFrame = z.infer<typeof StateFrameSchema>;

export const AckFrameSchema = z.object({
  type: z.literal("ack"),
  operator_id: z.string(),
  m: z.number().int().nonnegative(),
  t_applied: z.number().int(),
  vertices: z.array(PointSchema),
});
export type AckFrame = z.infer<typeof AckFrameSchema>;

export const NackFrameSchema = z.object({
  type: z.literal("nack"),
  reason: z.string(),
});
export type NackFrame = z.infer<typeof NackFrameSchema>;

export const ControlFrameSchema = z.object({
  type: z.literal("control"),
  running: z.boolean(),
  speed: z.number().positive(),
});
export type ControlFrame = z.infer<typeof ControlFrameSchema>;

export const ServerFrameSchema = z.discriminatedUnion("type", [
  HelloFrameSchema,
  StateFrameSchema,
  AckFrameSchema,
  NackFrameSchema,
  ControlFrameSchema,
]);
export type ServerFrame = z.infer<typeof ServerFrameSchema>;

export class ProtocolError extends Error {}

/** Parse and validate one raw socket message. */
export function parseFrame(text: string): ServerFrame {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (exc) {
    throw new ProtocolError(`not JSON: ${(exc as Error).message}`);
  }
  const result = ServerFrameSchema.safeParse(raw);
  if (!result.success) {
    throw new ProtocolError(`bad frame: ${result.error.message}`);
  }
  return result.data;
}

/** Affine pixel-to-world resolution sent alongside px-frame sketches. */
export interface AffineTransform {
  a: [[number, number], [number, number]];
  b: [number, number];
}

export interface SketchMessage {
  type: "sketch";
  operator_id: string;
  frame: "px";
  vertices: Point[];
  transform: AffineTransform;
  t?: number;
}

export type ControlAction = "pause" | "resume" | "step" | "speed";

export interface ControlMessage {
  type: "control";
  action: ControlAction;
  factor?: number;
}

export type ClientMessage = SketchMessage | ControlMessage;
